"""Test Lambert W and the Lambert log exponential transition score."""
import math
import sys
from pathlib import Path

import numpy as np
from scipy.special import lambertw

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from pcdforge.engine import Tensor, grad_check
from pcdforge.errors import ContractViolation, DomainError
from pcdforge.losses import conditioning_error, lambert_w0, llets_params, llets_score
from pcdforge.losses.llets import BRANCH_POINT, MIN_CUTOFF

CUTOFFS = (MIN_CUTOFF + 0.01, 2.0, 4.7, 5.0, 10.0)


def test_lambert_known_values():
    print("Testing W0 at known points...")
    assert lambert_w0(0.0) == 0.0
    assert abs(lambert_w0(math.e) - 1.0) < 1e-14
    assert lambert_w0(BRANCH_POINT) == -1.0

    w = lambert_w0(-1.0 / 9.4)
    assert abs(w - (-0.1200)) < 5e-4
    assert abs(w * math.exp(w) + 1.0 / 9.4) < 1e-12
    print(f"✅ W0(-1/9.4) = {w:.6f}")


def test_lambert_residuals():
    print("\nTesting W0 residuals across the domain...")
    grid = np.concatenate([np.linspace(BRANCH_POINT, 0.0, 5000), np.linspace(0.0, 10.0, 5000)])
    for x in grid:
        w = lambert_w0(x)
        assert abs(w * math.exp(w) - x) <= 1e-12 * max(1.0, abs(x)), f"x = {x!r}"
    for x in np.linspace(-0.36, 10.0, 200):
        assert abs(lambert_w0(x) - lambertw(x).real) < 1e-10
    print("✅ Residuals below 1e-12")


def test_lambert_domain():
    print("\nTesting W0 outside its domain...")
    for x in (-0.5, float("nan")):
        try:
            lambert_w0(x)
            raise AssertionError(f"W0({x}) accepted")
        except DomainError:
            pass
    print("✅ Domain enforced")


def test_default_params():
    print("\nTesting the default cutoff a = 4.7...")
    params = llets_params(4.7)
    assert abs(params.eps_star - 0.01547) < 1e-4
    assert abs(params.sigma_L - 0.0316) < 1e-4
    score = llets_score(np.array([0.0, 0.1, params.eps_star, 1.0]), params).values
    assert score[0] == 1.0
    assert abs(score[1] - 0.48991) < 1e-5
    assert abs(score[2] - 0.8869) < 1e-3
    assert abs(score[2] - params.branch_score) < 1e-12
    assert abs(score[3]) < 1e-15
    print(f"✅ eps* = {params.eps_star:.5f}, sigma = {params.sigma_L:.5f}")


def test_minimum_cutoff():
    print("\nTesting the minimum cutoff a = e/2...")
    params = llets_params(MIN_CUTOFF)
    assert params.w == -1.0
    assert abs(params.eps_star - math.exp(-0.5)) < 1e-12
    try:
        llets_params(MIN_CUTOFF - 0.01)
        raise AssertionError("cutoff below e/2 accepted")
    except DomainError:
        pass
    print("✅ a = e/2 gives w = -1")


def test_continuity():
    """Value and slope agree at eps* from both sides."""
    print("\nTesting C1 continuity at the branch point...")
    for a in CUTOFFS:
        params = llets_params(a)
        log_value = -math.log(params.eps_star) / a
        gauss_value = math.exp(-params.eps_star ** 2 / (2.0 * params.sigma_L ** 2))
        assert abs(log_value - gauss_value) < 1e-9, a

        log_slope = -1.0 / (a * params.eps_star)
        gauss_slope = -(params.eps_star / params.sigma_L ** 2) * gauss_value
        assert abs(log_slope - gauss_slope) <= 1e-6 * abs(log_slope), a
    print("✅ C1 for every cutoff")


def test_monotone_and_bounded():
    print("\nTesting monotonicity and range...")
    grid = np.linspace(1e-4, 1.0, 10000)
    for a in CUTOFFS:
        values = llets_score(grid, llets_params(a)).values
        assert np.all(np.diff(values) < 0), a
        assert np.all((values >= 0.0) & (values <= 1.0)), a
    print("✅ Strictly decreasing in [0, 1]")


def test_steepest_at_branch_point():
    """For a >= sqrt(e) the steepest descent sits exactly at eps*."""
    print("\nTesting the steepest point...")
    for a in (2.0, 4.7, 5.0, 10.0):
        params = llets_params(a)
        grid = np.sort(np.append(np.linspace(1e-4, 1.0, 10000), params.eps_star))
        eps = Tensor(grid, requires_grad=True)
        llets_score(eps, params).sum().backward()
        steepest = int(np.argmax(np.abs(eps.grad)))
        assert grid[steepest] == params.eps_star, a

    eps = Tensor([1e-8], requires_grad=True)
    llets_score(eps, llets_params(4.7)).sum().backward()
    assert abs(eps.grad[0]) < 1e-4
    print("✅ Steepest at eps*")


def test_gradient():
    print("\nTesting score gradients...")
    params = llets_params(4.7)
    for seed in range(5):
        rng = np.random.default_rng(seed)
        eps = Tensor(np.concatenate([rng.uniform(0.001, 0.014, 3), rng.uniform(0.02, 0.9, 3)]))
        report = grad_check(lambda e: llets_score(e, params).sum(), eps, step=1e-7)
        assert report.passed, f"rel error {report.max_rel_error:.2e}"
    print("✅ Gradients")


def test_conditioning_error():
    print("\nTesting conditioning error...")
    eps = conditioning_error(np.array([0.2, 1.5, -0.4]), np.array([0.5, 0.0, 0.9]))
    assert np.allclose(eps.values, [0.3, 1.0, 1.0])
    try:
        llets_score(np.array([-0.1]), llets_params())
        raise AssertionError("negative error accepted")
    except ContractViolation:
        pass
    print("✅ Conditioning error")


def main():
    """Run all tests."""
    print("=" * 50)
    print("LLETS Test")
    print("=" * 50)

    tests = [
        ("W0 known values", test_lambert_known_values),
        ("W0 residuals", test_lambert_residuals),
        ("W0 domain", test_lambert_domain),
        ("Default cutoff", test_default_params),
        ("Minimum cutoff", test_minimum_cutoff),
        ("Continuity", test_continuity),
        ("Monotone", test_monotone_and_bounded),
        ("Steepest point", test_steepest_at_branch_point),
        ("Gradient", test_gradient),
        ("Conditioning error", test_conditioning_error),
    ]

    results = []
    for name, test_func in tests:
        try:
            test_func()
            results.append(True)
        except AssertionError as e:
            print(f"❌ {name} failed: {e}")
            results.append(False)

    print("\n" + "=" * 50)
    print("Test Summary")
    print("=" * 50)
    for (name, _), passed in zip(tests, results):
        print(f"{'✅ PASS' if passed else '❌ FAIL'} - {name}")

    if not all(results):
        print("\n❌ Some tests failed.")
        sys.exit(1)
    print("\n🎉 All LLETS tests passed!")


if __name__ == "__main__":
    main()
