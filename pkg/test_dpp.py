"""Test the performance-conditioned DPP kernel and its loss."""
import itertools
import math
import sys
from pathlib import Path

import numpy as np

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from pcdforge.data import generate_dataset, normalized_quality
from pcdforge.engine import Tensor, grad_check, logdet_eigh
from pcdforge.errors import ContractViolation
from pcdforge.losses import (
    DPPBatchKernel,
    build_kernel,
    conditioning_error,
    llets_params,
    llets_score,
    logdet_psd,
    pcd_loss,
    rbf_kernel,
)


def det_cofactor(matrix: np.ndarray) -> float:
    """Laplace expansion along the first row; exact oracle for small matrices."""
    n = matrix.shape[0]
    if n == 0:
        return 1.0
    if n == 1:
        return float(matrix[0, 0])
    total = 0.0
    for j in range(n):
        minor = np.delete(np.delete(matrix, 0, axis=0), j, axis=1)
        total += (-1) ** j * matrix[0, j] * det_cofactor(minor)
    return total


def spread_batch(seed: int, n: int = 5) -> np.ndarray:
    return np.random.default_rng(seed).uniform(-2.0, 2.0, size=(n, 2))


def test_rbf_kernel():
    print("Testing RBF similarity...")
    same = rbf_kernel(np.zeros((3, 2))).values
    assert np.array_equal(same, np.ones((3, 3)))

    pair = rbf_kernel(np.array([[0.0, 0.0], [0.3, 0.4]])).values
    assert abs(pair[0, 1] - math.exp(-0.125)) < 1e-15
    assert np.array_equal(pair, pair.T)

    K = rbf_kernel(np.random.default_rng(0).uniform(-0.6, 0.6, size=(6, 2))).values
    assert np.linalg.eigvalsh(K).min() >= -1e-10

    try:
        rbf_kernel(np.zeros((0, 2)))
        raise AssertionError("empty batch accepted")
    except ContractViolation:
        pass
    print("✅ RBF similarity")


def test_kernel_structure():
    print("\nTesting quality-weighted kernel...")
    X = spread_batch(1, 4)
    ones = build_kernel(X, np.ones(4), gamma0=3.0, jitter=1e-6)
    assert np.allclose(ones.L.values, rbf_kernel(X).values + 1e-6 * np.eye(4), rtol=0, atol=1e-15)

    single = build_kernel(np.zeros((1, 2)), np.array([0.5]), gamma0=3.0, jitter=0.0)
    assert abs(single.L.values[0, 0] - 0.5 ** 6) < 1e-15

    q = np.array([0.2, 0.5, 0.9, 1.0])
    v = q ** 3.0
    L = build_kernel(X, q, gamma0=3.0, jitter=0.0).L.values
    assert np.allclose(L, rbf_kernel(X).values * np.outer(v, v), rtol=1e-12, atol=0)

    for bad in (np.array([0.2, 1.2, 0.5, 0.5]), np.array([0.2, -0.1, 0.5, 0.5]), np.ones(3)):
        try:
            build_kernel(X, bad, gamma0=3.0)
            raise AssertionError(f"bad quality {bad} accepted")
        except ContractViolation:
            pass
    print("✅ Kernel structure")


def test_logdet_identity_and_oracles():
    print("\nTesting log-determinant against oracles...")
    eye = DPPBatchKernel(L=Tensor(np.eye(4)), gamma0=0.0, bandwidth=1.0, jitter=0.0)
    assert abs(logdet_psd(eye).item()) < 1e-15

    for seed in range(20):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 6))
        X = spread_batch(seed, n)
        q = rng.uniform(0.3, 1.0, size=n)
        kernel = build_kernel(X, q, gamma0=1.0, jitter=1e-6)
        value = logdet_psd(kernel).item()
        assert abs(value - logdet_eigh(kernel.L.values)) < 1e-8
        assert abs(value - math.log(det_cofactor(kernel.L.values))) < 1e-8
    print("✅ logdet oracles")


def test_two_point_closed_form():
    print("\nTesting the two-sample closed form...")
    for d in (0.5, 1.0, 2.0, 3.0):
        X = np.array([[0.0, 0.0], [d, 0.0]])
        kernel = build_kernel(X, np.ones(2), gamma0=3.0, jitter=0.0)
        expected = math.log(1.0 - math.exp(-d * d))
        assert abs(logdet_psd(kernel).item() - expected) < 1e-10
    print("✅ log(1 - exp(-d^2))")


def test_subset_identities():
    """Principal minors factor over quality and sum to det(L + I)."""
    print("\nTesting DPP subset identities...")
    for seed in range(5):
        rng = np.random.default_rng(seed)
        X = spread_batch(seed, 5)
        q = rng.uniform(0.2, 1.0, size=5)
        v = q ** 2.0
        L = build_kernel(X, q, gamma0=2.0, jitter=0.0).L.values
        K = rbf_kernel(X).values

        total = 0.0
        for size in range(0, 6):
            for subset in itertools.combinations(range(5), size):
                index = list(subset)
                minor = det_cofactor(L[np.ix_(index, index)])
                expected = np.prod(v[index] ** 2) * det_cofactor(K[np.ix_(index, index)])
                assert abs(minor - expected) <= 1e-8 * max(abs(expected), 1e-300)
                total += minor
        assert abs(total - np.linalg.det(L + np.eye(5))) <= 1e-8 * total
    print("✅ Subset identities")


def test_pcd_loss_values():
    print("\nTesting PcD loss values...")
    single = build_kernel(np.zeros((1, 2)), np.ones(1), gamma0=3.0, jitter=0.0)
    assert pcd_loss(single).item() == 0.0

    duplicated = build_kernel(np.zeros((2, 2)), np.ones(2), gamma0=3.0, jitter=1e-6)
    loss = pcd_loss(duplicated).item()
    assert loss > 5.0
    assert abs(loss - (-math.log(2e-6 + 1e-12) / 2.0)) < 1e-6

    previous = math.inf
    for d in np.linspace(0.1, 3.0, 30):
        X = np.array([[0.0, 0.0], [d, 0.0]])
        value = pcd_loss(build_kernel(X, np.ones(2), gamma0=3.0)).item()
        assert value < previous
        previous = value
    print("✅ Loss falls as samples spread")


def test_quality_monotonicity():
    print("\nTesting loss against quality...")
    for seed in range(10):
        rng = np.random.default_rng(seed)
        X = spread_batch(seed, 5)
        q = rng.uniform(0.2, 0.9, size=5)
        base = pcd_loss(build_kernel(X, q, gamma0=3.0, jitter=0.0)).item()
        better = q.copy()
        better[int(rng.integers(0, 5))] += 0.05
        assert pcd_loss(build_kernel(X, better, gamma0=3.0, jitter=0.0)).item() < base
    print("✅ Higher quality lowers the loss")


def test_gradients():
    print("\nTesting PcD loss gradients...")
    for seed in range(5):
        rng = np.random.default_rng(seed)
        X = spread_batch(seed, 4)
        q = rng.uniform(0.3, 0.9, size=4)

        report = grad_check(lambda x: pcd_loss(build_kernel(x, q, gamma0=3.0)), Tensor(X))
        assert report.passed, f"designs: rel error {report.max_rel_error:.2e}"
        report = grad_check(lambda s: pcd_loss(build_kernel(X, s, gamma0=3.0)), Tensor(q))
        assert report.passed, f"quality: rel error {report.max_rel_error:.2e}"
    print("✅ Gradients in designs and quality")


def test_end_to_end_gradient():
    """Designs -> normalized quality -> LLETS -> kernel -> loss."""
    print("\nTesting the full quality path gradient...")
    dataset = generate_dataset(1, n=500, seed=7)
    params = llets_params(4.7)
    rng = np.random.default_rng(3)
    X = np.array([[0.4, 0.0], [-0.4, 0.0], [0.0, 0.45], [0.0, -0.45]]) + rng.uniform(-0.05, 0.05, size=(4, 2))
    predicted = normalized_quality(X, dataset).values
    shift = rng.uniform(0.05, 0.2, size=4)
    targets = np.where(predicted > 0.5, predicted - shift, predicted + shift)

    def loss(x):
        eps = conditioning_error(normalized_quality(x, dataset), targets)
        return pcd_loss(build_kernel(x, llets_score(eps, params), gamma0=1.0))

    report = grad_check(loss, Tensor(X))
    assert report.passed, f"rel error {report.max_rel_error:.2e}"
    print("✅ End-to-end gradient")


def main():
    """Run all tests."""
    print("=" * 50)
    print("DPP Loss Test")
    print("=" * 50)

    tests = [
        ("RBF kernel", test_rbf_kernel),
        ("Kernel structure", test_kernel_structure),
        ("logdet oracles", test_logdet_identity_and_oracles),
        ("Two-point closed form", test_two_point_closed_form),
        ("Subset identities", test_subset_identities),
        ("Loss values", test_pcd_loss_values),
        ("Quality monotonicity", test_quality_monotonicity),
        ("Gradients", test_gradients),
        ("End-to-end gradient", test_end_to_end_gradient),
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
    print("\n🎉 All DPP tests passed!")


if __name__ == "__main__":
    main()
