"""Test the six-peak benchmark datasets and label normalization."""
import math
import sys
import tempfile
from pathlib import Path

import numpy as np
from scipy.stats import ks_2samp

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from pcdforge.data import (
    DISK_CENTER,
    MODE_CENTERS,
    Dataset2D,
    denormalize_label,
    generate_dataset,
    load_dataset,
    normalize_label,
    quality,
    save_dataset,
)
from pcdforge.engine import Tensor, grad_check
from pcdforge.errors import ContractViolation, MissingArtifactError


def test_quality_values():
    print("Testing the quality function...")
    origin = quality(np.zeros((1, 2))).item()
    assert abs(origin - 6.0 * math.exp(-8.0)) < 1e-15
    assert abs(origin - 0.002013) < 1e-6

    peak = quality(MODE_CENTERS[:1]).item()
    expected = 1.0 + 2.0 * math.exp(-8.0) + 2.0 * math.exp(-24.0) + math.exp(-32.0)
    assert abs(peak - expected) < 1e-12
    assert abs(peak - 1.00067) < 1e-5
    print(f"✅ q(0) = {origin:.6f}, q(mu) = {peak:.6f}")


def test_quality_symmetry():
    print("\nTesting sixfold rotation invariance...")
    rng = np.random.default_rng(0)
    x = rng.uniform(-0.6, 0.6, size=(1000, 2))
    angle = math.pi / 3.0
    rotation = np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])
    assert np.max(np.abs(quality(x).values - quality(x @ rotation.T).values)) < 1e-12
    print("✅ Invariant under 60 degree rotations")


def test_quality_range_and_gradient():
    print("\nTesting quality range and gradient...")
    axis = np.linspace(-0.6, 0.6, 121)
    grid = np.array([[a, b] for a in axis for b in axis])
    values = quality(grid).values
    peak = quality(MODE_CENTERS[:1]).item()
    assert np.all(values > 0.0)
    assert values.max() <= peak + 1e-6

    report = grad_check(lambda x: quality(x).sum(), Tensor(np.random.default_rng(1).uniform(-0.6, 0.6, (5, 2))))
    assert report.passed, f"rel error {report.max_rel_error:.2e}"
    print("✅ Bounded and differentiable")


def test_generate_examples():
    print("\nTesting dataset generation...")
    first = generate_dataset(1)
    assert first.size == 10_000 and len(first) == 10_000
    assert np.all(np.abs(first.points) <= 0.6)
    assert first.labels.min() == 0.0 and first.labels.max() == 1.0
    assert np.allclose(first.labels_raw, quality(first.points).values, rtol=0, atol=0)

    second = generate_dataset(2)
    in_disk = np.linalg.norm(second.points - DISK_CENTER, axis=1) <= 0.2 + 1e-12
    assert in_disk.mean() >= 0.5
    assert second.labels.min() == 0.0 and second.labels.max() == 1.0

    odd = generate_dataset(2, n=7, seed=3)
    assert odd.size == 7
    print(f"✅ Example 2 puts {in_disk.mean():.1%} of its designs in the disk")


def test_determinism():
    print("\nTesting generation determinism...")
    for example_id in (1, 2):
        a = generate_dataset(example_id, n=500, seed=11)
        b = generate_dataset(example_id, n=500, seed=11)
        assert np.array_equal(a.points, b.points)
        assert np.array_equal(a.labels, b.labels)
    c = generate_dataset(1, n=500, seed=12)
    assert not np.array_equal(generate_dataset(1, n=500, seed=11).points, c.points)
    print("✅ Deterministic in (example, n, seed)")


def test_label_skew():
    print("\nTesting label distributions...")
    first, second = generate_dataset(1), generate_dataset(2)
    assert ks_2samp(first.labels, second.labels).statistic > 0.05
    assert second.labels.mean() > first.labels.mean()
    print("✅ Example 2 labels skew toward the disk peak")


def test_bad_requests():
    print("\nTesting invalid requests...")
    for args in ((3,), (1, 0)):
        try:
            generate_dataset(*args)
            raise AssertionError(f"generate_dataset{args} accepted")
        except ContractViolation:
            pass
    for example_id in (1, 2):
        try:
            generate_dataset(example_id, n=1)
            raise AssertionError("single-point label range normalized")
        except ContractViolation as exc:
            assert "degenerate label range" in str(exc)
    print("✅ Rejected")


def test_normalization():
    print("\nTesting label normalization...")
    dataset = generate_dataset(1, n=2000, seed=4)
    raw = np.random.default_rng(0).uniform(dataset.label_min, dataset.label_max, 1000)
    back = denormalize_label(normalize_label(raw, dataset), dataset)
    assert np.max(np.abs(back - raw)) < 1e-12
    assert normalize_label(dataset.label_min, dataset) == 0.0
    assert normalize_label(dataset.label_max, dataset) == 1.0

    flat = Dataset2D(points=np.zeros((2, 2)), labels_raw=np.ones(2), labels=np.zeros(2),
                     label_min=1.0, label_max=1.0, example_id=1)
    try:
        normalize_label(0.5, flat)
        raise AssertionError("degenerate range accepted")
    except ContractViolation:
        pass
    print("✅ Normalization round trip")


def test_csv_round_trip():
    print("\nTesting dataset CSV round trip...")
    dataset = generate_dataset(2, n=300, seed=9)
    with tempfile.TemporaryDirectory() as tmp:
        path = save_dataset(dataset, Path(tmp) / "dataset.csv")
        assert path.read_text().startswith("# example_id=2 seed=9")
        loaded = load_dataset(path)
        try:
            load_dataset(Path(tmp) / "missing.csv")
            raise AssertionError("missing dataset loaded")
        except MissingArtifactError:
            pass
    assert np.array_equal(loaded.points, dataset.points)
    assert np.array_equal(loaded.labels, dataset.labels)
    assert loaded.label_min == dataset.label_min and loaded.label_max == dataset.label_max
    assert loaded.example_id == 2 and loaded.seed == 9
    print("✅ CSV round trip is exact")


def main():
    """Run all tests."""
    print("=" * 50)
    print("Synthetic Benchmark Test")
    print("=" * 50)

    tests = [
        ("Quality values", test_quality_values),
        ("Symmetry", test_quality_symmetry),
        ("Range and gradient", test_quality_range_and_gradient),
        ("Generation", test_generate_examples),
        ("Determinism", test_determinism),
        ("Label skew", test_label_skew),
        ("Bad requests", test_bad_requests),
        ("Normalization", test_normalization),
        ("CSV round trip", test_csv_round_trip),
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
    print("\n🎉 All benchmark tests passed!")


if __name__ == "__main__":
    main()
