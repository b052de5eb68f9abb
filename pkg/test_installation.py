"""Simple test to verify PcdForge installation."""
import sys
import tempfile
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / "src"))


def test_imports():
    """Test that all required modules can be imported."""
    print("Testing imports...")

    # Core dependencies
    import numpy
    print("✅ NumPy")

    import scipy
    print("✅ SciPy")

    import sklearn
    print("✅ scikit-learn")

    import pandas
    print("✅ pandas")

    import sqlalchemy
    print("✅ SQLAlchemy")

    import psutil
    print("✅ psutil")

    import plotly
    print("✅ Plotly")

    import pydantic
    print("✅ pydantic")

    import tqdm
    print("✅ tqdm")

    # PcdForge modules
    from pcdforge.database import get_session, init_database
    print("✅ Database module")

    from pcdforge.services import CompareService, EvaluationService, PlotService, TrainingService
    print("✅ Services module")

    from pcdforge.main import build_parser
    print("✅ CLI module")

    print("\n🎉 All imports successful!")


def test_database():
    """Test registry creation and a run round trip."""
    print("\nTesting database...")
    from pcdforge.database import REGISTRY_FILE, TrainingRun, get_session
    from pcdforge.services import RegistryService

    with tempfile.TemporaryDirectory() as tmp:
        registry = RegistryService.open(Path(tmp))
        assert (Path(tmp) / REGISTRY_FILE).exists()
        print("✅ Database created successfully")

        registry.start_run("ex1-pcdgan-seed0-abc", 1, "pcdgan", 0, "abcdef012345", Path(tmp))
        registry.finish_run("ex1-pcdgan-seed0-abc", "completed", 10, vicinity_resamples=2)
        registry.record_evaluation("ex1-pcdgan-seed0-abc", Path(tmp) / "eval-desk", "desk", {
            "status": "ok",
            "aggregates": {"label_error": {"mean": 0.1}, "likelihood": {"mean": 2.0},
                           "diversity": {"mean": -12.0}},
            "occupied_modes": 6,
        })

        runs = registry.list_runs()
        assert [run.status for run in runs] == ["completed"]
        assert runs[0].vicinity_resamples == 2
        evaluation = registry.latest_evaluation("ex1-pcdgan-seed0-abc")
        assert evaluation.likelihood_mean == 2.0 and evaluation.occupied_modes == 6
        assert registry.latest_evaluation("missing") is None
        registry.close()

        session = get_session(str(Path(tmp) / REGISTRY_FILE))
        assert session.query(TrainingRun).count() == 1
        session.close()
    print("✅ Registry round trip")


def test_cli():
    """Test the CLI exposes its commands."""
    print("\nTesting CLI...")
    from pcdforge.main import build_parser

    parser = build_parser()
    args = parser.parse_args(["train", "--example", "2", "--model", "ccgan", "--seeds", "0", "1"])
    assert args.command == "train" and args.example == 2 and args.seeds == [0, 1]
    args = parser.parse_args(["eval", "--checkpoint", "run/model.ckpt", "--full-protocol"])
    assert args.full_protocol
    print("✅ CLI commands configured")


def main():
    """Run all tests."""
    print("=" * 50)
    print("PcdForge Installation Test")
    print("=" * 50)
    print()

    tests = [
        ("Imports", test_imports),
        ("Database", test_database),
        ("CLI", test_cli),
    ]

    results = []
    for name, test_func in tests:
        print(f"\n--- {name} ---")
        try:
            test_func()
            results.append(True)
        except Exception as e:
            print(f"❌ {name} failed: {e}")
            results.append(False)

    print("\n" + "=" * 50)
    print("Test Summary")
    print("=" * 50)

    for i, (name, _) in enumerate(tests):
        status = "✅ PASS" if results[i] else "❌ FAIL"
        print(f"{status} - {name}")

    if all(results):
        print("\n🎉 All tests passed! PcdForge is ready to use.")
        print("\nRun: uv run pcdforge train --example 1 --model pcdgan --seed 0")
    else:
        print("\n❌ Some tests failed. Please fix the issues above.")
        sys.exit(1)


if __name__ == "__main__":
    main()
