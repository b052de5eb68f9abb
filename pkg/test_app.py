"""Test configuration, training runs, checkpoints and the CLI."""
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from pcdforge.config import EvalProtocol, TrainConfig, config_from_text, load_config, parse_config_text
from pcdforge.errors import ContractViolation, MissingArtifactError, TrainingAborted
from pcdforge.evaluation import evaluate, locate_eval_dir
from pcdforge.main import main as cli_main
from pcdforge.services import PlotService, TrainingService, restore_run
from pcdforge.services.compare import directions, table
from pcdforge.utils import create_empty_chart, create_metric_curves, create_samples_scatter
from pcdforge.utils.helpers import OUTPUT_ROOT_ENV

SMOKE = dict(hidden=(16, 16), n_data=500, batch_size=16, steps=60, log_every=10,
             checkpoint_every=30)
TINY_EVAL = EvalProtocol(n_conditions=2, n_samples=40, repeats=1, subset_size=5, n_subsets=10,
                         kde_bandwidths=5)

SMOKE_CONFIG = """
# smoke run
steps = 20
hidden = 8,8
n_data = 300
batch_size = 8
log_every = 5
checkpoint_every = 10
eval.n_conditions = 2
eval.n_samples = 30
eval.repeats = 1
eval.subset_size = 5
eval.n_subsets = 10
eval.kde_bandwidths = 5
"""


def train_smoke(tmp: str, name: str, **overrides):
    cfg = TrainConfig(**{**SMOKE, **overrides})
    service = TrainingService(cfg, run_dir=Path(tmp) / name, verbose=False)
    return service, service.train()


def test_config_models():
    print("Testing config models...")
    baseline = TrainConfig(model="ccgan", gamma1=2.0, label_sampling="singular")
    assert baseline.gamma1 == 0.0 and baseline.label_sampling == "uniform"

    pcdgan = TrainConfig()
    assert pcdgan.label_sampling == "singular" and pcdgan.gamma1 == 0.5
    assert pcdgan.gamma1_at(0) == pcdgan.gamma1_at(10_000) == 0.5

    escalating = TrainConfig(gamma1=2.0, gamma1_schedule="escalating", gamma1_escalation=2.0, steps=100)
    assert escalating.gamma1_at(0) == 0.0
    assert abs(escalating.gamma1_at(50) - 0.5) < 1e-12
    assert escalating.gamma1_at(500) == 2.0

    for bad in ({"gamma1": -1.0}, {"example_id": 3}, {"unknown_key": 1}, {"hidden": "0,4"}):
        try:
            config_from_text("", **bad)
            raise AssertionError(f"config {bad} accepted")
        except ContractViolation:
            pass
    print("✅ Config models")


def test_config_text():
    print("\nTesting the key = value format...")
    text = """
    example_id = 2   # second benchmark
    model = pcdgan
    hidden = 64,64
    vicinal.mode = hard
    vicinal.kappa = auto
    eval.repeats = 4
    """
    assert parse_config_text(text)["vicinal"] == {"mode": "hard", "kappa": "auto"}
    cfg = config_from_text(text)
    assert cfg.example_id == 2 and cfg.hidden == (64, 64)
    assert cfg.vicinal.mode == "hard" and cfg.vicinal.kappa is None
    assert cfg.eval.repeats == 4

    again = config_from_text(cfg.echo())
    assert again.model_dump() == cfg.model_dump()
    assert again.echo() == cfg.echo()
    assert len(cfg.content_hash()) == 12 and int(cfg.content_hash(), 16) >= 0
    assert cfg.content_hash() != config_from_text(text, seed=1).content_hash()
    assert cfg.run_name().startswith("ex2-pcdgan-seed0-")

    try:
        parse_config_text("just words")
        raise AssertionError("line without '=' accepted")
    except ContractViolation:
        pass
    shipped = Path(__file__).parent / "configs"
    assert load_config(shipped / "example2_pcdgan.conf").label_sampling == "singular"
    baseline = load_config(shipped / "example2_ccgan.conf", seed=3)
    assert baseline.gamma1 == 0.0 and baseline.seed == 3

    try:
        load_config("no/such/config.conf")
        raise AssertionError("missing config loaded")
    except MissingArtifactError:
        pass
    print("✅ Config text round trip")


def test_training_smoke():
    print("\nTesting short training runs...")
    with tempfile.TemporaryDirectory() as tmp:
        for model in ("pcdgan", "ccgan"):
            _, result = train_smoke(tmp, model, model=model)
            log = pd.read_csv(result.log_path)
            assert list(log["step"]) == [10, 20, 30, 40, 50, 60]
            numeric = log.drop(columns=["step"]).to_numpy(dtype=np.float64)
            assert np.all(np.isfinite(numeric))
            if model == "pcdgan":
                assert np.all(log["pcd"] != 0.0)
            else:
                assert np.all(log["pcd"] == 0.0) and np.all(log["gamma1"] == 0.0)
            run_dir = result.run_dir
            for name in ("model.ckpt", "train_log.csv", "run.json", "config.txt", "dataset.csv"):
                assert (run_dir / name).exists(), name
            assert (run_dir / "checkpoints" / "step-000030.ckpt").exists()
            assert (run_dir / "checkpoints" / "step-000060.ckpt").exists()
    print("✅ Both models train and log finite values")


def test_training_deterministic():
    print("\nTesting run determinism...")
    with tempfile.TemporaryDirectory() as tmp:
        _, first = train_smoke(tmp, "a", steps=30)
        _, second = train_smoke(tmp, "b", steps=30)
        assert first.log_path.read_text() == second.log_path.read_text()
        assert (first.run_dir / "model.ckpt").read_text() == (second.run_dir / "model.ckpt").read_text()
    print("✅ Same config, same log")


def test_ccgan_reduction():
    print("\nTesting the CcGAN reduction...")
    with tempfile.TemporaryDirectory() as tmp:
        _, reduced = train_smoke(tmp, "reduced", steps=30, gamma1=0.0, label_sampling="uniform")
        _, baseline = train_smoke(tmp, "baseline", steps=30, model="ccgan")
        assert reduced.log_path.read_text() == baseline.log_path.read_text()
    print("✅ pcdgan with gamma1 = 0 and data labels is ccgan")


def test_separated_discriminator_schedule():
    print("\nTesting separated discriminator updates...")
    with tempfile.TemporaryDirectory() as tmp:
        cfg = TrainConfig(**{**SMOKE, "steps": 6, "lr_decay_every": 4,
                             "discriminator_training": "separated"})
        service = TrainingService(cfg, run_dir=Path(tmp) / "separated", verbose=False)
        rows = [service.train_step(t) for t in range(6)]
        assert service.opt_d.state.t == service.opt_g.state.t == 6
        for row in rows:
            decays = (row["step"] - 1) // 4
            assert abs(row["lr_d"] - cfg.lr_d * cfg.lr_decay ** decays) < 1e-18
            assert abs(row["lr_g"] - cfg.lr_g * cfg.lr_decay ** decays) < 1e-18
            assert math.isfinite(row["d_loss"])
    print("✅ Both optimizers count one update per step")


def test_checkpoint_restore():
    print("\nTesting checkpoint restore...")
    with tempfile.TemporaryDirectory() as tmp:
        service, result = train_smoke(tmp, "restore", steps=20)
        cfg, generator, dataset = restore_run(result.checkpoint)
        assert cfg.model_dump() == service.cfg.model_dump()
        assert np.array_equal(dataset.points, service.dataset.points)
        for (_, saved), (_, restored) in zip(service.generator.named_parameters(),
                                             generator.named_parameters()):
            assert np.array_equal(saved.values, restored.values)

        live = evaluate(service.generator, service.dataset, TINY_EVAL, seed=3)
        loaded = evaluate(generator, dataset, TINY_EVAL, seed=3)
        assert live.cells == loaded.cells
    print("✅ Restored generator evaluates identically")


def test_training_abort():
    print("\nTesting abort on non-finite values...")
    with tempfile.TemporaryDirectory() as tmp:
        cfg = TrainConfig(**{**SMOKE, "steps": 10})
        service = TrainingService(cfg, run_dir=Path(tmp) / "abort", verbose=False)
        service.generator.net.layers[0][0].values[0, 0] = math.nan
        try:
            service.train()
            raise AssertionError("training survived a NaN weight")
        except TrainingAborted as exc:
            assert exc.step == 1
            assert exc.last_good_checkpoint is None
            assert Path(exc.diagnostics_path).exists()
        assert (Path(tmp) / "abort" / "diagnostics.json").exists()
        assert (Path(tmp) / "abort" / "train_log.csv").exists()
    print("✅ Aborted with diagnostics")


def test_cli_round_trip():
    print("\nTesting the CLI...")
    previous = os.environ.get(OUTPUT_ROOT_ENV)
    with tempfile.TemporaryDirectory() as tmp:
        os.environ[OUTPUT_ROOT_ENV] = str(Path(tmp) / "runs")
        try:
            config_path = Path(tmp) / "smoke.conf"
            config_path.write_text(SMOKE_CONFIG)
            assert cli_main(["train", "--config", str(config_path), "--no-eval", "--quiet"]) == 0

            run_dir = Path(tmp) / "runs" / load_config(config_path).run_name()
            checkpoint = run_dir / "model.ckpt"
            assert checkpoint.exists()
            assert cli_main(["eval", "--checkpoint", str(checkpoint), "--quiet"]) == 0
            assert locate_eval_dir(run_dir) == run_dir / "eval-desk"

            out = Path(tmp) / "table.csv"
            assert cli_main(["compare", "--runs", str(run_dir), "--out", str(out)]) == 0
            summary = pd.read_csv(out)
            assert list(summary["model"]) == ["pcdgan"] and list(summary["n_runs"]) == [1]
            assert not (Path(tmp) / "directions.json").exists()

            plots = PlotService(verbose=False).emit_plots([run_dir], out_dir=Path(tmp) / "plots")
            assert len(plots) == 4 and all(path.suffix == ".svg" for path in plots)
            assert all(path.exists() for path in plots)

            assert cli_main(["compare", "--runs", str(Path(tmp) / "nowhere"), "--out", str(out)]) == 1
            assert cli_main(["eval", "--checkpoint", str(Path(tmp) / "none.ckpt"), "--quiet"]) == 1
        finally:
            if previous is None:
                os.environ.pop(OUTPUT_ROOT_ENV, None)
            else:
                os.environ[OUTPUT_ROOT_ENV] = previous
    print("✅ train, eval, compare and plot")


def test_directions():
    print("\nTesting comparison directions...")
    runs = pd.DataFrame([
        {"example_id": 1, "model": "pcdgan", "seed": 0, "label_error": 0.02, "likelihood": 3.0,
         "diversity": -20.0, "occupied_modes": 6},
        {"example_id": 1, "model": "ccgan", "seed": 0, "label_error": 0.05, "likelihood": 2.0,
         "diversity": -22.0, "occupied_modes": 6},
        {"example_id": 2, "model": "pcdgan", "seed": 0, "label_error": 0.03, "likelihood": 4.0,
         "diversity": -15.0, "occupied_modes": 6},
        {"example_id": 2, "model": "pcdgan", "seed": 1, "label_error": 0.03, "likelihood": 4.0,
         "diversity": -15.0, "occupied_modes": 6},
        {"example_id": 2, "model": "ccgan", "seed": 0, "label_error": 0.04, "likelihood": 2.0,
         "diversity": -25.0, "occupied_modes": 2},
    ])
    frame = table(runs)
    assert len(frame) == 4
    checks = directions(frame)
    assert checks["example2_likelihood_ok"] and checks["example2_diversity_ok"]
    assert checks["example1_label_error_ok"] and checks["example1_diversity_ok"]
    assert checks["example2_full_mode_runs"] == 2 and checks["example2_mode_coverage_ok"]
    assert abs(checks["example2_likelihood_ratio"] - 2.0) < 1e-12

    assert directions(table(runs[runs["example_id"] == 1])) is None
    print("✅ Direction checks")


def test_figures():
    print("\nTesting figures...")
    samples = {"pcdgan": np.random.default_rng(0).uniform(-0.6, 0.6, (50, 2))}
    scatter = create_samples_scatter(samples, 0.4)
    assert len(scatter.data) == 3
    curves = {"pcdgan": pd.DataFrame({"condition": [0.05, 0.5], "mean": [0.1, 0.2], "std": [0.0, 0.1]})}
    assert len(create_metric_curves("label_error", curves).data) >= 1
    assert len(create_empty_chart("No finite likelihood values").layout.annotations) == 1
    print("✅ Figures built")


def main():
    """Run all tests."""
    print("=" * 50)
    print("Application Test")
    print("=" * 50)

    tests = [
        ("Config models", test_config_models),
        ("Config text", test_config_text),
        ("Training smoke", test_training_smoke),
        ("Determinism", test_training_deterministic),
        ("CcGAN reduction", test_ccgan_reduction),
        ("Separated discriminator", test_separated_discriminator_schedule),
        ("Checkpoint restore", test_checkpoint_restore),
        ("Abort", test_training_abort),
        ("CLI", test_cli_round_trip),
        ("Directions", test_directions),
        ("Figures", test_figures),
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
    print("\n🎉 All application tests passed!")


if __name__ == "__main__":
    main()
