"""Training service for PcDGAN and the CcGAN baseline.

Each step takes one discriminator update on the vicinal loss, then one
generator update on the vicinal loss plus gamma1 times the DPP loss of the
freshly generated batch. CcGAN is the same path with gamma1 = 0 and
data-drawn labels.
"""
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..config import TrainConfig
from ..data import generate_dataset, normalized_quality, save_dataset
from ..errors import NumericError, TrainingAborted, VicinityEmptyError
from ..losses import (
    build_kernel,
    build_vicinal_batch,
    conditioning_error,
    discriminator_loss_terms,
    generator_pass,
    llets_params,
    llets_score,
    pcd_loss,
    sample_centers,
    total_generator_loss,
)
from ..models import Adam, Discriminator, Generator, architecture_hash, save_checkpoint
from ..utils import output_root, process_snapshot, write_json
from .registry import RegistryService

MAX_VICINITY_RESAMPLES = 1000
LOG_FILE = "train_log.csv"
CONFIG_FILE = "config.txt"
DATASET_FILE = "dataset.csv"
RUN_FILE = "run.json"
DIAGNOSTICS_FILE = "diagnostics.json"
FINAL_CHECKPOINT = "model.ckpt"
LOG_COLUMNS = [
    "step", "d_loss", "d_real", "d_fake", "g_vicinal", "pcd", "g_total",
    "gamma1", "lr_g", "lr_d", "y_s", "vicinity_resamples",
]


def seed_streams(seed: int) -> Tuple[np.random.Generator, np.random.Generator, int]:
    """(init rng, training rng, evaluation seed), independent children of one seed."""
    init_seq, train_seq, eval_seq = np.random.SeedSequence(seed).spawn(3)
    return (np.random.default_rng(init_seq), np.random.default_rng(train_seq),
            int(eval_seq.generate_state(1)[0]))


def build_networks(cfg: TrainConfig,
                   rng: Optional[np.random.Generator] = None) -> Tuple[Generator, Discriminator]:
    rng = rng if rng is not None else np.random.default_rng(0)
    generator = Generator(cfg.noise_dim, cfg.hidden, cfg.leaky_slope, rng=rng)
    discriminator = Discriminator(cfg.hidden, cfg.leaky_slope, rng=rng)
    return generator, discriminator


@dataclass
class TrainResult:
    run_dir: Path
    checkpoint: Path
    log_path: Path
    steps: int
    vicinity_resamples: int


class TrainingService:
    """Owns one run: data, networks, optimizers, rng streams and run directory."""

    def __init__(self, cfg: TrainConfig, run_dir: Optional[Path] = None, verbose: bool = True,
                 registry: Optional[RegistryService] = None):
        self.cfg = cfg
        self.verbose = verbose
        self.registry = registry
        self.run_id = cfg.run_name()
        self.run_dir = Path(run_dir) if run_dir is not None else output_root() / self.run_id

        init_rng, self.rng, self.eval_seed = seed_streams(cfg.seed)
        self.dataset = generate_dataset(cfg.example_id, cfg.n_data, cfg.data_seed)
        self.vicinal = cfg.vicinal.resolve(self.dataset.labels, cfg.label_sampling)
        self.llets = llets_params(cfg.lambert_a)

        self.generator, self.discriminator = build_networks(cfg, init_rng)
        self.arch = architecture_hash(self.generator, self.discriminator)
        betas = (cfg.beta1, cfg.beta2)
        self.opt_g = Adam(self.generator.named_parameters(), lr=cfg.lr_g, betas=betas,
                          decay_factor=cfg.lr_decay, decay_every=cfg.lr_decay_every)
        self.opt_d = Adam(self.discriminator.named_parameters(), lr=cfg.lr_d, betas=betas,
                          decay_factor=cfg.lr_decay, decay_every=cfg.lr_decay_every)

        self.vicinity_resamples = 0
        self.log_rows: List[Dict[str, float]] = []
        self.last_checkpoint: Optional[Path] = None

    def _print(self, message: str):
        if self.verbose:
            tqdm.write(message)

    def named_parameters(self):
        return self.generator.named_parameters() + self.discriminator.named_parameters()

    # One iteration

    def _vicinal_batch(self):
        cfg, vicinal = self.cfg, self.vicinal
        for _ in range(MAX_VICINITY_RESAMPLES):
            centers = sample_centers(self.dataset, vicinal, cfg.batch_size, self.rng)
            try:
                return centers, build_vicinal_batch(self.dataset, centers, vicinal,
                                                    cfg.batch_size, self.rng)
            except VicinityEmptyError:
                self.vicinity_resamples += 1
        raise VicinityEmptyError(
            f"hard vicinity stayed empty after {MAX_VICINITY_RESAMPLES} label draws"
        )

    def _discriminator_step(self, batch) -> Tuple[float, float]:
        G, D = self.generator, self.discriminator
        z = G.sample_noise(self.rng, batch.size)
        fake_x = G(z, batch.fake_y).detach()
        real, fake = discriminator_loss_terms(D, G, batch, self.vicinal, fake_x=fake_x)
        if self.cfg.discriminator_training == "mixed":
            (real + fake).backward()
            self.opt_d.step()
            return real.item(), fake.item()

        real.backward()
        self.opt_d.step(advance=False)
        _, fake = discriminator_loss_terms(D, G, batch, self.vicinal, fake_x=fake_x)
        fake.backward()
        self.opt_d.step()
        return real.item(), fake.item()

    def _pcd_term(self, x_fake, labels):
        predicted = normalized_quality(x_fake, self.dataset)
        q = llets_score(conditioning_error(predicted, labels), self.llets)
        if self.cfg.realistic_quality:
            q = q * self.discriminator(x_fake.detach(), labels).detach()
        kernel = build_kernel(x_fake, q, self.cfg.gamma0, self.cfg.dpp_jitter,
                              self.cfg.dpp_bandwidth)
        return pcd_loss(kernel)

    def train_step(self, t: int) -> Dict[str, float]:
        """Run iteration t (0-based) and return its loss components."""
        cfg = self.cfg
        centers, batch = self._vicinal_batch()
        lr_d = self.opt_d.lr
        d_real, d_fake = self._discriminator_step(batch)

        gamma1 = cfg.gamma1_at(t)
        y_s = centers[0] if self.vicinal.singular else centers
        gen = generator_pass(self.discriminator, self.generator, y_s, self.vicinal,
                             cfg.batch_size, self.rng)
        pcd = self._pcd_term(gen.x_fake, gen.labels) if gamma1 > 0 else None
        total = total_generator_loss(gen.loss, pcd, gamma1)
        lr_g = self.opt_g.lr
        total.backward()
        self.opt_g.step()
        # the generator loss also reached the discriminator's parameters
        self.discriminator.zero_grad()

        return {
            "step": t + 1,
            "d_loss": d_real + d_fake,
            "d_real": d_real,
            "d_fake": d_fake,
            "g_vicinal": gen.loss.item(),
            "pcd": pcd.item() if pcd is not None else 0.0,
            "g_total": total.item(),
            "gamma1": gamma1,
            "lr_g": lr_g,
            "lr_d": lr_d,
            "y_s": float(centers[0]),
            "vicinity_resamples": self.vicinity_resamples,
        }

    # Run lifecycle

    def _prepare_run_dir(self):
        self.run_dir.mkdir(parents=True, exist_ok=True)
        (self.run_dir / CONFIG_FILE).write_text(self.cfg.echo() + "\n")
        save_dataset(self.dataset, self.run_dir / DATASET_FILE)

    def save(self, step: int, path: Optional[Path] = None) -> Path:
        path = path or self.run_dir / "checkpoints" / f"step-{step:06d}.ckpt"
        save_checkpoint(path, self.named_parameters(), self.arch, step, self.cfg.echo())
        self.last_checkpoint = path
        return path

    def write_log(self) -> Path:
        path = self.run_dir / LOG_FILE
        frame = pd.DataFrame(self.log_rows, columns=LOG_COLUMNS)
        frame.to_csv(path, index=False, float_format="%.9g")
        return path

    def _abort(self, t: int, exc: NumericError):
        self.write_log()
        diagnostics = {
            "step": t + 1,
            "error": str(exc),
            "op": exc.op,
            "parameter": exc.parameter,
            "term": exc.term,
            "last_good_checkpoint": str(self.last_checkpoint) if self.last_checkpoint else None,
            "last_logged": self.log_rows[-1] if self.log_rows else None,
            "vicinity_resamples": self.vicinity_resamples,
            "process": process_snapshot(),
        }
        path = write_json(self.run_dir / DIAGNOSTICS_FILE, diagnostics)
        self._print(f"❌ Non-finite value at step {t + 1}: {exc}")
        if self.registry is not None:
            self.registry.finish_run(self.run_id, "aborted", t, self.vicinity_resamples, str(exc))
        raise TrainingAborted(
            f"training aborted at step {t + 1}: {exc}", step=t + 1,
            last_good_checkpoint=diagnostics["last_good_checkpoint"],
            diagnostics_path=str(path),
        ) from exc

    def train(self) -> TrainResult:
        cfg = self.cfg
        started = time.perf_counter()
        self._print(f"🚀 Training {cfg.model} on example {cfg.example_id} (seed {cfg.seed})")
        self._prepare_run_dir()
        self._print(f"📦 Dataset: {self.dataset.size} designs, data seed {cfg.data_seed}")
        self._print(f"🔧 Vicinity: {self.vicinal.mode}/{self.vicinal.label_sampling}, "
                    f"sigma={self.vicinal.sigma_vic:.4g} kappa={self.vicinal.kappa:.4g} "
                    f"nu={self.vicinal.nu:.4g}")
        if self.registry is not None:
            self.registry.start_run(self.run_id, cfg.example_id, cfg.model, cfg.seed,
                                    cfg.content_hash(), self.run_dir)

        steps = tqdm(range(cfg.steps), desc=self.run_id, disable=not self.verbose)
        for t in steps:
            try:
                row = self.train_step(t)
            except NumericError as exc:
                self._abort(t, exc)
            if (t + 1) % cfg.log_every == 0 or t + 1 == cfg.steps:
                self.log_rows.append(row)
                steps.set_postfix_str(
                    f"D: {row['d_loss']:.4f} | G: {row['g_vicinal']:.4f} | PcD: {row['pcd']:.4f}"
                )
            if (t + 1) % cfg.checkpoint_every == 0:
                self.save(t + 1)

        checkpoint = self.save(cfg.steps, self.run_dir / FINAL_CHECKPOINT)
        log_path = self.write_log()
        elapsed = time.perf_counter() - started
        write_json(self.run_dir / RUN_FILE, {
            "run_id": self.run_id,
            "config_hash": cfg.content_hash(),
            "seed": cfg.seed,
            "eval_seed": self.eval_seed,
            "architecture": self.arch,
            "steps": cfg.steps,
            "vicinity_resamples": self.vicinity_resamples,
            "vicinal": {"sigma_vic": self.vicinal.sigma_vic, "kappa": self.vicinal.kappa,
                        "nu": self.vicinal.nu},
            "duration_seconds": elapsed,
            "process": process_snapshot(),
        })
        if self.registry is not None:
            self.registry.finish_run(self.run_id, "completed", cfg.steps, self.vicinity_resamples)
        self._print(f"💾 Checkpoint saved to {checkpoint}")
        return TrainResult(self.run_dir, checkpoint, log_path, cfg.steps, self.vicinity_resamples)


def run_training(cfg: TrainConfig, evaluate_after: bool = True, verbose: bool = True,
                 jobs: int = 1, use_registry: bool = True) -> TrainResult:
    """Train one configuration and, unless disabled, evaluate its final checkpoint."""
    from .evaluator import EvaluationService

    registry = RegistryService.open() if use_registry else None
    try:
        result = TrainingService(cfg, verbose=verbose, registry=registry).train()
        if evaluate_after:
            EvaluationService(verbose=verbose, registry=registry).evaluate_checkpoint(
                result.checkpoint, jobs=jobs
            )
        return result
    finally:
        if registry is not None:
            registry.close()


def _train_worker(payload: Tuple[dict, bool]) -> str:
    values, evaluate_after = payload
    cfg = TrainConfig.model_validate(values)
    return str(run_training(cfg, evaluate_after=evaluate_after, verbose=False).run_dir)


def run_sweep(configs: Sequence[TrainConfig], jobs: int = 1, evaluate_after: bool = True,
              verbose: bool = True) -> List[Path]:
    """Independent runs, optionally in a process pool; results keep the input order."""
    if jobs <= 1 or len(configs) <= 1:
        return [run_training(cfg, evaluate_after, verbose).run_dir for cfg in configs]
    payloads = [(cfg.model_dump(), evaluate_after) for cfg in configs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        run_dirs = [Path(path) for path in pool.map(_train_worker, payloads)]
    if verbose:
        for path in run_dirs:
            print(f"✅ {path}")
    return run_dirs
