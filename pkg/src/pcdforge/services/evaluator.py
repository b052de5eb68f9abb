"""Evaluation service: restore a checkpoint and run the condition sweep."""
from pathlib import Path
from typing import Optional, Tuple, Union

from ..config import EvalProtocol, TrainConfig, config_from_text
from ..data import Dataset2D, generate_dataset
from ..evaluation import EvalReport, evaluate
from ..models import Generator, architecture_hash, load_checkpoint, restore_parameters
from .registry import RegistryService
from .trainer import build_networks, seed_streams

PathLike = Union[str, Path]


def restore_run(checkpoint_path: PathLike) -> Tuple[TrainConfig, Generator, Dataset2D]:
    """Config, generator and dataset of a saved run.

    The config comes from the echo embedded in the checkpoint; the networks
    built from it must match the stored architecture hash.
    """
    checkpoint_path = Path(checkpoint_path)
    checkpoint = load_checkpoint(checkpoint_path)
    cfg = config_from_text(checkpoint.config_text, source=str(checkpoint_path))
    generator, discriminator = build_networks(cfg)
    restore_parameters(checkpoint,
                       generator.named_parameters() + discriminator.named_parameters(),
                       architecture_hash(generator, discriminator))
    dataset = generate_dataset(cfg.example_id, cfg.n_data, cfg.data_seed)
    return cfg, generator, dataset


class EvaluationService:
    def __init__(self, verbose: bool = True, registry: Optional[RegistryService] = None):
        self.verbose = verbose
        self.registry = registry

    def evaluate_checkpoint(self, checkpoint_path: PathLike, full_protocol: bool = False,
                            protocol: Optional[EvalProtocol] = None,
                            out_dir: Optional[PathLike] = None, jobs: int = 1) -> EvalReport:
        checkpoint_path = Path(checkpoint_path)
        cfg, generator, dataset = restore_run(checkpoint_path)
        if protocol is None:
            protocol = EvalProtocol.full(**cfg.eval.model_dump(exclude={"n_conditions", "repeats"})) \
                if full_protocol else cfg.eval
        tag = "full" if full_protocol else "desk"
        out_dir = Path(out_dir) if out_dir is not None else checkpoint_path.parent / f"eval-{tag}"

        if self.verbose:
            print(f"📊 Evaluating {checkpoint_path} ({protocol.n_conditions} conditions x "
                  f"{protocol.repeats} repeats, {protocol.n_samples} samples)")
        _, _, eval_seed = seed_streams(cfg.seed)
        report = evaluate(generator, dataset, protocol, eval_seed, run_id=cfg.run_name(),
                          model_tag=cfg.model, config_echo=cfg.echo(), jobs=jobs)
        report.write(out_dir)

        if self.registry is not None:
            self.registry.record_evaluation(cfg.run_name(), out_dir, tag, report.summary())
        if self.verbose:
            aggregates = report.aggregates()
            status = "✅" if report.status == "ok" else "⚠️"
            print(f"{status} label error {aggregates['label_error']['mean']:.4f} | "
                  f"likelihood {aggregates['likelihood']['mean']:.3f} | "
                  f"diversity {aggregates['diversity']['mean']:.3f} -> {out_dir}")
        return report
