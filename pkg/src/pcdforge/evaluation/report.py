"""Evaluation report: per-cell metrics, aggregates and their files."""
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd

from ..errors import MissingArtifactError

METRICS = ("label_error", "likelihood", "diversity")
FLOAT_FORMAT = "%.9g"
CELLS_FILE = "eval_cells.csv"
CONDITIONS_FILE = "eval_conditions.csv"
SUMMARY_FILE = "summary.json"
SAMPLES_FILE = "samples.csv"

PathLike = Union[str, Path]


@dataclass
class EvalCell:
    condition_index: int
    condition: float
    repeat: int
    label_error: float = math.nan
    likelihood: float = math.nan
    diversity: float = math.nan
    kde_bandwidth: float = math.nan
    kde_degenerate: bool = False
    degenerate_subsets: int = 0
    failed: bool = False
    failure: str = ""


@dataclass
class EvalReport:
    run_id: str
    seed: int
    model_tag: str
    example_id: int
    conditions: List[float]
    cells: List[EvalCell]
    data_diversity: List[float] = field(default_factory=list)
    plot_condition: float = 0.4
    samples: Optional[np.ndarray] = None
    samples_failure: str = ""
    mode_counts: List[int] = field(default_factory=list)
    occupied_modes: int = 0
    protocol: Dict[str, Any] = field(default_factory=dict)
    config_echo: str = ""

    @property
    def failed_cells(self) -> int:
        return sum(cell.failed for cell in self.cells)

    @property
    def status(self) -> str:
        return "failed" if self.failed_cells or self.samples_failure else "ok"

    def cells_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(cell) for cell in self.cells])

    def condition_frame(self) -> pd.DataFrame:
        """Mean and std over repeats for each condition."""
        frame = self.cells_frame()
        grouped = frame.groupby("condition_index", sort=True)
        out = pd.DataFrame({"condition": grouped["condition"].first()})
        for metric in METRICS:
            out[f"{metric}_mean"] = grouped[metric].mean()
            out[f"{metric}_std"] = grouped[metric].std(ddof=0)
        if self.data_diversity:
            out["data_diversity"] = self.data_diversity
        return out.reset_index()

    def aggregates(self) -> Dict[str, Dict[str, float]]:
        """Per repeat, the mean over conditions; then mean and std over repeats."""
        frame = self.cells_frame()
        per_repeat = frame.groupby("repeat", sort=True)[list(METRICS)].mean()
        return {
            metric: {
                "mean": float(per_repeat[metric].mean()),
                "std": float(per_repeat[metric].std(ddof=0)),
            }
            for metric in METRICS
        }

    def summary(self) -> Dict[str, Any]:
        return {
            "run_id": self.run_id,
            "seed": self.seed,
            "model": self.model_tag,
            "example_id": self.example_id,
            "status": self.status,
            "failed_cells": self.failed_cells,
            "aggregates": self.aggregates(),
            "diagnostics": {
                "degenerate_subsets": int(sum(c.degenerate_subsets for c in self.cells)),
                "degenerate_kde": int(sum(c.kde_degenerate for c in self.cells)),
                "failed_ops": sorted({c.failure for c in self.cells if c.failed}),
                "samples_failure": self.samples_failure,
            },
            "plot_condition": self.plot_condition,
            "mode_counts": [int(c) for c in self.mode_counts],
            "occupied_modes": self.occupied_modes,
            "protocol": self.protocol,
            "config": self.config_echo.splitlines(),
        }

    def write(self, out_dir: PathLike) -> Path:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        self.cells_frame().to_csv(out_dir / CELLS_FILE, index=False, float_format=FLOAT_FORMAT)
        self.condition_frame().to_csv(out_dir / CONDITIONS_FILE, index=False,
                                      float_format=FLOAT_FORMAT)
        if self.samples is not None:
            pd.DataFrame(self.samples, columns=["x1", "x2"]).to_csv(
                out_dir / SAMPLES_FILE, index=False, float_format=FLOAT_FORMAT
            )
        with open(out_dir / SUMMARY_FILE, "w") as handle:
            json.dump(self.summary(), handle, indent=2, sort_keys=True)
            handle.write("\n")
        return out_dir


def _require(path: Path) -> Path:
    if not path.exists():
        raise MissingArtifactError(f"missing evaluation output: {path}")
    return path


def load_summary(eval_dir: PathLike) -> Dict[str, Any]:
    with open(_require(Path(eval_dir) / SUMMARY_FILE)) as handle:
        return json.load(handle)


def load_conditions(eval_dir: PathLike) -> pd.DataFrame:
    return pd.read_csv(_require(Path(eval_dir) / CONDITIONS_FILE))


def load_samples(eval_dir: PathLike) -> np.ndarray:
    return pd.read_csv(_require(Path(eval_dir) / SAMPLES_FILE)).to_numpy(dtype=np.float64)


def locate_eval_dir(path: PathLike) -> Path:
    """An evaluation directory itself, or the one inside a run directory (full before desk)."""
    path = Path(path)
    if (path / SUMMARY_FILE).exists():
        return path
    for name in ("eval-full", "eval-desk"):
        if (path / name / SUMMARY_FILE).exists():
            return path / name
    raise MissingArtifactError(f"no evaluation summary under {path}; run 'pcdforge eval' first")
