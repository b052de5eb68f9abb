"""Plot service: sample scatters and metric-versus-condition curves as SVG."""
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..errors import MissingArtifactError
from ..evaluation import generate_designs, load_conditions, load_samples, load_summary, locate_eval_dir
from ..evaluation.protocol import SAMPLES_STREAM, cell_rng
from ..evaluation.report import METRICS
from ..utils import create_empty_chart, create_metric_curves, create_samples_scatter, output_root, save_svg
from .evaluator import restore_run
from .trainer import FINAL_CHECKPOINT, seed_streams

PathLike = Union[str, Path]


def series_name(summary: Dict) -> str:
    return f"{summary['model']} ex{summary['example_id']} seed{summary['seed']}"


def _run_dir_of(eval_dir: Path) -> Path:
    return eval_dir.parent if (eval_dir.parent / FINAL_CHECKPOINT).exists() else eval_dir


def samples_at(eval_dir: Path, summary: Dict, condition: float) -> np.ndarray:
    """Stored samples when the condition matches, else regenerated from the checkpoint."""
    if np.isclose(condition, summary["plot_condition"]):
        return load_samples(eval_dir)
    checkpoint = _run_dir_of(eval_dir) / FINAL_CHECKPOINT
    if not checkpoint.exists():
        raise MissingArtifactError(
            f"need {checkpoint} to draw samples at condition {condition:g}"
        )
    cfg, generator, _ = restore_run(checkpoint)
    _, _, eval_seed = seed_streams(cfg.seed)
    n = int(summary["protocol"]["n_samples"])
    return generate_designs(generator, condition, n, cell_rng(eval_seed, 0, SAMPLES_STREAM))


class PlotService:
    def __init__(self, verbose: bool = True):
        self.verbose = verbose

    def emit_plots(self, runs: Sequence[PathLike], condition: Optional[float] = None,
                   out_dir: Optional[PathLike] = None) -> List[Path]:
        if not runs:
            raise MissingArtifactError("no run directories given to plot")
        eval_dirs = [locate_eval_dir(run) for run in runs]
        summaries = [load_summary(path) for path in eval_dirs]
        out_dir = Path(out_dir) if out_dir is not None else output_root() / "plots"
        condition = summaries[0]["plot_condition"] if condition is None else condition

        written = []
        samples = {
            series_name(summary): samples_at(path, summary, condition)
            for path, summary in zip(eval_dirs, summaries)
        }
        written.append(save_svg(create_samples_scatter(samples, condition),
                                out_dir / f"samples_c{condition:g}.svg"))

        frames = [load_conditions(path) for path in eval_dirs]
        for metric in METRICS:
            curves = {
                series_name(summary): pd.DataFrame({
                    "condition": frame["condition"],
                    "mean": frame[f"{metric}_mean"],
                    "std": frame[f"{metric}_std"],
                })
                for summary, frame in zip(summaries, frames)
            }
            if all(curve["mean"].isna().all() for curve in curves.values()):
                figure = create_empty_chart(f"No finite {metric} values")
            else:
                figure = create_metric_curves(metric, curves)
            written.append(save_svg(figure, out_dir / f"{metric}.svg"))

        if self.verbose:
            for path in written:
                print(f"📊 {path}")
        return written
