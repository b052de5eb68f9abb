"""Compare service: summary table across runs and the direction checks."""
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..errors import MissingArtifactError
from ..evaluation import load_summary, locate_eval_dir
from ..evaluation.report import FLOAT_FORMAT, METRICS
from ..utils import write_json

PathLike = Union[str, Path]
DIRECTIONS_FILE = "directions.json"
FULL_MODE_COUNT = 6


def collect_runs(runs: Sequence[PathLike]) -> pd.DataFrame:
    """One row per run with its repeat-averaged metrics."""
    rows = []
    for run in runs:
        eval_dir = locate_eval_dir(run)
        summary = load_summary(eval_dir)
        row = {
            "run": str(eval_dir),
            "example_id": int(summary["example_id"]),
            "model": summary["model"],
            "seed": int(summary["seed"]),
            "status": summary["status"],
            "occupied_modes": int(summary.get("occupied_modes", 0)),
        }
        for metric in METRICS:
            row[metric] = summary["aggregates"][metric]["mean"]
        rows.append(row)
    return pd.DataFrame(rows)


def table(runs_frame: pd.DataFrame) -> pd.DataFrame:
    """Mean and std over runs per (example, model)."""
    grouped = runs_frame.groupby(["example_id", "model"], sort=True)
    out = grouped.size().rename("n_runs").to_frame()
    for metric in METRICS:
        out[f"{metric}_mean"] = grouped[metric].mean()
        out[f"{metric}_std"] = grouped[metric].std(ddof=0)
    out["full_mode_runs"] = grouped["occupied_modes"].apply(
        lambda counts: int((counts >= FULL_MODE_COUNT).sum())
    )
    return out.reset_index()


def _cell(frame: pd.DataFrame, example_id: int, model: str, column: str) -> Optional[float]:
    match = frame[(frame["example_id"] == example_id) & (frame["model"] == model)]
    return None if match.empty else float(match[column].iloc[0])


def directions(frame: pd.DataFrame) -> Optional[Dict[str, object]]:
    """Whether PcDGAN beats CcGAN in the expected directions; None without all four groups."""
    needed = [(example, model) for example in (1, 2) for model in ("pcdgan", "ccgan")]
    if any(_cell(frame, e, m, "n_runs") is None for e, m in needed):
        return None
    lik_pcd = _cell(frame, 2, "pcdgan", "likelihood_mean")
    lik_cc = _cell(frame, 2, "ccgan", "likelihood_mean")
    div2_gap = _cell(frame, 2, "pcdgan", "diversity_mean") - _cell(frame, 2, "ccgan", "diversity_mean")
    err_pcd = _cell(frame, 1, "pcdgan", "label_error_mean")
    err_cc = _cell(frame, 1, "ccgan", "label_error_mean")
    div1_gap = _cell(frame, 1, "pcdgan", "diversity_mean") - _cell(frame, 1, "ccgan", "diversity_mean")
    full_mode_runs = _cell(frame, 2, "pcdgan", "full_mode_runs")
    n_runs = _cell(frame, 2, "pcdgan", "n_runs")
    return {
        "example2_likelihood_ratio": lik_pcd / lik_cc if lik_cc else float("inf"),
        "example2_likelihood_ok": bool(lik_pcd >= 1.5 * lik_cc),
        "example2_diversity_gap": div2_gap,
        "example2_diversity_ok": bool(div2_gap >= 5.0),
        "example1_label_error_ratio": err_pcd / err_cc if err_cc else float("inf"),
        "example1_label_error_ok": bool(err_pcd <= 0.8 * err_cc),
        "example1_diversity_gap": div1_gap,
        "example1_diversity_ok": bool(abs(div1_gap) <= 5.0),
        "example2_full_mode_runs": int(full_mode_runs),
        "example2_mode_coverage_ok": bool(full_mode_runs >= min(2, n_runs)),
    }


class CompareService:
    def __init__(self, verbose: bool = True):
        self.verbose = verbose

    def compare(self, runs: Sequence[PathLike], out_file: PathLike) -> pd.DataFrame:
        if not runs:
            raise MissingArtifactError("no run directories given to compare")
        frame = table(collect_runs(runs))
        out_file = Path(out_file)
        out_file.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(out_file, index=False, float_format=FLOAT_FORMAT)

        checks = directions(frame)
        if checks is not None:
            write_json(out_file.parent / DIRECTIONS_FILE, checks)
        if self.verbose:
            print(f"📊 {len(frame)} groups from {len(runs)} runs -> {out_file}")
            if checks is not None:
                passed = sum(value for key, value in checks.items() if key.endswith("_ok"))
                print(f"{'✅' if passed == 5 else '⚠️'} {passed}/5 direction checks hold")
        return frame
