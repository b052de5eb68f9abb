"""Six-peak Gaussian mixture benchmarks.

The performance of a 2D design x is the un-normalized mixture density

    q(x) = sum_k exp(-||x - mu_k||^2 / (2 sigma_q^2))

with six centres evenly spaced on a circle of radius 0.4. Example 1 draws
designs uniformly from [-0.6, 0.6]^2; Example 2 puts half of them in a
disk of radius 0.2 around the second centre, which skews the labels
toward that peak.
"""
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from ..engine import Tensor, exp, square, sum_
from ..engine.tensor import _as_tensor
from ..errors import ContractViolation, MissingArtifactError

N_MODES = 6
MODE_RADIUS = 0.4
SIGMA_Q = 0.1
SQUARE_HALF_WIDTH = 0.6
DISK_RADIUS = 0.2
DEFAULT_N = 10_000
DEFAULT_DATA_SEED = 1234
EXAMPLES = (1, 2)

MODE_CENTERS = np.array([
    [MODE_RADIUS * math.cos(2.0 * math.pi * k / N_MODES),
     MODE_RADIUS * math.sin(2.0 * math.pi * k / N_MODES)]
    for k in range(N_MODES)
])
# Example 2 clusters its extra designs around the centre at 60 degrees.
DISK_CENTER = MODE_CENTERS[1]

PathLike = Union[str, Path]


@dataclass
class Dataset2D:
    points: np.ndarray
    labels_raw: np.ndarray
    labels: np.ndarray
    label_min: float
    label_max: float
    example_id: int
    seed: int = DEFAULT_DATA_SEED

    @property
    def size(self) -> int:
        return int(self.points.shape[0])

    def __len__(self):
        return self.size

    @cached_property
    def label_order(self) -> np.ndarray:
        """Indices that sort ``labels`` ascending (stable)."""
        return np.argsort(self.labels, kind="stable")

    @cached_property
    def sorted_labels(self) -> np.ndarray:
        return self.labels[self.label_order]

    @cached_property
    def unique_labels(self) -> np.ndarray:
        return np.unique(self.labels)


def quality(x) -> Tensor:
    """Exact performance estimator; differentiable with respect to the designs."""
    x = _as_tensor(x)
    if x.values.ndim != 2 or x.shape[1] != 2:
        raise ContractViolation(f"quality() needs (n, 2) designs, got {x.shape}")
    total = None
    for center in MODE_CENTERS:
        bump = exp(sum_(square(x - center), axis=1) * (-0.5 / SIGMA_Q ** 2))
        total = bump if total is None else total + bump
    return total


def _check_range(label_min: float, label_max: float):
    if not label_max > label_min:
        raise ContractViolation(
            f"degenerate label range [{label_min}, {label_max}] cannot be normalized"
        )


def normalize_label(value, dataset: Dataset2D):
    _check_range(dataset.label_min, dataset.label_max)
    return (np.asarray(value, dtype=np.float64) - dataset.label_min) / (
        dataset.label_max - dataset.label_min
    )


def denormalize_label(value, dataset: Dataset2D):
    _check_range(dataset.label_min, dataset.label_max)
    return dataset.label_min + np.asarray(value, dtype=np.float64) * (
        dataset.label_max - dataset.label_min
    )


def normalized_quality(x, dataset: Dataset2D) -> Tensor:
    """q(x) mapped into the dataset's normalized label space (not clipped)."""
    _check_range(dataset.label_min, dataset.label_max)
    scale = 1.0 / (dataset.label_max - dataset.label_min)
    return (quality(x) - dataset.label_min) * scale


def _uniform_square(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.uniform(-SQUARE_HALF_WIDTH, SQUARE_HALF_WIDTH, size=(n, 2))


def _uniform_disk(rng: np.random.Generator, n: int) -> np.ndarray:
    angle = rng.uniform(0.0, 2.0 * math.pi, size=n)
    radius = DISK_RADIUS * np.sqrt(rng.uniform(0.0, 1.0, size=n))
    return DISK_CENTER + np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])


def generate_dataset(example_id: int, n: int = DEFAULT_N,
                     seed: int = DEFAULT_DATA_SEED) -> Dataset2D:
    """Sample a benchmark dataset; deterministic in (example_id, n, seed)."""
    if example_id not in EXAMPLES:
        raise ContractViolation(f"unknown example_id {example_id}; expected one of {EXAMPLES}")
    if n < 1:
        raise ContractViolation(f"need at least 1 point, got n={n}")

    rng = np.random.default_rng(seed)
    if example_id == 1:
        points = _uniform_square(rng, n)
    else:
        points = np.vstack([_uniform_square(rng, (n + 1) // 2), _uniform_disk(rng, n // 2)])

    labels_raw = quality(points).values
    label_min, label_max = float(labels_raw.min()), float(labels_raw.max())
    _check_range(label_min, label_max)
    labels = (labels_raw - label_min) / (label_max - label_min)
    return Dataset2D(points=points, labels_raw=labels_raw, labels=labels,
                     label_min=label_min, label_max=label_max,
                     example_id=example_id, seed=seed)


def save_dataset(dataset: Dataset2D, path: PathLike) -> Path:
    """CSV with a '#' provenance header; floats are written repr-exact."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame({
        "x1": dataset.points[:, 0],
        "x2": dataset.points[:, 1],
        "label_raw": dataset.labels_raw,
        "label_norm": dataset.labels,
    })
    header = (f"# example_id={dataset.example_id} seed={dataset.seed} sigma_q={SIGMA_Q!r} "
              f"label_min={dataset.label_min!r} label_max={dataset.label_max!r}\n")
    with open(path, "w", newline="") as handle:
        handle.write(header)
        frame.to_csv(handle, index=False, float_format="%.17g")
    return path


def load_dataset(path: PathLike) -> Dataset2D:
    path = Path(path)
    if not path.exists():
        raise MissingArtifactError(f"dataset not found: {path}")
    with open(path) as handle:
        header = handle.readline()
    if not header.startswith("#"):
        raise ContractViolation(f"{path}: missing dataset header line")
    meta = dict(field.split("=", 1) for field in header[1:].split())
    frame = pd.read_csv(path, skiprows=1)
    return Dataset2D(
        points=frame[["x1", "x2"]].to_numpy(dtype=np.float64),
        labels_raw=frame["label_raw"].to_numpy(dtype=np.float64),
        labels=frame["label_norm"].to_numpy(dtype=np.float64),
        label_min=float(meta["label_min"]),
        label_max=float(meta["label_max"]),
        example_id=int(meta["example_id"]),
        seed=int(meta["seed"]),
    )
