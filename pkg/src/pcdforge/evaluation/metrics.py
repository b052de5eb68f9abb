"""Label error, KDE likelihood and DPP diversity of generated designs."""
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from sklearn.model_selection import GridSearchCV, KFold
from sklearn.neighbors import KernelDensity

from ..data import MODE_CENTERS
from ..errors import ContractViolation

BANDWIDTH_GRID = np.logspace(-3, 0, num=20)
KDE_FOLDS = 5
MIN_BANDWIDTH = 1e-3
DIVERSITY_BANDWIDTH = 1.0
SUBSET_SIZE = 10
N_SUBSETS = 1000
DIVERSITY_JITTER = 1e-10
OCCUPANCY_RADIUS = 0.25
OCCUPANCY_FRACTION = 0.02


def label_error(conditions, predicted_labels) -> float:
    """Mean absolute error between conditions and estimated labels."""
    predicted = np.asarray(predicted_labels, dtype=np.float64).ravel()
    if predicted.size == 0:
        raise ContractViolation("label_error of an empty prediction set")
    conditions = np.asarray(conditions, dtype=np.float64).ravel()
    if conditions.size not in (1, predicted.size):
        raise ContractViolation(
            f"{conditions.size} conditions for {predicted.size} predictions"
        )
    return float(np.mean(np.abs(conditions - predicted)))


@dataclass
class LabelKDE:
    estimator: KernelDensity
    bandwidth: float
    degenerate: bool

    def density(self, value: float) -> float:
        return float(np.exp(self.estimator.score_samples(np.array([[value]]))[0]))


def fit_label_kde(labels, bandwidths: Sequence[float] = BANDWIDTH_GRID,
                  folds: int = KDE_FOLDS) -> LabelKDE:
    """Gaussian KDE whose bandwidth maximizes the k-fold held-out log-likelihood."""
    # sorted, then shuffled folds with a fixed seed: the fit depends only on the label multiset
    samples = np.sort(np.asarray(labels, dtype=np.float64).ravel()).reshape(-1, 1)
    if samples.shape[0] == 0:
        raise ContractViolation("cannot fit a KDE to zero labels")
    if not np.all(np.isfinite(samples)):
        raise ContractViolation("KDE labels must be finite")

    if np.unique(samples).size < 2:
        estimator = KernelDensity(kernel="gaussian", bandwidth=MIN_BANDWIDTH).fit(samples)
        return LabelKDE(estimator, MIN_BANDWIDTH, degenerate=True)

    grid = GridSearchCV(
        KernelDensity(kernel="gaussian"),
        {"bandwidth": np.asarray(bandwidths, dtype=np.float64)},
        cv=KFold(n_splits=min(folds, samples.shape[0]), shuffle=True, random_state=0),
    )
    grid.fit(samples)
    bandwidth = float(grid.best_params_["bandwidth"])
    return LabelKDE(grid.best_estimator_, bandwidth, degenerate=False)


def likelihood_score(condition: float, generated_labels, bandwidths: Sequence[float] = BANDWIDTH_GRID,
                     folds: int = KDE_FOLDS) -> float:
    """KDE density of the generated labels evaluated at the condition."""
    return fit_label_kde(generated_labels, bandwidths, folds).density(condition)


@dataclass
class DiversityResult:
    score: float
    std: float
    degenerate_subsets: int
    n_subsets: int


def diversity_diagnostics(samples, bandwidth: float = DIVERSITY_BANDWIDTH,
                          subset_size: int = SUBSET_SIZE, n_subsets: int = N_SUBSETS,
                          rng: Optional[np.random.Generator] = None) -> DiversityResult:
    """Mean log det of RBF similarity over random subsets, with per-subset spread.

    Numerically singular subsets are counted as degenerate and get 1e-10 on
    the diagonal. Each subset's log det is capped
    at 0, which Hadamard's inequality guarantees for unit-diagonal kernels.
    """
    points = np.asarray(samples, dtype=np.float64)
    if points.ndim != 2:
        raise ContractViolation(f"diversity needs (n, d) samples, got shape {points.shape}")
    if points.shape[0] < subset_size:
        raise ContractViolation(f"{points.shape[0]} samples cannot fill subsets of {subset_size}")
    if n_subsets < 1 or subset_size < 1 or not bandwidth > 0:
        raise ContractViolation("diversity needs positive subset size, subset count and bandwidth")
    rng = rng if rng is not None else np.random.default_rng(0)

    keys = rng.random((n_subsets, points.shape[0]))
    subsets = np.argpartition(keys, subset_size - 1, axis=1)[:, :subset_size]
    chosen = points[subsets]
    sq = ((chosen[:, :, None, :] - chosen[:, None, :, :]) ** 2).sum(axis=-1)
    kernels = np.exp(-sq / (2.0 * bandwidth ** 2))

    eigenvalues = np.linalg.eigvalsh(kernels)
    # numerically rank deficient: smallest eigenvalue lost in round-off
    rank_tol = np.finfo(np.float64).eps * subset_size * eigenvalues.max(axis=1)
    degenerate = eigenvalues.min(axis=1) <= rank_tol
    jittered = np.where(degenerate[:, None], np.maximum(eigenvalues, 0.0) + DIVERSITY_JITTER,
                        np.maximum(eigenvalues, np.finfo(np.float64).tiny))
    logdets = np.minimum(np.log(jittered).sum(axis=1), 0.0)
    return DiversityResult(score=float(logdets.mean()), std=float(logdets.std()),
                           degenerate_subsets=int(degenerate.sum()), n_subsets=n_subsets)


def diversity_score(samples, bandwidth: float = DIVERSITY_BANDWIDTH,
                    subset_size: int = SUBSET_SIZE, n_subsets: int = N_SUBSETS,
                    rng: Optional[np.random.Generator] = None) -> float:
    return diversity_diagnostics(samples, bandwidth, subset_size, n_subsets, rng).score


def mode_occupancy(points, radius: float = OCCUPANCY_RADIUS) -> np.ndarray:
    """Samples per mixture centre, assigning each point to its nearest centre within radius."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    distances = np.linalg.norm(points[:, None, :] - MODE_CENTERS[None, :, :], axis=-1)
    nearest = distances.argmin(axis=1)
    within = distances[np.arange(points.shape[0]), nearest] <= radius
    return np.bincount(nearest[within], minlength=MODE_CENTERS.shape[0])


def occupied_modes(counts, total: int, min_fraction: float = OCCUPANCY_FRACTION) -> int:
    if total <= 0:
        return 0
    return int(np.sum(np.asarray(counts) >= min_fraction * total))
