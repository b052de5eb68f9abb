"""Condition sweep: generate at each condition, score, repeat."""
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np

from ..config import EvalProtocol
from ..data import MODE_CENTERS, Dataset2D, normalized_quality
from ..errors import NumericError
from ..models import Generator
from .metrics import (
    diversity_diagnostics,
    fit_label_kde,
    label_error,
    mode_occupancy,
    occupied_modes,
)
from .report import EvalCell, EvalReport

# Stream keys outside the (condition, repeat) grid
DATA_STREAM = 2 ** 31 - 1
SAMPLES_STREAM = 2 ** 31 - 2


def cell_rng(seed: int, condition_index: int, repeat: int) -> np.random.Generator:
    """Independent stream per (seed, condition, repeat); scheduling-order free."""
    return np.random.default_rng([seed, condition_index, repeat])


def generate_designs(generator: Generator, condition: float, n: int,
                     rng: np.random.Generator) -> np.ndarray:
    z = generator.sample_noise(rng, n)
    return generator(z, np.full(n, condition)).values


def try_generate(generator: Generator, condition: float, n: int,
                 rng: np.random.Generator) -> Tuple[Optional[np.ndarray], str]:
    """Designs and an empty tag, or None and the tag of the op that went non-finite."""
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            designs = generate_designs(generator, condition, n, rng)
    except NumericError as exc:
        return None, exc.op or "generator"
    if not np.all(np.isfinite(designs)):
        return None, "output"
    return designs, ""


def _evaluate_cell(generator: Generator, dataset: Dataset2D, protocol: EvalProtocol,
                   seed: int, condition_index: int, condition: float,
                   repeat: int) -> EvalCell:
    rng = cell_rng(seed, condition_index, repeat)
    cell = EvalCell(condition_index=condition_index, condition=float(condition), repeat=repeat)
    designs, failure = try_generate(generator, condition, protocol.n_samples, rng)
    if designs is None:
        cell.failed = True
        cell.failure = failure
        return cell

    predicted = normalized_quality(designs, dataset).values
    cell.label_error = label_error(condition, predicted)
    kde = fit_label_kde(predicted, protocol.bandwidth_grid(), protocol.kde_folds)
    cell.likelihood = kde.density(condition)
    cell.kde_bandwidth = kde.bandwidth
    cell.kde_degenerate = kde.degenerate
    diversity = diversity_diagnostics(designs, protocol.diversity_bandwidth,
                                      protocol.subset_size, protocol.n_subsets, rng)
    cell.diversity = diversity.score
    cell.degenerate_subsets = diversity.degenerate_subsets
    return cell


def data_diversity(dataset: Dataset2D, protocol: EvalProtocol, seed: int) -> List[float]:
    """Diversity of training designs whose labels lie within the data window of each condition."""
    values = []
    for index, condition in enumerate(protocol.conditions()):
        near = np.abs(dataset.labels - condition) <= protocol.data_window
        if near.sum() < protocol.subset_size:
            values.append(float("nan"))
            continue
        rng = cell_rng(seed, index, DATA_STREAM)
        values.append(diversity_diagnostics(dataset.points[near], protocol.diversity_bandwidth,
                                            protocol.subset_size, protocol.n_subsets, rng).score)
    return values


def evaluate(generator: Generator, dataset: Dataset2D, protocol: EvalProtocol, seed: int,
             run_id: str = "", model_tag: str = "", config_echo: str = "",
             jobs: int = 1) -> EvalReport:
    """Score a generator over the protocol's condition sweep.

    Cells are independent and may run on ``jobs`` threads; each has its own
    rng stream, so the report does not depend on ``jobs``.
    """
    conditions = protocol.conditions()
    tasks: List[Tuple[int, float, int]] = [
        (index, float(condition), repeat)
        for index, condition in enumerate(conditions)
        for repeat in range(protocol.repeats)
    ]

    def run(task):
        return _evaluate_cell(generator, dataset, protocol, seed, *task)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(run, tasks))
    else:
        cells = [run(task) for task in tasks]

    samples, samples_failure = try_generate(generator, protocol.plot_condition, protocol.n_samples,
                                            cell_rng(seed, 0, SAMPLES_STREAM))
    counts = mode_occupancy(samples, protocol.occupancy_radius) if samples is not None \
        else np.zeros(len(MODE_CENTERS), dtype=np.int64)

    return EvalReport(
        run_id=run_id,
        seed=seed,
        model_tag=model_tag,
        example_id=dataset.example_id,
        conditions=[float(c) for c in conditions],
        cells=cells,
        data_diversity=data_diversity(dataset, protocol, seed),
        plot_condition=protocol.plot_condition,
        samples=samples,
        samples_failure=samples_failure,
        mode_counts=[int(c) for c in counts],
        occupied_modes=occupied_modes(counts, protocol.n_samples),
        protocol=protocol.model_dump(),
        config_echo=config_echo,
    )
