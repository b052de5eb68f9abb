"""Evaluation metrics, the condition-sweep protocol and reports."""
from .metrics import (
    DiversityResult,
    LabelKDE,
    diversity_diagnostics,
    diversity_score,
    fit_label_kde,
    label_error,
    likelihood_score,
    mode_occupancy,
    occupied_modes,
)
from .protocol import cell_rng, data_diversity, evaluate, generate_designs
from .report import (
    EvalCell,
    EvalReport,
    load_conditions,
    load_samples,
    load_summary,
    locate_eval_dir,
)

__all__ = [
    'DiversityResult',
    'LabelKDE',
    'diversity_diagnostics',
    'diversity_score',
    'fit_label_kde',
    'label_error',
    'likelihood_score',
    'mode_occupancy',
    'occupied_modes',
    'cell_rng',
    'data_diversity',
    'evaluate',
    'generate_designs',
    'EvalCell',
    'EvalReport',
    'load_conditions',
    'load_samples',
    'load_summary',
    'locate_eval_dir',
]
