"""Benchmark datasets."""
from .synthetic import (
    DEFAULT_DATA_SEED,
    DEFAULT_N,
    DISK_CENTER,
    MODE_CENTERS,
    SIGMA_Q,
    Dataset2D,
    denormalize_label,
    generate_dataset,
    load_dataset,
    normalize_label,
    normalized_quality,
    quality,
    save_dataset,
)

__all__ = [
    'DEFAULT_DATA_SEED',
    'DEFAULT_N',
    'DISK_CENTER',
    'MODE_CENTERS',
    'SIGMA_Q',
    'Dataset2D',
    'denormalize_label',
    'generate_dataset',
    'load_dataset',
    'normalize_label',
    'normalized_quality',
    'quality',
    'save_dataset',
]
