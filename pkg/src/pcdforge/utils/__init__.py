"""Utilities package initialization."""
from .analytics import create_empty_chart, create_metric_curves, create_samples_scatter, save_svg
from .helpers import (
    format_duration,
    output_root,
    process_snapshot,
    short_hash,
    write_json,
)

__all__ = [
    'create_empty_chart',
    'create_metric_curves',
    'create_samples_scatter',
    'save_svg',
    'format_duration',
    'output_root',
    'process_snapshot',
    'short_hash',
    'write_json',
]
