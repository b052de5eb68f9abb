"""Services package initialization."""
from .registry import RegistryService
from .trainer import TrainingService, TrainResult, build_networks, run_sweep, run_training, seed_streams
from .evaluator import EvaluationService, restore_run
from .plots import PlotService
from .compare import CompareService

__all__ = [
    'RegistryService',
    'TrainingService',
    'TrainResult',
    'build_networks',
    'run_sweep',
    'run_training',
    'seed_streams',
    'EvaluationService',
    'restore_run',
    'PlotService',
    'CompareService',
]
