"""Database package initialization."""
from .models import (
    REGISTRY_FILE,
    Base,
    EvaluationRecord,
    TrainingRun,
    get_session,
    init_database,
)

__all__ = [
    'REGISTRY_FILE',
    'Base',
    'EvaluationRecord',
    'TrainingRun',
    'get_session',
    'init_database',
]
