"""Run registry service: records training runs and evaluations in SQLite."""
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from sqlalchemy.orm import Session

from ..database import REGISTRY_FILE, EvaluationRecord, TrainingRun, init_database
from ..utils import output_root


class RegistryService:
    """Thin query layer over the registry database."""

    def __init__(self, session: Session):
        self.session = session

    @classmethod
    def open(cls, root: Optional[Path] = None) -> "RegistryService":
        root = Path(root) if root is not None else output_root()
        return cls(init_database(str(root / REGISTRY_FILE)))

    def start_run(self, run_id: str, example_id: int, model: str, seed: int,
                  config_hash: str, run_dir: Path) -> TrainingRun:
        run = self.session.query(TrainingRun).filter(TrainingRun.run_id == run_id).first()
        if run is None:
            run = TrainingRun(run_id=run_id)
            self.session.add(run)
        run.example_id = example_id
        run.model = model
        run.seed = seed
        run.config_hash = config_hash
        run.run_dir = str(run_dir)
        run.status = 'running'
        run.steps_completed = 0
        run.started_at = datetime.now()
        run.finished_at = None
        run.message = None
        self.session.commit()
        return run

    def finish_run(self, run_id: str, status: str, steps_completed: int,
                   vicinity_resamples: int = 0, message: Optional[str] = None):
        run = self.session.query(TrainingRun).filter(TrainingRun.run_id == run_id).first()
        if run is None:
            return
        run.status = status
        run.steps_completed = steps_completed
        run.vicinity_resamples = vicinity_resamples
        run.finished_at = datetime.now()
        run.duration_seconds = (run.finished_at - run.started_at).total_seconds()
        run.message = message
        self.session.commit()

    def record_evaluation(self, run_id: str, eval_dir: Path, protocol: str,
                          summary: Dict[str, Any]) -> EvaluationRecord:
        aggregates = summary.get("aggregates", {})
        record = EvaluationRecord(
            run_id=run_id,
            eval_dir=str(eval_dir),
            protocol=protocol,
            status=summary.get("status"),
            label_error_mean=aggregates.get("label_error", {}).get("mean"),
            likelihood_mean=aggregates.get("likelihood", {}).get("mean"),
            diversity_mean=aggregates.get("diversity", {}).get("mean"),
            occupied_modes=summary.get("occupied_modes"),
        )
        self.session.add(record)
        self.session.commit()
        return record

    def list_runs(self) -> List[TrainingRun]:
        return self.session.query(TrainingRun).order_by(TrainingRun.started_at).all()

    def latest_evaluation(self, run_id: str) -> Optional[EvaluationRecord]:
        return self.session.query(EvaluationRecord).filter(
            EvaluationRecord.run_id == run_id
        ).order_by(EvaluationRecord.created_at.desc()).first()

    def close(self):
        self.session.close()
