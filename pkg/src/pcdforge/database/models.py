"""Database models for the run registry."""
from datetime import datetime
from pathlib import Path

from sqlalchemy import Column, DateTime, Float, Integer, String, Text, create_engine
from sqlalchemy.orm import declarative_base, sessionmaker

Base = declarative_base()

REGISTRY_FILE = "registry.db"


class TrainingRun(Base):
    """One training run and where its artifacts live."""
    __tablename__ = 'training_runs'

    id = Column(Integer, primary_key=True)
    run_id = Column(String(255), unique=True, nullable=False)
    example_id = Column(Integer, nullable=False)
    model = Column(String(20), nullable=False)  # 'pcdgan' or 'ccgan'
    seed = Column(Integer, nullable=False)
    config_hash = Column(String(12), nullable=False)
    run_dir = Column(String(1000), nullable=False)
    status = Column(String(20), default='running')  # running | completed | aborted
    steps_completed = Column(Integer, default=0)
    vicinity_resamples = Column(Integer, default=0)
    started_at = Column(DateTime, nullable=False)
    finished_at = Column(DateTime)
    duration_seconds = Column(Float, default=0.0)
    message = Column(Text)

    def __repr__(self):
        return f"<TrainingRun(run={self.run_id}, status={self.status})>"


class EvaluationRecord(Base):
    """Aggregates of one evaluation of a checkpoint."""
    __tablename__ = 'evaluations'

    id = Column(Integer, primary_key=True)
    run_id = Column(String(255), nullable=False)
    eval_dir = Column(String(1000), nullable=False)
    protocol = Column(String(10))  # 'desk' or 'full'
    status = Column(String(20))
    label_error_mean = Column(Float)
    likelihood_mean = Column(Float)
    diversity_mean = Column(Float)
    occupied_modes = Column(Integer)
    created_at = Column(DateTime, nullable=False, default=datetime.now)

    def __repr__(self):
        return f"<EvaluationRecord(run={self.run_id}, protocol={self.protocol})>"


# Database initialization
def init_database(db_path: str = f"runs/{REGISTRY_FILE}"):
    """Initialize the database and create tables."""
    Path(db_path).parent.mkdir(parents=True, exist_ok=True)
    engine = create_engine(f'sqlite:///{db_path}', echo=False)
    Base.metadata.create_all(engine)
    Session = sessionmaker(bind=engine)
    return Session()


def get_session(db_path: str = f"runs/{REGISTRY_FILE}"):
    """Get a database session."""
    engine = create_engine(f'sqlite:///{db_path}', echo=False)
    Session = sessionmaker(bind=engine)
    return Session()
