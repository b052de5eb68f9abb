"""Exception hierarchy for pcdforge."""
from typing import Optional


class PcdForgeError(Exception):
    """Base class for every error raised by pcdforge."""


class ContractViolation(PcdForgeError, ValueError):
    """A caller broke a precondition (shape, range, emptiness)."""


class DomainError(ContractViolation):
    """A special function was evaluated outside its domain."""


class NumericError(PcdForgeError, FloatingPointError):
    """A non-finite value appeared in a forward value, gradient or loss."""

    def __init__(self, message: str, op: Optional[str] = None,
                 parameter: Optional[str] = None, term: Optional[str] = None):
        super().__init__(message)
        self.op = op
        self.parameter = parameter
        self.term = term


class SingularKernelError(NumericError):
    """Cholesky factorization failed even after jitter escalation."""


class VicinityEmptyError(PcdForgeError):
    """A hard vicinity contained no samples."""

    def __init__(self, message: str, target: Optional[float] = None):
        super().__init__(message)
        self.target = target


class CheckpointError(PcdForgeError):
    """A checkpoint file could not be read."""


class CheckpointMismatchError(CheckpointError):
    """Checkpoint architecture does not match the configured model."""


class TrainingAborted(PcdForgeError):
    """Training hit a non-finite loss and stopped."""

    def __init__(self, message: str, step: int,
                 last_good_checkpoint: Optional[str] = None,
                 diagnostics_path: Optional[str] = None):
        super().__init__(message)
        self.step = step
        self.last_good_checkpoint = last_good_checkpoint
        self.diagnostics_path = diagnostics_path


class MissingArtifactError(PcdForgeError, FileNotFoundError):
    """An input file expected from an earlier command is absent."""
