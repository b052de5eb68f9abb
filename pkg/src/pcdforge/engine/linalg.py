"""Differentiable log-determinant of symmetric positive definite matrices."""
from typing import Tuple

import numpy as np
import scipy.linalg as la

from ..errors import ContractViolation, SingularKernelError
from .tensor import Tensor, _check_finite, _node

DEFAULT_JITTER = 1e-6
MAX_JITTER_RETRIES = 3


def jitter_cholesky(matrix: np.ndarray, jitter: float = DEFAULT_JITTER,
                    max_retries: int = MAX_JITTER_RETRIES) -> Tuple[np.ndarray, float]:
    """Lower Cholesky factor, adding diagonal jitter if the plain factorization fails.

    The first attempt factors ``matrix`` as given. Each retry raises the
    total diagonal jitter tenfold, starting from ``jitter`` (or 1e-6 when
    no jitter was requested).

    Returns:
        (lower factor, extra jitter added on top of ``matrix``)
    """
    try:
        return la.cholesky(matrix, lower=True), 0.0
    except la.LinAlgError:
        pass

    base = jitter if jitter > 0 else DEFAULT_JITTER
    identity = np.eye(matrix.shape[0])
    for retry in range(1, max_retries + 1):
        extra = base * 10.0 ** retry - jitter
        try:
            return la.cholesky(matrix + extra * identity, lower=True), extra
        except la.LinAlgError:
            continue
    raise SingularKernelError(
        f"Cholesky failed after {max_retries} jitter escalations "
        f"(final diagonal jitter {base * 10.0 ** max_retries:g})",
        op="logdet",
    )


def logdet(matrix: Tensor, jitter: float = DEFAULT_JITTER,
           max_retries: int = MAX_JITTER_RETRIES) -> Tensor:
    """log det(matrix) = 2 * sum(log(diag(chol))) with d logdet / dA = A^-1."""
    values = matrix.values
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ContractViolation(f"'logdet' needs a square matrix, got shape {matrix.shape}")
    _check_finite("logdet", matrix)

    chol, _ = jitter_cholesky(values, jitter=jitter, max_retries=max_retries)
    out = 2.0 * np.log(np.diag(chol)).sum()

    def backward(g):
        inverse = la.cho_solve((chol, True), np.eye(values.shape[0]))
        return (g * 0.5 * (inverse + inverse.T),)

    return _node(np.asarray(out), (matrix,), "logdet", backward)


def logdet_eigh(matrix: np.ndarray) -> float:
    """Sum of log eigenvalues from a symmetric eigendecomposition (test oracle)."""
    eigenvalues = np.linalg.eigvalsh(matrix)
    if np.any(eigenvalues <= 0):
        raise SingularKernelError("matrix is not positive definite", op="logdet_eigh")
    return float(np.log(eigenvalues).sum())
