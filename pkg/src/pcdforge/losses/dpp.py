"""Performance-conditioned DPP kernel and its log-determinant loss.

For a generated batch X with quality scores q:

    L_ij = k(x_i, x_j) * v_i * v_j + jitter * 1{i = j},   v_i = q_i ** gamma0

which is the Hadamard product of the RBF similarity with the rank-one
quality matrix, so L stays positive semi-definite before the jitter.
"""
from dataclasses import dataclass

import numpy as np

from ..engine import DEFAULT_JITTER, Tensor, clamp, exp, log, logdet, pairwise_sq_dists
from ..engine.tensor import _as_tensor
from ..errors import ContractViolation

Q_MIN = 1e-6
DEFAULT_BANDWIDTH = 1.0


@dataclass
class DPPBatchKernel:
    L: Tensor
    gamma0: float
    bandwidth: float
    jitter: float

    @property
    def size(self) -> int:
        return self.L.shape[0]


def rbf_kernel(X, bandwidth: float = DEFAULT_BANDWIDTH) -> Tensor:
    """K_ij = exp(-||x_i - x_j||^2 / (2 bandwidth^2)), differentiable in X."""
    if not bandwidth > 0:
        raise ContractViolation(f"RBF bandwidth must be positive, got {bandwidth}")
    X = _as_tensor(X)
    if X.values.ndim != 2 or X.shape[0] == 0:
        raise ContractViolation(f"RBF kernel needs a non-empty (n, d) batch, got {X.shape}")
    return exp(pairwise_sq_dists(X) * (-0.5 / bandwidth ** 2))


def build_kernel(X, q, gamma0: float, jitter: float = DEFAULT_JITTER,
                 bandwidth: float = DEFAULT_BANDWIDTH) -> DPPBatchKernel:
    X, q = _as_tensor(X), _as_tensor(q)
    n = X.shape[0] if X.values.ndim == 2 else 0
    if q.values.ndim != 1 or q.shape[0] != n:
        raise ContractViolation(f"need one quality score per sample: {q.shape} vs {X.shape}")
    if gamma0 < 0 or jitter < 0:
        raise ContractViolation(f"gamma0 and jitter must be non-negative ({gamma0}, {jitter})")
    if np.any(~np.isfinite(q.values)) or np.any(q.values > 1.0) or np.any(q.values < 0.0):
        raise ContractViolation("quality scores must lie in [0, 1]")

    K = rbf_kernel(X, bandwidth)
    v = exp(log(clamp(q, Q_MIN, 1.0)) * gamma0)
    quality = v.reshape(n, 1) @ v.reshape(1, n)
    L = K * quality + jitter * np.eye(n)
    return DPPBatchKernel(L=L, gamma0=float(gamma0), bandwidth=float(bandwidth),
                          jitter=float(jitter))


def logdet_psd(kernel: DPPBatchKernel) -> Tensor:
    return logdet(kernel.L, jitter=kernel.jitter)


def pcd_loss(kernel: DPPBatchKernel) -> Tensor:
    """-log det(L) / |B|; rewards batches that are both diverse and high quality."""
    return logdet_psd(kernel) * (-1.0 / kernel.size)
