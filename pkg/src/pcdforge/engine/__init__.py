"""Reverse-mode autodiff engine."""
from .tensor import (
    LOG_FLOOR,
    Tensor,
    abs_,
    add,
    clamp,
    concat,
    exp,
    leaky_relu,
    log,
    matmul,
    mean,
    mul,
    neg,
    pairwise_sq_dists,
    relu,
    reshape,
    sigmoid,
    square,
    stable_sigmoid,
    sum_,
    tanh,
    transpose,
)
from .linalg import DEFAULT_JITTER, jitter_cholesky, logdet, logdet_eigh
from .gradcheck import GradCheckReport, grad_check, grad_check_params

__all__ = [
    'LOG_FLOOR',
    'Tensor',
    'abs_',
    'add',
    'clamp',
    'concat',
    'exp',
    'leaky_relu',
    'log',
    'matmul',
    'mean',
    'mul',
    'neg',
    'pairwise_sq_dists',
    'relu',
    'reshape',
    'sigmoid',
    'square',
    'stable_sigmoid',
    'sum_',
    'tanh',
    'transpose',
    'DEFAULT_JITTER',
    'jitter_cholesky',
    'logdet',
    'logdet_eigh',
    'GradCheckReport',
    'grad_check',
    'grad_check_params',
]
