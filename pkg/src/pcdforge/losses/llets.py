"""Lambert W and the Lambert log exponential transition score.

The score maps an L1 conditioning error eps in [0, 1] to a quality in [0, 1]:

    -ln(eps) / a                       eps >  eps*
    exp(-eps^2 / (2 sigma_L^2))        eps <= eps*

with w = W0(-1/(2a)), eps* = exp(-a e^w) and sigma_L = eps* / sqrt(-2w).
The Gaussian branch uses sigma_L squared, so value and slope both match
at eps* (the matching condition reduces to w e^w = -1/(2a)).
"""
import math
from dataclasses import dataclass

import numpy as np

from ..engine import Tensor, abs_, clamp
from ..engine.tensor import _as_tensor, _check_finite, _node
from ..errors import ContractViolation, DomainError

BRANCH_POINT = -1.0 / math.e
MIN_CUTOFF = math.e / 2.0
DEFAULT_CUTOFF = 4.7
MAX_HALLEY_ITERATIONS = 50


def lambert_w0(x: float, max_iter: int = MAX_HALLEY_ITERATIONS) -> float:
    """Principal branch of the Lambert W function by Halley iteration."""
    x = float(x)
    if math.isnan(x) or x < BRANCH_POINT:
        raise DomainError(f"W0 is undefined for x = {x!r} < -1/e")
    if x == BRANCH_POINT:
        return -1.0
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return math.inf

    if x < -0.25:
        # series about the branch point
        p = math.sqrt(max(0.0, 2.0 * (math.e * x + 1.0)))
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3
    elif x < math.e:
        w = math.log1p(x)
    else:
        log_x = math.log(x)
        w = log_x - math.log(log_x)

    for _ in range(max_iter):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= dw
        if abs(dw) <= 1e-15 * (1.0 + abs(w)):
            break
    return w


@dataclass(frozen=True)
class LLETSParams:
    a: float
    w: float
    eps_star: float
    sigma_L: float

    @property
    def branch_score(self) -> float:
        """Score at eps*, equal to e^w on both branches."""
        return math.exp(self.w)

    def check(self, tol: float = 1e-9):
        residual = abs(self.w * math.exp(self.w) + 1.0 / (2.0 * self.a))
        if residual >= 1e-12:
            raise DomainError(f"W0 residual {residual:.3g} too large for a = {self.a}")
        if not (-1.0 <= self.w < 0.0):
            raise DomainError(f"w = {self.w} outside [-1, 0)")
        if not (0.0 < self.eps_star < 1.0 and self.sigma_L > 0.0):
            raise DomainError(f"invalid branch point {self.eps_star} / width {self.sigma_L}")
        log_side = -math.log(self.eps_star) / self.a
        gauss_side = math.exp(-self.eps_star ** 2 / (2.0 * self.sigma_L ** 2))
        if abs(log_side - gauss_side) > tol:
            raise DomainError(f"score discontinuous at eps*: {log_side} vs {gauss_side}")


def llets_params(a: float = DEFAULT_CUTOFF) -> LLETSParams:
    if not a >= MIN_CUTOFF:
        raise DomainError(f"Lambert cutoff a = {a} is below e/2 = {MIN_CUTOFF:.6f}")
    w = lambert_w0(-1.0 / (2.0 * a))
    eps_star = math.exp(-a * math.exp(w))
    sigma_L = eps_star / math.sqrt(-2.0 * w)
    params = LLETSParams(a=float(a), w=w, eps_star=eps_star, sigma_L=sigma_L)
    params.check()
    return params


def llets_score(eps, params: LLETSParams) -> Tensor:
    """Piecewise LLETS of a tensor of L1 errors; differentiable on both branches."""
    eps = _as_tensor(eps)
    _check_finite("llets", eps)
    if np.any(eps.values < 0.0):
        raise ContractViolation("LLETS errors must be non-negative")

    e = eps.values
    on_log = e > params.eps_star
    safe = np.where(on_log, e, params.eps_star)
    two_var = 2.0 * params.sigma_L ** 2
    gauss = np.exp(-(e ** 2) / two_var)
    values = np.where(on_log, -np.log(safe) / params.a, gauss)
    slope = np.where(on_log, -1.0 / (params.a * safe), -(e / params.sigma_L ** 2) * gauss)

    return _node(values, (eps,), "llets", lambda g: (g * slope,))


def conditioning_error(predicted, targets) -> Tensor:
    """eps = |y_condition - y_estimated| per sample, clamped to [0, 1]."""
    return clamp(abs_(_as_tensor(predicted) - _as_tensor(targets)), 0.0, 1.0)
