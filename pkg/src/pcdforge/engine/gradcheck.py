"""Central finite-difference gradient checks."""
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from ..errors import ContractViolation, NumericError
from .tensor import Tensor

# Relative error is measured against max(|analytic|, |numeric|, REL_FLOOR) so
# that entries whose true gradient is zero do not divide by round-off.
REL_FLOOR = 1e-6


@dataclass
class GradCheckReport:
    """Outcome of comparing analytic and finite-difference gradients."""

    max_rel_error: float
    tol: float
    analytic: np.ndarray
    numeric: np.ndarray

    @property
    def passed(self) -> bool:
        return self.max_rel_error <= self.tol


def _scalar(value: Tensor) -> float:
    result = value.item()
    if not np.isfinite(result):
        raise NumericError("gradient check evaluated a non-finite value", op="grad_check")
    return result


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    if analytic.size == 0:
        return 0.0
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), REL_FLOOR)
    return float(np.max(np.abs(analytic - numeric) / scale))


def grad_check(f: Callable[[Tensor], Tensor], x: Tensor, step: float = 1e-5,
               tol: float = 1e-4) -> GradCheckReport:
    """Compare the backward() gradient of the scalar f(x) with central differences."""
    if step <= 0:
        raise ContractViolation(f"step must be positive, got {step}")

    leaf = Tensor(x.values, requires_grad=True)
    root = f(leaf)
    _scalar(root)
    root.backward()
    analytic = leaf.grad.copy()

    numeric = np.zeros_like(x.values)
    base = x.values.copy()
    for index in np.ndindex(base.shape):
        plus, minus = base.copy(), base.copy()
        plus[index] += step
        minus[index] -= step
        numeric[index] = (_scalar(f(Tensor(plus))) - _scalar(f(Tensor(minus)))) / (2.0 * step)

    return GradCheckReport(relative_error(analytic, numeric), tol, analytic, numeric)


def grad_check_params(loss_fn: Callable[[], Tensor], params: Sequence[Tensor],
                      step: float = 1e-5, tol: float = 1e-4,
                      max_entries: Optional[int] = None,
                      rng: Optional[np.random.Generator] = None) -> GradCheckReport:
    """Gradient check with respect to existing parameter tensors, perturbed in place.

    ``loss_fn`` must rebuild the graph deterministically on every call.
    ``max_entries`` limits the number of checked entries per parameter,
    sampled with ``rng``.
    """
    if step <= 0:
        raise ContractViolation(f"step must be positive, got {step}")
    rng = rng if rng is not None else np.random.default_rng(0)

    for p in params:
        p.zero_grad()
    root = loss_fn()
    _scalar(root)
    root.backward()

    analytic, numeric = [], []
    for p in params:
        indices = list(np.ndindex(p.shape))
        if max_entries is not None and len(indices) > max_entries:
            chosen = rng.choice(len(indices), size=max_entries, replace=False)
            indices = [indices[i] for i in sorted(chosen)]
        for index in indices:
            original = p.values[index]
            p.values[index] = original + step
            f_plus = _scalar(loss_fn())
            p.values[index] = original - step
            f_minus = _scalar(loss_fn())
            p.values[index] = original
            analytic.append(p.grad[index])
            numeric.append((f_plus - f_minus) / (2.0 * step))

    for p in params:
        p.zero_grad()
    analytic_arr, numeric_arr = np.array(analytic), np.array(numeric)
    return GradCheckReport(relative_error(analytic_arr, numeric_arr), tol,
                           analytic_arr, numeric_arr)
