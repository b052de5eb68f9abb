"""Adam with a staircase learning-rate schedule."""
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..engine import Tensor
from ..errors import ContractViolation, NumericError


def staircase_lr(base_lr: float, decay_factor: float, decay_every: int, t: int) -> float:
    """base_lr * decay_factor ** floor(t / decay_every)."""
    if decay_every <= 0:
        raise ContractViolation(f"decay_every must be positive, got {decay_every}")
    return base_lr * decay_factor ** (t // decay_every)


@dataclass
class AdamState:
    """Moments and schedule for one parameter group.

    ``t`` counts completed updates; the update that runs at count ``t``
    uses ``effective_lr()`` evaluated at that ``t``.
    """

    m: List[np.ndarray] = field(default_factory=list)
    v: List[np.ndarray] = field(default_factory=list)
    t: int = 0
    beta1: float = 0.5
    beta2: float = 0.999
    eps: float = 1e-8
    base_lr: float = 1e-4
    decay_factor: float = 0.8
    decay_every: int = 5000

    @classmethod
    def for_params(cls, params: Sequence[Tensor], **kwargs) -> "AdamState":
        return cls(m=[np.zeros_like(p.values) for p in params],
                   v=[np.zeros_like(p.values) for p in params], **kwargs)

    def effective_lr(self, t: Optional[int] = None) -> float:
        return staircase_lr(self.base_lr, self.decay_factor, self.decay_every,
                            self.t if t is None else t)


def adam_step(params: Sequence[Tensor], state: AdamState,
              names: Optional[Sequence[str]] = None, advance: bool = True):
    """One bias-corrected Adam update at the effective lr, then zero the gradients.

    With ``advance=False`` the update count stays put, so several partial
    updates inside one training iteration share its lr and bias correction.
    """
    if len(state.m) != len(params) or any(m.shape != p.shape for m, p in zip(state.m, params)):
        raise ContractViolation("Adam moments do not match the parameter shapes")
    names = list(names) if names is not None else [f"param[{i}]" for i in range(len(params))]

    for name, p in zip(names, params):
        if not np.all(np.isfinite(p.grad)):
            raise NumericError(f"non-finite gradient for {name}", parameter=name)

    lr = state.effective_lr()
    step = state.t + 1
    correction1 = 1.0 - state.beta1 ** step
    correction2 = 1.0 - state.beta2 ** step
    for i, p in enumerate(params):
        g = p.grad
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g
        m_hat = state.m[i] / correction1
        v_hat = state.v[i] / correction2
        p.values -= lr * m_hat / (np.sqrt(v_hat) + state.eps)
        p.zero_grad()
    if advance:
        state.t = step


class Adam:
    """Adam bound to a named parameter list."""

    def __init__(self, named_params: Sequence[Tuple[str, Tensor]], lr: float = 1e-4,
                 betas: Tuple[float, float] = (0.5, 0.999), eps: float = 1e-8,
                 decay_factor: float = 0.8, decay_every: int = 5000):
        self.names = [name for name, _ in named_params]
        self.params = [p for _, p in named_params]
        self.state = AdamState.for_params(
            self.params, beta1=betas[0], beta2=betas[1], eps=eps, base_lr=lr,
            decay_factor=decay_factor, decay_every=decay_every,
        )

    @property
    def lr(self) -> float:
        return self.state.effective_lr()

    def step(self, advance: bool = True):
        adam_step(self.params, self.state, self.names, advance)

    def zero_grad(self):
        for p in self.params:
            p.zero_grad()
