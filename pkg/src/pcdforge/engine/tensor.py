"""Reverse-mode automatic differentiation over dense numpy arrays.

Every operation returns a new Tensor holding its forward value, its parents
and a backward rule mapping the upstream gradient to one gradient per parent.
Graphs are built eagerly and are single-threaded; distinct graphs share no
state, so independent graphs can be evaluated from different threads.

Example:
    x = Tensor([1.0, 2.0, 3.0], requires_grad=True)
    (x * x).sum().backward()
    x.grad  # array([2., 4., 6.])
"""
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import ContractViolation, NumericError

LOG_FLOOR = 1e-12

BackwardFn = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]
Operand = Union["Tensor", np.ndarray, float, int]


class Tensor:
    """A dense value node in a reverse-mode computation graph."""

    __slots__ = ("values", "grad", "op", "parents", "requires_grad", "_backward")
    # Make ndarray <op> Tensor dispatch to the Tensor reflected operators.
    __array_priority__ = 1000

    def __init__(self, values, requires_grad: bool = False,
                 parents: Sequence["Tensor"] = (), op: str = "leaf",
                 backward: Optional[BackwardFn] = None):
        self.values = np.array(values, dtype=np.float64)
        self.grad = np.zeros_like(self.values)
        self.op = op
        self.parents: Tuple[Tensor, ...] = tuple(parents)
        self.requires_grad = bool(requires_grad)
        self._backward = backward

    @classmethod
    def constant(cls, values) -> "Tensor":
        return cls(values, requires_grad=False)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.values.shape

    @property
    def size(self) -> int:
        return int(self.values.size)

    @property
    def T(self) -> "Tensor":
        return transpose(self)

    def item(self) -> float:
        if self.values.size != 1:
            raise ContractViolation(f"item() needs a single element, got shape {self.shape}")
        return float(self.values.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.values.copy()

    def detach(self) -> "Tensor":
        return Tensor(self.values, requires_grad=False, op="detach")

    def zero_grad(self):
        self.grad = np.zeros_like(self.values)

    def backward(self):
        """Accumulate d(self)/d(node) into every requires_grad ancestor."""
        if self.values.size != 1:
            raise ContractViolation(
                f"backward() needs a scalar root, got shape {self.shape}"
            )
        if not self.requires_grad:
            return

        order = _topological_order(self)
        pending = {id(self): np.ones_like(self.values)}
        for node in reversed(order):
            upstream = pending.pop(id(node), None)
            if upstream is None:
                continue
            node.grad = node.grad + upstream
            if node._backward is None:
                continue
            for parent, local in zip(node.parents, node._backward(upstream)):
                if local is None or not parent.requires_grad:
                    continue
                key = id(parent)
                pending[key] = pending[key] + local if key in pending else local

    # Operator sugar
    def __add__(self, other: Operand) -> "Tensor":
        return add(self, other)

    def __radd__(self, other: Operand) -> "Tensor":
        return add(other, self)

    def __sub__(self, other: Operand) -> "Tensor":
        return add(self, neg(_as_tensor(other)))

    def __rsub__(self, other: Operand) -> "Tensor":
        return add(other, neg(self))

    def __mul__(self, other: Operand) -> "Tensor":
        return mul(self, other)

    def __rmul__(self, other: Operand) -> "Tensor":
        return mul(other, self)

    def __truediv__(self, other: float) -> "Tensor":
        if isinstance(other, Tensor) or np.ndim(other) != 0:
            raise ContractViolation("Tensor division is only defined for scalar divisors")
        return mul(self, 1.0 / float(other))

    def __neg__(self) -> "Tensor":
        return neg(self)

    def __matmul__(self, other: Operand) -> "Tensor":
        return matmul(self, other)

    def __rmatmul__(self, other: Operand) -> "Tensor":
        return matmul(other, self)

    def sum(self, axis: Optional[int] = None, keepdims: bool = False) -> "Tensor":
        return sum_(self, axis=axis, keepdims=keepdims)

    def mean(self, axis: Optional[int] = None, keepdims: bool = False) -> "Tensor":
        return mean(self, axis=axis, keepdims=keepdims)

    def exp(self) -> "Tensor":
        return exp(self)

    def log(self) -> "Tensor":
        return log(self)

    def reshape(self, *shape: int) -> "Tensor":
        return reshape(self, shape)

    def __repr__(self):
        return f"Tensor(shape={self.shape}, op={self.op}, requires_grad={self.requires_grad})"


def _topological_order(root: Tensor) -> List[Tensor]:
    """Post-order of the requires_grad subgraph reachable from root."""
    order: List[Tensor] = []
    visited = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node.parents:
            if parent.requires_grad and id(parent) not in visited:
                stack.append((parent, False))
    return order


def _as_tensor(value: Operand) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _check_finite(op: str, *tensors: Tensor):
    for t in tensors:
        if not np.all(np.isfinite(t.values)):
            raise NumericError(f"non-finite input to '{op}'", op=op)


def _node(values: np.ndarray, parents: Sequence[Tensor], op: str,
          backward: BackwardFn) -> Tensor:
    requires_grad = any(p.requires_grad for p in parents)
    return Tensor(values, requires_grad=requires_grad, parents=parents, op=op,
                  backward=backward if requires_grad else None)


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum grad over the axes that broadcasting expanded to reach it."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad.reshape(shape)


def _broadcast_shape(op: str, a: Tensor, b: Tensor) -> Tuple[int, ...]:
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError as exc:
        raise ContractViolation(f"'{op}' shapes {a.shape} and {b.shape} do not conform") from exc


# Binary ops

def add(a: Operand, b: Operand) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_shape("add", a, b)
    _check_finite("add", a, b)

    def backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return _node(a.values + b.values, (a, b), "add", backward)


def mul(a: Operand, b: Operand) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_shape("mul", a, b)
    _check_finite("mul", a, b)

    def backward(g):
        return _unbroadcast(g * b.values, a.shape), _unbroadcast(g * a.values, b.shape)

    return _node(a.values * b.values, (a, b), "mul", backward)


def matmul(a: Operand, b: Operand) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    if a.values.ndim != 2 or b.values.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ContractViolation(f"'matmul' shapes {a.shape} and {b.shape} do not conform")
    _check_finite("matmul", a, b)

    def backward(g):
        return g @ b.values.T, a.values.T @ g

    return _node(a.values @ b.values, (a, b), "matmul", backward)


def concat(tensors: Sequence[Operand], axis: int = -1) -> Tensor:
    """Concatenate along the feature axis (last axis by default)."""
    parts = [_as_tensor(t) for t in tensors]
    if not parts:
        raise ContractViolation("'concat' needs at least one tensor")
    _check_finite("concat", *parts)
    try:
        values = np.concatenate([p.values for p in parts], axis=axis)
    except ValueError as exc:
        raise ContractViolation(
            f"'concat' shapes {[p.shape for p in parts]} do not conform"
        ) from exc
    splits = np.cumsum([p.shape[axis] for p in parts])[:-1]

    def backward(g):
        return tuple(np.split(g, splits, axis=axis))

    return _node(values, parts, "concat", backward)


# Unary ops

def neg(a: Operand) -> Tensor:
    a = _as_tensor(a)
    _check_finite("neg", a)
    return _node(-a.values, (a,), "neg", lambda g: (-g,))


def exp(a: Operand) -> Tensor:
    a = _as_tensor(a)
    _check_finite("exp", a)
    out = np.exp(a.values)
    return _node(out, (a,), "exp", lambda g: (g * out,))


def log(a: Operand) -> Tensor:
    """Natural log with inputs floored at LOG_FLOOR."""
    a = _as_tensor(a)
    _check_finite("log", a)
    floored = np.maximum(a.values, LOG_FLOOR)
    live = a.values > LOG_FLOOR

    def backward(g):
        return (np.where(live, g / floored, 0.0),)

    return _node(np.log(floored), (a,), "log", backward)


def square(a: Operand) -> Tensor:
    a = _as_tensor(a)
    _check_finite("square", a)
    return _node(a.values ** 2, (a,), "square", lambda g: (2.0 * a.values * g,))


def abs_(a: Operand) -> Tensor:
    a = _as_tensor(a)
    _check_finite("abs", a)
    return _node(np.abs(a.values), (a,), "abs", lambda g: (np.sign(a.values) * g,))


def relu(a: Operand) -> Tensor:
    a = _as_tensor(a)
    _check_finite("relu", a)
    mask = a.values > 0
    return _node(np.where(mask, a.values, 0.0), (a,), "relu", lambda g: (g * mask,))


def leaky_relu(a: Operand, slope: float = 0.2) -> Tensor:
    a = _as_tensor(a)
    _check_finite("leaky_relu", a)
    scale = np.where(a.values > 0, 1.0, slope)
    return _node(a.values * scale, (a,), "leaky_relu", lambda g: (g * scale,))


def tanh(a: Operand) -> Tensor:
    a = _as_tensor(a)
    _check_finite("tanh", a)
    out = np.tanh(a.values)
    return _node(out, (a,), "tanh", lambda g: (g * (1.0 - out ** 2),))


def stable_sigmoid(x: np.ndarray) -> np.ndarray:
    """Logistic function in the split form that never overflows."""
    e = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def sigmoid(a: Operand) -> Tensor:
    a = _as_tensor(a)
    _check_finite("sigmoid", a)
    out = stable_sigmoid(a.values)
    return _node(out, (a,), "sigmoid", lambda g: (g * out * (1.0 - out),))


def clamp(a: Operand, lo: float, hi: float) -> Tensor:
    if lo > hi:
        raise ContractViolation(f"'clamp' bounds reversed: lo={lo} > hi={hi}")
    a = _as_tensor(a)
    _check_finite("clamp", a)
    inside = (a.values >= lo) & (a.values <= hi)
    return _node(np.clip(a.values, lo, hi), (a,), "clamp", lambda g: (g * inside,))


# Reductions and shape ops

def sum_(a: Operand, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:
    a = _as_tensor(a)
    _check_finite("sum", a)

    def backward(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).copy(),)

    return _node(a.values.sum(axis=axis, keepdims=keepdims), (a,), "sum", backward)


def mean(a: Operand, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:
    a = _as_tensor(a)
    count = a.size if axis is None else a.shape[axis]
    if count == 0:
        raise ContractViolation("'mean' of an empty tensor")
    return mul(sum_(a, axis=axis, keepdims=keepdims), 1.0 / count)


def transpose(a: Operand) -> Tensor:
    a = _as_tensor(a)
    if a.values.ndim != 2:
        raise ContractViolation(f"'transpose' needs a matrix, got shape {a.shape}")
    return _node(a.values.T.copy(), (a,), "transpose", lambda g: (g.T,))


def reshape(a: Operand, shape: Sequence[int]) -> Tensor:
    a = _as_tensor(a)
    try:
        values = a.values.reshape(tuple(shape))
    except ValueError as exc:
        raise ContractViolation(f"cannot reshape {a.shape} to {tuple(shape)}") from exc
    return _node(values.copy(), (a,), "reshape", lambda g: (g.reshape(a.shape),))


def pairwise_sq_dists(x: Operand) -> Tensor:
    """D[i, j] = ||x_i - x_j||^2 for the rows of a (n, d) matrix."""
    x = _as_tensor(x)
    if x.values.ndim != 2:
        raise ContractViolation(f"'pairwise_sq_dists' needs (n, d) input, got {x.shape}")
    _check_finite("pairwise_sq_dists", x)
    diff = x.values[:, None, :] - x.values[None, :, :]

    def backward(g):
        s = g + g.T
        return (2.0 * (s.sum(axis=1, keepdims=True) * x.values - s @ x.values),)

    return _node((diff ** 2).sum(axis=-1), (x,), "pairwise_sq_dists", backward)
