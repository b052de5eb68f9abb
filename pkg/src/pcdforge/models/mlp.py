"""MLP generator and discriminator for the 2D benchmarks."""
import json
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..engine import Tensor, concat, leaky_relu, relu, sigmoid, tanh
from ..errors import ContractViolation
from ..utils.helpers import short_hash

ACTIVATIONS = ("leaky_relu", "relu", "tanh", "sigmoid", "linear")
DEFAULT_HIDDEN = (128, 128, 128)
DEFAULT_NOISE_DIM = 5
DEFAULT_SLOPE = 0.2
FINAL_LAYER_SCALE = 0.01


class MLP:
    """Fully connected network; layers are (weight, bias) tensors with x @ W + b."""

    def __init__(self, sizes: Sequence[int], hidden_activation: str = "leaky_relu",
                 output_activation: str = "linear", slope: float = DEFAULT_SLOPE,
                 rng: Optional[np.random.Generator] = None):
        if len(sizes) < 2:
            raise ContractViolation(f"an MLP needs at least two layer sizes, got {list(sizes)}")
        for tag in (hidden_activation, output_activation):
            if tag not in ACTIVATIONS:
                raise ContractViolation(f"unknown activation '{tag}'")
        rng = rng if rng is not None else np.random.default_rng(0)

        self.sizes = [int(s) for s in sizes]
        self.hidden_activation = hidden_activation
        self.output_activation = output_activation
        self.slope = slope
        self.layers: List[Tuple[Tensor, Tensor]] = []

        last = len(self.sizes) - 2
        for i, (fan_in, fan_out) in enumerate(zip(self.sizes[:-1], self.sizes[1:])):
            # He-uniform for hidden layers, small uniform for the output layer
            limit = FINAL_LAYER_SCALE if i == last else np.sqrt(6.0 / fan_in)
            weight = Tensor(rng.uniform(-limit, limit, size=(fan_in, fan_out)),
                            requires_grad=True)
            bias = Tensor(np.zeros(fan_out), requires_grad=True)
            self.layers.append((weight, bias))

    def _activate(self, x: Tensor, tag: str) -> Tensor:
        if tag == "leaky_relu":
            return leaky_relu(x, self.slope)
        if tag == "relu":
            return relu(x)
        if tag == "tanh":
            return tanh(x)
        if tag == "sigmoid":
            return sigmoid(x)
        return x

    def __call__(self, x: Tensor) -> Tensor:
        if x.values.ndim != 2 or x.shape[1] != self.sizes[0]:
            raise ContractViolation(f"expected input (n, {self.sizes[0]}), got {x.shape}")
        last = len(self.layers) - 1
        for i, (weight, bias) in enumerate(self.layers):
            x = x @ weight + bias
            x = self._activate(x, self.output_activation if i == last else self.hidden_activation)
        return x

    def parameters(self) -> List[Tensor]:
        return [t for layer in self.layers for t in layer]

    def named_parameters(self) -> List[Tuple[str, Tensor]]:
        named = []
        for i, (weight, bias) in enumerate(self.layers):
            named.append((f"layers.{i}.weight", weight))
            named.append((f"layers.{i}.bias", bias))
        return named

    def zero_grad(self):
        for p in self.parameters():
            p.zero_grad()

    def describe(self) -> Dict[str, object]:
        return {
            "sizes": self.sizes,
            "hidden_activation": self.hidden_activation,
            "output_activation": self.output_activation,
            "slope": self.slope,
        }


Labels = Union[np.ndarray, Sequence[float], float]


def _label_column(y: Labels, batch: int) -> Tensor:
    labels = np.broadcast_to(np.asarray(y, dtype=np.float64), (batch,))
    if np.any(~np.isfinite(labels)) or np.any(labels < 0.0) or np.any(labels > 1.0):
        raise ContractViolation("condition labels must lie in [0, 1]")
    return Tensor(labels.reshape(batch, 1))


class Generator:
    """G(z, y): [z | y] -> 2D design, linear output."""

    def __init__(self, noise_dim: int = DEFAULT_NOISE_DIM,
                 hidden: Sequence[int] = DEFAULT_HIDDEN, slope: float = DEFAULT_SLOPE,
                 data_dim: int = 2, rng: Optional[np.random.Generator] = None):
        self.noise_dim = noise_dim
        self.data_dim = data_dim
        self.net = MLP([noise_dim + 1, *hidden, data_dim], "leaky_relu", "linear", slope, rng)

    def __call__(self, z, y: Labels) -> Tensor:
        z = z if isinstance(z, Tensor) else Tensor(z)
        if z.values.ndim != 2 or z.shape[1] != self.noise_dim:
            raise ContractViolation(f"noise must be (n, {self.noise_dim}), got {z.shape}")
        return self.net(concat([z, _label_column(y, z.shape[0])], axis=1))

    def sample_noise(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.standard_normal((n, self.noise_dim))

    def parameters(self) -> List[Tensor]:
        return self.net.parameters()

    def named_parameters(self) -> List[Tuple[str, Tensor]]:
        return [(f"generator.{name}", p) for name, p in self.net.named_parameters()]

    def zero_grad(self):
        self.net.zero_grad()


class Discriminator:
    """D(x, y): [x | y] -> probability in (0, 1)."""

    def __init__(self, hidden: Sequence[int] = DEFAULT_HIDDEN, slope: float = DEFAULT_SLOPE,
                 data_dim: int = 2, rng: Optional[np.random.Generator] = None):
        self.data_dim = data_dim
        self.net = MLP([data_dim + 1, *hidden, 1], "leaky_relu", "sigmoid", slope, rng)

    def __call__(self, x, y: Labels) -> Tensor:
        x = x if isinstance(x, Tensor) else Tensor(x)
        if x.values.ndim != 2 or x.shape[1] != self.data_dim:
            raise ContractViolation(f"designs must be (n, {self.data_dim}), got {x.shape}")
        out = self.net(concat([x, _label_column(y, x.shape[0])], axis=1))
        return out.reshape(x.shape[0])

    def parameters(self) -> List[Tensor]:
        return self.net.parameters()

    def named_parameters(self) -> List[Tuple[str, Tensor]]:
        return [(f"discriminator.{name}", p) for name, p in self.net.named_parameters()]

    def zero_grad(self):
        self.net.zero_grad()


def generator_forward(generator: Generator, z, y: Labels) -> Tensor:
    return generator(z, y)


def discriminator_forward(discriminator: Discriminator, x, y: Labels) -> Tensor:
    return discriminator(x, y)


def architecture_hash(generator: Generator, discriminator: Discriminator) -> str:
    """Stable digest of both network shapes; checkpoints refuse to load across it."""
    description = {
        "noise_dim": generator.noise_dim,
        "generator": generator.net.describe(),
        "discriminator": discriminator.net.describe(),
    }
    blob = json.dumps(description, sort_keys=True).encode()
    return short_hash(blob, 16)
