"""Vicinal discriminator/generator losses in singular and uniform label modes.

Every batch entry j has a center label c_j. In singular mode all centers are
one label y_s, chosen nearest to a uniform draw over label space, and a single
noise draw per side is shared by the batch. In uniform mode (the CcGAN
baseline) the centers are data labels drawn per entry and every entry gets its
own noise. Real and fake targets are clip(c_j + eps, 0, 1). Fake labels are
drawn within kappa of the center (soft) or of the fake target (hard).
"""
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..data import Dataset2D
from ..engine import Tensor, log, mean, sum_
from ..errors import ContractViolation, NumericError, VicinityEmptyError
from ..models import Discriminator, Generator

MODES = ("hard", "soft")
LABEL_SAMPLING = ("singular", "uniform")
SOFT_POOLS = ("all", "vicinity")
SILVERMAN_FACTOR = 1.06
DEFAULT_SOFT_THRESHOLD = 1e-3
DEFAULT_ESCALATION = 5.0


def rule_of_thumb(labels: Sequence[float]) -> Tuple[float, float, float]:
    """(sigma_vic, kappa, nu) from normalized training labels."""
    labels = np.asarray(labels, dtype=np.float64)
    unique = np.unique(labels)
    if unique.size < 2:
        raise ContractViolation("vicinity widths need at least two distinct labels")
    sigma_vic = SILVERMAN_FACTOR * float(np.std(labels)) * labels.size ** (-1.0 / 5.0)
    # widest gap between neighbouring labels, so no hard vicinity is empty
    kappa = float(np.max(np.diff(unique)))
    return sigma_vic, kappa, 1.0 / kappa ** 2


@dataclass(frozen=True)
class VicinalConfig:
    sigma_vic: float
    kappa: float
    nu: float
    mode: str = "soft"
    label_sampling: str = "singular"
    C1: float = 1.0
    C2: float = 1.0
    C3: float = 1.0
    C4: float = 1.0
    soft_pool: str = "all"
    soft_weight_threshold: float = DEFAULT_SOFT_THRESHOLD

    def __post_init__(self):
        for name in ("sigma_vic", "kappa", "nu"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ContractViolation(f"{name} must be positive, got {value}")
        if self.mode not in MODES:
            raise ContractViolation(f"unknown vicinity mode '{self.mode}'")
        if self.label_sampling not in LABEL_SAMPLING:
            raise ContractViolation(f"unknown label sampling '{self.label_sampling}'")
        if self.soft_pool not in SOFT_POOLS:
            raise ContractViolation(f"unknown soft pool '{self.soft_pool}'")
        if not 0.0 < self.soft_weight_threshold < 1.0:
            raise ContractViolation("soft_weight_threshold must lie in (0, 1)")

    @classmethod
    def from_labels(cls, labels: Sequence[float], sigma_vic: Optional[float] = None,
                    kappa: Optional[float] = None, nu: Optional[float] = None,
                    **options) -> "VicinalConfig":
        """Fill unset widths with the rule of thumb; nu follows an overridden kappa."""
        rule_sigma, rule_kappa, _ = rule_of_thumb(labels)
        kappa = rule_kappa if kappa is None else kappa
        return cls(sigma_vic=rule_sigma if sigma_vic is None else sigma_vic,
                   kappa=kappa,
                   nu=1.0 / kappa ** 2 if nu is None else nu,
                   **options)

    @property
    def singular(self) -> bool:
        return self.label_sampling == "singular"

    @property
    def real_weight(self) -> float:
        return self.C1 if self.mode == "hard" else self.C3

    @property
    def fake_weight(self) -> float:
        return self.C2 if self.mode == "hard" else self.C4


@dataclass
class VicinalBatch:
    centers: np.ndarray
    real_targets: np.ndarray
    real_x: np.ndarray
    real_y: np.ndarray
    real_weights: np.ndarray
    fake_y: np.ndarray
    fake_targets: np.ndarray
    fake_weights: np.ndarray

    @property
    def size(self) -> int:
        return int(self.centers.shape[0])

    @property
    def y_target(self) -> float:
        """Real target of the first entry; shared by the batch in singular mode."""
        return float(self.real_targets[0])


# Label selection

def sample_singular_label(dataset: Dataset2D, rng: np.random.Generator) -> float:
    """Data label nearest to u ~ U(min, max); ties go to the smaller label."""
    if dataset.size == 0:
        raise ContractViolation("cannot select a label from an empty dataset")
    unique = dataset.unique_labels
    u = rng.uniform(unique[0], unique[-1])
    right = int(np.searchsorted(unique, u, side="left"))
    if right == 0:
        return float(unique[0])
    if right == unique.size:
        return float(unique[-1])
    below, above = unique[right - 1], unique[right]
    return float(below if u - below <= above - u else above)


def sample_uniform_labels(dataset: Dataset2D, n: int, rng: np.random.Generator) -> np.ndarray:
    if dataset.size == 0:
        raise ContractViolation("cannot draw labels from an empty dataset")
    return dataset.labels[rng.integers(0, dataset.size, size=n)]


def sample_centers(dataset: Dataset2D, cfg: VicinalConfig, batch_size: int,
                   rng: np.random.Generator) -> np.ndarray:
    """Per-entry center labels for one training step."""
    if cfg.singular:
        return np.full(batch_size, sample_singular_label(dataset, rng))
    return sample_uniform_labels(dataset, batch_size, rng)


# Vicinity construction

def _vicinity_bounds(dataset: Dataset2D, targets: np.ndarray,
                     radius: float) -> Tuple[np.ndarray, np.ndarray]:
    """[lo, hi) ranges into sorted_labels with |label - target| <= radius."""
    labels = dataset.sorted_labels
    n = labels.size
    lo = np.searchsorted(labels, targets - radius, side="left")
    hi = np.searchsorted(labels, targets + radius, side="right")
    # searchsorted works on rounded bounds; trim entries that fail the exact test
    while True:
        inside = lo < hi
        head = np.minimum(lo, n - 1)
        bad = inside & (np.abs(labels[head] - targets) > radius)
        if not bad.any():
            break
        lo = lo + bad
    while True:
        inside = lo < hi
        tail = np.maximum(hi - 1, 0)
        bad = inside & (np.abs(labels[tail] - targets) > radius)
        if not bad.any():
            break
        hi = hi - bad
    return lo, hi


def _pick_in_ranges(dataset: Dataset2D, lo: np.ndarray, hi: np.ndarray,
                    rng: np.random.Generator) -> np.ndarray:
    offsets = np.floor(rng.uniform(0.0, 1.0, size=lo.shape) * (hi - lo)).astype(np.int64)
    positions = np.clip(np.minimum(lo + offsets, hi - 1), 0, dataset.size - 1)
    return dataset.label_order[positions]


def _nearest_index(dataset: Dataset2D, targets: np.ndarray) -> np.ndarray:
    labels = dataset.sorted_labels
    right = np.clip(np.searchsorted(labels, targets, side="left"), 1, labels.size - 1)
    left = right - 1
    take_left = np.abs(targets - labels[left]) <= np.abs(labels[right] - targets)
    return dataset.label_order[np.where(take_left, left, right)]


def _soft_weights(labels: np.ndarray, targets: np.ndarray, nu: float) -> np.ndarray:
    logits = -nu * (labels - targets) ** 2
    weights = np.exp(logits - logits.max())
    return weights / weights.sum()


def _select_real(dataset: Dataset2D, targets: np.ndarray, cfg: VicinalConfig,
                 rng: np.random.Generator) -> np.ndarray:
    n = targets.shape[0]
    if cfg.mode == "hard":
        lo, hi = _vicinity_bounds(dataset, targets, cfg.kappa)
        empty = hi <= lo
        if empty.any():
            target = float(targets[np.argmax(empty)])
            raise VicinityEmptyError(
                f"no real labels within kappa={cfg.kappa:.4g} of {target:.4g}", target=target
            )
        return _pick_in_ranges(dataset, lo, hi, rng)

    if cfg.soft_pool == "all" or dataset.size == 1:
        return rng.integers(0, dataset.size, size=n)

    radius = math.sqrt(-math.log(cfg.soft_weight_threshold) / cfg.nu)
    lo, hi = _vicinity_bounds(dataset, targets, radius)
    picks = _pick_in_ranges(dataset, lo, np.maximum(hi, lo + 1), rng)
    empty = hi <= lo
    if empty.any():
        picks[empty] = _nearest_index(dataset, targets[empty])
    return picks


def _fake_labels(centers: np.ndarray, kappa: float, rng: np.random.Generator) -> np.ndarray:
    low = np.maximum(centers - kappa, 0.0)
    high = np.minimum(centers + kappa, 1.0)
    return rng.uniform(low, high)


def _label_noise(cfg: VicinalConfig, n: int, rng: np.random.Generator) -> np.ndarray:
    if cfg.singular:
        return np.full(n, rng.normal(0.0, cfg.sigma_vic))
    return rng.normal(0.0, cfg.sigma_vic, size=n)


def build_vicinal_batch(dataset: Dataset2D, y_s, cfg: VicinalConfig, batch_size: int,
                        rng: np.random.Generator) -> VicinalBatch:
    """Real and fake halves of one discriminator step around the center label(s).

    ``y_s`` is a scalar in singular mode or one center per entry in uniform mode.
    Raises VicinityEmptyError when a hard vicinity holds no member; the caller
    draws new centers and retries.
    """
    if batch_size < 1:
        raise ContractViolation(f"batch_size must be positive, got {batch_size}")
    if dataset.size == 0:
        raise ContractViolation("cannot build a vicinal batch from an empty dataset")
    centers = np.broadcast_to(np.asarray(y_s, dtype=np.float64), (batch_size,)).copy()
    if np.any(~np.isfinite(centers)) or np.any(centers < 0.0) or np.any(centers > 1.0):
        raise ContractViolation("center labels must lie in [0, 1]")

    real_targets = np.clip(centers + _label_noise(cfg, batch_size, rng), 0.0, 1.0)
    fake_targets = np.clip(centers + _label_noise(cfg, batch_size, rng), 0.0, 1.0)

    picks = _select_real(dataset, real_targets, cfg, rng)
    real_y = dataset.labels[picks]
    # hard vicinities draw around the noisy fake target so every fake is a member
    fake_y = _fake_labels(fake_targets if cfg.mode == "hard" else centers, cfg.kappa, rng)

    if cfg.mode == "hard":
        real_weights = np.full(batch_size, 1.0 / batch_size)
        members = np.abs(fake_y - fake_targets) <= cfg.kappa
        if not members.any():
            raise VicinityEmptyError(
                f"no fake labels within kappa={cfg.kappa:.4g} of their targets",
                target=float(fake_targets[0]),
            )
        fake_weights = members / members.sum()
    else:
        real_weights = _soft_weights(real_y, real_targets, cfg.nu)
        fake_weights = _soft_weights(fake_y, fake_targets, cfg.nu)

    return VicinalBatch(
        centers=centers,
        real_targets=real_targets,
        real_x=dataset.points[picks],
        real_y=real_y,
        real_weights=real_weights,
        fake_y=fake_y,
        fake_targets=fake_targets,
        fake_weights=fake_weights,
    )


# Losses

def _finite(term: str, value: Tensor) -> Tensor:
    if not np.isfinite(value.item()):
        raise NumericError(f"non-finite {term} loss", term=term)
    return value


def discriminator_loss_terms(D: Discriminator, G: Generator, batch: VicinalBatch,
                             cfg: VicinalConfig, rng: Optional[np.random.Generator] = None,
                             fake_x=None) -> Tuple[Tensor, Tensor]:
    """Weighted real and fake terms; fakes are detached from the generator."""
    real = sum_(log(D(batch.real_x, batch.real_targets)) * batch.real_weights)
    real = _finite("discriminator_real", real * (-cfg.real_weight))

    if fake_x is None:
        if rng is None:
            raise ContractViolation("need an rng or precomputed fakes for the fake term")
        z = G.sample_noise(rng, batch.size)
        fake_x = G(z, batch.fake_y).detach()
    fake_x = fake_x.detach() if isinstance(fake_x, Tensor) else Tensor(fake_x)
    if not np.all(np.isfinite(fake_x.values)):
        raise NumericError("generator produced non-finite designs", term="discriminator_fake")
    fake = sum_(log(1.0 - D(fake_x, batch.fake_targets)) * batch.fake_weights)
    fake = _finite("discriminator_fake", fake * (-cfg.fake_weight))
    return real, fake


def discriminator_loss(D: Discriminator, G: Generator, batch: VicinalBatch,
                       cfg: VicinalConfig, rng: Optional[np.random.Generator] = None,
                       fake_x=None) -> Tensor:
    real, fake = discriminator_loss_terms(D, G, batch, cfg, rng, fake_x)
    return real + fake


@dataclass
class GeneratorPass:
    loss: Tensor
    x_fake: Tensor
    labels: np.ndarray


def generator_pass(D: Discriminator, G: Generator, y_s, cfg: VicinalConfig,
                   batch_size: int, rng: np.random.Generator) -> GeneratorPass:
    """Generate at noised labels y_i = clip(c + eps_i, 0, 1) and score with D."""
    centers = np.broadcast_to(np.asarray(y_s, dtype=np.float64), (batch_size,))
    labels = np.clip(centers + rng.normal(0.0, cfg.sigma_vic, size=batch_size), 0.0, 1.0)
    z = G.sample_noise(rng, batch_size)
    x_fake = G(z, labels)
    loss = _finite("generator", -mean(log(D(x_fake, labels))))
    return GeneratorPass(loss=loss, x_fake=x_fake, labels=labels)


def generator_loss(D: Discriminator, G: Generator, y_s, cfg: VicinalConfig,
                   batch_size: int, rng: np.random.Generator) -> Tensor:
    return generator_pass(D, G, y_s, cfg, batch_size, rng).loss


def total_generator_loss(gen_vicinal: Tensor, pcd: Optional[Tensor], gamma1: float) -> Tensor:
    """gen_vicinal + gamma1 * pcd; with gamma1 = 0 the vicinal loss is returned as is."""
    if not gamma1 >= 0:
        raise ContractViolation(f"gamma1 must be non-negative, got {gamma1}")
    if gamma1 == 0 or pcd is None:
        return gen_vicinal
    return _finite("total", gen_vicinal + pcd * gamma1)


def gamma1_schedule(t: int, T: int, gamma1_final: float,
                    p: float = DEFAULT_ESCALATION) -> float:
    """Escalating weight gamma1_final * (t / T) ** p."""
    if T <= 0:
        raise ContractViolation(f"total steps must be positive, got {T}")
    if not 0 <= t <= T:
        raise ContractViolation(f"step {t} outside [0, {T}]")
    if not p > 0:
        raise ContractViolation(f"escalation steepness must be positive, got {p}")
    return gamma1_final * (t / T) ** p
