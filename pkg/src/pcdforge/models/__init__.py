"""Networks, optimizer and checkpoints."""
from .mlp import (
    DEFAULT_HIDDEN,
    DEFAULT_NOISE_DIM,
    MLP,
    Discriminator,
    Generator,
    architecture_hash,
    discriminator_forward,
    generator_forward,
)
from .optim import Adam, AdamState, adam_step, staircase_lr
from .checkpoint import Checkpoint, load_checkpoint, restore_parameters, save_checkpoint

__all__ = [
    'DEFAULT_HIDDEN',
    'DEFAULT_NOISE_DIM',
    'MLP',
    'Discriminator',
    'Generator',
    'architecture_hash',
    'discriminator_forward',
    'generator_forward',
    'Adam',
    'AdamState',
    'adam_step',
    'staircase_lr',
    'Checkpoint',
    'load_checkpoint',
    'restore_parameters',
    'save_checkpoint',
]
