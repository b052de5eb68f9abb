"""Versioned text checkpoints of generator/discriminator parameters.

Layout:
    PCDFORGE-CHECKPOINT v1
    arch <architecture hash>
    step <completed steps>
    config <n>
    <n lines of config echo>
    param <name> <d1>x<d2>
    <space separated floats, repr-exact>
    ...
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from ..engine import Tensor
from ..errors import CheckpointError, CheckpointMismatchError, MissingArtifactError

MAGIC = "PCDFORGE-CHECKPOINT v1"

PathLike = Union[str, Path]


@dataclass
class Checkpoint:
    arch: str
    step: int
    config_lines: List[str] = field(default_factory=list)
    params: Dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def config_text(self) -> str:
        return "\n".join(self.config_lines)


def save_checkpoint(path: PathLike, named_params: Sequence[Tuple[str, Tensor]],
                    arch: str, step: int, config_text: str = "") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    config_lines = config_text.splitlines()
    lines = [MAGIC, f"arch {arch}", f"step {step}", f"config {len(config_lines)}"]
    lines.extend(config_lines)
    for name, tensor in named_params:
        shape = "x".join(str(d) for d in tensor.shape) or "scalar"
        lines.append(f"param {name} {shape}")
        lines.append(" ".join(repr(v) for v in tensor.values.ravel().tolist()))
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text("\n".join(lines) + "\n")
    tmp.replace(path)
    return path


def load_checkpoint(path: PathLike) -> Checkpoint:
    path = Path(path)
    if not path.exists():
        raise MissingArtifactError(f"checkpoint not found: {path}")
    lines = path.read_text().splitlines()
    try:
        if not lines or lines[0] != MAGIC:
            raise CheckpointError(f"{path} is not a pcdforge checkpoint (bad header)")
        arch = lines[1].split(" ", 1)[1]
        step = int(lines[2].split(" ", 1)[1])
        n_config = int(lines[3].split(" ", 1)[1])
        config_lines = lines[4:4 + n_config]
        params: Dict[str, np.ndarray] = {}
        cursor = 4 + n_config
        while cursor < len(lines):
            tag, name, shape_text = lines[cursor].split(" ")
            if tag != "param":
                raise CheckpointError(f"{path}: unexpected record '{tag}' at line {cursor + 1}")
            shape = () if shape_text == "scalar" else tuple(int(d) for d in shape_text.split("x"))
            raw = lines[cursor + 1].split()
            params[name] = np.array([float(v) for v in raw], dtype=np.float64).reshape(shape)
            cursor += 2
    except (IndexError, ValueError) as exc:
        raise CheckpointError(f"{path}: malformed checkpoint ({exc})") from exc
    return Checkpoint(arch=arch, step=step, config_lines=config_lines, params=params)


def restore_parameters(checkpoint: Checkpoint, named_params: Sequence[Tuple[str, Tensor]],
                       arch: str):
    """Copy checkpoint arrays into live parameters after checking the architecture."""
    if checkpoint.arch != arch:
        raise CheckpointMismatchError(
            f"checkpoint architecture {checkpoint.arch} does not match model {arch}"
        )
    for name, tensor in named_params:
        if name not in checkpoint.params:
            raise CheckpointMismatchError(f"checkpoint has no parameter '{name}'")
        stored = checkpoint.params[name]
        if stored.shape != tensor.shape:
            raise CheckpointMismatchError(
                f"parameter '{name}' has shape {stored.shape}, model expects {tensor.shape}"
            )
        tensor.values = stored.copy()
        tensor.zero_grad()
