"""Utility functions."""
import hashlib
import json
import os
from pathlib import Path
from typing import Any, Dict, Union

import psutil

OUTPUT_ROOT_ENV = "PCDFORGE_OUTPUT_ROOT"
DEFAULT_OUTPUT_ROOT = "runs"


def format_duration(seconds: float) -> str:
    """Format duration in seconds to human-readable string."""
    hours = int(seconds // 3600)
    minutes = int((seconds % 3600) // 60)
    secs = int(seconds % 60)

    if hours > 0:
        return f"{hours}h {minutes}m"
    elif minutes > 0:
        return f"{minutes}m {secs}s"
    else:
        return f"{secs}s"


def short_hash(text: Union[str, bytes], length: int = 12) -> str:
    data = text.encode() if isinstance(text, str) else text
    return hashlib.sha256(data).hexdigest()[:length]


def output_root() -> Path:
    """Directory under which run directories are created."""
    return Path(os.environ.get(OUTPUT_ROOT_ENV, DEFAULT_OUTPUT_ROOT))


def process_snapshot() -> Dict[str, float]:
    """Resident memory and CPU times of the current process."""
    process = psutil.Process()
    cpu = process.cpu_times()
    return {
        "rss_mb": process.memory_info().rss / (1024 * 1024),
        "cpu_user_s": cpu.user,
        "cpu_system_s": cpu.system,
    }


def write_json(path: Union[str, Path], payload: Dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return path
