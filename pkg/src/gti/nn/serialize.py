"""Checkpoint files: versioned npz dumps with bit-exact reload."""

from __future__ import annotations

from pathlib import Path

import numpy as np

FORMAT_VERSION = 1


def save_arrays(path, arrays: dict[str, np.ndarray]) -> None:
    for key in arrays:
        if key.startswith("__"):
            raise ValueError(f"reserved key: {key}")
    np.savez(path, __format_version__=np.int64(FORMAT_VERSION), **arrays)


def load_arrays(path) -> dict[str, np.ndarray]:
    path = Path(path)
    with np.load(path) as data:
        version = int(data["__format_version__"])
        if version != FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported checkpoint version {version}")
        return {k: data[k] for k in data.files if not k.startswith("__")}
