"""Exact (bitwise) parameter checkpointing via named-array archives."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .tree import named_arrays, replace_arrays


def save_checkpoint(path: str | Path, objects: dict) -> None:
    """Save a dict of parameter objects; keys become array-name prefixes."""
    arrays = {}
    for key, obj in objects.items():
        for name, arr in named_arrays(obj, key):
            arrays[name] = arr
    np.savez(path, **arrays)


def load_checkpoint(path: str | Path, templates: dict) -> dict:
    """Rebuild parameter objects shaped like the templates from an archive."""
    with np.load(path) as data:
        arrays = {name: data[name] for name in data.files}
    return {key: replace_arrays(obj, arrays, key) for key, obj in templates.items()}
