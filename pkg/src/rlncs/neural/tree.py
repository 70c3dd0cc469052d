"""Structural helpers over parameter objects.

Parameter sets are plain dataclasses whose leaves are float64 arrays;
gradients reuse the same dataclass types. These walkers give every array a
stable dotted name (used by checkpoints and error messages) and apply
elementwise updates without each class knowing how to traverse itself.
"""

from __future__ import annotations

import dataclasses

import numpy as np


def named_arrays(obj, prefix: str = ""):
    """Yield (dotted-name, array) for every ndarray leaf, in field order."""
    if isinstance(obj, np.ndarray):
        yield prefix, obj
    elif dataclasses.is_dataclass(obj):
        for f in dataclasses.fields(obj):
            name = f"{prefix}.{f.name}" if prefix else f.name
            yield from named_arrays(getattr(obj, f.name), name)
    elif isinstance(obj, (tuple, list)):
        for i, item in enumerate(obj):
            name = f"{prefix}.{i}" if prefix else str(i)
            yield from named_arrays(item, name)


def tree_map(fn, obj):
    """Rebuild obj with fn applied to every array leaf; other leaves pass through."""
    if isinstance(obj, np.ndarray):
        return fn(obj)
    if dataclasses.is_dataclass(obj):
        return type(obj)(**{f.name: tree_map(fn, getattr(obj, f.name))
                            for f in dataclasses.fields(obj)})
    if isinstance(obj, tuple):
        return tuple(tree_map(fn, o) for o in obj)
    if isinstance(obj, list):
        return [tree_map(fn, o) for o in obj]
    return obj


def tree_combine(fn, a, b):
    """Zip two same-shaped trees, applying fn to paired array leaves."""
    if isinstance(a, np.ndarray):
        return fn(a, b)
    if dataclasses.is_dataclass(a):
        return type(a)(**{f.name: tree_combine(fn, getattr(a, f.name), getattr(b, f.name))
                          for f in dataclasses.fields(a)})
    if isinstance(a, tuple):
        return tuple(tree_combine(fn, x, y) for x, y in zip(a, b))
    if isinstance(a, list):
        return [tree_combine(fn, x, y) for x, y in zip(a, b)]
    return a


def tree_copy(obj):
    return tree_map(np.copy, obj)


def replace_arrays(obj, lookup: dict, prefix: str = ""):
    """Rebuild obj taking each array leaf from lookup by its dotted name."""
    if isinstance(obj, np.ndarray):
        arr = lookup[prefix]
        if arr.shape != obj.shape:
            raise ValueError(f"shape mismatch for '{prefix}': {arr.shape} vs {obj.shape}")
        return arr.astype(np.float64, copy=True)
    if dataclasses.is_dataclass(obj):
        return type(obj)(**{f.name: replace_arrays(getattr(obj, f.name), lookup,
                                                   f"{prefix}.{f.name}" if prefix else f.name)
                            for f in dataclasses.fields(obj)})
    if isinstance(obj, tuple):
        return tuple(replace_arrays(o, lookup, f"{prefix}.{i}" if prefix else str(i))
                     for i, o in enumerate(obj))
    if isinstance(obj, list):
        return [replace_arrays(o, lookup, f"{prefix}.{i}" if prefix else str(i))
                for i, o in enumerate(obj)]
    return obj
