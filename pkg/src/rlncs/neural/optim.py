"""Plain SGD with the step-decayed learning rate and global-norm clipping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tree import named_arrays, tree_combine


@dataclass
class LrSchedule:
    base: float = 0.05
    factor: float = 0.75
    period: int = 5000

    def at(self, t: int) -> float:
        return self.base * self.factor ** (t // self.period)


def sgd_step(params, grads, lr: float):
    """params' = params - lr * grads; rejects non-finite gradients by name."""
    for name, g in named_arrays(grads):
        if not np.all(np.isfinite(g)):
            raise FloatingPointError(f"non-finite gradient in tensor '{name}'")
    return tree_combine(lambda p, g: p - lr * g, params, grads)


def global_norm(grads) -> float:
    total = 0.0
    for _, g in named_arrays(grads):
        total += float(np.sum(g * g))
    return float(np.sqrt(total))


def clip_global_norm(grads, max_norm: float):
    """Scale the whole gradient tree down to max_norm if it exceeds it."""
    norm = global_norm(grads)
    if norm <= max_norm or norm == 0.0:
        return grads, norm
    scale = max_norm / norm
    return tree_combine(lambda g, _: g * scale, grads, grads), norm
