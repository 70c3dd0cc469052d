"""Dense layer, activations, and fan-based initialization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..rng import Rng


@dataclass
class DenseParams:
    w: np.ndarray  # (out, in)
    b: np.ndarray  # (out,)


def init_dense(n_in: int, n_out: int, rng: Rng, paper_init: bool = False) -> DenseParams:
    if paper_init:
        w = rng.gen.standard_normal((n_out, n_in)) * 0.1
    else:
        bound = np.sqrt(6.0 / (n_in + n_out))
        w = rng.gen.uniform(-bound, bound, size=(n_out, n_in))
    return DenseParams(w=w, b=np.zeros(n_out))


def dense_forward(p: DenseParams, x: np.ndarray) -> np.ndarray:
    return x @ p.w.T + p.b


def dense_backward(p: DenseParams, x: np.ndarray, dz: np.ndarray):
    """Given dz = dL/d(output), return (grads, dL/dx)."""
    return DenseParams(w=dz.T @ x, b=dz.sum(axis=0)), dz @ p.w


def sigmoid(z: np.ndarray) -> np.ndarray:
    # tanh form: overflow-free for any argument
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, 0.0)
