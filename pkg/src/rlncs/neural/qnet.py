"""Action-value network: two ReLU hidden layers, scaled-sigmoid output.

The sigmoid output is scaled by q_max = r_max / (1 - gamma) so that every
achievable bootstrap target lies inside the representable range.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..rng import Rng
from .dense import DenseParams, dense_backward, dense_forward, init_dense, relu, sigmoid

N_ACTIONS = 2
REWARD_MAX = 2.0


@dataclass
class QNetParams:
    h1: DenseParams
    h2: DenseParams
    out: DenseParams
    q_max: float


def q_output_scale(discount: float) -> float:
    return REWARD_MAX / (1.0 - discount)


def init_qnet(n_inputs: int, hidden: tuple[int, int], discount: float, rng: Rng,
              paper_init: bool = False) -> QNetParams:
    return QNetParams(
        h1=init_dense(n_inputs, hidden[0], rng.split("h1"), paper_init),
        h2=init_dense(hidden[0], hidden[1], rng.split("h2"), paper_init),
        out=init_dense(hidden[1], N_ACTIONS, rng.split("out"), paper_init),
        q_max=q_output_scale(discount),
    )


def q_forward(params: QNetParams, s: np.ndarray) -> np.ndarray:
    """Action values for one state (N,) -> (2,) or a batch (B, N) -> (B, 2)."""
    q, _ = q_forward_cache(params, s)
    return q


def q_forward_cache(params: QNetParams, s: np.ndarray):
    s = np.asarray(s, dtype=float)
    single = s.ndim == 1
    x = s[None, :] if single else s
    if x.shape[1] != params.h1.w.shape[1]:
        raise ValueError(f"state length {x.shape[1]} does not match network "
                         f"input size {params.h1.w.shape[1]}")
    h1 = relu(dense_forward(params.h1, x))
    h2 = relu(dense_forward(params.h2, h1))
    sig = sigmoid(dense_forward(params.out, h2))
    q = params.q_max * sig
    cache = (x, h1, h2, sig)
    return (q[0] if single else q), cache


def q_backward(params: QNetParams, cache, dq: np.ndarray) -> QNetParams:
    """Gradients of a scalar loss given dL/dq for the cached batch."""
    x, h1, h2, sig = cache
    dz3 = dq * params.q_max * sig * (1.0 - sig)
    g_out, dh2 = dense_backward(params.out, h2, dz3)
    g_h2, dh1 = dense_backward(params.h2, h1, dh2 * (h2 > 0))
    g_h1, _ = dense_backward(params.h1, x, dh1 * (h1 > 0))
    return QNetParams(h1=g_h1, h2=g_h2, out=g_out, q_max=0.0)
