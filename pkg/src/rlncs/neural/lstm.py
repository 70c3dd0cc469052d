"""Recurrent sequence predictor with exact backpropagation through time.

One (optionally two) standard LSTM layers over a window of binary state
vectors, followed by a sigmoid projection back to coefficient space, so the
output is a per-coefficient membership confidence in (0, 1). Gate weights
are fused as a single (4H, in+H) matrix per layer; rows are ordered
input / forget / output / candidate so the three sigmoid gates share one
activation pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..rng import Rng
from .dense import DenseParams, dense_backward, dense_forward, init_dense, sigmoid


@dataclass
class LstmLayerParams:
    w: np.ndarray  # (4H, in + H)
    b: np.ndarray  # (4H,)


@dataclass
class LstmParams:
    layers: tuple[LstmLayerParams, ...]
    out: DenseParams  # (N, H) projection + bias


@dataclass
class LstmCarry:
    h: tuple[np.ndarray, ...]  # per layer, (B, H)
    c: tuple[np.ndarray, ...]


def hidden_size(params: LstmParams) -> int:
    return params.layers[0].w.shape[0] // 4


def init_lstm(n_coeffs: int, hidden: int, rng: Rng, n_layers: int = 1,
              paper_init: bool = False) -> LstmParams:
    layers = []
    for k in range(n_layers):
        n_in = n_coeffs if k == 0 else hidden
        lr = rng.split(f"layer{k}")
        if paper_init:
            w = lr.gen.standard_normal((4 * hidden, n_in + hidden)) * 0.1
        else:
            bound = np.sqrt(6.0 / (n_in + 2 * hidden))
            w = lr.gen.uniform(-bound, bound, size=(4 * hidden, n_in + hidden))
        b = np.zeros(4 * hidden)
        b[hidden:2 * hidden] = 1.0  # forget gate bias
        layers.append(LstmLayerParams(w=w, b=b))
    return LstmParams(layers=tuple(layers),
                      out=init_dense(hidden, n_coeffs, rng.split("out"), paper_init))


def zero_carry(params: LstmParams, batch: int = 1) -> LstmCarry:
    h = hidden_size(params)
    return LstmCarry(h=tuple(np.zeros((batch, h)) for _ in params.layers),
                     c=tuple(np.zeros((batch, h)) for _ in params.layers))


def lstm_forward(params: LstmParams, window: np.ndarray, carry: LstmCarry | None = None):
    """Run one trajectory window (L, N) and return (O, carry')."""
    window = np.asarray(window, dtype=float)
    if window.ndim == 1:
        window = window[None, :]
    out, carry2, _ = _forward(params, window[None, :, :], carry, want_cache=False)
    return out[0], carry2


def lstm_train_forward(params: LstmParams, windows: list[np.ndarray]):
    """Batched forward over variable-length windows (zero initial carry).

    Windows are grouped by length so equal-length sequences share one
    vectorized pass; outputs are reassembled in input order.
    """
    groups: dict[int, list[int]] = {}
    for i, w in enumerate(windows):
        groups.setdefault(w.shape[0], []).append(i)
    n = params.out.w.shape[0]
    out = np.zeros((len(windows), n))
    caches = []
    for length, idxs in sorted(groups.items()):
        x = np.stack([np.asarray(windows[i], dtype=float) for i in idxs])
        o, _, cache = _forward(params, x, None, want_cache=True)
        out[idxs] = o
        caches.append((idxs, cache))
    return out, caches


def lstm_train_backward(params: LstmParams, caches, d_out: np.ndarray) -> LstmParams:
    """Accumulate BPTT gradients across the length groups of a training batch."""
    grads = None
    for idxs, cache in caches:
        g = _backward(params, cache, d_out[idxs])
        grads = g if grads is None else _add_grads(grads, g)
    return grads


def _forward(params: LstmParams, x: np.ndarray, carry: LstmCarry | None, want_cache: bool):
    b, length, _ = x.shape
    hsz = hidden_size(params)
    if carry is None:
        carry = zero_carry(params, b)
    hs = [np.asarray(h, dtype=float).reshape(b, hsz) for h in carry.h]
    cs = [np.asarray(c, dtype=float).reshape(b, hsz) for c in carry.c]
    steps = [[] for _ in params.layers]

    inp = None
    for t in range(length):
        inp = x[:, t, :]
        for k, layer in enumerate(params.layers):
            concat = np.empty((b, inp.shape[1] + hsz))
            concat[:, :inp.shape[1]] = inp
            concat[:, inp.shape[1]:] = hs[k]
            z = concat @ layer.w.T
            z += layer.b
            gates = sigmoid(z[:, :3 * hsz])
            i = gates[:, :hsz]
            f = gates[:, hsz:2 * hsz]
            o = gates[:, 2 * hsz:]
            g = np.tanh(z[:, 3 * hsz:])
            c_prev = cs[k]
            c = f * c_prev + i * g
            tc = np.tanh(c)
            h = o * tc
            if want_cache:
                steps[k].append((concat, i, f, o, g, c_prev, tc))
            hs[k], cs[k] = h, c
            inp = h

    h_last = hs[-1]
    out = sigmoid(dense_forward(params.out, h_last))
    cache = (x.shape, steps, h_last, out) if want_cache else None
    return out, LstmCarry(h=tuple(hs), c=tuple(cs)), cache


def _backward(params: LstmParams, cache, d_out: np.ndarray) -> LstmParams:
    (b, length, n_in), steps, h_last, out = cache
    hsz = hidden_size(params)
    n_layers = len(params.layers)

    dz_out = d_out * out * (1.0 - out)
    g_out, dh_top = dense_backward(params.out, h_last, dz_out)

    # gradients arriving from the layer above at each time step; None means
    # zero (for a single layer only the projection feeds the last step)
    upstream: list[list[np.ndarray | None]] = \
        [[None] * length for _ in range(n_layers)]
    upstream[-1][length - 1] = dh_top

    layer_grads: list[LstmLayerParams] = []
    for k in range(n_layers - 1, -1, -1):
        layer = params.layers[k]
        dw = np.zeros_like(layer.w)
        db = np.zeros_like(layer.b)
        dh = None
        dc = None
        dz = np.empty((b, 4 * hsz))
        push_down = k > 0
        for t in range(length - 1, -1, -1):
            concat, i, f, o, g, c_prev, tc = steps[k][t]
            up = upstream[k][t]
            if dh is None:
                dh = up if up is not None else np.zeros((b, hsz))
            elif up is not None:
                dh = dh + up
            do = dh * tc
            dct = dh * o
            dct *= (1.0 - tc * tc)
            dc = dct if dc is None else dc + dct
            dz[:, :hsz] = dc * g * i * (1.0 - i)
            dz[:, hsz:2 * hsz] = dc * c_prev * f * (1.0 - f)
            dz[:, 2 * hsz:3 * hsz] = do * o * (1.0 - o)
            dz[:, 3 * hsz:] = dc * i * (1.0 - g * g)
            dw += dz.T @ concat
            db += dz.sum(axis=0)
            dconcat = dz @ layer.w
            if push_down:
                upstream[k - 1][t] = dconcat[:, :-hsz]
            dh = dconcat[:, -hsz:]
            dc = dc * f
        layer_grads.append(LstmLayerParams(w=dw, b=db))
    layer_grads.reverse()
    return LstmParams(layers=tuple(layer_grads), out=g_out)


def _add_grads(a: LstmParams, b: LstmParams) -> LstmParams:
    layers = tuple(LstmLayerParams(w=x.w + y.w, b=x.b + y.b)
                   for x, y in zip(a.layers, b.layers))
    return LstmParams(layers=layers,
                      out=DenseParams(w=a.out.w + b.out.w, b=a.out.b + b.out.b))
