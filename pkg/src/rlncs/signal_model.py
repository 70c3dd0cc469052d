"""Time-varying compressible signal generator.

Canonical mode: each coefficient carries a two-state Markov membership bit
d (the ROI, equal to the support), a correlated large-amplitude process w
and an i.i.d. small process b, composed as x = w*d + b*(1-d).

DCT mode: the same machinery drives the transform coefficients z (their own
support chain plus amplitude processes), the signal is x = Theta^T z, and
the ROI of x is an independent Markov indicator with the same rates. An
optional faulty detector flips each observed ROI bit independently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .rng import Rng


class ParameterError(ValueError):
    pass


@dataclass
class SignalState:
    """One time step of the generator.

    x: signal vector; d: ROI indicator of x; w: large-amplitude process;
    b: small-coefficient process; z, d_z: transform coefficients and their
    support (DCT mode only).
    """
    x: np.ndarray
    d: np.ndarray
    w: np.ndarray
    b: np.ndarray
    z: np.ndarray | None = None
    d_z: np.ndarray | None = None


@dataclass
class RoiObservation:
    d_obs: np.ndarray
    fault_rate: float


def death_rate(tp01: float, kappa: float, literal: bool = False) -> float:
    """Per-step P{1 -> 0} balancing the birth rate against sparsity kappa.

    The self-consistent rate tp01*(1-kappa)/kappa keeps the stationary
    occupancy at kappa. With literal=True the transposed variant
    kappa*tp01/(1-kappa) is used instead; its stationary occupancy is
    1-kappa, which is useful only to document the discrepancy.
    """
    if literal:
        return kappa * tp01 / (1.0 - kappa)
    return tp01 * (1.0 - kappa) / kappa


def step_support(d_prev: np.ndarray, tp01: float, kappa: float, rng: Rng,
                 literal_tp10: bool = False) -> np.ndarray:
    if not 0 <= tp01 <= 1:
        raise ParameterError(f"tp01 must be in [0, 1], got {tp01}")
    if not 0 < kappa < 1:
        raise ParameterError(f"kappa must be in (0, 1), got {kappa}")
    tp10 = death_rate(tp01, kappa, literal_tp10)
    if tp10 > 1.0:
        raise ParameterError(
            f"death rate tp10={tp10:.4g} exceeds 1 for tp01={tp01}, kappa={kappa}")
    u = rng.gen.random(d_prev.shape)
    born = ~d_prev & (u < tp01)
    kept = d_prev & (u >= tp10)
    return born | kept


def step_values(w_prev: np.ndarray, rho: float, sigma_large: float, rng: Rng) -> np.ndarray:
    v = rng.gen.standard_normal(w_prev.shape) * sigma_large
    return (1.0 - rho) * w_prev + rho * v


def step_small(b_prev: np.ndarray, sigma_small: float, rng: Rng) -> np.ndarray:
    # memoryless: redrawn each step, b_prev only fixes the shape
    return rng.gen.standard_normal(b_prev.shape) * sigma_small


def compose_signal(w: np.ndarray, d: np.ndarray, b: np.ndarray) -> np.ndarray:
    if not (w.shape == d.shape == b.shape):
        raise ValueError(f"length mismatch: w{w.shape}, d{d.shape}, b{b.shape}")
    m = d.astype(float)
    return w * m + b * (1.0 - m)


def stationary_w_std(cfg: RunConfig) -> float:
    """Stationary std of the AR recursion (zero when corr=0)."""
    rho = cfg.corr
    if rho == 0.0:
        return 0.0
    return cfg.sigma_large * np.sqrt(rho / (2.0 - rho))


def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal type-II DCT as an explicit n-by-n matrix."""
    k = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    theta = np.cos(np.pi * (2 * j + 1) * k / (2 * n)) * np.sqrt(2.0 / n)
    theta[0, :] = np.sqrt(1.0 / n)
    return theta


def to_dct(x: np.ndarray, theta: np.ndarray | None = None) -> np.ndarray:
    if theta is None:
        theta = dct_matrix(x.shape[0])
    return theta @ x


def from_dct(z: np.ndarray, theta: np.ndarray | None = None) -> np.ndarray:
    if theta is None:
        theta = dct_matrix(z.shape[0])
    return theta.T @ z


def observe_roi(d_true: np.ndarray, fault_rate: float, rng: Rng) -> RoiObservation:
    if not 0 <= fault_rate <= 1:
        raise ParameterError(f"fault_rate must be in [0, 1], got {fault_rate}")
    flips = rng.gen.random(d_true.shape) < fault_rate
    return RoiObservation(d_obs=d_true ^ flips, fault_rate=fault_rate)


def init_state(cfg: RunConfig, rng: Rng, theta: np.ndarray | None = None) -> SignalState:
    """Draw the initial state from the stationary marginals."""
    n = cfg.n_coeffs
    d = rng.gen.random(n) < cfg.sparsity
    w = rng.gen.standard_normal(n) * stationary_w_std(cfg)
    b = rng.gen.standard_normal(n) * cfg.sigma_small
    if cfg.mode == "canonical":
        return SignalState(x=compose_signal(w, d, b), d=d, w=w, b=b)
    if theta is None:
        theta = dct_matrix(n)
    d_z = rng.gen.random(n) < cfg.sparsity
    z = compose_signal(w, d_z, b)
    return SignalState(x=theta.T @ z, d=d, w=w, b=b, z=z, d_z=d_z)


def step_canonical(prev: SignalState, cfg: RunConfig, rng: Rng) -> SignalState:
    d = step_support(prev.d, cfg.tp01, cfg.sparsity, rng, cfg.paper_literal_tp10)
    w = step_values(prev.w, cfg.corr, cfg.sigma_large, rng)
    b = step_small(prev.b, cfg.sigma_small, rng)
    return SignalState(x=compose_signal(w, d, b), d=d, w=w, b=b)


def step_dct_mode(prev: SignalState, cfg: RunConfig, rng: Rng,
                  theta: np.ndarray | None = None) -> SignalState:
    """Advance both chains: the support of z and, independently, the ROI of x."""
    if theta is None:
        theta = dct_matrix(cfg.n_coeffs)
    d_z = step_support(prev.d_z, cfg.tp01, cfg.sparsity, rng, cfg.paper_literal_tp10)
    w = step_values(prev.w, cfg.corr, cfg.sigma_large, rng)
    b = step_small(prev.b, cfg.sigma_small, rng)
    z = compose_signal(w, d_z, b)
    d = step_support(prev.d, cfg.tp01, cfg.sparsity, rng, cfg.paper_literal_tp10)
    return SignalState(x=theta.T @ z, d=d, w=w, b=b, z=z, d_z=d_z)


def step_state(prev: SignalState, cfg: RunConfig, rng: Rng,
               theta: np.ndarray | None = None) -> SignalState:
    if cfg.mode == "dct":
        return step_dct_mode(prev, cfg, rng, theta)
    return step_canonical(prev, cfg, rng)


def dump_trajectory(states: list[SignalState], path) -> None:
    """Debug dump: one row per (step, coefficient) with value and membership."""
    import csv

    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["t", "index", "x", "d"])
        for t, st in enumerate(states):
            for i in range(st.x.shape[0]):
                w.writerow([t, i, repr(float(st.x[i])), int(st.d[i])])
