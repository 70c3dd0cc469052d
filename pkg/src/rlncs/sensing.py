"""Measurement-matrix design and the noisy sensing step.

Column energies are allocated from per-coefficient importance levels under
the fixed total energy budget ||Phi||_F^2 = N; the matrix itself is a fresh
Gaussian draw with columns rescaled to those energies. Uniform sensing is
the special case of all-ones column energies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import Rng


@dataclass
class SensingPlan:
    eta: np.ndarray          # importance levels, length N
    col_energy: np.ndarray   # target l2 norm of each column
    phi: np.ndarray          # M x N measurement matrix
    sigma_n: float           # noise std used when measuring


def allocate_energy(eta: np.ndarray) -> np.ndarray:
    """Map importance levels to column l2 norms: e = sqrt(N) * eta / ||eta||_2."""
    eta = np.asarray(eta, dtype=float)
    if np.any(eta <= 0):
        raise ValueError("importance levels must be strictly positive")
    n = eta.shape[0]
    return np.sqrt(n) * eta / np.linalg.norm(eta)


def importance_from_roi(roi, n: int, eta_roi: float, eta_nonroi: float) -> np.ndarray:
    idx = np.fromiter(roi, dtype=int) if not isinstance(roi, np.ndarray) else roi.astype(int)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise IndexError(f"ROI index out of range for n={n}")
    eta = np.full(n, eta_nonroi, dtype=float)
    eta[idx] = eta_roi
    return eta


def build_matrix(m: int, n: int, e: np.ndarray, rng: Rng) -> np.ndarray:
    """Fresh i.i.d. Gaussian matrix with column j rescaled to l2 norm e[j]."""
    if m > n:
        raise ValueError(f"m ({m}) must not exceed n ({n})")
    g = rng.gen.standard_normal((m, n))
    norms = np.linalg.norm(g, axis=0)
    while np.any(norms == 0):  # probability-zero guard
        bad = norms == 0
        g[:, bad] = rng.gen.standard_normal((m, int(bad.sum())))
        norms = np.linalg.norm(g, axis=0)
    return g * (np.asarray(e, dtype=float) / norms)


def rescale_columns(base: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Rescale an existing matrix's columns to the energies e (fixed-matrix mode)."""
    norms = np.linalg.norm(base, axis=0)
    return base * (np.asarray(e, dtype=float) / norms)


def measure(phi: np.ndarray, x: np.ndarray, snr_db: float, rng: Rng):
    """Sense x through phi at the requested input SNR.

    The noise variance is set from the current measurement power:
    sigma_n^2 = ||phi x||^2 / (M * 10^(snr_db/10)). Returns (y, sigma_n).
    """
    clean = phi @ x
    if np.isinf(snr_db):
        return clean, 0.0
    power = float(clean @ clean)
    if power == 0.0:
        raise ValueError("cannot set a finite SNR for a zero measurement vector")
    m = phi.shape[0]
    sigma_n = np.sqrt(power / (m * 10.0 ** (snr_db / 10.0)))
    return clean + sigma_n * rng.gen.standard_normal(m), sigma_n


def plan_energy_error(plan: SensingPlan) -> float:
    """Max deviation from the energy contract: Frobenius budget and column norms."""
    n = plan.phi.shape[1]
    frob = abs(np.sum(plan.phi ** 2) - n)
    cols = np.abs(np.linalg.norm(plan.phi, axis=0) - plan.col_energy).max()
    return max(frob, float(cols))
