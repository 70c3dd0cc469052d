"""The three training losses and their exact gradients."""

from __future__ import annotations

import numpy as np

CLAMP = 1e-12


def dqn_loss(q_pred: float, beta: float) -> float:
    """Squared error between a predicted action value and its target."""
    return float((beta - q_pred) ** 2)


def dqn_loss_grad(q_sel: np.ndarray, beta: np.ndarray):
    """Batch-mean squared error and dL/dq for the selected action values."""
    diff = q_sel - beta
    loss = float(np.mean(diff ** 2))
    return loss, 2.0 * diff / diff.size


def lstm_loss(o: np.ndarray, o_tar: np.ndarray, omega: float) -> float:
    """Weighted cross entropy, positive class scaled by omega.

    Summed over coefficients; with a batched input the per-sequence sums
    are averaged. Predictions are clamped away from {0, 1}.
    """
    loss, _ = lstm_loss_grad(o, o_tar, omega)
    return loss


def lstm_loss_grad(o: np.ndarray, o_tar: np.ndarray, omega: float):
    o = np.asarray(o, dtype=float)
    tar = np.asarray(o_tar, dtype=float)
    single = o.ndim == 1
    oc = np.clip(o, CLAMP, 1.0 - CLAMP)
    per_elem = -omega * tar * np.log(oc) - (1.0 - tar) * np.log(1.0 - oc)
    batch = 1 if single else o.shape[0]
    loss = float(per_elem.sum() / batch)
    d_o = (-omega * tar / oc + (1.0 - tar) / (1.0 - oc)) / batch
    return loss, d_o


def joint_loss(j_dqn: float, j_ls: float, lam: float) -> float:
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must be in [0, 1], got {lam}")
    return (1.0 - lam) * j_dqn + lam * j_ls
