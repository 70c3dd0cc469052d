"""Closed-loop training: predict ROI, design the matrix, sense, recover,
extract the next ROI estimate, reward the prediction, and fit both networks
on replayed transitions with the annealed joint loss.

Episodes are a bookkeeping horizon only (the target network syncs on the
same period); the bootstrap target is applied at every step.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .agent import (Experience, ReplayMemory, epsilon_at, q_target, sample_batch,
                    select_action, sync_target)
from .config import RunConfig
from .neural import (LrSchedule, LstmParams, QNetParams, clip_global_norm, dqn_loss_grad,
                     init_lstm, init_qnet, joint_loss, lstm_forward, lstm_loss_grad,
                     lstm_train_backward, lstm_train_forward, q_backward, q_forward,
                     q_forward_cache, sgd_step)
from .recovery import bpdn_solve, bpdn_solve_dct, extract_roi
from .rng import Rng
from .roi_policy import ActionId, action_direct, action_learned, complement, roi_from_state, state_from_roi
from .sensing import SensingPlan, allocate_energy, build_matrix, importance_from_roi, measure, rescale_columns
from .signal_model import SignalState, dct_matrix, init_state, observe_roi, step_state

LSTM_GRAD_CLIP = 5.0


@dataclass
class StepLog:
    t: int
    action: int | None
    reward: float | None
    precision: float | None
    recall: float | None
    nmse: float
    nmse_roi: float
    epsilon: float
    lam: float
    lr: float


@dataclass
class TrainOutcome:
    q_params: QNetParams
    q_target_params: QNetParams
    lstm_params: LstmParams
    logs: list[StepLog]
    config: RunConfig
    wall_clock: float


@dataclass
class EnvStreams:
    signal: Rng
    matrix: Rng
    noise: Rng
    detector: Rng


@dataclass
class EnvStepResult:
    state: SignalState
    r_est: set[int]
    s_next: np.ndarray
    reward: float | None
    precision: float | None
    recall: float | None
    nmse: float
    nmse_roi: float
    sigma_n: float
    x_hat: np.ndarray
    z_hat: np.ndarray | None
    converged: bool
    iterations: int
    plan: SensingPlan


def make_env_streams(rng: Rng) -> EnvStreams:
    return EnvStreams(signal=rng.split("signal"), matrix=rng.split("matrix"),
                      noise=rng.split("noise"), detector=rng.split("detector"))


def compute_reward(r_hat: set[int], r_est: set[int], alpha: float):
    """Reward = alpha * precision + (2 - alpha) * recall.

    A ratio with an empty denominator counts as 1 when the other set is also
    empty (vacuously perfect prediction) and 0 otherwise.
    """
    tp = len(r_hat & r_est)
    precision = (1.0 if not r_est else 0.0) if not r_hat else tp / len(r_hat)
    recall = (1.0 if not r_hat else 0.0) if not r_est else tp / len(r_est)
    return alpha * precision + (2.0 - alpha) * recall, precision, recall


def env_step(prev: SignalState, r_hat: set[int] | None, cfg: RunConfig,
             streams: EnvStreams, theta: np.ndarray | None = None,
             warm: np.ndarray | None = None, base_matrix: np.ndarray | None = None,
             mu_sigma: float | None = None) -> EnvStepResult:
    """Advance the world one step and sense it through the matrix built
    from the predicted ROI (uniform unit-norm columns when r_hat is None)."""
    n, m = cfg.n_coeffs, cfg.n_meas
    nxt = step_state(prev, cfg, streams.signal, theta)

    if r_hat is None:
        eta = np.ones(n)
    else:
        eta = importance_from_roi(r_hat, n, cfg.eta_roi, cfg.eta_nonroi)
    energy = allocate_energy(eta)
    if base_matrix is not None:
        phi = rescale_columns(base_matrix, energy)
    else:
        phi = build_matrix(m, n, energy, streams.matrix)

    y, sigma_n = measure(phi, nxt.x, cfg.snr_db, streams.noise)
    mu = (sigma_n if mu_sigma is None else mu_sigma) * np.sqrt(m)

    if cfg.mode == "dct":
        rec = bpdn_solve_dct(phi, theta, y, mu, z0=warm)
        r_est = roi_from_state(observe_roi(nxt.d, cfg.fault_rate, streams.detector).d_obs)
    else:
        rec = bpdn_solve(phi, y, mu, x0=warm)
        r_est = extract_roi(rec.x_hat, cfg.roi_threshold)

    if r_hat is None:
        reward = precision = recall = None
    else:
        reward, precision, recall = compute_reward(r_hat, r_est, cfg.reward_alpha)

    err = nxt.x - rec.x_hat
    denom = float(nxt.x @ nxt.x)
    nmse = float(err @ err) / denom if denom > 0 else float("nan")
    roi_mask = nxt.d
    if roi_mask.any():
        droi = float(nxt.x[roi_mask] @ nxt.x[roi_mask])
        nmse_roi = float(err[roi_mask] @ err[roi_mask]) / droi if droi > 0 else float("nan")
    else:
        nmse_roi = float("nan")

    plan = SensingPlan(eta=eta, col_energy=energy, phi=phi, sigma_n=sigma_n)
    return EnvStepResult(state=nxt, r_est=r_est, s_next=state_from_roi(r_est, n),
                         reward=reward, precision=precision, recall=recall,
                         nmse=nmse, nmse_roi=nmse_roi, sigma_n=sigma_n,
                         x_hat=rec.x_hat, z_hat=rec.z_hat, converged=rec.converged,
                         iterations=rec.iterations, plan=plan)


def run_training(cfg: RunConfig, rng: Rng) -> TrainOutcome:
    cfg.validate()
    t_start = time.perf_counter()
    n = cfg.n_coeffs
    init = rng.split("init")
    agent_rng = rng.split("agent")
    streams = make_env_streams(rng)
    theta = dct_matrix(n) if cfg.mode == "dct" else None

    qnet = init_qnet(n, cfg.q_hidden, cfg.discount, init.split("q"), cfg.paper_init)
    qtar = sync_target(qnet)
    lstm = init_lstm(n, cfg.lstm_hidden, init.split("lstm"),
                     n_layers=2 if cfg.two_layer_lstm else 1, paper_init=cfg.paper_init)
    sched = LrSchedule(cfg.lr0, cfg.lr_factor, cfg.lr_period)

    sig = init_state(cfg, streams.signal, theta)
    s = (init.split("state").gen.random(n) < cfg.sparsity).astype(float)
    roi = roi_from_state(s)
    carry = None
    replay = ReplayMemory(cfg.replay_capacity)
    base_matrix = (streams.matrix.gen.standard_normal((cfg.n_meas, n))
                   if cfg.fixed_gaussian else None)

    lam = cfg.lambda0
    warm = None
    frozen_sigma: float | None = None
    logs: list[StepLog] = []

    for t in range(cfg.t_max):
        eps = epsilon_at(t, cfg.eps_decay, cfg.exp_eps_decay)
        lr = sched.at(t)

        q = q_forward(qnet, s)
        action = select_action(q, eps, agent_rng)
        o_t, carry = lstm_forward(lstm, s[None, :], carry)
        if action == ActionId.DIRECT:
            r_hat = action_direct(roi)
        else:
            r_hat = action_learned(roi, complement(roi, n), o_t, cfg.th_up, cfg.th_low)

        episode_start = t % cfg.target_sync_period == 0
        mu_sigma = None if (cfg.per_step_mu or episode_start) else frozen_sigma
        res = env_step(sig, r_hat, cfg, streams, theta,
                       warm=None if cfg.cold_start else warm,
                       base_matrix=base_matrix, mu_sigma=mu_sigma)
        if episode_start:
            frozen_sigma = res.sigma_n
        warm = res.z_hat if cfg.mode == "dct" else res.x_hat

        replay.push(Experience(s_t=s, a_t=action, s_next=res.s_next,
                               reward=res.reward, step_index=t))

        if replay.ready(cfg.batch_size, cfg.seq_len):
            batch = sample_batch(replay, cfg.batch_size, cfg.seq_len, agent_rng)
            q_next = q_forward(qtar, batch.next_states)
            beta = np.array([q_target(r, cfg.discount, qn)
                             for r, qn in zip(batch.rewards, q_next)])
            q_all, qcache = q_forward_cache(qnet, batch.states)
            rows = np.arange(len(batch.actions))
            j_dqn, dq_sel = dqn_loss_grad(q_all[rows, batch.actions], beta)
            dq = np.zeros_like(q_all)
            dq[rows, batch.actions] = (1.0 - lam) * dq_sel
            qgrads = q_backward(qnet, qcache, dq)

            j_ls = 0.0
            if lam > 0.0:
                o_batch, caches = lstm_train_forward(lstm, batch.windows)
                j_ls, d_o = lstm_loss_grad(o_batch, batch.targets, cfg.ce_weight)
                lgrads = lstm_train_backward(lstm, caches, lam * d_o)
                lgrads, _ = clip_global_norm(lgrads, LSTM_GRAD_CLIP)
                lstm = sgd_step(lstm, lgrads, lr)

            j_total = joint_loss(j_dqn, j_ls, lam)
            if not np.isfinite(j_total):
                raise FloatingPointError(
                    f"non-finite loss at step {t}: dqn={j_dqn}, seq={j_ls}, lambda={lam}")
            qnet = sgd_step(qnet, qgrads, lr)

        logs.append(StepLog(t=t, action=int(action), reward=res.reward,
                            precision=res.precision, recall=res.recall,
                            nmse=res.nmse, nmse_roi=res.nmse_roi,
                            epsilon=eps, lam=lam, lr=lr))

        lam = max(0.0, lam - cfg.lambda_decay)
        if t > 0 and t % cfg.target_sync_period == 0:
            qtar = sync_target(qnet)

        s = res.s_next
        roi = res.r_est
        sig = res.state

    return TrainOutcome(q_params=qnet, q_target_params=qtar, lstm_params=lstm,
                        logs=logs, config=cfg,
                        wall_clock=time.perf_counter() - t_start)


def evaluate_policy(q_params: QNetParams | None, lstm_params: LstmParams | None,
                    cfg: RunConfig, horizon: int, rng: Rng,
                    uniform: bool = False, force_direct: bool = False,
                    burn_in: int = 0) -> list[StepLog]:
    """Greedy frozen-policy rollout for `horizon` steps, no learning.

    uniform=True bypasses the agent entirely and senses with unit-norm
    columns; force_direct=True always carries the current ROI forward.
    burn_in > 0 runs that many unlogged steps first so the logged window
    measures steady tracking rather than the random-initial-ROI transient;
    it applies identically to every method.
    """
    cfg.validate()
    n = cfg.n_coeffs
    init = rng.split("init")
    streams = make_env_streams(rng)
    theta = dct_matrix(n) if cfg.mode == "dct" else None
    sig = init_state(cfg, streams.signal, theta)
    s = (init.split("state").gen.random(n) < cfg.sparsity).astype(float)
    roi = roi_from_state(s)
    carry = None
    warm = None
    base_matrix = (streams.matrix.gen.standard_normal((cfg.n_meas, n))
                   if cfg.fixed_gaussian else None)
    logs: list[StepLog] = []

    for step in range(burn_in + horizon):
        t = step - burn_in
        if uniform:
            action = None
            r_hat = None
        elif force_direct:
            action = ActionId.DIRECT
            r_hat = action_direct(roi)
        else:
            q = q_forward(q_params, s)
            action = ActionId.LEARNED if q[1] > q[0] else ActionId.DIRECT
            o_t, carry = lstm_forward(lstm_params, s[None, :], carry)
            if action == ActionId.DIRECT:
                r_hat = action_direct(roi)
            else:
                r_hat = action_learned(roi, complement(roi, n), o_t,
                                       cfg.th_up, cfg.th_low)

        res = env_step(sig, r_hat, cfg, streams, theta,
                       warm=None if cfg.cold_start else warm,
                       base_matrix=base_matrix)
        warm = res.z_hat if cfg.mode == "dct" else res.x_hat
        if t >= 0:
            logs.append(StepLog(t=t, action=None if action is None else int(action),
                                reward=res.reward, precision=res.precision,
                                recall=res.recall, nmse=res.nmse, nmse_roi=res.nmse_roi,
                                epsilon=0.0, lam=0.0, lr=0.0))
        s = res.s_next
        roi = res.r_est
        sig = res.state
    return logs


LOG_COLUMNS = ["t", "action", "reward", "precision", "recall",
               "nmse", "nmse_roi", "epsilon", "lambda", "lr"]


def write_step_log(logs: list[StepLog], path: str | Path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(LOG_COLUMNS)
        for row in logs:
            writer.writerow([
                row.t,
                "" if row.action is None else row.action,
                _fmt(row.reward), _fmt(row.precision), _fmt(row.recall),
                _fmt(row.nmse), _fmt(row.nmse_roi),
                _fmt(row.epsilon), _fmt(row.lam), _fmt(row.lr),
            ])


def _fmt(v: float | None) -> str:
    return "" if v is None else repr(float(v))
