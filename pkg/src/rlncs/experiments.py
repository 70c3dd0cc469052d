"""Sweep harness and reporting metrics.

Reproduces the evaluation style of the reference experiments: train per
(parameter value, method, repetition), evaluate the frozen policy over short
horizons, and aggregate time-averaged reconstruction error (overall and
ROI-only, in dB), recall percentage, and the fraction of steps on which the
learned action was chosen.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from multiprocessing import get_context
from pathlib import Path

import numpy as np

from .config import RunConfig
from .rng import make_rng
from .trainer import StepLog, evaluate_policy, run_training

DB_FLOOR = -120.0
METHODS = ("rlncs", "rlncs-2layer", "uniform", "direct-only")


def to_db(ratio: float) -> float:
    if ratio <= 10.0 ** (DB_FLOOR / 10.0):
        return DB_FLOOR
    return 10.0 * math.log10(ratio)


def tnmse(x_series, x_hat_series) -> float:
    """Time-averaged normalized squared error of a trajectory, in dB."""
    if len(x_series) == 0 or len(x_series) != len(x_hat_series):
        raise ValueError("series must be nonempty and equal length")
    ratios = []
    for x, xh in zip(x_series, x_hat_series):
        x = np.asarray(x, dtype=float)
        xh = np.asarray(xh, dtype=float)
        denom = float(x @ x)
        if denom == 0.0:
            raise ValueError("zero-norm true signal in TNMSE")
        err = x - xh
        ratios.append(float(err @ err) / denom)
    return to_db(float(np.mean(ratios)))


def tnmse_roi(x_series, x_hat_series, roi_series) -> float | None:
    """TNMSE restricted to each step's ROI; steps with empty ROI are skipped.

    Returns None when every step has an empty ROI.
    """
    if not len(x_series) == len(x_hat_series) == len(roi_series):
        raise ValueError("series must be equal length")
    ratios = []
    for x, xh, roi in zip(x_series, x_hat_series, roi_series):
        idx = np.asarray(sorted(roi), dtype=int)
        if idx.size == 0:
            continue
        xs = np.asarray(x, dtype=float)[idx]
        xh_s = np.asarray(xh, dtype=float)[idx]
        denom = float(xs @ xs)
        if denom == 0.0:
            raise ValueError("zero-norm ROI slice in TNMSE")
        err = xs - xh_s
        ratios.append(float(err @ err) / denom)
    if not ratios:
        return None
    return to_db(float(np.mean(ratios)))


def training_episode_tnmse(logs: list[StepLog], tau: int) -> list[tuple[int, float]]:
    """Per-episode TNMSE (dB) over consecutive tau-step windows of a training log."""
    out = []
    for e in range(len(logs) // tau):
        chunk = logs[e * tau:(e + 1) * tau]
        out.append((e, to_db(float(np.mean([r.nmse for r in chunk])))))
    return out


def min_sparsity_for_tp01(tp01: float) -> float:
    """Smallest sparsity level whose balancing death rate stays <= 1.

    The two-state chain requires tp10 = tp01 (1 - kappa) / kappa <= 1, i.e.
    kappa >= tp01 / (1 + tp01). Sweeps over tp01 raise kappa to this bound
    when the configured level would make the chain infeasible.
    """
    return tp01 / (1.0 + tp01)


@dataclass
class SweepSpec:
    param: str                     # tp01 | m | snr | fault
    values: list[float]
    base: RunConfig
    seeds: int = 3
    mode: str = "canonical"
    methods: tuple[str, ...] = ("rlncs", "uniform")
    eval_horizon: int = 30
    eval_episodes: int = 4
    burn_in: int = 5       # unlogged ROI-acquisition steps before each window
    jobs: int = 1

    def validate(self) -> "SweepSpec":
        if not self.values:
            raise ValueError("sweep needs a nonempty value list")
        if self.seeds < 1:
            raise ValueError("runs per point must be >= 1")
        if self.param not in ("tp01", "m", "snr", "fault"):
            raise ValueError(f"unknown sweep parameter {self.param!r}")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}")
        return self


@dataclass
class RawRow:
    param: str
    value: float
    method: str
    seed: int
    tnmse_db: float
    tnmse_roi_db: float | None
    recall_pct: float | None
    action2_pct: float | None


@dataclass
class SweepRow:
    param: str
    value: float
    method: str
    tnmse_db: float
    tnmse_roi_db: float | None
    recall_pct: float | None
    action2_pct: float | None
    n_seeds: int
    stderr: float


@dataclass
class SweepResult:
    raw: list[RawRow] = field(default_factory=list)
    agg: list[SweepRow] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)


def apply_sweep_value(base: RunConfig, param: str, value: float) -> RunConfig:
    if param == "tp01":
        kappa = max(base.sparsity, min_sparsity_for_tp01(value))
        return base.replace(tp01=value, sparsity=kappa)
    if param == "m":
        return base.replace(n_meas=int(value))
    if param == "snr":
        return base.replace(snr_db=value)
    if param == "fault":
        return base.replace(fault_rate=value)
    raise ValueError(f"unknown sweep parameter {param!r}")


def _run_point(task) -> RawRow:
    param, value, method, rep, cfg, horizon, episodes, burn_in = task
    rng = (make_rng(cfg.seed).split(f"{param}={value!r}")
           .split(method).split(f"rep{rep}"))
    if method in ("rlncs", "rlncs-2layer"):
        cfg_run = cfg.replace(two_layer_lstm=(method == "rlncs-2layer"))
        outcome = run_training(cfg_run, rng.split("train"))
        q_params, lstm_params = outcome.q_params, outcome.lstm_params
        uniform = force_direct = False
    elif method == "uniform":
        cfg_run, q_params, lstm_params = cfg, None, None
        uniform, force_direct = True, False
    else:  # direct-only
        cfg_run, q_params, lstm_params = cfg, None, None
        uniform, force_direct = False, True

    nmse, nmse_roi, recalls, actions = [], [], [], []
    for ep in range(episodes):
        logs = evaluate_policy(q_params, lstm_params, cfg_run, horizon,
                               rng.split(f"eval{ep}"), uniform=uniform,
                               force_direct=force_direct, burn_in=burn_in)
        for row in logs:
            nmse.append(row.nmse)
            if not math.isnan(row.nmse_roi):
                nmse_roi.append(row.nmse_roi)
            if row.recall is not None:
                recalls.append(row.recall)
            if row.action is not None:
                actions.append(row.action)

    return RawRow(
        param=param, value=value, method=method, seed=rep,
        tnmse_db=to_db(float(np.mean(nmse))),
        tnmse_roi_db=to_db(float(np.mean(nmse_roi))) if nmse_roi else None,
        recall_pct=100.0 * float(np.mean(recalls)) if recalls else None,
        action2_pct=(100.0 * float(np.mean([a == 1 for a in actions]))
                     if method in ("rlncs", "rlncs-2layer", "direct-only") else None),
    )


def run_sweep(spec: SweepSpec) -> SweepResult:
    spec.validate()
    base = spec.base.replace(mode=spec.mode)
    tasks = []
    for value in spec.values:
        cfg = apply_sweep_value(base, spec.param, value)
        for method in spec.methods:
            for rep in range(spec.seeds):
                tasks.append((spec.param, value, method, rep, cfg,
                              spec.eval_horizon, spec.eval_episodes, spec.burn_in))

    result = SweepResult()
    outputs: list[RawRow | str | None] = [None] * len(tasks)
    if spec.jobs > 1:
        ctx = get_context("spawn")
        with ctx.Pool(spec.jobs) as pool:
            for i, out in enumerate(pool.imap(_run_point_safe, tasks)):
                outputs[i] = out
    else:
        for i, task in enumerate(tasks):
            outputs[i] = _run_point_safe(task)

    for task, out in zip(tasks, outputs):
        if isinstance(out, RawRow):
            result.raw.append(out)
        else:
            param, value, method, rep = task[:4]
            result.failures.append(
                f"{param}={value} method={method} rep={rep}: {out}")

    for value in spec.values:
        for method in spec.methods:
            rows = [r for r in result.raw
                    if r.value == value and r.method == method]
            if not rows:
                continue
            db = [r.tnmse_db for r in rows]
            roi = [r.tnmse_roi_db for r in rows if r.tnmse_roi_db is not None]
            rec = [r.recall_pct for r in rows if r.recall_pct is not None]
            act = [r.action2_pct for r in rows if r.action2_pct is not None]
            stderr = float(np.std(db, ddof=1) / np.sqrt(len(db))) if len(db) > 1 else 0.0
            result.agg.append(SweepRow(
                param=spec.param, value=value, method=method,
                tnmse_db=float(np.mean(db)),
                tnmse_roi_db=float(np.mean(roi)) if roi else None,
                recall_pct=float(np.mean(rec)) if rec else None,
                action2_pct=float(np.mean(act)) if act else None,
                n_seeds=len(rows), stderr=stderr))
    return result


def _run_point_safe(task):
    try:
        return _run_point(task)
    except Exception as e:  # recorded, sweep continues
        return f"{type(e).__name__}: {e}"


RAW_COLUMNS = ["param", "value", "method", "seed",
               "tnmse_db", "tnmse_roi_db", "recall_pct", "action2_pct"]
AGG_COLUMNS = ["param", "value", "method", "tnmse_db", "tnmse_roi_db",
               "recall_pct", "action2_pct", "n_seeds", "stderr"]


def write_raw_csv(rows: list[RawRow], path: str | Path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(RAW_COLUMNS)
        for r in rows:
            w.writerow([r.param, repr(float(r.value)), r.method, r.seed,
                        _fmt(r.tnmse_db), _fmt(r.tnmse_roi_db),
                        _fmt(r.recall_pct), _fmt(r.action2_pct)])


def write_agg_csv(rows: list[SweepRow], path: str | Path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(AGG_COLUMNS)
        for r in rows:
            w.writerow([r.param, repr(float(r.value)), r.method,
                        _fmt(r.tnmse_db), _fmt(r.tnmse_roi_db),
                        _fmt(r.recall_pct), _fmt(r.action2_pct),
                        r.n_seeds, _fmt(r.stderr)])


def _fmt(v: float | None) -> str:
    return "" if v is None else repr(float(v))
