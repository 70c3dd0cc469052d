"""Command-line harness: single training runs and parameter sweeps.

    rlncs train --config cfg.json --out results/
    rlncs sweep --param tp01 --values 0.02,0.2,0.4,0.6 --out sweep/
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .config import RunConfig, desk_profile, load_config, save_config
from .experiments import SweepSpec, run_sweep, training_episode_tnmse, write_agg_csv, write_raw_csv
from .neural import save_checkpoint
from .rng import make_rng
from .trainer import run_training, write_step_log


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="rlncs")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="run one training loop")
    p_train.add_argument("--config", type=Path, help="JSON config file")
    p_train.add_argument("--seed", type=int, help="override the config seed")
    p_train.add_argument("--desk", action="store_true",
                         help="use the scaled-down desktop profile")
    p_train.add_argument("--out", type=Path, default=Path("rlncs-train"),
                         help="output directory")

    p_sweep = sub.add_parser("sweep", help="sweep a parameter across methods and seeds")
    p_sweep.add_argument("--param", required=True,
                         choices=["tp01", "m", "snr", "fault"])
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated parameter values")
    p_sweep.add_argument("--mode", default="canonical", choices=["canonical", "dct"])
    p_sweep.add_argument("--methods", default="rlncs,uniform",
                         help="comma-separated subset of rlncs,rlncs-2layer,uniform,direct-only")
    p_sweep.add_argument("--seeds", type=int, default=3, help="repetitions per point")
    p_sweep.add_argument("--config", type=Path, help="JSON config file for the base setup")
    p_sweep.add_argument("--full", action="store_true",
                         help="use the full reference profile instead of the desktop one")
    p_sweep.add_argument("--eval-horizon", type=int, default=30)
    p_sweep.add_argument("--eval-episodes", type=int, default=4)
    p_sweep.add_argument("--burn-in", type=int, default=5,
                         help="unlogged acquisition steps before each evaluation window")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p_sweep.add_argument("--out", type=Path, required=True, help="output directory")

    args = parser.parse_args(argv)
    if args.command == "train":
        return _cmd_train(args)
    return _cmd_sweep(args)


def _cmd_train(args) -> int:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.desk:
        cfg = desk_profile(cfg)
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)

    outcome = run_training(cfg, make_rng(cfg.seed))
    write_step_log(outcome.logs, out / "step_log.csv")
    save_checkpoint(out / "checkpoint.npz",
                    {"q": outcome.q_params, "q_target": outcome.q_target_params,
                     "lstm": outcome.lstm_params})
    save_config(cfg, out / "config.json")
    with open(out / "episodes.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["episode", "tnmse_db"])
        for ep, db in training_episode_tnmse(outcome.logs, cfg.target_sync_period):
            w.writerow([ep, repr(db)])
    print(f"trained {cfg.t_max} steps in {outcome.wall_clock:.1f}s -> {out}")
    return 0


def _cmd_sweep(args) -> int:
    base = load_config(args.config) if args.config else RunConfig()
    if not args.full:
        base = desk_profile(base)
    spec = SweepSpec(
        param=args.param,
        values=[float(v) for v in args.values.split(",") if v.strip()],
        base=base,
        seeds=args.seeds,
        mode=args.mode,
        methods=tuple(m.strip() for m in args.methods.split(",") if m.strip()),
        eval_horizon=args.eval_horizon,
        eval_episodes=args.eval_episodes,
        burn_in=args.burn_in,
        jobs=args.jobs,
    )
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    result = run_sweep(spec)
    write_raw_csv(result.raw, out / "raw.csv")
    write_agg_csv(result.agg, out / "agg.csv")
    save_config(spec.base.replace(mode=spec.mode), out / "config.json")
    for line in result.failures:
        print(f"FAILED {line}", file=sys.stderr)
    print(f"sweep {args.param} over {spec.values}: "
          f"{len(result.raw)} runs ok, {len(result.failures)} failed -> {out}")
    return 1 if result.failures else 0


if __name__ == "__main__":
    sys.exit(main())
