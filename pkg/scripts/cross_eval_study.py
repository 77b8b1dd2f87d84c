#!/usr/bin/env python3
"""Train four single-scenario policies, then build the 4x4 transfer matrix.

Each policy trains on one scenario and is evaluated on all four; specialist
policies should dominate their own diagonal and degrade off it. Defaults are
desk scale (2000 episodes, ~25 min each on one core); pass --episodes 5000
or more to approach the published setting.

    python scripts/cross_eval_study.py --out runs/xeval --episodes 2000
"""
import argparse
import os
import sys

sys.path.insert(0, "src")

from vipguard.cli import main
from vipguard.scenarios import SCENARIO_NAMES


def cli() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", required=True)
    ap.add_argument("--episodes", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--eval-episodes", type=int, default=100)
    ap.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    args = ap.parse_args()

    extra = []
    for kv in args.overrides:
        extra += ["--set", kv]

    checkpoints = []
    for name in SCENARIO_NAMES:
        run_dir = os.path.join(args.out, f"train_{name}")
        code = main(
            ["train", "--mode", "maddpg_single", "--scenario", name,
             "--episodes", str(args.episodes), "--seed", str(args.seed),
             "--out", run_dir] + extra
        )
        if code != 0:
            return code
        checkpoints += ["--checkpoint", f"{name}={run_dir}/checkpoint_final.json"]

    return main(
        ["cross-eval"] + checkpoints +
        ["--episodes", str(args.eval_episodes), "--seed", str(args.seed + 1),
         "--out", os.path.join(args.out, "matrix")]
    )


if __name__ == "__main__":
    raise SystemExit(cli())
