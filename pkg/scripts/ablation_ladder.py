#!/usr/bin/env python3
"""Run the three-rung ablation with a shared seed and summarize.

Rungs: maddpg_sampled (scenario sampling, no conditioning), maupg_no_hindsight
(adds scenario conditioning), maupg (adds hindsight relabeling). The summary
reports final-window mean reward per rung and whether the ladder is monotone.

    python scripts/ablation_ladder.py --out runs/ablation --episodes 3000
"""
import argparse
import sys

sys.path.insert(0, "src")

from vipguard.cli import main


def cli() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", required=True)
    ap.add_argument("--episodes", type=int, default=3000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--final-window", type=int, default=500)
    ap.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    args = ap.parse_args()

    argv = ["ablation", "--out", args.out, "--episodes", str(args.episodes),
            "--seed", str(args.seed), "--final-window", str(args.final_window)]
    for kv in args.overrides:
        argv += ["--set", kv]
    return main(argv)


if __name__ == "__main__":
    raise SystemExit(cli())
