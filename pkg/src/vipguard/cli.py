"""Command line front end.

Subcommands:
  train       one training run; writes config.txt, manifest.json, curve.csv,
              checkpoint_latest.json (periodic), checkpoint_final.json
  eval        evaluate a checkpoint or scripted controller on one scenario
  cross-eval  4x4 train-scenario by eval-scenario CRT matrix from checkpoints
  ablation    maddpg_sampled vs maupg_no_hindsight vs maupg, shared seed
  gradcheck   finite-difference audit of the network gradients

Configuration comes from --config (a key = value file) plus repeatable
--set key=value overrides; dedicated flags like --episodes are shorthand for
the matching keys. Runs with the same resolved config and seed write byte
identical artifacts, so none of the outputs embed timestamps or paths.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from typing import Any, Optional, Sequence

from .checkpoint import load_checkpoint, save_checkpoint
from .config import RunConfig
from .gradcheck import run_gradcheck
from .scenarios import ALL_SCENARIOS, SCENARIO_NAMES, ScenarioId
from .trainer import (
    MODES,
    ActorPolicy,
    EpisodeRecord,
    TrainResult,
    evaluate,
    paper_budget_episodes,
    train,
)
from .world import ConfigurationError

CURVE_HEADER = "episode,mode,scenario,mean_agent_reward,episode_crt,noise_sigma"
MANIFEST_SCHEMA = 1


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig.defaults()
    overrides = []
    for item in args.set or []:
        if "=" not in item:
            raise ConfigurationError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        overrides.append((key.strip(), value.strip()))
    if overrides:
        cfg = cfg.with_overrides(overrides)
    return cfg


def _parse_scenarios(texts: Optional[Sequence[str]]) -> list[ScenarioId]:
    if not texts:
        return list(ALL_SCENARIOS)
    names: list[str] = []
    for text in texts:
        names.extend(part for part in text.split(",") if part)
    seen: list[ScenarioId] = []
    for name in names:
        sid = ScenarioId.parse(name)
        if sid in seen:
            raise ConfigurationError(f"scenario {sid.name} given twice")
        seen.append(sid)
    return seen


def _format_row(r: EpisodeRecord) -> str:
    return (
        f"{r.episode},{r.mode},{r.scenario},"
        f"{r.mean_agent_reward!r},{r.episode_crt!r},{r.noise_sigma!r}"
    )


def _write_json(path: str, doc: dict[str, Any]) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


def _config_strings(cfg: RunConfig) -> dict[str, str]:
    # Formatted exactly like the config file, so inf and float precision
    # survive the JSON manifest unharmed.
    lines = cfg.dumps().splitlines()[1:]
    out = {}
    for line in lines:
        key, _, value = line.partition(" = ")
        out[key] = value
    return out


def _run_training(
    cfg: RunConfig,
    scenarios: list[ScenarioId],
    seed: int,
    out_dir: str,
    paper_budget: bool,
    dry_run: bool,
) -> TrainResult | None:
    tc = cfg.train_config()
    env = cfg.env_setup()
    os.makedirs(out_dir, exist_ok=True)
    cfg.save(os.path.join(out_dir, "config.txt"))
    resolved = cfg.dumps().encode("utf-8")
    config_hash = hashlib.sha1(
        b"blob %d\0%s" % (len(resolved), resolved)
    ).hexdigest()
    manifest = {
        "kind": "train-manifest",
        "schema_version": MANIFEST_SCHEMA,
        "mode": tc.mode,
        "scenarios": [s.name for s in scenarios],
        "seed": seed,
        "episodes": tc.episodes,
        "paper_budget": paper_budget,
        "dry_run": dry_run,
        "config": _config_strings(cfg),
        "config_hash": config_hash,
        "artifacts": {
            "config": "config.txt",
            "curve": "curve.csv",
            "checkpoint_latest": "checkpoint_latest.json",
            "checkpoint_final": "checkpoint_final.json",
        },
    }
    _write_json(os.path.join(out_dir, "manifest.json"), manifest)
    if dry_run:
        return None

    meta = {
        "mode": tc.mode,
        "use_g": tc.uses_scenario_input,
        "scenarios": [s.name for s in scenarios],
        "seed": seed,
        "episodes_total": tc.episodes,
        "n_bodyguards": env.n_agents,
        "obs_nearest_bystanders": env.obs_spec.nearest_bystanders,
        "comm_dim": env.obs_spec.comm_dim,
        "config": _config_strings(cfg),
    }

    def on_checkpoint(episodes_done: int, result: TrainResult) -> None:
        doc_meta = dict(meta, episodes_completed=episodes_done)
        save_checkpoint(
            os.path.join(out_dir, "checkpoint_latest.json"), result.nets, doc_meta
        )
        if episodes_done == tc.episodes:
            save_checkpoint(
                os.path.join(out_dir, "checkpoint_final.json"), result.nets, doc_meta
            )

    curve_path = os.path.join(out_dir, "curve.csv")
    with open(curve_path, "w", encoding="utf-8") as curve:
        curve.write(CURVE_HEADER + "\n")
        curve.flush()

        def on_record(record: EpisodeRecord) -> None:
            curve.write(_format_row(record) + "\n")
            curve.flush()

        result = train(tc, env, scenarios, seed, on_record, on_checkpoint)
    return result


def cmd_train(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    if args.mode:
        cfg = cfg.with_overrides({"train.mode": args.mode})
    if args.episodes is not None:
        cfg = cfg.with_overrides({"train.episodes": args.episodes})
    if args.seed is not None:
        cfg = cfg.with_overrides({"seeds.training": args.seed})
    mode = cfg.get("train.mode")
    scenarios = _parse_scenarios(args.scenario)
    if mode == "maddpg_single" and len(scenarios) != 1:
        raise ConfigurationError(
            "maddpg_single needs exactly one --scenario"
            if args.scenario
            else "maddpg_single needs --scenario with exactly one scenario"
        )
    if args.paper_budget:
        cfg = cfg.with_overrides(
            {"train.episodes": paper_budget_episodes(mode, scenarios)}
        )
    seed = cfg.get("seeds.training")
    result = _run_training(
        cfg, scenarios, seed, args.out, args.paper_budget, args.dry_run
    )
    if result is None:
        print(f"dry run: wrote manifest and config under {args.out}")
        return 0
    last = result.records[-1]
    print(
        f"trained {cfg.get('train.episodes')} episodes of {mode} "
        f"(seed {seed}); final episode_crt {last.episode_crt:.4f}; "
        f"artifacts in {args.out}"
    )
    return 0


def _policy_from_checkpoint(path: str, cfg: RunConfig) -> tuple[ActorPolicy, RunConfig]:
    nets, meta = load_checkpoint(path)
    if "config" in meta and cfg is None:
        cfg = RunConfig.defaults().with_overrides(meta["config"])
    elif cfg is None:
        cfg = RunConfig.defaults()
    env = cfg.env_setup()
    if len(nets) != env.n_agents:
        raise ConfigurationError(
            f"checkpoint has {len(nets)} agents, config expects {env.n_agents}"
        )
    use_g = bool(meta.get("use_g", False))
    expected_in = env.obs_dim + (4 if use_g else 0)
    if nets[0].actor.in_dim != expected_in:
        raise ConfigurationError(
            f"checkpoint actor input dim {nets[0].actor.in_dim} does not match "
            f"configured observation layout ({expected_in})"
        )
    return ActorPolicy(nets=nets, use_g=use_g), cfg


def cmd_eval(args: argparse.Namespace) -> int:
    explicit_cfg = args.config or args.set
    cfg = _resolve_config(args) if explicit_cfg else None
    if args.policy in ("qlb", "none", "random"):
        controller: Any = args.policy
        cfg = cfg or RunConfig.defaults()
    else:
        controller, cfg = _policy_from_checkpoint(args.policy, cfg)
    scenario = ScenarioId.parse(args.scenario)
    episodes = args.episodes if args.episodes is not None else cfg.get("eval.episodes")
    seed = args.seed if args.seed is not None else cfg.get("seeds.eval")
    report = evaluate(
        controller,
        scenario,
        episodes,
        seed,
        cfg.env_setup(),
        cfg.get("train.episode_length"),
    )
    doc = {
        "kind": "eval-report",
        "schema_version": 1,
        "controller": report.controller,
        "policy": args.policy,
        "scenario": report.scenario,
        "episodes": report.n_episodes,
        "seed": report.seed,
        "mean_episode_crt": report.mean_episode_crt,
        "stddev_episode_crt": report.stddev_episode_crt,
        "mean_agent_reward": report.mean_agent_reward,
        "per_episode": {
            "episode_crt": list(report.episode_crt),
            "mean_agent_reward": list(report.episode_reward),
        },
    }
    if args.out:
        _write_json(args.out, doc)
    print(
        f"{report.controller} on {report.scenario}: "
        f"mean episode CRT {report.mean_episode_crt:.4f} "
        f"(std {report.stddev_episode_crt:.4f}, reward {report.mean_agent_reward:.4f}, "
        f"n={report.n_episodes})"
    )
    return 0


def cmd_cross_eval(args: argparse.Namespace) -> int:
    explicit_cfg = args.config or args.set
    paths: dict[str, str] = {}
    for item in args.checkpoint:
        if "=" not in item:
            raise ConfigurationError(
                f"--checkpoint expects scenario=path, got {item!r}"
            )
        name, _, path = item.partition("=")
        sid = ScenarioId.parse(name.strip())
        if sid.name in paths:
            raise ConfigurationError(f"duplicate checkpoint for {sid.name}")
        paths[sid.name] = path.strip()
    missing = [n for n in SCENARIO_NAMES if n not in paths]
    if missing:
        raise ConfigurationError(f"missing checkpoints for: {', '.join(missing)}")

    cfg = _resolve_config(args) if explicit_cfg else None
    policies: dict[str, ActorPolicy] = {}
    for name in SCENARIO_NAMES:
        policy, cfg = _policy_from_checkpoint(paths[name], cfg)
        policies[name] = policy

    episodes = args.episodes if args.episodes is not None else cfg.get("eval.episodes")
    seed = args.seed if args.seed is not None else cfg.get("seeds.eval")
    env = cfg.env_setup()
    episode_length = cfg.get("train.episode_length")

    matrix: list[list[float]] = []
    for train_name in SCENARIO_NAMES:
        row = []
        for eval_name in SCENARIO_NAMES:
            report = evaluate(
                policies[train_name],
                ScenarioId(eval_name),
                episodes,
                seed,
                env,
                episode_length,
            )
            row.append(report.mean_episode_crt)
        matrix.append(row)

    diag = [matrix[i][i] for i in range(4)]
    off = [matrix[i][j] for i in range(4) for j in range(4) if i != j]
    diag_mean = sum(diag) / len(diag)
    offdiag_mean = sum(off) / len(off)

    os.makedirs(args.out, exist_ok=True)
    _write_json(
        os.path.join(args.out, "matrix.json"),
        {
            "kind": "crt-matrix",
            "schema_version": 1,
            "episodes": episodes,
            "seed": seed,
            "order": list(SCENARIO_NAMES),
            "checkpoints": paths,
            "mean_crt": matrix,
            "diag_mean": diag_mean,
            "offdiag_mean": offdiag_mean,
        },
    )
    with open(os.path.join(args.out, "matrix.csv"), "w", encoding="utf-8") as fh:
        fh.write("train_scenario,eval_scenario,mean_crt\n")
        for i, train_name in enumerate(SCENARIO_NAMES):
            for j, eval_name in enumerate(SCENARIO_NAMES):
                fh.write(f"{train_name},{eval_name},{matrix[i][j]!r}\n")

    width = max(len(n) for n in SCENARIO_NAMES)
    corner = "train / eval"
    width = max(width, len(corner))
    print(f"{corner:>{width}}  " + "  ".join(f"{n[:10]:>10}" for n in SCENARIO_NAMES))
    for i, name in enumerate(SCENARIO_NAMES):
        print(f"{name:>{width}}  " + "  ".join(f"{v:>10.4f}" for v in matrix[i]))
    print(f"diagonal mean {diag_mean:.4f}, off-diagonal mean {offdiag_mean:.4f}")
    return 0


ABLATION_MODES = ("maddpg_sampled", "maupg_no_hindsight", "maupg")


def cmd_ablation(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    if args.episodes is not None:
        cfg = cfg.with_overrides({"train.episodes": args.episodes})
    if args.seed is not None:
        cfg = cfg.with_overrides({"seeds.training": args.seed})
    scenarios = _parse_scenarios(args.scenario)
    if len(scenarios) < 2:
        raise ConfigurationError("ablation needs at least two scenarios")
    if args.paper_budget:
        cfg = cfg.with_overrides(
            {"train.episodes": paper_budget_episodes("maupg", scenarios)}
        )
    seed = cfg.get("seeds.training")
    window = args.final_window

    finals: dict[str, float] = {}
    for mode in ABLATION_MODES:
        mode_cfg = cfg.with_overrides({"train.mode": mode})
        out_dir = os.path.join(args.out, mode)
        result = _run_training(
            mode_cfg, scenarios, seed, out_dir, args.paper_budget, False
        )
        tail = result.records[-window:]
        finals[mode] = sum(r.mean_agent_reward for r in tail) / len(tail)
        print(f"{mode}: final-{len(tail)} mean reward {finals[mode]:.4f}")

    monotone = (
        finals["maupg"] >= finals["maupg_no_hindsight"] >= finals["maddpg_sampled"]
    )
    _write_json(
        os.path.join(args.out, "summary.json"),
        {
            "kind": "ablation-summary",
            "schema_version": 1,
            "seed": seed,
            "episodes": cfg.get("train.episodes"),
            "final_window": window,
            "final_mean_reward": finals,
            "monotone": monotone,
        },
    )
    print(f"ordering maupg >= no_hindsight >= sampled: {monotone}")
    return 0


def cmd_gradcheck(args: argparse.Namespace) -> int:
    report = run_gradcheck(
        n_nets=args.nets, seed=args.seed, eps=args.eps, tol=args.tol
    )
    status = "PASS" if report.passed else "FAIL"
    print(
        f"{status}: {report.nets_checked} networks, "
        f"max relative error {report.max_rel_err:.3e} (tolerance {report.tol:.1e})"
    )
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vipguard",
        description="VIP protection team training and evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="path to a key = value config file")
        p.add_argument(
            "--set",
            action="append",
            metavar="KEY=VALUE",
            help="override one config key (repeatable)",
        )

    p = sub.add_parser("train", help="run one training mode")
    add_config_args(p)
    p.add_argument("--mode", choices=MODES, help="training mode (default from config)")
    p.add_argument(
        "--scenario",
        action="append",
        help="scenario name (repeatable or comma separated; default all four)",
    )
    p.add_argument("--episodes", type=int, help="override train.episodes")
    p.add_argument("--seed", type=int, help="override seeds.training")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument(
        "--paper-budget",
        action="store_true",
        help="use the published episode budgets for the chosen mode",
    )
    p.add_argument(
        "--dry-run",
        action="store_true",
        help="resolve and write manifest plus config, then exit without training",
    )
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint or scripted controller")
    add_config_args(p)
    p.add_argument(
        "policy",
        help="checkpoint path, or one of: qlb, none, random",
    )
    p.add_argument("--scenario", required=True, help="scenario to evaluate on")
    p.add_argument("--episodes", type=int, help="override eval.episodes")
    p.add_argument("--seed", type=int, help="override seeds.eval")
    p.add_argument("--out", help="write the full report as JSON here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser(
        "cross-eval", help="CRT matrix of four single-scenario checkpoints"
    )
    add_config_args(p)
    p.add_argument(
        "--checkpoint",
        action="append",
        required=True,
        metavar="SCENARIO=PATH",
        help="checkpoint trained on SCENARIO (give all four)",
    )
    p.add_argument("--episodes", type=int, help="override eval.episodes")
    p.add_argument("--seed", type=int, help="override seeds.eval")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_cross_eval)

    p = sub.add_parser(
        "ablation", help="train maddpg_sampled, maupg_no_hindsight, and maupg"
    )
    add_config_args(p)
    p.add_argument(
        "--scenario",
        action="append",
        help="scenario set to sample from (default all four)",
    )
    p.add_argument("--episodes", type=int, help="episodes per mode")
    p.add_argument("--seed", type=int, help="shared training seed")
    p.add_argument(
        "--final-window",
        type=int,
        default=500,
        help="episodes averaged for the final score (default 500)",
    )
    p.add_argument("--paper-budget", action="store_true", help="published budgets")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_ablation)

    p = sub.add_parser("gradcheck", help="finite-difference gradient audit")
    p.add_argument("--nets", type=int, default=20, help="networks to check")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--eps", type=float, default=1e-5, help="perturbation size")
    p.add_argument("--tol", type=float, default=1e-4, help="relative error bound")
    p.set_defaults(func=cmd_gradcheck)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
