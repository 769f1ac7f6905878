"""Command line entry points: training runs, evaluations, sweeps, and the server.

Every subcommand is a thin wrapper over harness functions; all of the
determinism guarantees live there, not here.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import statistics
import sys
import time
from pathlib import Path
from typing import Mapping, Optional, Sequence

from blocktutor.harness import (
    DEFAULT_BETAS,
    EVAL_FIELDS,
    ConfigError,
    ExperimentConfig,
    ablation_scene_setting,
    ablation_sign_test,
    eval_expression,
    eval_sequence_streaks,
    eval_transition,
    hard_setting,
    load_snapshot,
    run_training,
    save_snapshot,
    summarize_sweep,
    sweep_beta,
    write_run_outputs,
)
from blocktutor.language import build_inventory

DEFAULT_PORT = 8000
EVAL_SETUPS = ("transition", "expression", "sequence")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blocktutor",
        description="Tutored block-world learner: train, evaluate, sweep, serve.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="train one session and write its artifacts")
    run.add_argument("--config", required=True, type=Path, help="ExperimentConfig JSON file")
    run.add_argument("--seed", type=int, default=None, help="override the config's seed")
    run.add_argument("--out", type=Path, default=None, help="output directory")

    ev = commands.add_parser("eval", help="evaluate a snapshot, append a row to eval.csv")
    ev.add_argument("--setup", required=True, choices=EVAL_SETUPS)
    ev.add_argument("--snapshot", required=True, type=Path, help="snapshot.json from a run")
    ev.add_argument("--attempts", type=int, default=1, choices=(1, 5))
    ev.add_argument("--seed", type=int, default=None, help="evaluation stream seed")
    ev.add_argument("--out", type=Path, default=Path("."), help="directory holding eval.csv")

    sweep = commands.add_parser("sweep-beta", help="episodes to full discovery across social rates")
    sweep.add_argument(
        "--betas",
        default=",".join(str(b) for b in DEFAULT_BETAS),
        help="comma-separated social rates",
    )
    sweep.add_argument("--seeds", type=int, default=10, help="number of seeds (0..N-1)")
    sweep.add_argument("--episodes", type=int, default=400, help="per-run episode budget")
    sweep.add_argument("--out", type=Path, default=None, help="write sweep.json here")

    ablate = commands.add_parser("ablate-scene", help="scene-setting ablation with a sign test")
    ablate.add_argument("--seeds", type=int, default=20, help="number of seeds (0..N-1)")
    ablate.add_argument("--episodes", type=int, default=300, help="per-run episode budget")
    ablate.add_argument("--out", type=Path, default=None, help="write ablation.json here")

    serve = commands.add_parser("serve", help="start the interactive session service")
    serve.add_argument("--port", type=int, default=None, help="overrides TAA_PORT")
    serve.add_argument("--host", default="127.0.0.1")

    return parser


def resolve_port(cli_port: Optional[int], env: Mapping[str, str]) -> int:
    if cli_port is not None:
        return cli_port
    raw = env.get("TAA_PORT")
    if raw is None:
        return DEFAULT_PORT
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"TAA_PORT must be an integer, got {raw!r}")


def _load_config(path: Path, seed: Optional[int]) -> ExperimentConfig:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}")
    if seed is not None:
        if not isinstance(data, dict):
            raise ConfigError(f"config must be a JSON object, got {type(data).__name__}")
        data["seed"] = seed
    return ExperimentConfig.from_json(data)


def _cmd_run(args) -> int:
    config = _load_config(args.config, args.seed)
    out = args.out if args.out is not None else (Path(config.out) if config.out else None)
    if out is None:
        raise ConfigError("no output directory: pass --out or set \"out\" in the config")
    started = time.perf_counter()
    session = run_training(config)
    summary = write_run_outputs(session, out, wall_clock=time.perf_counter() - started)
    save_snapshot(session, out / "snapshot.json")
    print(
        f"run seed={config.seed}: {summary['episodes']} episodes, "
        f"discovered {summary['discovered']}/{summary['reachable']}, "
        f"artifacts in {out}"
    )
    return 0


def _append_eval_row(row: dict, path: Path) -> None:
    fresh = not path.exists()
    with path.open("a", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=EVAL_FIELDS)
        if fresh:
            writer.writeheader()
        writer.writerow(row)


def _cmd_eval(args) -> int:
    config, learner = load_snapshot(args.snapshot)
    competence = config.competence
    seed = args.seed if args.seed is not None else config.seed
    if args.setup == "transition":
        rate = eval_transition(learner, competence, args.attempts, seed)
        n = len(build_inventory(config.n_blocks).texts()) * 5
        stderr = math.sqrt(rate * (1.0 - rate) / n)
    elif args.setup == "expression":
        n = 500
        rate = eval_expression(learner, competence, args.attempts, seed, n_expressions=n)
        stderr = math.sqrt(rate * (1.0 - rate) / n)
    else:
        streaks = eval_sequence_streaks(learner, competence, seed, attempts=args.attempts)
        rate = statistics.fmean(streaks)
        stderr = statistics.stdev(streaks) / math.sqrt(len(streaks)) if len(streaks) > 1 else 0.0
    args.out.mkdir(parents=True, exist_ok=True)
    row = {"setup": args.setup, "attempts": args.attempts, "rate": rate, "stderr": round(stderr, 6)}
    _append_eval_row(row, args.out / "eval.csv")
    print(f"{args.setup} attempts={args.attempts}: rate={rate:.4f} stderr={stderr:.4f}")
    return 0


def _parse_betas(raw: str) -> tuple[float, ...]:
    try:
        betas = tuple(float(part) for part in raw.split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"betas must be comma-separated numbers, got {raw!r}")
    if not betas:
        raise ConfigError("betas list is empty")
    bad = [b for b in betas if not 0.0 <= b <= 1.0]
    if bad:
        raise ConfigError(f"betas must lie in [0, 1], got {bad}")
    return betas


def _cmd_sweep_beta(args) -> int:
    betas = _parse_betas(args.betas)
    points = sweep_beta(betas, seeds=range(args.seeds), base=hard_setting(episodes=args.episodes))
    table = summarize_sweep(points)
    for beta, row in table.items():
        print(
            f"beta={beta:g}: {row['mean']:.1f} +/- {row['stderr']:.1f} episodes "
            f"({row['runs']} runs, {row['censored']} censored)"
        )
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        payload = {
            "points": [p.to_json() for p in points],
            "summary": {str(beta): row for beta, row in table.items()},
        }
        (args.out / "sweep.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return 0


def _cmd_ablate_scene(args) -> int:
    base = ExperimentConfig(episodes=args.episodes, beta=0.0)
    points = ablation_scene_setting(seeds=range(args.seeds), base=base)
    p_value = ablation_sign_test(points, budget=args.episodes)
    for strategy in ("pre_stacked_2", "random_scatter"):
        stack3 = [p.stack3_episode for p in points if p.strategy == strategy]
        found = [e for e in stack3 if e is not None]
        phrase = (
            f"stack-of-3 at episode {statistics.fmean(found):.1f} on average"
            if found
            else "stack-of-3 never discovered"
        )
        print(f"{strategy}: {phrase} ({len(stack3) - len(found)}/{len(stack3)} censored)")
    print(f"sign test (pre_stacked_2 earlier): p={p_value:.2e}")
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        payload = {"points": [p.to_json() for p in points], "sign_test_p": p_value}
        (args.out / "ablation.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from blocktutor.service import create_app

    port = resolve_port(args.port, os.environ)
    uvicorn.run(create_app(), host=args.host, port=port)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handlers = {
        "run": _cmd_run,
        "eval": _cmd_eval,
        "sweep-beta": _cmd_sweep_beta,
        "ablate-scene": _cmd_ablate_scene,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
