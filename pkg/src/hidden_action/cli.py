"""Command-line interface: ``hal benchmark|run|sweep|stats|cv``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import List, Optional

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .contract import solve_second_best
from .engine import run_scenario
from .experiment import compare_memories, run_experiment, single_spec
from .model import format_capacity
from .results import OutputDirError, benchmark_record, emit_results, load_round_matrices, preflight, write_distances
from .stats import METRICS, cv_report, normalized_matrix

log = logging.getLogger("hidden_action")

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2
SEED_ENV = "HAL_SEED"


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="TOML run configuration")
    p.add_argument("--seed", type=int, help=f"base seed (overrides ${SEED_ENV})")
    p.add_argument("--rounds", type=int, help="simulation rounds per scenario")
    p.add_argument("--timesteps", type=int, help="periods per round")
    p.add_argument("--out", help="output directory")
    p.add_argument("--format", choices=("csv", "json"), help="table format for series and distances")
    p.add_argument("--workers", help="worker processes, integer or 'auto'")
    p.add_argument("-v", "--verbose", action="store_true")


def _scenario_args(p: argparse.ArgumentParser, default_sigma=None) -> None:
    p.add_argument("--m-p", dest="m_p", help="principal memory (integer or 'inf')")
    p.add_argument("--m-a", dest="m_a", help="agent memory (integer or 'inf')")
    p.add_argument("--sigma-frac", dest="sigma_frac", type=float, default=default_sigma,
                   help="noise standard deviation as a fraction of the benchmark outcome")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hal", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("benchmark", help="print the second-best contract")
    _common(p)
    p.add_argument("--eta", type=float, help="risk aversion (defaults to the config value)")

    p = sub.add_parser("run", help="simulate one scenario")
    _common(p)
    _scenario_args(p)

    p = sub.add_parser("sweep", help="simulate the full scenario grid")
    _common(p)
    p.add_argument("--permutations", type=int, default=10_000, help="permutations per significance test")

    p = sub.add_parser("stats", help="recompute distances and p-values from a results directory")
    _common(p)
    p.add_argument("results_dir", type=Path)
    p.add_argument("--permutations", type=int, default=10_000)

    p = sub.add_parser("cv", help="coefficient-of-variation run-count report")
    _common(p)
    _scenario_args(p, default_sigma=0.25)
    p.add_argument("--metric", choices=METRICS, default="utility_agent")
    p.add_argument("--t", type=int, help="period to inspect (default: last)")
    p.add_argument("--window-step", type=int, default=50)
    p.add_argument("--threshold", type=float, default=0.01)
    return parser


def resolve_config(args, environ=os.environ) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    seed = args.seed
    if seed is None and environ.get(SEED_ENV):
        try:
            seed = int(environ[SEED_ENV])
        except ValueError:
            raise ConfigError(SEED_ENV, f"expected an integer, got {environ[SEED_ENV]!r}") from None
    overrides = dict(base_seed=seed, rounds=args.rounds, timesteps=args.timesteps, output_dir=args.out,
                     format=args.format, workers=args.workers)
    if getattr(args, "m_p", None) is not None:
        overrides["memory_principal"] = args.m_p
    if getattr(args, "m_a", None) is not None:
        overrides["memory_agent"] = args.m_a
    if getattr(args, "sigma_frac", None) is not None:
        overrides["sigma_frac"] = args.sigma_frac
    if getattr(args, "eta", None) is not None:
        overrides["eta"] = args.eta
    return cfg.with_overrides(**overrides)


def cmd_benchmark(cfg: RunConfig, args) -> int:
    b = solve_second_best(cfg.eta, cfg.reservation_utility)
    print(json.dumps(benchmark_record(b, cfg.grid_sigma_frac), indent=2))
    return EXIT_OK


def _emit(cfg, result) -> None:
    written = emit_results(result)
    for name in ("series", "distances", "benchmark", "manifest"):
        print(f"wrote {written[name]}")


def cmd_run(cfg: RunConfig, args) -> int:
    preflight(cfg.output_dir)
    spec = single_spec(cfg)
    _emit(cfg, run_experiment(cfg, specs=[spec]))
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, args) -> int:
    preflight(cfg.output_dir)
    start = time.perf_counter()
    result = run_experiment(cfg, permutations=args.permutations)
    log.info("sweep of %d scenarios took %.1fs", len(result.scenarios), time.perf_counter() - start)
    _emit(cfg, result)
    return EXIT_OK


def cmd_stats(cfg: RunConfig, args) -> int:
    matrices = load_round_matrices(args.results_dir)
    comparisons = compare_memories(matrices, permutations=args.permutations, seed=cfg.base_seed)
    path = write_distances(args.results_dir, comparisons, cfg.format)
    for c in comparisons:
        print(f"{c.environment:>14}  {c.comparison:<18} distance={c.distance:.4f}  p={c.p_value:.4f}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_cv(cfg: RunConfig, args) -> int:
    if args.rounds is None:
        cfg = cfg.with_overrides(rounds=2000)
    if args.out:
        preflight(cfg.output_dir)
    b = solve_second_best(cfg.eta, cfg.reservation_utility)
    spec = single_spec(cfg, b)
    matrix = normalized_matrix(run_scenario(spec, b), args.metric, b)
    t = args.t if args.t is not None else cfg.timesteps
    if not 1 <= t <= cfg.timesteps:
        raise ConfigError("t", f"must lie in [1, {cfg.timesteps}], got {t}")
    report = cv_report(matrix[:, t - 1], args.window_step, args.threshold)
    out = {
        "scenario_id": spec.scenario_id,
        "metric": args.metric,
        "t": t,
        "rounds": cfg.rounds,
        "window_step": args.window_step,
        "threshold": args.threshold,
        "stabilizing_rounds": report.stabilizing_rounds,
        "checkpoints": [int(k) for k in report.checkpoints],
        "cv": [None if np.isnan(v) else float(v) for v in report.cv],
    }
    text = json.dumps(out, indent=2)
    print(text)
    if args.out:
        (Path(cfg.output_dir) / "cv.json").write_text(text + "\n")
    return EXIT_OK


COMMANDS = {"benchmark": cmd_benchmark, "run": cmd_run, "sweep": cmd_sweep, "stats": cmd_stats, "cv": cmd_cv}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OutputDirError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
