#!/usr/bin/env python3
"""Run the default 48-scenario grid and print the period-20 outcome table and
the memory-comparison distances for agent utility.

    python3 scripts/reproduce_grid.py --out results/grid --rounds 700
"""

import argparse
import logging
import time

from hidden_action.config import RunConfig
from hidden_action.experiment import environment_name, run_experiment
from hidden_action.model import format_capacity
from hidden_action.results import emit_results


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/grid")
    ap.add_argument("--rounds", type=int, default=700)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--permutations", type=int, default=10_000)
    ap.add_argument("--workers", default="auto")
    args = ap.parse_args()
    logging.basicConfig(level=logging.WARNING)

    cfg = RunConfig(rounds=args.rounds, base_seed=args.seed, output_dir=args.out, workers=args.workers)
    start = time.perf_counter()
    result = run_experiment(cfg, permutations=args.permutations)
    elapsed = time.perf_counter() - start
    emit_results(result)

    b = result.benchmark
    print(f"second best at eta={b.eta}: rho*={b.premium_star:.4f} a*={b.effort_star:.4f} "
          f"U_P*={b.utility_principal_star:.4f} U_A*={b.utility_agent_star:.4f}")
    print(f"{len(result.scenarios)} scenarios x {cfg.rounds} rounds in {elapsed:.1f}s\n")

    print(f"{'env':<14} {'m_P':>4} {'m_A':>4} {'premium':>8} {'effort':>8} {'U_P':>8} {'U_A':>8} {'no-contract':>12}")
    for s in result.scenarios:
        mp, ma, sf = s.key
        last = {m: v.values[-1] for m, v in s.series.items()}
        print(f"{environment_name(sf):<14} {format_capacity(mp):>4} {format_capacity(ma):>4} "
              f"{last['premium']:8.3f} {last['effort']:8.3f} {last['utility_principal']:8.3f} "
              f"{last['utility_agent']:8.3f} {s.rejections:12d}")

    print(f"\n{'env':<14} {'comparison':<18} {'distance':>9} {'p':>8}")
    for c in result.comparisons:
        star = " **" if c.p_value <= 0.01 else ""
        print(f"{c.environment:<14} {c.comparison:<18} {c.distance:9.4f} {c.p_value:8.4f}{star}")
    print(f"\nwrote {args.out}")


if __name__ == "__main__":
    main()
