#!/usr/bin/env python3
"""Mean normalized trajectories for a handful of memory settings in one
environment, plus how often no contract was concluded per period.

Useful for seeing how quickly the principal's search settles and how much of
the agent's shortfall comes from no-contract periods.
"""

import argparse

import numpy as np

from hidden_action.contract import solve_second_best
from hidden_action.engine import make_spec, run_scenario
from hidden_action.model import ModelParams, parse_capacity
from hidden_action.stats import METRICS, normalize_series


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sigma-frac", type=float, default=0.45)
    ap.add_argument("--memories", nargs="+", default=["1,1", "1,5", "5,1", "5,5", "inf,inf"],
                    help="m_P,m_A pairs")
    ap.add_argument("--rounds", type=int, default=700)
    ap.add_argument("--timesteps", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    b = solve_second_best(0.5)
    for pair in args.memories:
        mp, ma = (parse_capacity(v) for v in pair.split(","))
        params = ModelParams(memory_principal=mp, memory_agent=ma, sigma_frac=args.sigma_frac,
                             sigma=args.sigma_frac * b.outcome_star, rounds=args.rounds, timesteps=args.timesteps)
        spec = make_spec(params, args.seed)
        rounds = run_scenario(spec, b)
        series = {m: normalize_series(rounds, m, b).values for m in METRICS}
        no_deal = 1.0 - np.mean([r.accepted for r in rounds], axis=0)

        print(f"\n{spec.scenario_id}")
        print(f"{'t':>3} " + " ".join(f"{m:>17}" for m in METRICS) + f" {'no-contract':>12}")
        for t in range(args.timesteps):
            print(f"{t + 1:3d} " + " ".join(f"{series[m][t]:17.4f}" for m in METRICS) + f" {no_deal[t]:12.3f}")


if __name__ == "__main__":
    main()
