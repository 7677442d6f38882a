#!/usr/bin/env python3
"""Second-best contract as a function of the agent's risk aversion."""

import argparse

import numpy as np

from hidden_action.contract import solve_second_best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--etas", type=float, nargs="+", default=[1e-6, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0])
    ap.add_argument("--reservation-utility", type=float, default=0.0)
    args = ap.parse_args()

    print(f"{'eta':>8} {'rho*':>8} {'a*':>8} {'U_P*':>8} {'U_A*':>8} {'U_A*/U_P*':>10}")
    for eta in args.etas:
        b = solve_second_best(eta, args.reservation_utility)
        ratio = b.utility_agent_star / b.utility_principal_star if b.utility_principal_star else np.nan
        print(f"{eta:8.3g} {b.premium_star:8.4f} {b.effort_star:8.4f} {b.utility_principal_star:8.4f} "
              f"{b.utility_agent_star:8.4f} {ratio:10.3f}")


if __name__ == "__main__":
    main()
