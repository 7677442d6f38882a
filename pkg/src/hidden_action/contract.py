"""Incentive kernel: best responses, IC premium inversion, feasible action
bounds and the second-best benchmark.

Every kernel broadcasts over numpy arrays so the engine can advance all rounds
of a scenario at once; scalar wrappers return Python floats. Infeasible entries
are reported as NaN by the array kernels and as ``None`` by the scalar API.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .model import Benchmark, agent_utility

TOL = 1e-10
MAX_ITER = 200
BOUND_TOL = 1e-8
SCAN_POINTS = 64


class BisectionError(RuntimeError):
    """Raised when bisection hits its iteration cap."""


def bisect(f: Callable[[np.ndarray], np.ndarray], lo, hi, tol: float = TOL) -> np.ndarray:
    """Vectorized bisection for ``f`` positive left of the root, negative right.

    Returns the midpoint of the final bracket. Each element stops as soon as
    its own bracket is narrower than ``tol``, so results do not depend on
    what else is in the batch.
    """
    lo, hi = np.broadcast_arrays(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
    lo, hi = lo.copy(), hi.copy()
    for _ in range(MAX_ITER):
        active = hi - lo >= tol
        if not active.any():
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        right = f(mid) > 0
        lo = np.where(active & right, mid, lo)
        hi = np.where(active & ~right, mid, hi)
    raise BisectionError(f"bisection did not reach tol={tol} in {MAX_ITER} iterations")


def best_response_v(premium, belief, eta: float) -> np.ndarray:
    """Effort maximizing the agent's point-belief utility at ``premium``.

    Root of ``premium * exp(-eta * premium * (a + belief)) - a``, which is
    strictly decreasing in ``a``; the utility is strictly concave so the root
    is the global maximizer on ``a >= 0``.
    """
    premium, belief = np.broadcast_arrays(np.asarray(premium, dtype=float), np.asarray(belief, dtype=float))
    hi = premium * np.exp(-eta * premium * belief) + 1.0
    root = bisect(lambda a: premium * np.exp(-eta * premium * (a + belief)) - a, np.zeros_like(premium), hi)
    return np.where(premium == 0.0, 0.0, root)


def premium_for_effort_v(target, belief, eta: float) -> np.ndarray:
    """Smallest premium making ``target`` the agent's best response.

    The stationarity condition read as a function of the premium,
    ``h(r) = r * exp(-eta * r * c) - target`` with ``c = target + belief``,
    increases on ``[0, min(1, 1 / (eta * c))]``, which contains the smallest
    root whenever ``h(1) >= 0``. NaN where the target lies beyond the IC
    frontier ``best_response(1)``.
    """
    target, belief = np.broadcast_arrays(np.asarray(target, dtype=float), np.asarray(belief, dtype=float))
    c = target + belief
    steep = eta * c > 1.0
    hi = np.where(steep, 1.0 / np.where(steep, eta * c, 1.0), 1.0)
    rho = bisect(lambda r: target - r * np.exp(-eta * r * c), np.zeros_like(target), hi)
    feasible = np.exp(-eta * c) >= target
    rho = np.where(target == 0.0, 0.0, rho)
    return np.where(feasible, rho, np.nan)


def predicted_agent_utility_v(effort, belief, eta: float, premium=None) -> np.ndarray:
    """Agent utility at a point belief, along the IC curve unless ``premium`` is given."""
    if premium is None:
        premium = premium_for_effort_v(effort, belief, eta)
    return agent_utility(premium * (effort + belief), effort, eta)


def action_bounds_v(belief, eta: float, reservation_utility: float = 0.0):
    """Feasible incited-effort interval for each belief.

    Returns ``(lower, upper, feasible)``. ``upper`` is the IC frontier; ``lower``
    is the smallest positive effort whose IC contract meets participation,
    located by a grid scan over ``(0, upper]`` refined by bisection.
    """
    belief = np.atleast_1d(np.asarray(belief, dtype=float))
    upper = best_response_v(1.0, belief, eta)
    lower = np.zeros_like(belief)
    feasible = np.ones(belief.shape, dtype=bool)

    # a -> 0+ gives premium -> 0 and utility -> 0 with sign of belief
    trivially_ok = (reservation_utility < 0.0) | ((reservation_utility == 0.0) & (belief >= 0.0))
    todo = np.flatnonzero(~trivially_ok)
    if todo.size == 0:
        return lower, upper, feasible

    b = belief[todo]
    grid = upper[todo, None] * (np.arange(1, SCAN_POINTS + 1) / SCAN_POINTS)
    bg = np.broadcast_to(b[:, None], grid.shape)
    ok = predicted_agent_utility_v(grid, bg, eta) >= reservation_utility
    any_ok = ok.any(axis=1)
    k = np.argmax(ok, axis=1)
    rows = np.arange(todo.size)
    hi = grid[rows, k]
    lo = np.where(k > 0, grid[rows, np.maximum(k - 1, 0)], 0.0)

    def fails(a):
        return (predicted_agent_utility_v(a, b, eta) < reservation_utility).astype(float) - 0.5

    # return the passing end so the bound itself satisfies participation
    bracket_hi = hi.copy()
    bracket_lo = lo.copy()
    for _ in range(MAX_ITER):
        active = bracket_hi - bracket_lo >= BOUND_TOL
        if not active.any():
            break
        mid = 0.5 * (bracket_lo + bracket_hi)
        bad = fails(mid) > 0
        bracket_lo = np.where(active & bad, mid, bracket_lo)
        bracket_hi = np.where(active & ~bad, mid, bracket_hi)
    else:
        raise BisectionError("action-bound bisection did not converge")

    lower[todo] = np.where(any_ok, bracket_hi, np.nan)
    feasible[todo] = any_ok
    return lower, upper, feasible


@dataclass(frozen=True)
class ActionBounds:
    lower: float
    upper: float

    def __post_init__(self):
        if not 0.0 <= self.lower <= self.upper:
            raise ValueError(f"invalid action bounds [{self.lower}, {self.upper}]")

    def clamp(self, effort: float) -> float:
        return min(max(effort, self.lower), self.upper)


def best_response(premium: float, belief_theta: float, eta: float) -> float:
    if not 0.0 <= premium <= 1.0:
        raise ValueError(f"premium must lie in [0, 1], got {premium}")
    return float(best_response_v(premium, belief_theta, eta))


def premium_for_effort(target_effort: float, belief_theta: float, eta: float) -> Optional[float]:
    """IC premium for ``target_effort``, or ``None`` beyond the IC frontier."""
    if not target_effort > 0:
        raise ValueError(f"target effort must be > 0, got {target_effort}")
    rho = float(premium_for_effort_v(target_effort, belief_theta, eta))
    return None if math.isnan(rho) else rho


def action_bounds(belief_theta: float, eta: float, reservation_utility: float = 0.0) -> Optional[ActionBounds]:
    lower, upper, feasible = action_bounds_v(belief_theta, eta, reservation_utility)
    if not feasible[0]:
        return None
    return ActionBounds(float(lower[0]), float(upper[0]))


def _golden_max(f: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(MAX_ITER):
        if hi - lo < tol:
            break
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = f(x1)
    return 0.5 * (lo + hi)


def solve_second_best(eta: float, reservation_utility: float = 0.0, resolution: float = 1e-6) -> Benchmark:
    """Second-best pure-share contract at the point expectation of the noise.

    A 1e-3 grid over the premium brackets the best participating contract,
    then golden-section search refines it below ``resolution``.
    """
    if not eta > 0:
        raise ValueError(f"eta must be > 0, got {eta}")

    def objective(rho):
        rho = np.asarray(rho, dtype=float)
        a = best_response_v(rho, 0.0, eta)
        ok = agent_utility(rho * a, a, eta) >= reservation_utility
        return np.where(ok, (1.0 - rho) * a, -np.inf)

    grid = np.linspace(0.0, 1.0, 1001)
    values = objective(grid)
    k = int(np.argmax(values))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
    rho = _golden_max(lambda r: float(objective(r)), lo, hi, resolution * 1e-3)
    if float(objective(rho)) < values[k]:
        rho = float(grid[k])
    rho = float(rho)
    a = float(best_response_v(rho, 0.0, eta))
    return Benchmark(
        premium_star=rho,
        effort_star=a,
        outcome_star=a,
        utility_principal_star=(1.0 - rho) * a,
        utility_agent_star=float(agent_utility(rho * a, a, eta)),
        eta=eta,
    )
