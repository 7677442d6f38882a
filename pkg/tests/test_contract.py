import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hidden_action.contract import (
    ActionBounds,
    action_bounds,
    action_bounds_v,
    best_response,
    best_response_v,
    bisect,
    BisectionError,
    premium_for_effort,
    solve_second_best,
)
from hidden_action.model import agent_utility

from oracles import brent_best_response, cara, grid_best_response, grid_second_best, lambert_premium

ETA = 0.5
# frozen from oracles.grid_best_response (step 1e-6) and oracles.brent_best_response
BR_HALF = 0.44712
BR_FULL = 0.7034674224983917


def test_best_response_zero_premium():
    for belief in (-3.0, 0.0, 2.0):
        assert best_response(0.0, belief, ETA) == 0.0


@pytest.mark.parametrize("premium,expected", [(0.5, BR_HALF), (1.0, BR_FULL)])
def test_best_response_examples(premium, expected):
    assert best_response(premium, 0.0, ETA) == pytest.approx(expected, abs=1e-5)


def test_best_response_rejects_bad_premium():
    with pytest.raises(ValueError):
        best_response(1.5, 0.0, ETA)


def test_best_response_matches_grid_oracle_on_lattice():
    lattice = itertools.product(np.round(np.arange(0.1, 1.01, 0.1), 2), (-0.5, 0.0, 0.5), (0.25, 0.5, 1.0))
    for rho, belief, eta in lattice:
        assert best_response(rho, belief, eta) == pytest.approx(grid_best_response(rho, belief, eta), abs=1e-5)


@given(rho=st.floats(1e-3, 1.0), belief=st.floats(-2, 2), eta=st.floats(0.05, 3))
def test_best_response_matches_brent(rho, belief, eta):
    a = best_response(rho, belief, eta)
    assert a > 0
    assert a == pytest.approx(brent_best_response(rho, belief, eta), abs=1e-9)


def test_premium_for_effort_examples():
    # Lambert-W closed form gives 0.50011137594 for 0.4472
    assert premium_for_effort(0.4472, 0.0, ETA) == pytest.approx(0.5001113759424765, abs=1e-8)
    assert premium_for_effort(BR_FULL, 0.0, ETA) == pytest.approx(1.0, abs=1e-8)
    assert premium_for_effort(0.9, 0.0, ETA) is None


def test_premium_for_effort_infeasible_matches_brute_force():
    rhos = np.linspace(0, 1, 2001)
    reachable = max(brent_best_response(r, 0.0, ETA) for r in rhos)
    assert reachable < 0.9


def test_premium_for_effort_requires_positive_target():
    with pytest.raises(ValueError):
        premium_for_effort(0.0, 0.0, ETA)


@given(belief=st.floats(-1.0, 1.0), frac=st.floats(0.01, 0.99), eta=st.floats(0.1, 2.0))
@settings(max_examples=200)
def test_premium_round_trip(belief, frac, eta):
    upper = best_response(1.0, belief, eta)
    target = frac * upper
    rho = premium_for_effort(target, belief, eta)
    assert rho is not None and 0.0 <= rho <= 1.0
    assert best_response(rho, belief, eta) == pytest.approx(target, abs=1e-6)
    assert rho == pytest.approx(lambert_premium(target, belief, eta), abs=1e-8)


def test_premium_round_trip_grid():
    for belief, eta in itertools.product((-0.5, 0.0, 0.5), (0.25, 0.5, 1.0)):
        upper = best_response(1.0, belief, eta)
        for a in np.linspace(0, upper, 52)[1:-1]:
            assert best_response(premium_for_effort(a, belief, eta), belief, eta) == pytest.approx(a, abs=1e-6)


def test_premium_is_smallest_root_for_large_beliefs():
    # with a large belief the stationarity map is not monotone in the premium
    belief, eta = 6.0, 0.5
    target = 0.5 * best_response(1.0, belief, eta)
    rho = premium_for_effort(target, belief, eta)
    grid = np.linspace(0, rho, 20001)[:-1]
    assert np.all(grid * np.exp(-eta * grid * (target + belief)) < target)


def test_action_bounds_examples():
    b = action_bounds(0.0, ETA, 0.0)
    assert b.lower == 0.0
    assert b.upper == pytest.approx(BR_FULL, abs=1e-9)
    assert action_bounds(10.0, ETA, 0.0).lower == 0.0
    assert action_bounds(-50.0, ETA, 0.0) is None


def test_action_bounds_infeasible_matches_grid():
    rho, a = np.meshgrid(np.linspace(0, 1, 1001)[1:], np.linspace(0, 60, 3001)[1:])
    assert cara(rho * (a - 50.0), a, ETA).max() < 0.0


@pytest.mark.parametrize("belief", [-0.05, -0.2, -0.35])
def test_lower_bound_is_participation_threshold(belief):
    b = action_bounds(belief, ETA, 0.0)
    assert b is not None and 0.0 < b.lower <= b.upper

    def u(a):
        return agent_utility(lambert_premium(a, belief, ETA) * (a + belief), a, ETA)

    assert u(b.lower) >= 0.0
    below = np.linspace(1e-6, b.lower - 2e-8, 500)
    assert all(u(a) < 0.0 for a in below)


def test_action_bounds_vectorized_matches_scalar():
    beliefs = np.array([-0.6, -0.3, -0.1, 0.0, 0.2, 1.5])
    lower, upper, feasible = action_bounds_v(beliefs, ETA, 0.0)
    for i, b in enumerate(beliefs):
        s = action_bounds(float(b), ETA, 0.0)
        assert (s is not None) == feasible[i]
        if s is not None:
            assert (s.lower, s.upper) == (lower[i], upper[i])


def test_action_bounds_type():
    with pytest.raises(ValueError):
        ActionBounds(0.5, 0.2)
    assert ActionBounds(0.1, 0.5).clamp(0.9) == 0.5
    assert ActionBounds(0.1, 0.5).clamp(0.0) == 0.1


def test_best_response_positive_for_positive_premium():
    rho = np.linspace(1e-4, 1, 200)
    for belief in (-1.0, 0.0, 1.0):
        assert np.all(best_response_v(rho, belief, ETA) > 0)


def test_bisect_cap_is_an_error():
    with pytest.raises(BisectionError):
        bisect(lambda x: -x + 0.5, 0.0, 1.0, tol=0.0)


# frozen from oracles.grid_second_best(0.5), premium step 1e-4
SB_RHO, SB_EFFORT, SB_UP = 0.4532, 0.4127357690718981, 0.22568391852851385


def test_second_best_eta_half():
    b = solve_second_best(0.5)
    assert b.premium_star == pytest.approx(SB_RHO, abs=1e-4)
    assert b.effort_star == pytest.approx(SB_EFFORT, abs=1e-4)
    assert b.utility_principal_star == pytest.approx(SB_UP, abs=1e-6)
    assert b.utility_agent_star == pytest.approx(0.0934, abs=1e-4)
    assert b.outcome_star == b.effort_star
    assert b.utility_principal_star == pytest.approx((1 - b.premium_star) * b.effort_star, abs=1e-15)


def test_second_best_risk_neutral_limit():
    b = solve_second_best(1e-8)
    assert b.premium_star == pytest.approx(0.5, abs=1e-5)
    assert b.effort_star == pytest.approx(0.5, abs=1e-5)
    assert b.utility_principal_star == pytest.approx(0.25, abs=1e-8)


def test_second_best_monotone_in_risk_aversion():
    half, one = solve_second_best(0.5), solve_second_best(1.0)
    rho, a, up, _ = grid_second_best(1.0, step=1e-3)
    assert one.premium_star == pytest.approx(rho, abs=1e-3)
    assert one.premium_star < half.premium_star
    assert one.effort_star < half.effort_star


@pytest.mark.parametrize("eta", [0.25, 0.5, 1.0, 2.0])
def test_second_best_is_grid_optimal(eta):
    b = solve_second_best(eta)
    rhos = np.linspace(0, 1, 1001)
    up = (1 - rhos) * best_response_v(rhos, 0.0, eta)
    assert up.max() <= b.utility_principal_star + 1e-12


def test_second_best_rejects_bad_eta():
    with pytest.raises(ValueError):
        solve_second_best(0.0)
