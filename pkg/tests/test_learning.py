import pytest
from hypothesis import given
from hypothesis import strategies as st

from hidden_action.learning import MemoryBuffer, estimate_exogenous, learned_expectation, observe_exogenous, remember
from hidden_action.model import UNBOUNDED, outcome

reals = st.floats(-10, 10, allow_nan=False)


@pytest.mark.parametrize("x,incited,expected", [(0.5, 0.45, 0.05), (0.45, 0.45, 0.0), (0.3, 0.45, -0.15)])
def test_estimate_exogenous(x, incited, expected):
    assert estimate_exogenous(x, incited) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("x,effort,expected", [(0.53, 0.41, 0.12), (0.41, 0.41, 0.0)])
def test_observe_exogenous(x, effort, expected):
    assert observe_exogenous(x, effort) == pytest.approx(expected, abs=1e-15)


@given(a=st.floats(0, 2), theta=st.floats(-1, 1))
def test_observation_inverts_outcome(a, theta):
    assert observe_exogenous(outcome(a, theta), a) == pytest.approx(theta, abs=1e-15)


@given(x=reals, a=st.floats(0, 2), incited=st.floats(0, 2))
def test_estimate_gap_is_effort_gap(x, a, incited):
    gap = estimate_exogenous(x, incited) - observe_exogenous(x, a)
    assert gap == pytest.approx(a - incited, abs=1e-12)


def test_remember_examples():
    assert remember(MemoryBuffer(1, (0.2,)), -0.1).entries == (-0.1,)
    assert remember(MemoryBuffer(3, (0.2, -0.2, 0.3)), -0.3).entries == (-0.2, 0.3, -0.3)
    full = MemoryBuffer(UNBOUNDED, tuple(range(19)))
    assert len(remember(full, 5.0)) == 20


def test_remember_returns_new_buffer():
    b = MemoryBuffer(2, (1.0,))
    c = remember(b, 2.0)
    assert b.entries == (1.0,) and c.entries == (1.0, 2.0)


def test_buffer_rejects_overfull():
    with pytest.raises(ValueError):
        MemoryBuffer(1, (0.0, 1.0))


@given(capacity=st.one_of(st.integers(1, 8), st.just(UNBOUNDED)), pushes=st.lists(reals, max_size=40))
def test_fifo_keeps_last_values(capacity, pushes):
    b = MemoryBuffer(capacity)
    for v in pushes:
        b = remember(b, v)
    keep = len(pushes) if capacity is UNBOUNDED else min(len(pushes), capacity)
    assert b.entries == tuple(pushes[len(pushes) - keep:])


@pytest.mark.parametrize("entries,expected", [((0.1, -0.1), 0.0), ((), 0.0), ((-0.2, 0.3, -0.3), -0.2 / 3)])
def test_learned_expectation(entries, expected):
    assert learned_expectation(MemoryBuffer(UNBOUNDED, entries), 0.0) == pytest.approx(expected, abs=1e-15)


def test_empty_memory_uses_prior():
    assert learned_expectation(MemoryBuffer(3), prior=0.7) == 0.7


@given(values=st.lists(reals, min_size=1, max_size=30))
def test_expectation_within_range(values):
    m = learned_expectation(MemoryBuffer(UNBOUNDED, values))
    assert min(values) - 1e-12 <= m <= max(values) + 1e-12
