import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratex.game import InfeasibleFloorError, NormalFormGame, profile_regret_sum
from stratex.games import example1_game, random_zero_sum
from stratex.restriction import restrict
from stratex.solvers import (
    MetaSolver,
    UnsupportedGameError,
    make_solver,
    nash_lp,
    prd,
    replicator_dynamics,
    self_play,
    uniform_fp,
)


def test_nash_on_example1():
    g = example1_game()
    p, q = nash_lp(restrict(g, [[0, 2], [0, 2]]))
    np.testing.assert_allclose(p, [0, 1], atol=1e-12)
    np.testing.assert_allclose(q, [0, 1], atol=1e-12)
    p, q = nash_lp(restrict(g, [[0, 1, 2], [0, 1, 2]]))
    np.testing.assert_allclose(p, [0, 1, 0], atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), k=st.integers(1, 10))
def test_nash_has_zero_regret_in_empirical_game(seed, k):
    g = random_zero_sum(k, seed=seed)
    emp = restrict(g, [range(k), range(k)])
    assert profile_regret_sum(emp.game, nash_lp(emp)) <= 1e-9


def test_nash_rejects_general_sum():
    g = NormalFormGame.from_matrix([[1, 0], [0, 1]], [[1, 0], [0, 1]])
    with pytest.raises(UnsupportedGameError):
        nash_lp(restrict(g, [[0, 1], [0, 1]]))


def test_rd_zero_steps_is_uniform():
    emp = restrict(example1_game(), [[0, 1, 2], [0, 1, 2]])
    for s in replicator_dynamics(emp, steps=0):
        np.testing.assert_allclose(s, [1 / 3] * 3)


def test_rd_symmetric_trajectory():
    emp = restrict(example1_game(), [[0, 1, 2], [0, 1, 2]])
    p, q = replicator_dynamics(emp, dt=1e-2, steps=500)
    np.testing.assert_allclose(p, q, atol=1e-12)


def test_rd_dominant_strategy_takes_over():
    g = NormalFormGame.from_matrix([[1, 1], [0, 0]])
    p, _ = replicator_dynamics(restrict(g, [[0, 1], [0, 1]]), dt=0.1, steps=2000)
    assert p[0] > 0.99


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), k=st.integers(2, 6), floor=st.floats(0, 0.15))
def test_prd_respects_floor(seed, k, floor):
    emp = restrict(random_zero_sum(k, seed=seed), [range(k), range(k)])
    for s in prd(emp, dt=0.05, steps=200, floor=floor):
        assert s.min() >= floor - 1e-12
        assert s.sum() == pytest.approx(1.0, abs=1e-12)


def test_prd_infeasible_floor():
    emp = restrict(example1_game(), [[0, 1, 2], [0, 1, 2]])
    with pytest.raises(InfeasibleFloorError):
        prd(emp, floor=0.4)


def test_prd_tolerance_stops_early():
    emp = restrict(random_zero_sum(4, seed=1), [range(4), range(4)])
    full = prd(emp, dt=1e-2, steps=20_000, floor=0.0)
    early = prd(emp, dt=1e-2, steps=20_000, floor=0.0, tolerance=1e-3)
    assert not all(np.array_equal(a, b) for a, b in zip(full, early))


def test_uniform_fp_counts():
    emp = restrict(example1_game(), [[0, 2, 1], [0, 2, 1]])
    p, _ = uniform_fp(emp, [[0, 2, 2, 1], [0, 2, 2, 1]])
    np.testing.assert_allclose(p, [1 / 4, 1 / 2, 1 / 4])
    p, _ = uniform_fp(emp, [[0, 2, 2, 1, 1]] * 2)
    np.testing.assert_allclose(p, [1 / 5, 2 / 5, 2 / 5])
    emp1 = restrict(example1_game(), [[0], [0]])
    assert uniform_fp(emp1, [[0], [0]])[0][0] == 1.0


def test_self_play():
    emp = restrict(example1_game(), [[0, 2], [0, 2]])
    p, q = self_play(emp, [[0, 2], [0, 2]])
    np.testing.assert_array_equal(p, [0, 1])
    with pytest.raises(ValueError):
        self_play(emp, None)


def test_make_solver():
    assert make_solver("nash").name == "nash"
    s = make_solver({"name": "prd", "dt": 0.01, "steps": 10, "floor": 0.01})
    assert s.floor == 0.01 and not s.uses_history
    assert make_solver("uniform").uses_history
    assert make_solver(s) is s
    assert make_solver(s.to_dict()) == s
    with pytest.raises(ValueError):
        make_solver("alpharank")
    with pytest.raises(ValueError):
        MetaSolver("rd", dt=0)
