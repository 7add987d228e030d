from fractions import Fraction

import numpy as np
import pytest

from oracles import (
    kuhn_sequence_form_value,
    kuhn_strategy_dicts,
    kuhn_tree_value,
    scipy_zero_sum_value,
)
from stratex.games import (
    GameSpec,
    example1_game,
    kuhn_label,
    kuhn_normal_form,
    random_zero_sum,
    sample_subgame,
    unstable_ne_game,
)
from stratex.lp import solve_zero_sum


@pytest.fixture(scope="module")
def kuhn():
    return kuhn_normal_form()


def test_example_games_symmetric_zero_sum():
    for g in (example1_game(), unstable_ne_game()):
        a = g.payoffs[0]
        assert g.zero_sum and a.shape == (3, 3)
        np.testing.assert_array_equal(a, -a.T)


def test_random_zero_sum_deterministic_and_bounded():
    g1, g2 = random_zero_sum(30, -4, 4, seed=11), random_zero_sum(30, -4, 4, seed=11)
    assert g1 == g2
    a = g1.payoffs[0]
    assert a.min() >= -4 and a.max() <= 4
    assert set(np.unique(a)) == set(range(-4, 5))
    assert random_zero_sum(30, -4, 4, seed=12) != g1


def test_random_zero_sum_pinned_values():
    # guards the documented generator against silent changes
    a = random_zero_sum(3, seed=0).payoffs[0]
    expected = np.random.Generator(np.random.PCG64(0)).integers(-10, 10, size=(3, 3), endpoint=True)
    np.testing.assert_array_equal(a, expected)


def test_random_zero_sum_bad_bounds():
    with pytest.raises(ValueError):
        random_zero_sum(5, 3, 2)


def test_kuhn_shape_and_grid(kuhn):
    a = kuhn.payoffs[0]
    assert kuhn.zero_sum and a.shape == (64, 64)
    np.testing.assert_array_equal(kuhn.payoffs[0] + kuhn.payoffs[1], 0)
    sixths = a * 6
    np.testing.assert_array_equal(sixths, np.round(sixths))


def test_kuhn_matches_tree_walk(kuhn):
    rng = np.random.default_rng(0)
    pairs = [(s1, s2) for s1 in range(64) for s2 in range(64)]
    for k in rng.choice(len(pairs), 400, replace=False):
        s1, s2 = pairs[k]
        want = kuhn_tree_value(kuhn_strategy_dicts(s1, 0), kuhn_strategy_dicts(s2, 1))
        assert Fraction(kuhn.payoffs[0][s1, s2]).limit_denominator(6) == want


def test_kuhn_value_three_ways(kuhn):
    _, _, value = solve_zero_sum(kuhn.payoffs[0])
    assert value == pytest.approx(-1 / 18, abs=1e-9)
    assert scipy_zero_sum_value(kuhn.payoffs[0])[0] == pytest.approx(-1 / 18, abs=1e-9)
    assert kuhn_sequence_form_value() == pytest.approx(-1 / 18, abs=1e-9)


def test_kuhn_labels(kuhn):
    assert kuhn_label(0) == "Jkf-Qkf-Kkf"
    assert kuhn_label(63) == "Jbc-Qbc-Kbc"
    assert len(set(kuhn.labels[0])) == 64


def test_sample_subgame(kuhn):
    emp = sample_subgame(kuhn, 7, seed=3)
    assert emp.strategy_counts == (7, 7)
    for row in emp.indices:
        assert list(row) == sorted(row)
    assert sample_subgame(kuhn, 7, seed=3).indices == emp.indices
    with pytest.raises(ValueError):
        sample_subgame(kuhn, 65, seed=0)


def test_game_spec():
    assert GameSpec("example1").build() == example1_game()
    g = GameSpec("random_zero_sum", strategies_per_player=5, seed=2).build()
    assert g == random_zero_sum(5, seed=2)
    for bad in ({"kind": "nope"}, {"kind": "random_zero_sum", "payoff_low": 3, "payoff_high": 1},
                {"kind": "random_zero_sum", "strategies_per_player": 0},
                {"kind": "random_zero_sum", "seed": -1}):
        with pytest.raises(ValueError):
            GameSpec(**bad)
