import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratex.game import DimensionError, expected_payoff, pure_profile
from stratex.games import example1_game, random_zero_sum
from stratex.restriction import add_strategy, combine, embed_profile, lift_profile, restrict


def test_one_by_one():
    emp = restrict(example1_game(), [[0], [0]])
    assert emp.strategy_counts == (1, 1)
    assert emp.payoffs[0][0, 0] == 0.0


def test_payoff_projection():
    g = example1_game()
    emp = restrict(g, [[0, 2], [2, 1]])
    np.testing.assert_array_equal(emp.payoffs[0], [[-3.0, -0.1], [0.0, -2.0]])
    assert emp.game.zero_sum


@pytest.mark.parametrize("indices", [[[0], []], [[0, 0], [1]], [[3], [0]], [[0]]])
def test_invalid_indices(indices):
    with pytest.raises((ValueError, DimensionError)):
        restrict(example1_game(), indices)


def test_add_strategy():
    emp = restrict(example1_game(), [[0], [0]])
    emp2, new = add_strategy(emp, 0, 2)
    assert new and emp2.indices == ((0, 2), (0,))
    emp3, new = add_strategy(emp2, 0, 2)
    assert not new and emp3 is emp2


def test_lift_and_embed():
    g = example1_game()
    emp = restrict(g, [[2, 0], [1]])
    lifted = lift_profile(emp, (np.array([0.25, 0.75]), np.array([1.0])))
    np.testing.assert_array_equal(lifted[0], [0.75, 0.0, 0.25])
    bigger = restrict(g, [[0, 1, 2], [1, 2]])
    emb = embed_profile(emp, (np.array([0.25, 0.75]), np.array([1.0])), bigger)
    np.testing.assert_array_equal(emb[0], [0.75, 0.0, 0.25])
    np.testing.assert_array_equal(emb[1], [1.0, 0.0])
    with pytest.raises(ValueError):
        embed_profile(bigger, (np.ones(3) / 3, np.ones(2) / 2), emp)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), k=st.integers(1, 8))
def test_lifted_payoffs_agree(seed, k):
    rng = np.random.default_rng(seed)
    g = random_zero_sum(10, seed=seed % 1000)
    rows = [sorted(rng.choice(10, k, replace=False)) for _ in range(2)]
    emp = restrict(g, rows)
    prof = tuple(rng.dirichlet(np.ones(k)) for _ in range(2))
    for i in range(2):
        assert expected_payoff(emp.game, prof, i) == pytest.approx(
            expected_payoff(g, lift_profile(emp, prof), i))


def test_pure_profile_lift():
    g = example1_game()
    emp = restrict(g, [[1], [2]])
    lifted = lift_profile(emp, pure_profile(emp.game, (0, 0)))
    assert [int(np.argmax(s)) for s in lifted] == [1, 2]


def test_combine():
    g = example1_game()
    c = combine([((2, 0), (0,)), ((1,), (2, 0))], g)
    assert c.indices == ((0, 1, 2), (0, 2))
    with pytest.raises(ValueError):
        combine([], g)
