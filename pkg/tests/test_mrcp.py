import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratex.game import NormalFormGame, player_regrets, profile_regret_sum, pure_profile
from stratex.games import example1_game, kuhn_normal_form, random_zero_sum, sample_subgame
from stratex.mrcp import (
    AmoebaParams,
    approx_mrcp,
    compute_mrcp,
    deviation_table,
    mrcp_amoeba_binary_search,
    mrcp_amoeba_projected,
    mrcp_brute_force,
    regret_upper_bound,
)
from stratex.restriction import lift_profile, restrict
from stratex.solvers import nash_lp


def feasible(profile, counts):
    return all(s.shape == (n,) and s.min() >= 0 and abs(s.sum() - 1) <= 1e-12
               for s, n in zip(profile, counts))


def exact(emp, profile):
    return profile_regret_sum(emp.full_game, lift_profile(emp, profile))


def loop_grid_min(emp, k):
    """Brute force with explicit loops, independent of the vectorized oracle."""
    best = np.inf
    n1, n2 = emp.strategy_counts
    def simplex(n):
        for c in itertools.product(range(k + 1), repeat=n):
            if sum(c) == k:
                yield np.array(c) / k
    for p in simplex(n1):
        for q in simplex(n2):
            best = min(best, exact(emp, (p, q)))
    return best


def test_example1_pair_mrcp():
    emp = restrict(example1_game(), [[0, 2], [0, 2]])
    res = mrcp_amoeba_projected(emp)
    grid = mrcp_brute_force(emp, grid_step=1e-3)
    assert feasible(res.profile, (2, 2))
    assert res.regret == pytest.approx(exact(emp, res.profile))
    assert res.regret <= grid.regret + 1e-9
    assert res.regret == pytest.approx(grid.regret, abs=1e-3)
    # MRCP beats the empirical NE (pure a3, regret 4)
    assert res.regret < exact(emp, nash_lp(emp))


@pytest.mark.parametrize("seed", range(4))
def test_vectorized_grid_matches_loops(seed):
    g = random_zero_sum(6, seed=seed)
    emp = restrict(g, [[0, 3], [1, 4, 5]])
    assert mrcp_brute_force(emp, grid_step=0.1).regret == pytest.approx(loop_grid_min(emp, 10))


def test_grid_max_objective():
    g = random_zero_sum(6, seed=7)
    emp = restrict(g, [[0, 3], [1, 4]])
    res = mrcp_brute_force(emp, "max", grid_step=0.05)
    assert res.objective_value == pytest.approx(
        player_regrets(g, lift_profile(emp, res.profile)).max())


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000), k=st.integers(1, 4))
def test_amoeba_never_worse_than_seeds(seed, k):
    g = random_zero_sum(12, seed=seed)
    rng = np.random.default_rng(seed)
    emp = restrict(g, [sorted(rng.choice(12, k, replace=False)) for _ in range(2)])
    seeds = [nash_lp(emp), tuple(rng.dirichlet(np.ones(k)) for _ in range(2))]
    params = AmoebaParams(max_iters=50)
    for search in (mrcp_amoeba_projected, mrcp_amoeba_binary_search):
        res = search(emp, "sum", params, seeds)
        assert feasible(res.profile, emp.strategy_counts)
        assert res.regret <= min(exact(emp, s) for s in seeds)
        assert res.regret == exact(emp, res.profile)


def test_zero_regret_stops_immediately():
    g = example1_game()
    emp = restrict(g, [[0, 1, 2], [0, 1, 2]])
    res = mrcp_amoeba_projected(emp, seed_vertices=[pure_profile(emp.game, (1, 1))])
    assert res.regret == 0.0 and res.iterations == 0


def test_three_player_mrcp():
    rng = np.random.default_rng(0)
    g = NormalFormGame(tuple(rng.integers(-3, 4, size=(3, 3, 3)).astype(float) for _ in range(3)))
    emp = restrict(g, [[0, 1], [1, 2], [0, 2]])
    res = mrcp_amoeba_projected(emp, params=AmoebaParams(max_iters=300))
    grid = mrcp_brute_force(emp, grid_step=0.05)
    assert feasible(res.profile, (2, 2, 2))
    assert res.regret <= grid.regret + 0.05


def test_random_init_simplex_varies():
    emp = sample_subgame(kuhn_normal_form(), 6, seed=1)
    a = mrcp_amoeba_projected(emp, params=AmoebaParams(max_iters=30, init_seed=1))
    b = mrcp_amoeba_projected(emp, params=AmoebaParams(max_iters=30, init_seed=2))
    assert not np.array_equal(a.profile[0], b.profile[0])


def test_input_validation():
    emp = restrict(example1_game(), [[0, 2], [0, 2]])
    with pytest.raises(ValueError):
        mrcp_amoeba_projected(emp, "median")
    with pytest.raises(ValueError):
        mrcp_amoeba_projected(emp, seed_vertices=[(np.array([0.7, 0.7]), np.array([1.0, 0.0]))])
    with pytest.raises(ValueError):
        mrcp_brute_force(sample_subgame(kuhn_normal_form(), 20, seed=0), grid_step=0.01)
    with pytest.raises(ValueError):
        mrcp_brute_force(emp, grid_step=0.3)
    with pytest.raises(ValueError):
        AmoebaParams(rho=0.9)
    with pytest.raises(ValueError):
        compute_mrcp(emp, method="anneal")


def test_compute_mrcp_dispatch():
    emp = restrict(example1_game(), [[0, 2], [0, 2]])
    assert compute_mrcp(emp, "brute_force", grid_step=0.1).evaluations == 121
    assert compute_mrcp(emp, "approx").objective == "surrogate_max"
    assert compute_mrcp(emp, "binary_search").objective == "sum"


# --------------------------------------------------------- surrogate bound


def test_deviation_table_example1():
    emp = restrict(example1_game(), [[0, 2], [0, 2]])
    t1, t2 = deviation_table(emp)
    # best reply payoffs against a1 and a3
    np.testing.assert_array_equal(t1, [3.0, 2.0])
    np.testing.assert_array_equal(t2, [3.0, 2.0])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), k=st.integers(1, 5), players=st.sampled_from([2, 3]))
def test_bound_dominates_exact_regret(seed, k, players):
    rng = np.random.default_rng(seed)
    n = 6
    if players == 2:
        g = random_zero_sum(n, seed=seed)
    else:
        shape = (n,) * 3
        g = NormalFormGame(tuple(rng.normal(size=shape) for _ in range(3)))
    emp = restrict(g, [sorted(rng.choice(n, k, replace=False)) for _ in range(players)])
    table = deviation_table(emp)
    prof = tuple(rng.dirichlet(np.ones(k)) for _ in range(players))
    bound = regret_upper_bound(emp, prof, table)
    assert (bound >= player_regrets(g, lift_profile(emp, prof)) - 1e-12).all()
    pure = pure_profile(emp.game, [int(rng.integers(k)) for _ in range(players)])
    np.testing.assert_allclose(regret_upper_bound(emp, pure, table),
                               player_regrets(g, lift_profile(emp, pure)), atol=1e-12)


def test_approx_mrcp_reports_exact_regret():
    emp = sample_subgame(random_zero_sum(50, -1000, 1000, seed=0), 4, seed=2)
    res = approx_mrcp(emp, AmoebaParams(max_iters=200))
    assert res.objective == "surrogate_max"
    assert res.regret == pytest.approx(exact(emp, res.profile))
    assert res.objective_value >= max(player_regrets(emp.full_game, lift_profile(emp, res.profile))) - 1e-9
