"""Minimum-regret constrained profile (MRCP) search.

The search space is the product of the empirical game's per-player
simplices, flattened into one coordinate vector.  Regret is always measured
in the full game by lifting the profile, so an MRCP regret is directly
comparable with any solver-based regret computed by ``evaluation``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .game import (
    SUM_TOL,
    Profile,
    expected_payoff,
    player_regrets,
    profile_regret_sum,
    project_to_simplex,
)
from .games import rng_for
from .restriction import EmpiricalGame, lift_profile

OBJECTIVES = ("sum", "max", "surrogate_max", "surrogate_sum")
MAX_GRID_POINTS = 10_000_000


@dataclass(frozen=True)
class AmoebaParams:
    alpha: float = 1.0
    gamma: float = 2.0
    rho: float = 0.5
    sigma: float = 0.5
    max_iters: int = 2000
    tol: float = 1e-12
    init_step: float = 0.1
    # when set, the unseeded initial simplex is drawn at random instead
    init_seed: int | None = None
    bisection_steps: int = 60

    def __post_init__(self):
        if not (self.alpha > 0 and self.gamma > 1 and 0 < self.rho <= 0.5 and 0 < self.sigma < 1):
            raise ValueError("need alpha > 0, gamma > 1, 0 < rho <= 1/2, 0 < sigma < 1")
        if self.max_iters < 0 or self.tol < 0:
            raise ValueError("max_iters and tol must be non-negative")


@dataclass(frozen=True)
class MrcpResult:
    profile: Profile
    regret: float
    objective: str
    objective_value: float
    evaluations: int
    iterations: int = 0
    converged: bool = True


# ---------------------------------------------------------------- helpers


def _splits(emp: EmpiricalGame) -> list[int]:
    return list(np.cumsum(emp.strategy_counts)[:-1])


def _split(x: np.ndarray, cuts) -> Profile:
    return tuple(np.split(x, cuts))


def _flatten(profile) -> np.ndarray:
    return np.concatenate([np.asarray(s, dtype=float) for s in profile])


def _blocks_feasible(x: np.ndarray, cuts) -> bool:
    return all(b.min() >= 0.0 and abs(b.sum() - 1.0) <= SUM_TOL for b in np.split(x, cuts))


def _project(x: np.ndarray, cuts) -> np.ndarray:
    return np.concatenate([project_to_simplex(b) for b in np.split(x, cuts)])


class _Objective:
    """Cached objective with best-ever tracking."""

    def __init__(self, emp: EmpiricalGame, objective: str):
        if objective not in OBJECTIVES:
            raise ValueError(f"unknown objective {objective!r}; expected one of {OBJECTIVES}")
        self.emp = emp
        self.cuts = _splits(emp)
        self.name = objective
        self.table = deviation_table(emp) if objective.startswith("surrogate") else None
        self.cache: dict[bytes, float] = {}
        self.evaluations = 0
        self.best_x: np.ndarray | None = None
        self.best_f = math.inf

    def profile_value(self, profile) -> float:
        if self.table is not None:
            bound = regret_upper_bound(self.emp, profile, self.table)
            return float(bound.max() if self.name == "surrogate_max" else bound.sum())
        regrets = player_regrets(self.emp.full_game, lift_profile(self.emp, profile))
        return float(regrets.sum() if self.name == "sum" else regrets.max())

    def __call__(self, x: np.ndarray) -> float:
        key = x.tobytes()
        f = self.cache.get(key)
        if f is None:
            f = self.profile_value(_split(x, self.cuts))
            self.cache[key] = f
            self.evaluations += 1
        if f < self.best_f:
            self.best_f, self.best_x = f, x.copy()
        return f


def _result(obj: _Objective, iterations: int, converged: bool) -> MrcpResult:
    profile = _split(obj.best_x, obj.cuts)
    regret = obj.best_f
    if obj.table is not None:
        regret = profile_regret_sum(obj.emp.full_game, lift_profile(obj.emp, profile))
    return MrcpResult(profile, regret, obj.name, obj.best_f, obj.evaluations, iterations, converged)


def _initial_simplex(emp: EmpiricalGame, params: AmoebaParams, seeds) -> list[np.ndarray]:
    cuts = _splits(emp)
    dim = sum(emp.strategy_counts)
    uniform = np.concatenate([np.full(n, 1.0 / n) for n in emp.strategy_counts])
    verts = [_flatten(s) for s in seeds or ()]
    for i, v in enumerate(verts):
        if v.shape != (dim,) or not _blocks_feasible(v, cuts):
            raise ValueError(f"seed vertex {i} is not a feasible profile of the empirical game")
    if params.init_seed is not None:
        rng = rng_for(params.init_seed)
        padding = [uniform] + [
            np.concatenate([rng.dirichlet(np.ones(n)) for n in emp.strategy_counts])
            for _ in range(dim)
        ]
    else:
        padding = [uniform]
        for k in range(dim):
            x = uniform.copy()
            x[k] += params.init_step
            padding.append(_project(x, cuts))
    return verts + padding[: max(0, dim + 1 - len(verts))]


# ------------------------------------------------------------------ amoeba


def _amoeba(emp: EmpiricalGame, objective: str, params: AmoebaParams, seeds,
            step: Callable[[np.ndarray, np.ndarray, float, list], np.ndarray]) -> MrcpResult:
    f = _Objective(emp, objective)
    dim = sum(emp.strategy_counts)
    start = _initial_simplex(emp, params, seeds)
    pts = sorted(((f(x), x) for x in start), key=lambda p: p[0])[: dim + 1]
    it = 0
    while True:
        pts.sort(key=lambda p: p[0])
        # regret is non-negative, so zero is a global minimum
        converged = pts[-1][0] - pts[0][0] <= params.tol or (
            f.table is None and f.best_f <= 0.0)
        if converged or it >= params.max_iters:
            break
        it += 1
        f1, fn, (fw, xw) = pts[0][0], pts[-2][0], pts[-1]
        xo = np.add.reduce([x for _, x in pts[:-1]]) / (len(pts) - 1)
        xr = step(xo, xo - xw, params.alpha, f.cuts)
        fr = f(xr)
        if fr < f1:
            xe = step(xo, xr - xo, params.gamma, f.cuts)
            fe = f(xe)
            pts[-1] = (fe, xe) if fe < fr else (fr, xr)
        elif fr < fn:
            pts[-1] = (fr, xr)
        else:
            if fr < fw:
                xc = step(xo, xr - xo, params.rho, f.cuts)
                fc = f(xc)
                accept = fc <= fr
            else:
                xc = step(xo, xw - xo, params.rho, f.cuts)
                fc = f(xc)
                accept = fc < fw
            if accept:
                pts[-1] = (fc, xc)
            else:
                x1 = pts[0][1]
                pts = [pts[0]] + [
                    (f(xs), xs)
                    for xs in (step(x1, x - x1, params.sigma, f.cuts) for _, x in pts[1:])
                ]
    return _result(f, it, converged)


def _projected_step(base, direction, coef, cuts):
    return _project(base + coef * direction, cuts)


def mrcp_amoeba_projected(emp: EmpiricalGame, objective: str = "sum",
                          params: AmoebaParams | None = None,
                          seed_vertices: Sequence[Profile] | None = None) -> MrcpResult:
    """Nelder-Mead with every candidate point projected onto the simplices.

    Returns the best point ever evaluated, so the reported value never
    exceeds that of any seed vertex.
    """
    return _amoeba(emp, objective, params or AmoebaParams(), seed_vertices, _projected_step)


def mrcp_amoeba_binary_search(emp: EmpiricalGame, objective: str = "sum",
                              params: AmoebaParams | None = None,
                              seed_vertices: Sequence[Profile] | None = None) -> MrcpResult:
    """Nelder-Mead that shrinks infeasible steps by bisection on the step coefficient."""
    params = params or AmoebaParams()

    def step(base, direction, coef, cuts):
        x = base + coef * direction
        if _blocks_feasible(x, cuts):
            return x
        lo, hi = 0.0, coef
        for _ in range(params.bisection_steps):
            mid = 0.5 * (lo + hi)
            if _blocks_feasible(base + mid * direction, cuts):
                lo = mid
            else:
                hi = mid
        return base + lo * direction

    return _amoeba(emp, objective, params, seed_vertices, step)


# ------------------------------------------------------------- grid oracle


def _grid(n: int, k: int) -> np.ndarray:
    """All points of the simplex in R^n with coordinates in multiples of 1/k."""
    rows = []
    for bars in itertools.combinations(range(k + n - 1), n - 1):
        edges = (-1,) + bars + (k + n - 1,)
        rows.append([edges[j + 1] - edges[j] - 1 for j in range(n)])
    return np.array(rows, dtype=float) / k


def mrcp_brute_force(emp: EmpiricalGame, objective: str = "sum", grid_step: float = 0.01) -> MrcpResult:
    """Exhaustive minimum over the per-player probability grid (test oracle)."""
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}")
    k = round(1.0 / grid_step)
    if k < 1 or abs(k * grid_step - 1.0) > 1e-9:
        raise ValueError("grid_step must divide 1")
    sizes = [math.comb(k + n - 1, n - 1) for n in emp.strategy_counts]
    if math.prod(sizes) > MAX_GRID_POINTS:
        raise ValueError(
            f"grid has {math.prod(sizes)} points (limit {MAX_GRID_POINTS}); "
            "use mrcp_amoeba_projected instead"
        )
    grids = [_grid(n, k) for n in emp.strategy_counts]
    if emp.num_players == 2:
        value, profile = _grid_min_2p(emp, objective, grids)
    else:
        f = _Objective(emp, objective)
        value, profile = math.inf, None
        for combo in itertools.product(*grids):
            v = f.profile_value(combo)
            if v < value:
                value, profile = v, tuple(np.array(c) for c in combo)
    regret = value
    if objective.startswith("surrogate"):
        regret = profile_regret_sum(emp.full_game, lift_profile(emp, profile))
    return MrcpResult(profile, regret, objective, value, math.prod(sizes))


def _grid_min_2p(emp: EmpiricalGame, objective: str, grids, chunk: int = 512):
    x1, x2 = emp.indices
    a_full, b_full = emp.full_game.payoffs
    a_sub, b_sub = emp.payoffs
    p_grid, q_grid = grids
    if objective.startswith("surrogate"):
        d1, d2 = deviation_table(emp)
        best1 = q_grid @ d1
        best2 = p_grid @ d2
    else:
        best1 = (a_full[:, list(x2)] @ q_grid.T).max(axis=0)
        best2 = (p_grid @ b_full[list(x1), :]).max(axis=1)
    value, where = math.inf, (0, 0)
    for start in range(0, len(p_grid), chunk):
        p = p_grid[start:start + chunk]
        r1 = best1[None, :] - p @ a_sub @ q_grid.T
        r2 = best2[start:start + chunk, None] - p @ b_sub @ q_grid.T
        if not objective.startswith("surrogate"):
            r1 = np.maximum(r1, 0.0)
            r2 = np.maximum(r2, 0.0)
        vals = r1 + r2 if objective.endswith("sum") else np.maximum(r1, r2)
        j = int(np.argmin(vals))
        if vals.flat[j] < value:
            value = float(vals.flat[j])
            where = (start + j // vals.shape[1], j % vals.shape[1])
    return value, (p_grid[where[0]].copy(), q_grid[where[1]].copy())


# ------------------------------------------------------- surrogate bound


def deviation_table(emp: EmpiricalGame) -> list[np.ndarray]:
    """Per player, best full-game deviation payoff against each pure opponent profile.

    Entry ``[s_-i]`` of player ``i``'s table (axes follow the other players'
    empirical strategy order) is ``max over all of S_i of u_i(s_i', s_-i)``.
    """
    tables = []
    for i in range(emp.num_players):
        grid = [
            np.arange(n) if j == i else np.array(row)
            for j, (row, n) in enumerate(zip(emp.indices, emp.full_game.strategy_counts))
        ]
        tables.append(emp.full_game.payoffs[i][np.ix_(*grid)].max(axis=i))
    return tables


def regret_upper_bound(emp: EmpiricalGame, profile, table) -> np.ndarray:
    """Per-player bound: expected best pure-deviation payoff minus current payoff."""
    out = []
    for i in range(emp.num_players):
        others = [s for j, s in enumerate(profile) if j != i]
        expected_best = table[i]
        for s in reversed(others):
            expected_best = np.tensordot(expected_best, s, axes=([expected_best.ndim - 1], [0]))
        out.append(float(expected_best) - expected_payoff(emp.game, profile, i))
    return np.array(out)


def approx_mrcp(emp: EmpiricalGame, params: AmoebaParams | None = None,
                seed_vertices: Sequence[Profile] | None = None) -> MrcpResult:
    """Projected amoeba on the max-over-players surrogate bound.

    ``regret`` holds the exact summed regret of the profile found;
    ``objective_value`` holds the surrogate.
    """
    return mrcp_amoeba_projected(emp, "surrogate_max", params, seed_vertices)


def compute_mrcp(emp: EmpiricalGame, method: str = "projected", objective: str = "sum",
                 params: AmoebaParams | None = None, grid_step: float = 0.01,
                 seed_vertices=None) -> MrcpResult:
    if method == "projected":
        return mrcp_amoeba_projected(emp, objective, params, seed_vertices)
    if method == "binary_search":
        return mrcp_amoeba_binary_search(emp, objective, params, seed_vertices)
    if method == "brute_force":
        return mrcp_brute_force(emp, objective, grid_step)
    if method == "approx":
        return approx_mrcp(emp, params, seed_vertices)
    raise ValueError(f"unknown MRCP method {method!r}")
