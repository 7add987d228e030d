"""Canned experiment recipes.

Each recipe returns a :class:`Table` of plain rows (ready for CSV) plus a
small summary dict.  All randomness comes from the seeds passed in.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .evaluation import (
    COMBINED_GAME,
    TRUE_GAME,
    MrcpSolver,
    combined_game_eval,
    mean_curve,
    regret_against,
    regret_curve,
)
from .game import pure_profile, profile_regret_sum
from .games import example1_game, kuhn_normal_form, random_zero_sum, sample_subgame, unstable_ne_game
from .mrcp import (
    AmoebaParams,
    approx_mrcp,
    mrcp_amoeba_binary_search,
    mrcp_amoeba_projected,
)
from .psro import PsroTrace, run_psro
from .restriction import EmpiricalGame
from .solvers import MetaSolver, make_solver, nash_lp


@dataclass
class Table:
    name: str
    fields: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def to_csv(self, header: str | None = None) -> str:
        buf = io.StringIO()
        if header:
            buf.write(f"# {header}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.fields)
        for row in self.rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
        return buf.getvalue()

    def column(self, name: str) -> list:
        k = self.fields.index(name)
        return [r[k] for r in self.rows]


def parallel_map(fn: Callable, items: Iterable, workers: int = 1) -> list:
    """Order-preserving map; uses worker processes when ``workers > 1``."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _fmt_profile(profile) -> str:
    parts = []
    for s in profile:
        parts.append("(" + ",".join(str(Fraction(float(x)).limit_denominator(1000)) for x in s) + ")")
    return ";".join(parts)


def _fmt_sets(indices) -> str:
    return ";".join("{" + ",".join(str(k) for k in row) + "}" for row in indices)


# ------------------------------------------------------- small golden runs


def table2(iterations: int = 5) -> Table:
    """DO and FP on the 3x3 example game starting from the first strategies."""
    game = example1_game()
    out = Table("table2", ("mss", "iteration", "strategy_sets", "meta_profile", "br_indices", "br_was_new"))
    for mss in ("nash", "uniform"):
        trace = run_psro(game, mss, (0, 0), iterations)
        for cp in trace.checkpoints:
            out.rows.append((mss, cp.iteration, _fmt_sets(cp.strategy_indices),
                             _fmt_profile(cp.meta_profile),
                             ";".join(map(str, cp.br_indices)),
                             ";".join(str(int(b)) for b in cp.br_was_new)))
        out.summary[mss] = trace
    return out


def table7() -> Table:
    """Summed regret of the four pure profiles over the first two strategies."""
    game = unstable_ne_game()
    out = Table("table7", ("row_strategy", "col_strategy", "regret"))
    for i in (0, 1):
        for j in (0, 1):
            out.rows.append((i, j, profile_regret_sum(game, pure_profile(game, (i, j)))))
    return out


def example1_curves(iterations: int = 3) -> Table:
    """DO under NE, FP under uniform and FP under NE on the 3x3 example game."""
    game = example1_game()
    do = run_psro(game, "nash", (0, 0), iterations, run_id="do")
    fp = run_psro(game, "uniform", (0, 0), iterations, run_id="fp")
    out = Table("example1", ("run", "eval_solver", "iteration", "regret"))
    for trace, solver in ((do, "nash"), (fp, "uniform"), (fp, "nash")):
        for it, r, _ in regret_curve(trace, solver).points:
            out.rows.append((trace.run_id, solver, it, r))
    return out


# --------------------------------------------------------------- example 2


def _example2_seed(args) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    seed, n, iterations, low, high = args
    game = random_zero_sum(n, low, high, seed=seed)
    do = run_psro(game, "nash", None, iterations, seed=seed)
    fp = run_psro(game, "uniform", None, iterations, seed=seed)
    return (regret_curve(do, "nash").regrets, regret_curve(fp, "uniform").regrets,
            regret_curve(fp, "nash").regrets)


def example2(seeds: Sequence[int] = tuple(range(10)), n: int = 100, iterations: int = 10,
             low: int = -10, high: int = 10, workers: int = 1) -> Table:
    """Per seed: a fresh random zero-sum game and a random initial strategy."""
    results = parallel_map(_example2_seed, [(s, n, iterations, low, high) for s in seeds], workers)
    out = Table("example2", ("seed", "curve", "iteration", "regret"))
    names = ("do_nash", "fp_uniform", "fp_nash")
    for seed, curves in zip(seeds, results):
        for name, c in zip(names, curves):
            out.rows += [(seed, name, t + 1, float(r)) for t, r in enumerate(c)]
    for k, name in enumerate(names):
        out.summary[name] = float(np.mean([c[k] for c in results]))
    return out


# ------------------------------------------------------------------ fig 3


def _fig3_seed(args) -> list[tuple]:
    seed, n, iterations, max_iters = args
    game = random_zero_sum(n, -10, 10, seed=seed)
    solver = MrcpSolver((make_solver("nash"),), AmoebaParams(max_iters=max_iters))
    rows = []
    for mss in ("nash", "uniform"):
        trace = run_psro(game, mss, None, iterations, seed=seed)
        ne = regret_curve(trace, "nash")
        mr = regret_curve(trace, solver)
        for (it, r_ne, _), (_, r_mr, _) in zip(ne.points, mr.points):
            rows.append((seed, mss, it, r_ne, r_mr))
    return rows


def fig3(seeds: Sequence[int] = (0, 1, 2), n: int = 200, iterations: int = 150,
         max_iters: int = 300, workers: int = 1) -> Table:
    """NE-based and MRCP-based regret curves for DO and FP."""
    out = Table("fig3", ("seed", "mss", "iteration", "ne_regret", "mrcp_regret"))
    for rows in parallel_map(_fig3_seed, [(s, n, iterations, max_iters) for s in seeds], workers):
        out.rows += rows
    mrcp, ne = np.array(out.column("mrcp_regret")), np.array(out.column("ne_regret"))
    out.summary["mrcp_le_ne"] = bool(np.all(mrcp <= ne))
    return out


# ------------------------------------------------------ MRCP comparisons


def _ne_regret(emp: EmpiricalGame) -> float:
    return regret_against(emp, nash_lp(emp))


def table3_shape(sizes: Sequence[int] = (5, 7, 9, 11, 13, 15), instances: int = 5,
                 seed_base: int = 1000, max_iters: int = 2000) -> Table:
    """Projected vs binary-search amoeba on sampled Kuhn sub-games."""
    kuhn = kuhn_normal_form()
    params = AmoebaParams(max_iters=max_iters)
    out = Table("table3_shape", ("size", "instance", "proj", "bs", "ne"))
    for size in sizes:
        for inst in range(instances):
            emp = sample_subgame(kuhn, size, seed=seed_base + 10 * size + inst)
            proj = mrcp_amoeba_projected(emp, "sum", params)
            bs = mrcp_amoeba_binary_search(emp, "sum", params)
            out.rows.append((size, inst, proj.regret, bs.regret, _ne_regret(emp)))
    proj, bs = np.array(out.column("proj")), np.array(out.column("bs"))
    out.summary["proj_wins"] = float(np.mean(proj <= bs + 1e-9))
    out.summary["median_proj"] = float(np.median(proj))
    out.summary["median_bs"] = float(np.median(bs))
    return out


def bs_variance(size: int = 10, seed: int = 1000, runs: int = 10, max_iters: int = 2000) -> Table:
    """Spread of each method over random initial simplices on one sub-game."""
    emp = sample_subgame(kuhn_normal_form(), size, seed=seed)
    out = Table("bs_variance", ("run", "proj", "bs"))
    for r in range(runs):
        params = AmoebaParams(max_iters=max_iters, init_seed=r)
        out.rows.append((r, mrcp_amoeba_projected(emp, "sum", params).regret,
                         mrcp_amoeba_binary_search(emp, "sum", params).regret))
    out.summary["var_proj"] = float(np.var(out.column("proj")))
    out.summary["var_bs"] = float(np.var(out.column("bs")))
    return out


def _compare_definitions(emp: EmpiricalGame, tilde, params: AmoebaParams) -> tuple[float, float]:
    """Summed regret of the sum-objective MRCP and of ``tilde``.

    The sum-objective search is seeded with its own unseeded result and with
    ``tilde``, so its returned regret never exceeds either.
    """
    first = mrcp_amoeba_projected(emp, "sum", params)
    bar = mrcp_amoeba_projected(emp, "sum", params, [first.profile, tilde])
    return bar.regret, regret_against(emp, tilde)


def table45_shape(kuhn_sizes: Sequence[int] = (5, 10, 15),
                  synthetic_sizes: Sequence[int] = (3, 5, 7, 9, 11, 13), instances: int = 5,
                  seed_base: int = 5000, synthetic_game_seed: int = 0,
                  max_iters: int = 2000) -> Table:
    """MRCP under the sum and max definitions, and the surrogate approximation.

    ``kuhn`` rows: sigma-tilde minimizes the exact max-over-players regret.
    ``synthetic`` rows: sigma-tilde minimizes the max-over-players surrogate
    bound on a 200x200 random zero-sum game with payoffs in [-1000, 1000].
    Every row reports summed regrets; ``ne`` is the empirical game's NE.
    """
    params = AmoebaParams(max_iters=max_iters)
    out = Table("table45_shape", ("setting", "size", "instance", "bar", "tilde", "ne"))
    kuhn = kuhn_normal_form()
    for size in kuhn_sizes:
        for inst in range(instances):
            emp = sample_subgame(kuhn, size, seed=seed_base + 10 * size + inst)
            tilde = mrcp_amoeba_projected(emp, "max", params).profile
            bar, til = _compare_definitions(emp, tilde, params)
            out.rows.append(("kuhn", size, inst, bar, til, _ne_regret(emp)))
    synth = random_zero_sum(200, -1000, 1000, seed=synthetic_game_seed)
    for size in synthetic_sizes:
        for inst in range(instances):
            emp = sample_subgame(synth, size, seed=seed_base + 10 * size + inst)
            tilde = approx_mrcp(emp, params).profile
            bar, til = _compare_definitions(emp, tilde, params)
            out.rows.append(("synthetic", size, inst, bar, til, _ne_regret(emp)))
    for setting in ("kuhn", "synthetic"):
        rows = [r for r in out.rows if r[0] == setting]
        out.summary[f"{setting}_violations"] = sum(r[4] < r[3] for r in rows)
        for size in sorted({r[1] for r in rows}):
            gaps = [r[4] - r[3] for r in rows if r[1] == size]
            out.summary[f"{setting}_median_gap_{size}"] = float(np.median(gaps))
    return out


# --------------------------------------------------------- combined game


def _combined_run(args) -> PsroTrace:
    n, seed, mss, iterations = args
    game = random_zero_sum(n, -10, 10, seed=0)
    return run_psro(game, mss, None, iterations, seed=seed, run_id=f"{mss.name}-{seed}")


def combined_batch(msss: Sequence = ("nash", "uniform",
                                     MetaSolver("prd", dt=1e-2, steps=2000, floor=1e-3)),
                   seeds: Sequence[int] = (0, 1, 2), n: int = 50, iterations: int = 10,
                   workers: int = 1) -> Table:
    """Several MSSs x seeds on one game; NE-based regret on the true and combined game."""
    solvers = [make_solver(m) for m in msss]
    jobs = [(n, s, m, iterations) for m in solvers for s in seeds]
    traces = parallel_map(_combined_run, jobs, workers)
    report = combined_game_eval(traces, "nash")
    out = Table("combined", ("run_id", "mss", "iteration", "true_regret", "combined_regret"))
    by_run: dict[str, dict[str, dict[int, float]]] = {}
    for c in report.curves:
        ref = COMBINED_GAME if c.label == COMBINED_GAME else TRUE_GAME
        by_run.setdefault(c.run_id, {})[ref] = {it: r for it, r, _ in c.points}
    for t in traces:
        curves = by_run[t.run_id]
        for it in sorted(curves[TRUE_GAME]):
            out.rows.append((t.run_id, t.mss.name, it, curves[TRUE_GAME][it],
                             curves[COMBINED_GAME][it]))
    out.summary["report"] = report
    out.summary["violations"] = sum(r[4] > r[3] for r in out.rows)
    return out


RECIPES = {
    "table2": table2,
    "table7": table7,
    "example1": example1_curves,
    "example2": example2,
    "fig3": fig3,
    "table3_shape": table3_shape,
    "table45_shape": table45_shape,
    "combined": combined_batch,
}
