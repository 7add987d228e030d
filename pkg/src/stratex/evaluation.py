"""Regret curves, solver consistency, evaluation-solver selection, combined games."""

from __future__ import annotations

import csv
import io
import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .game import Profile, profile_regret_sum
from .mrcp import AmoebaParams, mrcp_amoeba_projected
from .psro import PsroTrace
from .restriction import EmpiricalGame, combine, embed_profile, lift_profile, restrict
from .solvers import make_solver

TRUE_GAME = "true_game"
COMBINED_GAME = "combined_game"
INCONSISTENT = "inconsistent-comparison"
ORDER_MARGIN = 1e-9


@dataclass(frozen=True)
class MrcpSolver:
    """MRCP pseudo-solver: projected amoeba seeded with candidate solvers' profiles.

    The returned profile's full-game regret never exceeds any candidate's.
    """

    candidates: tuple = ()
    params: AmoebaParams = AmoebaParams()
    name: str = "mrcp"

    @property
    def uses_history(self) -> bool:
        return any(getattr(c, "uses_history", False) for c in self.candidates)

    def __call__(self, emp: EmpiricalGame, history=None) -> Profile:
        seeds = [c(emp, history) for c in self.candidates]
        return mrcp_amoeba_projected(emp, "sum", self.params, seeds).profile


def as_solver(spec):
    if isinstance(spec, MrcpSolver):
        return spec
    if isinstance(spec, dict) and spec.get("name") == "mrcp":
        cands = tuple(make_solver(c) for c in spec.get("candidates", ("nash",)))
        params = AmoebaParams(**spec.get("params", {}))
        return MrcpSolver(cands, params)
    if spec == "mrcp":
        return MrcpSolver((make_solver("nash"),))
    return make_solver(spec)


def _name(solver) -> str:
    return getattr(solver, "name", str(solver))


@dataclass
class RegretCurve:
    run_id: str
    mss: str
    eval_solver: str
    points: list[tuple[int, float, str]] = field(default_factory=list)
    label: str = ""

    @property
    def iterations(self) -> list[int]:
        return [p[0] for p in self.points]

    @property
    def regrets(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    def at(self, iteration: int) -> float:
        for it, r, _ in self.points:
            if it == iteration:
                return r
        raise KeyError(iteration)


# ------------------------------------------------------------- regret


def regret_against(emp: EmpiricalGame, profile, reference: EmpiricalGame | None = None) -> float:
    """Summed regret of ``profile`` (over ``emp``) in the full game.

    With ``reference`` (e.g. a combined game), deviations are limited to the
    reference's strategy sets, using the same deviation payoffs as the
    full-game computation so the lower-bound relation holds exactly.
    """
    lifted = lift_profile(emp, profile)
    if reference is None:
        return profile_regret_sum(emp.full_game, lifted)
    for i, (row, ref) in enumerate(zip(emp.indices, reference.indices)):
        if not set(row) <= set(ref):
            raise ValueError(f"player {i} strategies are not all in the reference game")
    return profile_regret_sum(emp.full_game, lifted, reference.indices)


def solver_based_regret(emp: EmpiricalGame, eval_solver, history=None,
                        reference: EmpiricalGame | None = None) -> float:
    solver = as_solver(eval_solver)
    return regret_against(emp, solver(emp, history), reference)


def regret_curve(trace: PsroTrace, eval_solver, reference: EmpiricalGame | None = None,
                 label: str = "") -> RegretCurve:
    solver = as_solver(eval_solver)
    ref_name = COMBINED_GAME if reference is not None else TRUE_GAME
    curve = RegretCurve(trace.run_id, trace.mss.name, _name(solver), label=label)
    for cp in trace.checkpoints:
        emp = restrict(trace.full_game, cp.strategy_indices)
        r = solver_based_regret(emp, solver, cp.generation_sequence, reference)
        curve.points.append((cp.iteration, r, ref_name))
    return curve


def warm_started_mrcp_curve(trace: PsroTrace, params: AmoebaParams | None = None) -> RegretCurve:
    """MRCP regret per checkpoint, each search seeded with the previous MRCP profile.

    The previous profile stays feasible in the extended game and keeps its
    regret, so the curve is non-increasing.
    """
    curve = RegretCurve(trace.run_id, trace.mss.name, "mrcp_warm")
    prev_emp, prev_profile = None, None
    for cp in trace.checkpoints:
        emp = restrict(trace.full_game, cp.strategy_indices)
        seeds = [embed_profile(prev_emp, prev_profile, emp)] if prev_emp is not None else None
        res = mrcp_amoeba_projected(emp, "sum", params, seeds)
        curve.points.append((cp.iteration, res.regret, TRUE_GAME))
        prev_emp, prev_profile = emp, res.profile
    return curve


def mean_curve(curves: Sequence[RegretCurve], run_id: str = "mean") -> RegretCurve:
    """Pointwise mean over the iterations every curve shares."""
    if not curves:
        raise ValueError("no curves to average")
    common = sorted(set.intersection(*(set(c.iterations) for c in curves)))
    ref = curves[0].points[0][2] if curves[0].points else TRUE_GAME
    pts = [(it, float(np.mean([c.at(it) for c in curves])), ref) for it in common]
    return RegretCurve(run_id, curves[0].mss, curves[0].eval_solver, pts, curves[0].label)


# --------------------------------------------------------- comparisons


def _order(a: float, b: float) -> int:
    if a < b - ORDER_MARGIN:
        return -1
    if a > b + ORDER_MARGIN:
        return 1
    return 0


@dataclass(frozen=True)
class Comparison:
    """Ordering of two MSSs' curves at one iteration (-1: first is lower)."""

    iteration: int
    mss_a: str
    mss_b: str
    solver_a: str
    solver_b: str
    regret_a: float
    regret_b: float
    reference: str = TRUE_GAME

    @property
    def order(self) -> int:
        return _order(self.regret_a, self.regret_b)

    @property
    def label(self) -> str:
        return INCONSISTENT if self.solver_a != self.solver_b else "consistent"


def compare_curves(a: RegretCurve, b: RegretCurve) -> list[Comparison]:
    common = sorted(set(a.iterations) & set(b.iterations))
    ref = a.points[0][2] if a.points else TRUE_GAME
    return [
        Comparison(it, a.mss, b.mss, a.eval_solver, b.eval_solver, a.at(it), b.at(it), ref)
        for it in common
    ]


@dataclass
class PhaseChoice:
    start: int
    end: int
    solver: str
    mean_regret: dict[str, float]


@dataclass
class EvaluationReport:
    curves: list[RegretCurve] = field(default_factory=list)
    comparisons: list[Comparison] = field(default_factory=list)
    selected_solver: list[PhaseChoice] = field(default_factory=list)
    consistency_ok: dict[str, bool] = field(default_factory=dict)
    disagreements: list[tuple[int, str, str]] = field(default_factory=list)
    combined: EmpiricalGame | None = None

    def rankings(self, include_inconsistent: bool = False) -> list[Comparison]:
        return [c for c in self.comparisons if include_inconsistent or c.label != INCONSISTENT]


def _as_list(traces) -> list[PsroTrace]:
    return [traces] if isinstance(traces, PsroTrace) else list(traces)


def consistency_report(traces_a, traces_b, eval_solver) -> EvaluationReport:
    """Compare two MSSs under one evaluation solver and under their own MSSs.

    ``traces_a`` / ``traces_b`` are single traces or lists of seeds.  Curves
    are averaged across seeds.  An iteration is a disagreement when the
    consistent and inconsistent comparisons order the two MSSs differently.
    """
    solver = as_solver(eval_solver)
    runs_a, runs_b = _as_list(traces_a), _as_list(traces_b)
    report = EvaluationReport()
    per_run = {}
    for tag, runs in (("a", runs_a), ("b", runs_b)):
        cons = [regret_curve(t, solver, label="consistent") for t in runs]
        own = [regret_curve(t, t.mss, label=INCONSISTENT) for t in runs]
        report.curves.extend(cons + own)
        per_run[tag] = (mean_curve(cons), mean_curve(own))
    (cons_a, own_a), (cons_b, own_b) = per_run["a"], per_run["b"]
    consistent = compare_curves(cons_a, cons_b)
    inconsistent = compare_curves(own_a, own_b)
    report.comparisons = consistent + inconsistent
    by_it = {c.iteration: c for c in inconsistent}
    for c in consistent:
        other = by_it.get(c.iteration)
        if other is not None and other.order != c.order:
            report.disagreements.append((c.iteration, c.mss_a, c.mss_b))
    key = f"{cons_a.mss}-vs-{cons_b.mss}"
    report.consistency_ok[key] = not report.disagreements
    return report


def select_eval_solver(traces, candidates: Sequence, phase_length: int | None = None) -> list[PhaseChoice]:
    """Pick, per phase of ``phase_length`` iterations, the candidate with lowest mean regret.

    Ties go to the earlier candidate.  ``phase_length=None`` gives one global phase.
    """
    if not candidates:
        raise ValueError("no candidate solvers")
    runs = _as_list(traces)
    solvers = [as_solver(c) for c in candidates]
    curves = {_name(s): [regret_curve(t, s) for t in runs] for s in solvers}
    last = max(cp.iteration for t in runs for cp in t.checkpoints)
    length = phase_length or last
    if length < 1:
        raise ValueError("phase_length must be >= 1")
    choices = []
    for start in range(1, last + 1, length):
        end = min(start + length - 1, last)
        means = {}
        for name, cs in curves.items():
            vals = [r for c in cs for it, r, _ in c.points if start <= it <= end]
            means[name] = float(np.mean(vals)) if vals else float("inf")
        best = min(means, key=lambda n: means[n])
        choices.append(PhaseChoice(start, end, best, means))
    return choices


def combined_game_eval(traces, eval_solver="nash") -> EvaluationReport:
    """Evaluate every trace against the true game and against the combined game.

    The combined game is the union of all traces' final strategy sets.  An
    iteration is flagged when the two references order some pair of MSSs
    (seed-averaged) differently.
    """
    runs = _as_list(traces)
    if not runs:
        raise ValueError("no traces")
    full = runs[0].full_game
    combined = combine([t.final_indices for t in runs], full)
    solver = as_solver(eval_solver)
    report = EvaluationReport()
    grouped: dict[str, dict[str, list[RegretCurve]]] = defaultdict(lambda: defaultdict(list))
    for t in runs:
        true_c = regret_curve(t, solver, label=TRUE_GAME)
        comb_c = regret_curve(t, solver, reference=combined, label=COMBINED_GAME)
        report.curves += [true_c, comb_c]
        grouped[t.mss.name][TRUE_GAME].append(true_c)
        grouped[t.mss.name][COMBINED_GAME].append(comb_c)
    means = {
        mss: {ref: mean_curve(cs) for ref, cs in refs.items()} for mss, refs in grouped.items()
    }
    for a, b in itertools.combinations(sorted(means), 2):
        on_true = compare_curves(means[a][TRUE_GAME], means[b][TRUE_GAME])
        on_comb = {c.iteration: c for c in compare_curves(means[a][COMBINED_GAME],
                                                          means[b][COMBINED_GAME])}
        report.comparisons += on_true + list(on_comb.values())
        for c in on_true:
            other = on_comb.get(c.iteration)
            if other is not None and other.order != c.order:
                report.disagreements.append((c.iteration, a, b))
        report.consistency_ok[f"{a}-vs-{b}"] = not any(
            d[1:] == (a, b) for d in report.disagreements
        )
    report.combined = combined
    return report


# ------------------------------------------------------------------ CSV

CURVE_FIELDS = ("run_id", "mss", "eval_solver", "iteration", "regret", "reference")


def curves_to_csv(curves: Sequence[RegretCurve], header: str | None = None) -> str:
    buf = io.StringIO()
    if header:
        buf.write(f"# {header}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_FIELDS)
    for c in curves:
        for it, r, ref in c.points:
            w.writerow([c.run_id, c.mss, c.eval_solver, it, repr(float(r)), ref])
    return buf.getvalue()


def read_curves_csv(text: str) -> list[RegretCurve]:
    rows = csv.DictReader(line for line in io.StringIO(text) if not line.startswith("#"))
    curves: dict[tuple, RegretCurve] = {}
    for r in rows:
        key = (r["run_id"], r["mss"], r["eval_solver"], r["reference"])
        if key not in curves:
            curves[key] = RegretCurve(r["run_id"], r["mss"], r["eval_solver"])
        curves[key].points.append((int(r["iteration"]), float(r["regret"]), r["reference"]))
    return list(curves.values())
