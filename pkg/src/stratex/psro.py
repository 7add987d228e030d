"""PSRO: solve the empirical game, best-respond in the full game, extend."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .game import NormalFormGame, Profile, best_response
from .games import rng_for
from .restriction import EmpiricalGame, add_strategy, lift_profile, restrict
from .solvers import MetaSolver, make_solver

CONVERGENCE_TOL = 1e-12


class PsroError(RuntimeError):
    """A meta-strategy solver failed inside a PSRO iteration."""


@dataclass(frozen=True)
class Checkpoint:
    """One PSRO iteration.

    ``strategy_indices`` and ``generation_sequence`` are the state the
    meta-profile was computed from; ``br_indices`` are the best responses
    produced in this iteration (already reflected in the next checkpoint).
    """

    iteration: int
    strategy_indices: tuple[tuple[int, ...], ...]
    meta_profile: Profile
    br_indices: tuple[int, ...]
    br_was_new: tuple[bool, ...]
    generation_sequence: tuple[tuple[int, ...], ...]


@dataclass
class PsroTrace:
    full_game: NormalFormGame
    mss: MetaSolver
    initial_indices: tuple[int, ...]
    checkpoints: list[Checkpoint] = field(default_factory=list)
    converged_at: int | None = None
    seed: int = 0
    run_id: str = ""

    @property
    def converged(self) -> bool:
        return self.converged_at is not None

    def checkpoint(self, iteration: int) -> Checkpoint:
        for cp in self.checkpoints:
            if cp.iteration == iteration:
                return cp
        raise KeyError(f"no checkpoint for iteration {iteration}")

    @property
    def final_indices(self) -> tuple[tuple[int, ...], ...]:
        """Strategy sets after the last iteration's best responses were added."""
        last = self.checkpoints[-1]
        return tuple(
            row + ((br,) if new else ())
            for row, br, new in zip(last.strategy_indices, last.br_indices, last.br_was_new)
        )


def run_psro(
    full_game: NormalFormGame,
    mss,
    initial_indices: Sequence[int] | None = None,
    max_iterations: int = 10,
    seed: int = 0,
    stop_early: bool = False,
    run_id: str = "",
) -> PsroTrace:
    """Simultaneous PSRO; both players best-respond every iteration.

    ``initial_indices`` defaults to one uniformly drawn strategy per player
    from ``seed``.  The run always lasts ``max_iterations`` iterations unless
    ``stop_early`` is set, in which case it ends at the first iteration where
    no strategy was added and the meta-profile repeats the previous one.
    """
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")
    solver = make_solver(mss)
    if initial_indices is None:
        rng = rng_for(seed)
        initial_indices = [int(rng.integers(n)) for n in full_game.strategy_counts]
    initial = tuple(int(k) for k in initial_indices)
    emp = restrict(full_game, [[k] for k in initial])
    sequences = [[k] for k in initial]
    trace = PsroTrace(full_game, solver, initial, seed=seed, run_id=run_id)
    previous = None
    for t in range(1, max_iterations + 1):
        history = tuple(tuple(s) for s in sequences)
        try:
            meta = tuple(np.asarray(s, dtype=float) for s in solver(emp, history))
        except Exception as exc:
            raise PsroError(f"{solver.name} failed at iteration {t}: {exc}") from exc
        lifted = lift_profile(emp, meta)
        brs = tuple(best_response(full_game, lifted, i)[0] for i in range(full_game.num_players))
        new_flags = []
        next_emp = emp
        for i, k in enumerate(brs):
            next_emp, added = add_strategy(next_emp, i, k)
            new_flags.append(added)
            sequences[i].append(k)
        trace.checkpoints.append(
            Checkpoint(t, emp.indices, meta, brs, tuple(new_flags), history)
        )
        same = previous is not None and all(
            np.allclose(a, b, rtol=0.0, atol=CONVERGENCE_TOL) for a, b in zip(lifted, previous)
        )
        if not any(new_flags) and same and trace.converged_at is None:
            trace.converged_at = t
            if stop_early:
                break
        previous = lifted
        emp = next_emp
    return trace


def trace_empirical_game(trace: PsroTrace, iteration: int) -> EmpiricalGame:
    return restrict(trace.full_game, trace.checkpoint(iteration).strategy_indices)


# ------------------------------------------------------------ serialization


def trace_to_dict(trace: PsroTrace, game_ref: str | None = None) -> dict:
    return {
        "run_id": trace.run_id,
        "game": game_ref,
        "mss": trace.mss.to_dict(),
        "seed": trace.seed,
        "initial_indices": list(trace.initial_indices),
        "converged_at": trace.converged_at,
        "checkpoints": [
            {
                "iteration": cp.iteration,
                "strategy_indices": [list(r) for r in cp.strategy_indices],
                "meta_profile": [s.tolist() for s in cp.meta_profile],
                "br_indices": list(cp.br_indices),
                "br_was_new": list(cp.br_was_new),
                "generation_sequence": [list(r) for r in cp.generation_sequence],
            }
            for cp in trace.checkpoints
        ],
    }


def trace_from_dict(doc: dict, full_game: NormalFormGame) -> PsroTrace:
    trace = PsroTrace(
        full_game,
        make_solver(doc["mss"]),
        tuple(doc["initial_indices"]),
        converged_at=doc.get("converged_at"),
        seed=doc.get("seed", 0),
        run_id=doc.get("run_id", ""),
    )
    for rec in doc["checkpoints"]:
        trace.checkpoints.append(
            Checkpoint(
                rec["iteration"],
                tuple(tuple(r) for r in rec["strategy_indices"]),
                tuple(np.array(s, dtype=float) for s in rec["meta_profile"]),
                tuple(rec["br_indices"]),
                tuple(bool(b) for b in rec["br_was_new"]),
                tuple(tuple(r) for r in rec["generation_sequence"]),
            )
        )
    return trace


TRACE_CSV_FIELDS = ("iteration", "player", "added_index", "was_new")


def trace_to_csv(trace: PsroTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_CSV_FIELDS)
    for cp in trace.checkpoints:
        for i, (k, new) in enumerate(zip(cp.br_indices, cp.br_was_new)):
            w.writerow([cp.iteration, i, k, int(new)])
    return buf.getvalue()


def read_trace_csv(text: str) -> list[tuple[int, int, int, bool]]:
    rows = csv.DictReader(line for line in io.StringIO(text) if not line.startswith("#"))
    return [
        (int(r["iteration"]), int(r["player"]), int(r["added_index"]), r["was_new"] == "1")
        for r in rows
    ]
