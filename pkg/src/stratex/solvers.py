"""Meta-strategy solvers: empirical game (plus run history) -> profile.

Every solver is called as ``solver(emp, history)``, where ``history`` holds
each player's generation sequence (full-game indices, initial strategy
first, duplicate best responses included).  Only ``uniform`` and
``self_play`` read it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .game import InfeasibleFloorError, Profile, contract_except, project_to_simplex
from .lp import solve_zero_sum
from .restriction import EmpiricalGame

History = Sequence[Sequence[int]]


class UnsupportedGameError(ValueError):
    """The solver does not handle this class of game."""


def nash_lp(emp: EmpiricalGame, history: History | None = None) -> Profile:
    """Exact NE of a two-player zero-sum empirical game by linear programming."""
    if emp.num_players != 2 or not emp.full_game.zero_sum:
        raise UnsupportedGameError("nash_lp supports two-player zero-sum games only")
    p, q, _ = solve_zero_sum(emp.payoffs[0])
    return p, q


def _deviations(payoffs, profile) -> list[np.ndarray]:
    if len(payoffs) == 2:
        a, b = payoffs
        return [a @ profile[1], profile[0] @ b]
    return [contract_except(payoffs[i], profile, i) for i in range(len(payoffs))]


def _replicator(emp: EmpiricalGame, dt: float, steps: int, floor: float | None,
                tolerance: float) -> Profile:
    payoffs = emp.payoffs
    sigma = [np.full(n, 1.0 / n) for n in emp.strategy_counts]
    if floor is not None:
        sigma = [project_to_simplex(s, floor) for s in sigma]
    for _ in range(steps):
        devs = _deviations(payoffs, sigma)
        new = []
        for s, d in zip(sigma, devs):
            x = s + dt * s * (d - d @ s)
            x = np.clip(x, 0.0, None)
            x = x / x.sum()
            if floor is not None:
                x = project_to_simplex(x, floor)
            new.append(x)
        change = max(np.abs(x - s).max() for x, s in zip(new, sigma))
        sigma = new
        if change < tolerance:
            break
    return tuple(sigma)


def replicator_dynamics(emp: EmpiricalGame, dt: float = 1e-3, steps: int = 100_000,
                        tolerance: float = 0.0) -> Profile:
    """Discrete replicator dynamics from the uniform profile.

    Stops after ``steps`` updates, or earlier once no coordinate moves by
    ``tolerance`` or more in one update.
    """
    if dt < 0 or steps < 0:
        raise ValueError("dt and steps must be non-negative")
    return _replicator(emp, dt, steps, None, tolerance)


def prd(emp: EmpiricalGame, dt: float = 1e-3, steps: int = 100_000, floor: float = 1e-10,
        tolerance: float = 0.0) -> Profile:
    """Replicator dynamics with each step projected onto ``{x >= floor}``."""
    if dt < 0 or steps < 0:
        raise ValueError("dt and steps must be non-negative")
    if floor < 0 or floor * max(emp.strategy_counts) > 1.0 + 1e-12:
        raise InfeasibleFloorError(
            f"floor {floor} infeasible for strategy sets of size {max(emp.strategy_counts)}"
        )
    return _replicator(emp, dt, steps, floor, tolerance)


def _check_history(emp: EmpiricalGame, history: History | None) -> None:
    if history is None or len(history) != emp.num_players or any(len(h) == 0 for h in history):
        raise ValueError("this solver needs a non-empty generation sequence per player")


def uniform_fp(emp: EmpiricalGame, history: History | None) -> Profile:
    """Empirical frequency of each strategy in the generation sequence."""
    _check_history(emp, history)
    out = []
    for row, seq in zip(emp.indices, history):
        pos = {k: p for p, k in enumerate(row)}
        w = np.zeros(len(row))
        for k in seq:
            w[pos[k]] += 1
        out.append(w / len(seq))
    return tuple(out)


def self_play(emp: EmpiricalGame, history: History | None) -> Profile:
    """Pure profile on each player's most recently generated strategy."""
    _check_history(emp, history)
    out = []
    for row, seq in zip(emp.indices, history):
        w = np.zeros(len(row))
        w[row.index(seq[-1])] = 1.0
        out.append(w)
    return tuple(out)


SOLVER_NAMES = ("nash", "rd", "prd", "uniform", "self_play")


@dataclass(frozen=True)
class MetaSolver:
    """A named solver plus its parameters; callable as ``solver(emp, history)``."""

    name: str
    dt: float = 1e-3
    steps: int = 100_000
    floor: float = 1e-10
    tolerance: float = 0.0

    def __post_init__(self):
        if self.name not in SOLVER_NAMES:
            raise ValueError(f"unknown solver {self.name!r}; expected one of {SOLVER_NAMES}")
        if self.dt <= 0 or self.steps < 1:
            raise ValueError("solver needs dt > 0 and steps >= 1")
        if self.floor < 0:
            raise ValueError("floor must be non-negative")

    @property
    def uses_history(self) -> bool:
        return self.name in ("uniform", "self_play")

    def __call__(self, emp: EmpiricalGame, history: History | None = None) -> Profile:
        if self.name == "nash":
            return nash_lp(emp)
        if self.name == "rd":
            return replicator_dynamics(emp, self.dt, self.steps, self.tolerance)
        if self.name == "prd":
            return prd(emp, self.dt, self.steps, self.floor, self.tolerance)
        if self.name == "uniform":
            return uniform_fp(emp, history)
        return self_play(emp, history)

    def to_dict(self) -> dict:
        if self.name in ("rd", "prd"):
            d = {"name": self.name, "dt": self.dt, "steps": self.steps, "tolerance": self.tolerance}
            if self.name == "prd":
                d["floor"] = self.floor
            return d
        return {"name": self.name}


def make_solver(spec) -> MetaSolver:
    """Build a solver from a name, a dict of parameters, or pass one through."""
    if isinstance(spec, MetaSolver):
        return spec
    if isinstance(spec, str):
        return MetaSolver(spec)
    return MetaSolver(**spec)
