"""Empirical games: a full game restricted to explored strategy index sets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .game import DimensionError, NormalFormGame, Profile


@dataclass(frozen=True, eq=False)
class EmpiricalGame:
    """Full game ``full_game`` seen through per-player index lists ``indices``.

    Strategy ``k`` of player ``i`` in the empirical game is strategy
    ``indices[i][k]`` of the full game.  Payoffs are exact projections.
    """

    full_game: NormalFormGame
    indices: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        idx = tuple(tuple(int(k) for k in row) for row in self.indices)
        if len(idx) != self.full_game.num_players:
            raise DimensionError("one index list per player required")
        for i, (row, n) in enumerate(zip(idx, self.full_game.strategy_counts)):
            if not row:
                raise ValueError(f"player {i} has an empty strategy set")
            if len(set(row)) != len(row):
                raise ValueError(f"player {i} index list has duplicates: {row}")
            if min(row) < 0 or max(row) >= n:
                raise ValueError(f"player {i} index out of range [0, {n}): {row}")
        object.__setattr__(self, "indices", idx)
        sub = np.ix_(*idx)
        game = NormalFormGame(
            tuple(p[sub] for p in self.full_game.payoffs),
            zero_sum=self.full_game.zero_sum,
        )
        object.__setattr__(self, "_game", game)

    @property
    def game(self) -> NormalFormGame:
        """The empirical game as a stand-alone normal-form game."""
        return self._game

    @property
    def payoffs(self) -> tuple[np.ndarray, ...]:
        return self._game.payoffs

    @property
    def num_players(self) -> int:
        return self.full_game.num_players

    @property
    def strategy_counts(self) -> tuple[int, ...]:
        return tuple(len(row) for row in self.indices)

    def __eq__(self, other):
        if not isinstance(other, EmpiricalGame):
            return NotImplemented
        return self.full_game is other.full_game and self.indices == other.indices

    __hash__ = object.__hash__


def restrict(game: NormalFormGame, indices: Sequence[Sequence[int]]) -> EmpiricalGame:
    return EmpiricalGame(game, tuple(tuple(row) for row in indices))


def add_strategy(emp: EmpiricalGame, player: int, full_index: int) -> tuple[EmpiricalGame, bool]:
    """Append ``full_index`` to ``player``'s set.

    Returns ``(emp, False)`` unchanged when the strategy is already present.
    """
    if full_index in emp.indices[player]:
        return emp, False
    rows = list(emp.indices)
    rows[player] = rows[player] + (int(full_index),)
    return EmpiricalGame(emp.full_game, tuple(rows)), True


def lift_profile(emp: EmpiricalGame, profile) -> Profile:
    """Map a profile over ``emp`` to the full game, zero mass elsewhere."""
    return embed_profile(emp, profile, emp.full_game.strategy_counts)


def embed_profile(emp: EmpiricalGame, profile, target) -> Profile:
    """Map a profile over ``emp`` into ``target``.

    ``target`` is either a tuple of full-game strategy counts or another
    empirical game over the same full game whose sets contain ``emp``'s.
    """
    if len(profile) != emp.num_players:
        raise DimensionError("profile length does not match the empirical game")
    out = []
    for i, (row, s) in enumerate(zip(emp.indices, profile)):
        if np.shape(s) != (len(row),):
            raise DimensionError(f"player {i} strategy does not fit the empirical game")
        if isinstance(target, EmpiricalGame):
            pos = {k: p for p, k in enumerate(target.indices[i])}
            try:
                where = [pos[k] for k in row]
            except KeyError as exc:
                raise ValueError(f"strategy {exc} not in target empirical game") from None
            v = np.zeros(len(target.indices[i]))
        else:
            where = list(row)
            v = np.zeros(target[i])
        v[where] = s
        out.append(v)
    return tuple(out)


def combine(strategy_sets: Sequence[Sequence[Sequence[int]]], full_game: NormalFormGame) -> EmpiricalGame:
    """Union of several runs' strategy sets, ascending full-game order."""
    if not strategy_sets:
        raise ValueError("nothing to combine")
    union = [set() for _ in range(full_game.num_players)]
    for sets in strategy_sets:
        for i, row in enumerate(sets):
            union[i].update(int(k) for k in row)
    if any(not u for u in union):
        raise ValueError("combined strategy set is empty for some player")
    return EmpiricalGame(full_game, tuple(tuple(sorted(u)) for u in union))
