"""Normal-form games and the exact payoff / regret kernel.

A profile is a tuple of 1-D numpy arrays, one mixed strategy per player.
Player ``i``'s payoffs live in a dense tensor of shape ``strategy_counts``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

Profile = tuple[np.ndarray, ...]

SUM_TOL = 1e-12


class DimensionError(ValueError):
    """A profile does not fit the game it is evaluated against."""


class InfeasibleFloorError(ValueError):
    """The probability floor times the dimension exceeds one."""


@dataclass(frozen=True, eq=False)
class NormalFormGame:
    payoffs: tuple[np.ndarray, ...]
    zero_sum: bool = False
    labels: tuple[tuple[str, ...], ...] | None = None

    def __post_init__(self):
        tensors = tuple(np.array(p, dtype=float) for p in self.payoffs)
        if not tensors:
            raise ValueError("a game needs at least one player")
        shape = tensors[0].shape
        if len(shape) != len(tensors):
            raise ValueError(
                f"{len(tensors)} players but payoff tensors have {len(shape)} axes"
            )
        if any(t.shape != shape for t in tensors):
            raise ValueError("all payoff tensors must share one shape")
        if any(n < 1 for n in shape):
            raise ValueError("every player needs at least one strategy")
        for t in tensors:
            if not np.all(np.isfinite(t)):
                raise ValueError("payoffs must be finite")
            t.setflags(write=False)
        if self.zero_sum:
            total = np.sum(tensors, axis=0)
            if np.max(np.abs(total)) > 1e-9:
                raise ValueError("zero_sum flag set but payoffs do not sum to zero")
        object.__setattr__(self, "payoffs", tensors)
        if self.labels is not None:
            labels = tuple(tuple(str(s) for s in row) for row in self.labels)
            if tuple(len(row) for row in labels) != shape:
                raise ValueError("labels must name every strategy of every player")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def from_matrix(cls, row_payoffs, col_payoffs=None, **kwargs) -> "NormalFormGame":
        """Two-player game; omitting ``col_payoffs`` makes it zero-sum."""
        a = np.asarray(row_payoffs, dtype=float)
        if col_payoffs is None:
            return cls((a, -a), zero_sum=True, **kwargs)
        return cls((a, np.asarray(col_payoffs, dtype=float)), **kwargs)

    @property
    def num_players(self) -> int:
        return len(self.payoffs)

    @property
    def strategy_counts(self) -> tuple[int, ...]:
        return self.payoffs[0].shape

    def __eq__(self, other):
        if not isinstance(other, NormalFormGame):
            return NotImplemented
        return (
            self.zero_sum == other.zero_sum
            and self.labels == other.labels
            and self.strategy_counts == other.strategy_counts
            and all(np.array_equal(a, b) for a, b in zip(self.payoffs, other.payoffs))
        )

    __hash__ = object.__hash__


# ---------------------------------------------------------------- profiles


def mixed_strategy(weights: Sequence[float]) -> np.ndarray:
    """Validate and return a probability vector."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("a mixed strategy is a non-empty 1-D vector")
    if np.any(w < 0) or abs(w.sum() - 1.0) > SUM_TOL:
        raise ValueError(f"not a probability distribution: {w}")
    return w


def make_profile(*strategies: Sequence[float]) -> Profile:
    return tuple(mixed_strategy(s) for s in strategies)


def pure_profile(game: NormalFormGame, indices: Sequence[int]) -> Profile:
    if len(indices) != game.num_players:
        raise DimensionError("one index per player required")
    out = []
    for n, k in zip(game.strategy_counts, indices):
        v = np.zeros(n)
        v[k] = 1.0
        out.append(v)
    return tuple(out)


def uniform_profile(game: NormalFormGame) -> Profile:
    return tuple(np.full(n, 1.0 / n) for n in game.strategy_counts)


def _check(game: NormalFormGame, profile: Sequence[np.ndarray]) -> None:
    if len(profile) != game.num_players:
        raise DimensionError(
            f"profile has {len(profile)} strategies, game has {game.num_players} players"
        )
    for i, (s, n) in enumerate(zip(profile, game.strategy_counts)):
        if np.shape(s) != (n,):
            raise DimensionError(
                f"player {i} strategy has shape {np.shape(s)}, expected ({n},)"
            )


# ------------------------------------------------------------ payoff kernel


def contract_except(tensor: np.ndarray, profile, keep: int) -> np.ndarray:
    out = tensor
    # highest axis first so lower axis positions stay valid
    for j in reversed(range(len(profile))):
        if j == keep:
            continue
        if j == out.ndim - 1:
            out = out @ profile[j]
        elif j == 0 and out.ndim == 2:
            out = profile[j] @ out
        else:
            out = np.tensordot(out, profile[j], axes=([j], [0]))
    return out


def deviation_payoffs(game: NormalFormGame, profile, player: int) -> np.ndarray:
    """Payoff of every pure strategy of ``player`` against the others' mixture."""
    _check(game, profile)
    return contract_except(game.payoffs[player], profile, player)


def expected_payoff(game: NormalFormGame, profile, player: int) -> float:
    return float(deviation_payoffs(game, profile, player) @ profile[player])


def best_response(game: NormalFormGame, profile, player: int) -> tuple[int, float]:
    """Pure best response; ties go to the lowest index."""
    dev = deviation_payoffs(game, profile, player)
    k = int(np.argmax(dev))
    return k, float(dev[k])


def player_regret(
    game: NormalFormGame, profile, player: int, deviation_set: Sequence[int] | None = None
) -> float:
    """Gain from the best unilateral deviation, optionally restricted to ``deviation_set``."""
    dev = deviation_payoffs(game, profile, player)
    best = dev.max() if deviation_set is None else dev[list(deviation_set)].max()
    return max(0.0, float(best - dev @ profile[player]))


def player_regrets(game: NormalFormGame, profile, deviation_sets=None) -> np.ndarray:
    sets = deviation_sets if deviation_sets is not None else [None] * game.num_players
    return np.array(
        [player_regret(game, profile, i, sets[i]) for i in range(game.num_players)]
    )


def profile_regret_sum(game: NormalFormGame, profile, deviation_sets=None) -> float:
    return float(player_regrets(game, profile, deviation_sets).sum())


def profile_regret_max(game: NormalFormGame, profile, deviation_sets=None) -> float:
    return float(player_regrets(game, profile, deviation_sets).max())


# --------------------------------------------------------------- projection


def is_feasible(x: np.ndarray, floor: float = 0.0) -> bool:
    return bool(x.min() >= floor and abs(x.sum() - 1.0) <= SUM_TOL)


def project_to_simplex(vector, floor: float = 0.0) -> np.ndarray:
    """Euclidean projection onto ``{x : x_k >= floor, sum(x) = 1}``.

    Feasible inputs are returned unchanged (as a copy).
    """
    v = np.asarray(vector, dtype=float)
    n = v.size
    if floor < 0:
        raise ValueError("floor must be non-negative")
    if floor * n > 1.0 + SUM_TOL:
        raise InfeasibleFloorError(f"floor {floor} infeasible in dimension {n}")
    if is_feasible(v, floor):
        return v.copy()
    mass = max(0.0, 1.0 - n * floor)
    if mass == 0.0:
        return np.full(n, floor)
    w = v - floor
    u = np.sort(w)[::-1]
    css = np.cumsum(u) - mass
    ind = np.arange(1, n + 1)
    r = np.nonzero(u - css / ind > 0)[0][-1]
    theta = css[r] / (r + 1)
    return np.maximum(w - theta, 0.0) + floor


# ------------------------------------------------------------ serialization


def _literal(x: float):
    return int(x) if float(x).is_integer() else float(x)


def _parse_literal(x) -> float:
    if isinstance(x, str):
        return float(Fraction(x))
    return float(x)


def game_to_dict(game: NormalFormGame) -> dict:
    return {
        "num_players": game.num_players,
        "strategy_counts": list(game.strategy_counts),
        "zero_sum": game.zero_sum,
        "labels": [list(row) for row in game.labels] if game.labels else None,
        # row-major; Python float repr round-trips bit-exactly
        "payoffs": [[_literal(x) for x in t.ravel()] for t in game.payoffs],
    }


def game_from_dict(doc: dict) -> NormalFormGame:
    shape = tuple(doc["strategy_counts"])
    if len(shape) != doc["num_players"] or len(doc["payoffs"]) != doc["num_players"]:
        raise ValueError("num_players disagrees with strategy_counts or payoffs")
    tensors = tuple(
        np.array([_parse_literal(x) for x in flat], dtype=float).reshape(shape)
        for flat in doc["payoffs"]
    )
    return NormalFormGame(tensors, zero_sum=bool(doc.get("zero_sum", False)),
                          labels=doc.get("labels"))


def save_game(game: NormalFormGame, path) -> None:
    Path(path).write_text(json.dumps(game_to_dict(game)))


def load_game(path) -> NormalFormGame:
    return game_from_dict(json.loads(Path(path).read_text()))
