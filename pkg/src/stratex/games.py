"""Constructors for the games used in the experiments.

Randomness always comes from ``numpy.random.Generator(PCG64(seed))`` so a
published seed reproduces a tensor bit-exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .game import NormalFormGame
from .restriction import EmpiricalGame, restrict

KUHN_CARDS = "JQK"


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def example1_game() -> NormalFormGame:
    """Symmetric zero-sum 3x3 game on which DO and FP first diverge."""
    a = [[0.0, -0.1, -3.0],
         [0.1, 0.0, 2.0],
         [3.0, -2.0, 0.0]]
    return NormalFormGame.from_matrix(a, labels=(("a1", "a2", "a3"),) * 2)


def unstable_ne_game() -> NormalFormGame:
    """Symmetric zero-sum 3x3 game where the empirical NE over {a1, a2} has the largest regret."""
    a = [[0.0, -1.0, -2.0],
         [1.0, 0.0, -5.0],
         [2.0, 5.0, 0.0]]
    return NormalFormGame.from_matrix(a, labels=(("a1", "a2", "a3"),) * 2)


def random_zero_sum(n: int, low: int = -10, high: int = 10, seed: int = 0) -> NormalFormGame:
    """Two-player zero-sum game with i.i.d. integer payoffs in ``[low, high]``."""
    if low > high:
        raise ValueError(f"low ({low}) must not exceed high ({high})")
    if n < 1:
        raise ValueError("need at least one strategy per player")
    a = rng_for(seed).integers(low, high, size=(n, n), endpoint=True).astype(float)
    return NormalFormGame.from_matrix(a)


# -------------------------------------------------------------------- Kuhn
#
# Pure strategy = 6-bit integer.  Bit (2 * card + point) holds the decision
# for card J=0, Q=1, K=2 at decision point 0 or 1; bit value 1 is the
# aggressive action.
#   player 1, point 0: check (0) / bet (1)
#   player 1, point 1: after check-bet, fold (0) / call (1)
#   player 2, point 0: after check, check (0) / bet (1)
#   player 2, point 1: after bet, fold (0) / call (1)
# Ante 1, bet 1.


def kuhn_bit(strategy: int, card: int, point: int) -> int:
    return (strategy >> (2 * card + point)) & 1


def kuhn_playout(s1: int, s2: int, c1: int, c2: int) -> int:
    """Chips won by player 1 for one deal."""
    win = 1 if c1 > c2 else -1
    if kuhn_bit(s1, c1, 0):
        return 2 * win if kuhn_bit(s2, c2, 1) else 1
    if kuhn_bit(s2, c2, 0):
        return 2 * win if kuhn_bit(s1, c1, 1) else -1
    return win


def kuhn_label(strategy: int) -> str:
    """E.g. ``Jkf-Qkc-Kbc``: per card, check/bet then fold/call."""
    return "-".join(
        KUHN_CARDS[c] + "kb"[kuhn_bit(strategy, c, 0)] + "fc"[kuhn_bit(strategy, c, 1)]
        for c in range(3)
    )


def kuhn_normal_form() -> NormalFormGame:
    """64x64 normal form of two-player Kuhn poker, exact over the 6 deals."""
    deals = list(itertools.permutations(range(3), 2))
    a = np.empty((64, 64))
    for s1 in range(64):
        for s2 in range(64):
            total = sum(kuhn_playout(s1, s2, c1, c2) for c1, c2 in deals)
            a[s1, s2] = float(Fraction(total, len(deals)))
    labels = (tuple(kuhn_label(s) for s in range(64)),) * 2
    return NormalFormGame.from_matrix(a, labels=labels)


# -------------------------------------------------------------- sub-games


def sample_subgame(game: NormalFormGame, size: int, seed: int) -> EmpiricalGame:
    """Uniform ``size``-subset of each player's strategies (ascending order)."""
    if size < 1 or size > min(game.strategy_counts):
        raise ValueError(f"size {size} outside [1, {min(game.strategy_counts)}]")
    rng = rng_for(seed)
    rows = [sorted(int(k) for k in rng.choice(n, size=size, replace=False))
            for n in game.strategy_counts]
    return restrict(game, rows)


@dataclass(frozen=True)
class GameSpec:
    kind: str
    strategies_per_player: int = 100
    payoff_low: int = -10
    payoff_high: int = 10
    seed: int = 0

    KINDS = ("example1", "unstable_ne", "random_zero_sum", "kuhn_normal_form")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown game kind {self.kind!r}; expected one of {self.KINDS}")
        if self.payoff_low > self.payoff_high:
            raise ValueError("payoff_low must not exceed payoff_high")
        if self.strategies_per_player < 1:
            raise ValueError("strategies_per_player must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def build(self) -> NormalFormGame:
        if self.kind == "example1":
            return example1_game()
        if self.kind == "unstable_ne":
            return unstable_ne_game()
        if self.kind == "kuhn_normal_form":
            return kuhn_normal_form()
        return random_zero_sum(self.strategies_per_player, self.payoff_low,
                               self.payoff_high, self.seed)
