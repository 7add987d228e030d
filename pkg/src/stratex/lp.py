"""Dense tableau simplex method and the zero-sum matrix-game LP built on it."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-11


class LPError(RuntimeError):
    pass


@dataclass
class LPSolution:
    x: np.ndarray
    duals: np.ndarray
    value: float
    pivots: int


def simplex_max(c, a_ub, b_ub, max_pivots: int = 100_000, degenerate_limit: int = 50) -> LPSolution:
    """Maximize ``c @ x`` subject to ``a_ub @ x <= b_ub``, ``x >= 0``, with ``b_ub >= 0``.

    Starts from the all-slack basis.  Pivots use Dantzig's rule until
    ``degenerate_limit`` consecutive degenerate pivots occur, then switch to
    Bland's rule for the rest of the solve, which rules out cycling.  Ratio
    ties leave by lowest basic-variable index.  Pivoting order is fixed, so the
    returned vertex is deterministic.
    """
    a = np.asarray(a_ub, dtype=float)
    b = np.asarray(b_ub, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = a.shape
    if np.any(b < 0):
        raise LPError("the all-slack start needs b_ub >= 0")
    t = np.zeros((m + 1, n + m + 1))
    t[:m, :n] = a
    t[:m, n:n + m] = np.eye(m)
    t[:m, -1] = b
    t[m, :n] = -c
    basis = np.arange(n, n + m)
    bland = False
    streak = 0
    for pivots in range(max_pivots):
        reduced = t[m, :-1]
        if bland:
            cand = np.nonzero(reduced < -PIVOT_TOL)[0]
            if cand.size == 0:
                break
            j = int(cand[0])
        else:
            j = int(np.argmin(reduced))
            if reduced[j] >= -PIVOT_TOL:
                break
        col = t[:m, j]
        rows = np.nonzero(col > PIVOT_TOL)[0]
        if rows.size == 0:
            raise LPError("objective is unbounded")
        ratios = t[rows, -1] / col[rows]
        best = ratios.min()
        tied = rows[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
        i = int(tied[np.argmin(basis[tied])])
        if best <= PIVOT_TOL:
            streak += 1
            if streak >= degenerate_limit:
                bland = True
        else:
            streak = 0
        t[i] /= t[i, j]
        others = np.arange(m + 1) != i
        t[others] -= np.outer(t[others, j], t[i])
        basis[i] = j
    else:
        raise LPError(f"no optimum after {max_pivots} pivots")
    full = np.zeros(n + m)
    full[basis] = t[:m, -1]
    return LPSolution(full[:n], t[m, n:n + m].copy(), float(t[m, -1]), pivots)


def solve_zero_sum(a) -> tuple[np.ndarray, np.ndarray, float]:
    """Maximin strategies and value of the matrix game ``a`` (row player maximizes).

    Shifts ``a`` to be positive, then solves ``max 1'y s.t. B y <= 1`` for the
    column player; the row player's strategy comes from the optimal duals.
    """
    a = np.asarray(a, dtype=float)
    m, n = a.shape
    shift = 1.0 - a.min()
    sol = simplex_max(np.ones(n), a + shift, np.ones(m))
    z = sol.value
    if z <= 0:
        raise LPError("degenerate zero-sum LP")
    q = np.clip(sol.x / z, 0.0, None)
    p = np.clip(sol.duals / z, 0.0, None)
    return p / p.sum(), q / q.sum(), 1.0 / z - shift
