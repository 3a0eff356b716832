"""Dense simplex for small covering programs.

Only programs of the form

    minimize c.x  subject to  A x >= b,  x >= 0,   with c >= 0

are needed. Their dual, maximize b.y subject to A^T y <= c, y >= 0, has the
origin as a feasible basis, so no phase-one is required: the dual is solved
with Bland's rule and the primal solution is read off the reduced costs of
the dual slack columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvariantError

PIVOT_TOL = 1e-12


@dataclass
class LPResult:
    value: float
    x: np.ndarray
    y: np.ndarray
    pivots: int


def solve_covering_lp(a, b, c, max_pivots: int = 100_000) -> LPResult:
    """Minimize c.x subject to a x >= b, x >= 0 (requires c >= 0)."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    c = np.asarray(c, dtype=float).reshape(-1)
    p, n = a.shape
    if b.size != p or c.size != n:
        raise ValueError("inconsistent LP dimensions")
    if np.any(c < 0):
        raise ValueError("objective coefficients must be nonnegative")

    # dual tableau: n rows (one per primal variable), p dual vars + n slacks + rhs
    t = np.zeros((n + 1, p + n + 1))
    t[:n, :p] = a.T
    t[:n, p : p + n] = np.eye(n)
    t[:n, -1] = c
    t[n, :p] = -b
    basis = list(range(p, p + n))

    pivots = 0
    while True:
        entering = next((j for j in range(p + n) if t[n, j] < -PIVOT_TOL), None)
        if entering is None:
            break
        col = t[:n, entering]
        best, leave = None, None
        for i in range(n):
            if col[i] > PIVOT_TOL:
                ratio = t[i, -1] / col[i]
                if (
                    best is None
                    or ratio < best - PIVOT_TOL
                    or (abs(ratio - best) <= PIVOT_TOL and basis[i] < basis[leave])
                ):
                    best, leave = ratio, i
        if leave is None:
            raise InvariantError("covering LP is infeasible (dual unbounded)")
        t[leave] /= t[leave, entering]
        for i in range(n + 1):
            if i != leave and t[i, entering] != 0.0:
                t[i] -= t[i, entering] * t[leave]
        basis[leave] = entering
        pivots += 1
        if pivots > max_pivots:
            raise InvariantError("simplex exceeded the pivot limit")

    y = np.zeros(p)
    for i, var in enumerate(basis):
        if var < p:
            y[var] = t[i, -1]
    x = np.clip(t[n, p : p + n].copy(), 0.0, None)
    return LPResult(value=float(t[n, -1]), x=x, y=y, pivots=pivots)


def lexmin_optimal_vertex(a, b, slack: float = 1e-10) -> tuple[float, np.ndarray]:
    """Minimize sum(x) over {a x >= b, x >= 0}; break ties lexicographically.

    Returns the optimal sum and the lexicographically smallest optimal
    vertex, found by minimizing x_1, x_2, ... in turn over the optimal face.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    n = a.shape[1]
    base = solve_covering_lp(a, b, np.ones(n))
    total = base.value
    fixed: list[float] = []
    x = base.x
    for i in range(n):
        rows = [a, -np.ones((1, n))]
        rhs = [b, [-(total + slack)]]
        for k, v in enumerate(fixed):
            e = np.zeros((1, n))
            e[0, k] = -1.0
            rows.append(e)
            rhs.append([-(v + slack)])
        c = np.zeros(n)
        c[i] = 1.0
        res = solve_covering_lp(np.vstack(rows), np.concatenate([np.ravel(r) for r in rhs]), c)
        fixed.append(res.value)
        x = res.x
    return total, x
