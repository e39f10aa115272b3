"""Fractional domination LPs on complete multidigraphs.

For a complete multidigraph there is a probability distribution ``w`` with
``w(N^-(x)) >= 1/2`` for every vertex ``x`` (``N^-`` the closed
in-neighbourhood).  Two backends compute one:

* ``exact``: a dense rational simplex (``fractions.Fraction``) solving the
  matrix game ``max_w min_x w(N^-(x))``; the returned weights meet the
  bound exactly.
* ``float``: scipy's HiGHS, solving ``min max_x w(x)`` subject to the
  ``1/2`` bound, which spreads mass as evenly as the constraints allow.
  Output is checked post hoc against the bound.
"""

from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .exceptions import LpInfeasible

HALF = Fraction(1, 2)
FLOAT_TOL = 1e-9


def simplex_max(A, b, c):
    """Maximise ``c @ x`` subject to ``A @ x <= b``, ``x >= 0`` with ``b >= 0``.

    Exact tableau simplex over Fractions using Bland's rule, so it cannot
    cycle.  Returns ``(x, y, value)`` where ``y`` are the optimal duals of
    the rows.  Raises :class:`LpInfeasible` if the LP is unbounded.
    """
    m = len(A)
    n = len(c)
    F = Fraction
    T = [[F(v) for v in row] + [F(int(i == r)) for r in range(m)] + [F(b[i])] for i, row in enumerate(A)]
    if any(row[-1] < 0 for row in T):
        raise ValueError("simplex_max needs b >= 0")
    # reduced-cost row: z_j - c_j
    obj = [-F(v) for v in c] + [F(0)] * m + [F(0)]
    basis = [n + i for i in range(m)]
    width = n + m
    while True:
        enter = next((j for j in range(width) if obj[j] < 0), None)
        if enter is None:
            break
        best = None
        leave = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            raise LpInfeasible("LP is unbounded")
        prow = T[leave]
        piv = prow[enter]
        if piv != 1:
            prow = [v / piv for v in prow]
            T[leave] = prow
        nz = [j for j, v in enumerate(prow) if v]
        for i in range(m):
            if i != leave:
                f = T[i][enter]
                if f:
                    row = T[i]
                    for j in nz:
                        row[j] -= f * prow[j]
        f = obj[enter]
        for j in nz:
            obj[j] -= f * prow[j]
        basis[leave] = enter
    x = [F(0)] * n
    for i, bv in enumerate(basis):
        if bv < n:
            x[bv] = T[i][-1]
    y = obj[n : n + m]
    return x, y, obj[-1]


def _game_exact(M, cols=None):
    """Exact ``w`` maximising ``min_x (M w)_x`` over distributions supported on ``cols``.

    Uses ``max 1.y  s.t.  M[:, cols]^T y <= 1, y >= 0`` whose duals ``z``
    give ``w = z / sum(z)`` and game value ``1 / sum(z)``.
    """
    n = M.shape[0]
    cols = list(range(n)) if cols is None else list(cols)
    A = [[int(M[x, s]) for x in range(n)] for s in cols]
    _, z, total = simplex_max(A, [1] * len(cols), [1] * n)
    if total <= 0:
        raise LpInfeasible("game LP has non-positive optimum")
    w = [Fraction(0)] * n
    for s, zs in zip(cols, z):
        w[s] = zs / total
    return w, 1 / total


def _float_spread(M):
    """Float ``w`` with ``M w >= 1/2`` minimising the largest weight."""
    n = M.shape[0]
    # variables: w_0..w_{n-1}, u
    c = np.zeros(n + 1)
    c[-1] = 1.0
    A_ub = np.zeros((2 * n, n + 1))
    A_ub[:n, :n] = -M
    A_ub[n:, :n] = np.eye(n)
    A_ub[n:, -1] = -1.0
    b_ub = np.concatenate([np.full(n, -0.5), np.zeros(n)])
    A_eq = np.zeros((1, n + 1))
    A_eq[0, :n] = 1.0
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0], bounds=[(0, None)] * (n + 1), method="highs")
    if res.status != 0:
        raise LpInfeasible(f"HiGHS failed: {res.message}")
    w = np.clip(res.x[:n], 0.0, None)
    return w / w.sum()


def dominating_weights(M, exact=False):
    """Distribution over the columns of closed in-neighbourhood matrix ``M``.

    ``M[x, y]`` is True iff ``y`` is in the closed in-neighbourhood of ``x``.
    Returns a list of Fractions (exact) or a float array.
    """
    M = np.asarray(M, dtype=bool)
    n = M.shape[0]
    if n == 0:
        raise LpInfeasible("empty vertex set")
    if n == 1:
        return [Fraction(1)] if exact else np.ones(1)
    if not exact:
        w = _float_spread(M.astype(float))
        worst = float((M @ w).min())
        if worst < 0.5 - FLOAT_TOL:
            raise LpInfeasible(f"distribution reaches only {worst}; input is not complete")
        return w
    # guess the active set from the float game solution and certify exactly
    w_float = _float_game(M.astype(float))
    support = [int(i) for i in np.nonzero(w_float > 1e-9)[0]]
    w = _solve_active_set(M, w_float, support)
    if w is not None:
        return w
    w, value = _game_exact(M, support)
    if value < HALF:
        w, value = _game_exact(M)
    if value < HALF:
        raise LpInfeasible(f"game value {value} < 1/2; input is not complete")
    return w


def _solve_exact(rows, rhs):
    """Exact solution of a consistent (possibly overdetermined) system, else None."""
    F = Fraction
    A = [[F(v) for v in r] + [F(b)] for r, b in zip(rows, rhs)]
    ncol = len(rows[0])
    piv_rows = []
    r = 0
    for c in range(ncol):
        p = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if p is None:
            return None
        A[r], A[p] = A[p], A[r]
        pv = A[r][c]
        A[r] = [v / pv for v in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        piv_rows.append(r)
        r += 1
    if any(A[i][-1] != 0 for i in range(r, len(A))):
        return None
    return [A[i][-1] for i in range(ncol)]


def _solve_active_set(M, w_float, support):
    n = M.shape[0]
    mass = M.astype(float) @ w_float
    value = mass.min()
    tight = [int(x) for x in np.nonzero(mass <= value + 1e-9)[0]]
    if len(tight) < len(support):
        return None
    # unknowns: w_s for s in support, then the game value v
    rows = [[int(M[x, s]) for s in support] + [-1] for x in tight]
    rows.append([1] * len(support) + [0])
    sol = _solve_exact(rows, [0] * len(tight) + [1])
    if sol is None:
        return None
    v = sol[-1]
    if v < HALF or any(ws < 0 for ws in sol[:-1]):
        return None
    w = [Fraction(0)] * n
    for s, ws in zip(support, sol[:-1]):
        w[s] = ws
    if min(neighbourhood_mass(M, w)) < HALF:
        return None
    return w


def _float_game(M):
    n = M.shape[0]
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-M, np.ones((n, 1))])
    A_eq = np.zeros((1, n + 1))
    A_eq[0, :n] = 1.0
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(n), A_eq=A_eq, b_eq=[1.0], bounds=[(0, None)] * n + [(None, None)], method="highs")
    if res.status != 0:
        return np.full(n, 1.0 / n)
    return res.x[:n]


def neighbourhood_mass(M, w):
    """``w(N^-(x))`` for every row ``x`` (exact when ``w`` holds Fractions)."""
    M = np.asarray(M, dtype=bool)
    if len(w) and isinstance(w[0], Fraction):
        return [sum((w[y] for y in np.nonzero(M[x])[0]), Fraction(0)) for x in range(M.shape[0])]
    return M.astype(float) @ np.asarray(w, dtype=float)
