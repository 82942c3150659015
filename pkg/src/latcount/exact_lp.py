"""Small exact linear programs over free variables (two-phase simplex, Bland's rule)."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .exact_arith import to_fraction

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


def _pivot(T: list[list[Fraction]], basis: list[int], r: int, col: int) -> None:
    row = T[r]
    inv = 1 / row[col]
    if inv != 1:
        T[r] = row = [v * inv for v in row]
    for i, other in enumerate(T):
        if i != r:
            f = other[col]
            if f:
                T[i] = [a - f * b for a, b in zip(other, row)]
    basis[r] = col


def _run(T: list[list[Fraction]], basis: list[int], allowed: int) -> bool:
    """Maximize with the objective as last row of T (reduced costs). False if unbounded."""
    m = len(T) - 1
    while True:
        obj = T[-1]
        col = next((j for j in range(allowed) if obj[j] < 0), None)
        if col is None:
            return True
        best = None
        for i in range(m):
            a = T[i][col]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return False
        _pivot(T, basis, best[1], col)


def maximize(c: Sequence, A_ub: Sequence[Sequence] = (), b_ub: Sequence = (),
             A_eq: Sequence[Sequence] = (), b_eq: Sequence = (), nvars: int | None = None):
    """Maximize c.x subject to A_ub x <= b_ub, A_eq x = b_eq, x free.

    Returns (status, value, x) with exact Fractions when optimal.
    """
    n = len(c) if nvars is None else nvars
    c = [to_fraction(v) for v in c]
    ub = [[to_fraction(v) for v in row] for row in A_ub]
    eq = [[to_fraction(v) for v in row] for row in A_eq]
    bu = [to_fraction(v) for v in b_ub]
    be = [to_fraction(v) for v in b_eq]
    m_ub, m_eq = len(ub), len(eq)
    m = m_ub + m_eq
    if m == 0:
        if any(c):
            return UNBOUNDED, None, None
        return OPTIMAL, Fraction(0), [Fraction(0)] * n
    # columns: x+ (n), x- (n), slacks (m_ub), artificials (one per row that needs one)
    nstruct = 2 * n + m_ub
    needs_art = [not (i < m_ub and bu[i] >= 0) for i in range(m)]
    art_col = {}
    for i in range(m):
        if needs_art[i]:
            art_col[i] = nstruct + len(art_col)
    width = nstruct + len(art_col) + 1
    T: list[list[Fraction]] = []
    basis = []
    for i in range(m):
        row = [Fraction(0)] * width
        src, rhs = (ub[i], bu[i]) if i < m_ub else (eq[i - m_ub], be[i - m_ub])
        for j in range(n):
            row[j] = src[j]
            row[n + j] = -src[j]
        if i < m_ub:
            row[2 * n + i] = Fraction(1)
        row[-1] = rhs
        if rhs < 0:
            row = [-v for v in row]
        if needs_art[i]:
            row[art_col[i]] = Fraction(1)
            basis.append(art_col[i])
        else:
            basis.append(2 * n + i)
        T.append(row)
    # phase 1: maximize -sum(artificials)
    obj = [Fraction(0)] * width
    for i, row in enumerate(T):
        if needs_art[i]:
            for j in range(width):
                if j < nstruct or j == width - 1:
                    obj[j] -= row[j]
    T.append(obj)
    if art_col:
        _run(T, basis, nstruct)
        if T[-1][-1] != 0:
            return INFEASIBLE, None, None
    # drive remaining artificials out of the basis
    r = 0
    while r < len(T) - 1:
        if basis[r] >= nstruct:
            col = next((j for j in range(nstruct) if T[r][j] != 0), None)
            if col is None:
                del T[r]
                del basis[r]
                continue
            _pivot(T, basis, r, col)
        r += 1
    # phase 2
    cost = [Fraction(0)] * width
    for j in range(n):
        cost[j] = -c[j]
        cost[n + j] = c[j]
    T[-1] = cost
    for i, bcol in enumerate(basis):
        f = T[-1][bcol]
        if f:
            T[-1] = [a - f * b for a, b in zip(T[-1], T[i])]
    if not _run(T, basis, nstruct):
        return UNBOUNDED, None, None
    z = [Fraction(0)] * nstruct
    for i, bcol in enumerate(basis):
        if bcol < nstruct:
            z[bcol] = T[i][-1]
    x = [z[j] - z[n + j] for j in range(n)]
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return OPTIMAL, value, x


def interior_point(A_ub: Sequence[Sequence], b_ub: Sequence, strict: Sequence[bool],
                   A_eq: Sequence[Sequence] = (), b_eq: Sequence = (), nvars: int = 0):
    """Find x with A_ub x <= b_ub (strict where flagged) and A_eq x = b_eq.

    Maximizes a common slack t <= 1 on the strict rows. Returns x or None.
    """
    n = nvars
    if not any(strict):
        status, _, x = maximize([0] * n, A_ub, b_ub, A_eq, b_eq, nvars=n)
        return x if status == OPTIMAL else None
    rows = []
    rhs = []
    for row, bi, s in zip(A_ub, b_ub, strict):
        rows.append(list(row) + [1 if s else 0])
        rhs.append(bi)
    rows.append([0] * n + [1])
    rhs.append(1)
    eq = [list(row) + [0] for row in A_eq]
    status, val, x = maximize([0] * n + [1], rows, rhs, eq, b_eq, nvars=n + 1)
    if status != OPTIMAL or val <= 0:
        return None
    return x[:n]
