"""Exact integer and rational linear algebra.

Matrices are plain lists of rows holding ``int`` or ``fractions.Fraction``.
Nothing here ever touches floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Matrix = list[list[int]]
RatMatrix = list[list[Fraction]]


class ShapeError(ValueError):
    """Raised when a matrix has the wrong shape for an operation."""


class SingularMatrixError(ValueError):
    """Raised when a nonsingular matrix was required."""


class DegenerateInputError(ValueError):
    """Raised for inputs such as the zero vector where a gcd is needed."""


def to_fraction(value) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {value!r} to an exact rational")


def as_int(value) -> int:
    """Return ``value`` as an int, refusing non-integral rationals."""
    q = to_fraction(value)
    if q.denominator != 1:
        raise ValueError(f"{value} is not an integer")
    return q.numerator


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def copy_matrix(M: Sequence[Sequence]) -> list[list]:
    return [list(row) for row in M]


def transpose(M: Sequence[Sequence]) -> list[list]:
    if not M:
        return []
    return [list(col) for col in zip(*M)]


def shape(M: Sequence[Sequence]) -> tuple[int, int]:
    rows = len(M)
    cols = len(M[0]) if rows else 0
    for row in M:
        if len(row) != cols:
            raise ShapeError("ragged matrix")
    return rows, cols


def matmul(X: Sequence[Sequence], Y: Sequence[Sequence]) -> list[list]:
    rx, cx = shape(X)
    ry, cy = shape(Y)
    if cx != ry:
        raise ShapeError(f"cannot multiply {rx}x{cx} by {ry}x{cy}")
    Yt = transpose(Y) if ry else [[] for _ in range(cy)]
    return [[sum(a * b for a, b in zip(row, col)) for col in Yt] for row in X]


def matvec(M: Sequence[Sequence], v: Sequence) -> list:
    return [sum(a * b for a, b in zip(row, v)) for row in M]


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def vec_gcd(v: Sequence[int]) -> int:
    g = 0
    for a in v:
        g = math.gcd(g, int(a))
    return g


def lcm_list(values) -> int:
    out = 1
    for a in values:
        out = out * a // math.gcd(out, a)
    return out


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries."""
    g = vec_gcd(v)
    if g == 0:
        raise DegenerateInputError("zero vector has no primitive form")
    return tuple(int(a) // g for a in v)


def clear_denominators(v: Sequence) -> tuple[list[int], int]:
    """Return an integer vector w and d > 0 with w = d * v, d minimal."""
    fr = [to_fraction(a) for a in v]
    d = lcm_list(a.denominator for a in fr)
    return [int(a * d) for a in fr], d


def determinant(M: Sequence[Sequence]) -> int | Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination.

    >>> determinant([[2, 4], [6, 8]])
    -8
    """
    n, cols = shape(M)
    if n != cols:
        raise ShapeError("determinant needs a square matrix")
    if n == 0:
        return 1
    if any(isinstance(a, Fraction) and a.denominator != 1 for row in M for a in row):
        return _rational_det(M)
    a = [[int(x) for x in row] for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _rational_det(M) -> Fraction:
    a = [[to_fraction(x) for x in row] for row in M]
    n = len(a)
    det = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det *= a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
    return det


def rref(M: Sequence[Sequence]) -> tuple[RatMatrix, list[int]]:
    """Reduced row echelon form over Q and the pivot column list."""
    a = [[to_fraction(x) for x in row] for row in M]
    rows, cols = shape(a)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(M: Sequence[Sequence]) -> int:
    if not M or not M[0]:
        return 0
    return len(rref(M)[1])


def nullspace(M: Sequence[Sequence], ncols: int | None = None) -> RatMatrix:
    """Basis (as a list of vectors) of the right kernel over Q."""
    if not M:
        n = ncols or 0
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    red, pivots = rref(M)
    n = len(M[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -red[r][f]
        basis.append(v)
    return basis


def integer_nullspace(M: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    """Kernel basis scaled to primitive integer vectors (a Q-basis, not a lattice basis)."""
    out = []
    for v in nullspace(M, ncols):
        w, _ = clear_denominators(v)
        out.append(list(primitive(w)))
    return out


def solve_rational(A: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Solve A x = b exactly for square nonsingular A.

    >>> solve_rational([[2, 0], [0, 2]], [1, 1])
    [Fraction(1, 2), Fraction(1, 2)]
    """
    n, cols = shape(A)
    if n != cols or len(b) != n:
        raise ShapeError("solve_rational needs square A and matching b")
    aug = [[to_fraction(x) for x in row] + [to_fraction(bi)] for row, bi in zip(A, b)]
    for k in range(n):
        piv = next((i for i in range(k, n) if aug[i][k] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        aug[k], aug[piv] = aug[piv], aug[k]
        for i in range(n):
            if i != k and aug[i][k] != 0:
                f = aug[i][k] / aug[k][k]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[k])]
    return [aug[i][n] / aug[i][i] for i in range(n)]


def inverse_rational(A: Sequence[Sequence]) -> RatMatrix:
    n, cols = shape(A)
    if n != cols:
        raise ShapeError("inverse needs a square matrix")
    aug = [[to_fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(A)]
    for k in range(n):
        piv = next((i for i in range(k, n) if aug[i][k] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        aug[k], aug[piv] = aug[piv], aug[k]
        inv = 1 / aug[k][k]
        aug[k] = [x * inv for x in aug[k]]
        for i in range(n):
            if i != k and aug[i][k] != 0:
                f = aug[i][k]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[k])]
    return [row[n:] for row in aug]


def adjugate_columns(A: Sequence[Sequence[int]]) -> tuple[int, Matrix]:
    """Return (|det A|, H) with A H = det(A) I and H integral.

    >>> adjugate_columns([[2, 1], [1, 1]])
    (1, [[1, -1], [-1, 2]])
    """
    det = determinant(A)
    if det == 0:
        raise SingularMatrixError("adjugate_columns needs a nonsingular matrix")
    inv = inverse_rational(A)
    H = [[int(x * det) for x in row] for row in inv]
    return abs(int(det)), H


def hnf_row(v: Sequence[int]) -> tuple[list[int], Matrix]:
    """Row Hermite form: v = H Q with H = (g, 0, ..., 0), g = gcd(v) > 0, Q unimodular.

    >>> hnf_row([4, 6])[0]
    [2, 0]
    """
    n = len(v)
    if n == 0 or all(a == 0 for a in v):
        raise DegenerateInputError("hnf_row needs a nonzero vector")
    w = [int(a) for a in v]
    # column operations on w are tracked in U (w_orig U = w) and Uinv
    U = identity(n)
    Uinv = identity(n)

    def col_op(i: int, j: int, f: int) -> None:
        # column i += f * column j
        w[i] += f * w[j]
        for row in U:
            row[i] += f * row[j]
        # inverse: row j of Uinv -= f * row i
        Uinv[j] = [a - f * b for a, b in zip(Uinv[j], Uinv[i])]

    def col_swap(i: int, j: int) -> None:
        w[i], w[j] = w[j], w[i]
        for row in U:
            row[i], row[j] = row[j], row[i]
        Uinv[i], Uinv[j] = Uinv[j], Uinv[i]

    while True:
        nz = [i for i in range(n) if w[i] != 0]
        p = min(nz, key=lambda i: abs(w[i]))
        if p != 0:
            col_swap(0, p)
        if all(w[i] == 0 for i in range(1, n)):
            break
        for i in range(1, n):
            if w[i]:
                col_op(i, 0, -(w[i] // w[0]))
    if w[0] < 0:
        w[0] = -w[0]
        for row in U:
            row[0] = -row[0]
        Uinv[0] = [-a for a in Uinv[0]]
    return w, Uinv


@dataclass(frozen=True)
class SmithForm:
    """S = P A Q with P, Q unimodular and S diagonal with a divisibility chain."""

    P: Matrix
    S: Matrix
    Q: Matrix
    sigma: int

    @property
    def diagonal(self) -> list[int]:
        return [self.S[i][i] for i in range(min(len(self.S), len(self.S[0]) if self.S else 0))]


def smith_normal_form(A: Sequence[Sequence[int]]) -> SmithForm:
    """Smith normal form by gcd-driven row and column elimination.

    >>> smith_normal_form([[2, 4], [6, 8]]).diagonal
    [2, 4]
    """
    m, n = shape(A)
    S = [[int(x) for x in row] for row in A]
    P = identity(m)
    Q = identity(n)

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        P[i], P[j] = P[j], P[i]

    def swap_cols(i, j):
        for M in (S, Q):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):
        S[dst] = [a + f * b for a, b in zip(S[dst], S[src])]
        P[dst] = [a + f * b for a, b in zip(P[dst], P[src])]

    def add_col(dst, src, f):
        for M in (S, Q):
            for row in M:
                row[dst] += f * row[src]

    for t in range(min(m, n)):
        while True:
            cand = [(abs(S[i][j]), i, j) for i in range(t, m) for j in range(t, n) if S[i][j]]
            if not cand:
                break
            _, pi, pj = min(cand)
            swap_rows(t, pi)
            swap_cols(t, pj)
            p = S[t][t]
            done = True
            for i in range(t + 1, m):
                if S[i][t]:
                    add_row(i, t, -(S[i][t] // p))
                    if S[i][t]:
                        done = False
            for j in range(t + 1, n):
                if S[t][j]:
                    add_col(j, t, -(S[t][j] // p))
                    if S[t][j]:
                        done = False
            if not done:
                continue
            # enforce divisibility of the remaining block by the pivot
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if S[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if S[t][t] < 0:
            S[t] = [-a for a in S[t]]
            P[t] = [-a for a in P[t]]
    k = min(m, n)
    sigma = S[k - 1][k - 1] if k else 0
    return SmithForm(P=P, S=S, Q=Q, sigma=sigma)


def frac_part(q: Fraction) -> Fraction:
    return q - math.floor(q)


def floor_vec(v: Sequence[Fraction]) -> list[int]:
    return [math.floor(x) for x in v]


def fraction_str(q) -> str:
    q = to_fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def rational_denominator(values: Sequence[Fraction]) -> Fraction:
    """Smallest rational q > 0 with q * v integral for every v; 1 if all are zero."""
    nz = [to_fraction(v) for v in values if v != 0]
    if not nz:
        return Fraction(1)
    num = lcm_list(v.denominator for v in nz)
    den = vec_gcd([v.numerator for v in nz])
    return Fraction(num, den)


def integer_denominator(values: Sequence[Fraction]) -> int:
    """Smallest integer q >= 1 with q * v integral for every v."""
    return lcm_list(to_fraction(v).denominator for v in values)
