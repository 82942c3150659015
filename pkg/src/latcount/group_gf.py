"""Generating functions of simplicial cones through the Smith group of their matrix.

For a nonsingular integer matrix A and integer T, the integer points of
{x : A x <= T} correspond to slack vectors s >= 0 with s = T - A x. Writing
S = P A Q, the constraint is sum_i s_i g_i = P T in G = Z^n / S Z^n, where g_i is
column i of P reduced mod S. Exponents of e^{-tau} are kept as integers over
the common denominator delta = |det A|.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .exact_arith import (
    SingularMatrixError, SmithForm, adjugate_columns, determinant, dot, inverse_rational, matvec,
    smith_normal_form, to_fraction,
)

Poly = dict[int, int]
GroupElem = tuple[int, ...]


class GenericityError(ValueError):
    """Raised when the direction c is orthogonal to an edge direction."""


@dataclass(frozen=True)
class SmithGroup:
    diag: tuple[int, ...]

    @property
    def nontrivial_indices(self) -> list[int]:
        return [i for i, d in enumerate(self.diag) if d > 1]

    @property
    def order(self) -> int:
        return math.prod(self.diag)

    def reduce(self, v: Sequence[int]) -> GroupElem:
        return tuple(int(a) % d for a, d in zip(v, self.diag))

    def add(self, u: GroupElem, v: GroupElem, k: int = 1) -> GroupElem:
        return tuple((a + k * b) % d for a, b, d in zip(u, v, self.diag))

    def elements(self) -> list[GroupElem]:
        return [tuple(e) for e in product(*(range(d) for d in self.diag))]

    @property
    def zero(self) -> GroupElem:
        return tuple(0 for _ in self.diag)


def element_order(group: SmithGroup, g: GroupElem) -> int:
    """lcm over coordinates of S_jj / gcd(S_jj, g_j)."""
    r = 1
    for a, d in zip(g, group.diag):
        o = d // math.gcd(d, a) if d > 1 else 1
        r = r * o // math.gcd(r, o)
    return r


def group_data(sf: SmithForm) -> tuple[SmithGroup, list[GroupElem], list[int]]:
    """The group Z^n / S Z^n, generators g_i = P e_i mod S, and their orders."""
    n = len(sf.S)
    diag = tuple(sf.S[i][i] for i in range(n))
    if any(d == 0 for d in diag):
        raise SingularMatrixError("group_data needs a nonsingular matrix")
    G = SmithGroup(diag)
    gens = [G.reduce([sf.P[r][i] for r in range(n)]) for i in range(n)]
    return G, gens, [element_order(G, g) for g in gens]


# ---------------------------------------------------------------- polynomials in x = e^{-tau/delta}

def _shift(p: Poly, k: int) -> Poly:
    return {e + k: c for e, c in p.items()}


def _add_into(acc: Poly, p: Poly, sign: int = 1) -> None:
    for e, c in p.items():
        v = acc.get(e, 0) + sign * c
        if v:
            acc[e] = v
        else:
            acc.pop(e, None)


@dataclass(frozen=True)
class NumeratorTable:
    """Numerators eps(g) of the cone generating function, per group element g.

    sum over integer points = x^{-<c, A^{-1} T> delta} * eps(P T) / prod(1 - x^{beta_i})
    with x = e^{-tau / delta}.
    """

    group: SmithGroup
    generators: tuple[GroupElem, ...]
    orders: tuple[int, ...]
    delta: int
    h: tuple[tuple[int, ...], ...]
    alpha: tuple[int, ...]
    betas: tuple[int, ...]
    eps: dict
    chi: int
    sigma: int

    @property
    def rational_betas(self) -> list[Fraction]:
        return [Fraction(b, self.delta) for b in self.betas]


def edge_vectors(A_B: Sequence[Sequence[int]]) -> tuple[int, list[list[int]]]:
    """delta = |det A| and the columns h_i of delta * A^{-1}."""
    delta, adj = adjugate_columns(A_B)
    n = len(adj)
    sign = 1 if determinant(A_B) > 0 else -1
    return delta, [[sign * adj[r][i] for r in range(n)] for i in range(n)]


def numerator_table(A_B: Sequence[Sequence[int]], c: Sequence[int], sf: SmithForm | None = None) -> NumeratorTable:
    """Level-by-level numerator tables over cosets of <g_k> (smart recurrence)."""
    A_B = [list(map(int, r)) for r in A_B]
    n = len(A_B)
    if sf is None:
        sf = smith_normal_form(A_B)
    delta, h = edge_vectors(A_B)
    alpha = [dot(c, hi) for hi in h]
    if any(a == 0 for a in alpha):
        raise GenericityError("c is orthogonal to an edge direction")
    if any(a < 0 for a in alpha):
        raise ValueError("numerator_table needs <c, h_i> > 0; orient the cone first")
    G, gens, orders = group_data(sf)
    elems = G.elements()
    level: dict[GroupElem, Poly] = {g: ({0: 1} if g == G.zero else {}) for g in elems}
    for k in range(n):
        gk, rk, ak = gens[k], orders[k], alpha[k]
        new: dict[GroupElem, Poly] = {}
        for q in elems:
            if q in new:
                continue
            orbit = [G.add(q, gk, j) for j in range(rk)]
            # h_k(0) by the direct sum over i of x^{i a_k} h_{k-1}(q - i g_k)
            first: Poly = {}
            for i in range(rk):
                _add_into(first, _shift(level[G.add(q, gk, -i)], i * ak))
            new[orbit[0]] = first
            prev = first
            for j in range(1, rk):
                cur = _shift(prev, ak)
                lower = level[orbit[j]]
                _add_into(cur, lower)
                _add_into(cur, _shift(lower, rk * ak), -1)
                new[orbit[j]] = cur
                prev = cur
        level = new
    betas = tuple(r * a for r, a in zip(orders, alpha))
    return NumeratorTable(G, tuple(gens), tuple(orders), delta, tuple(map(tuple, h)), tuple(alpha),
                          betas, level, max(abs(a) for a in alpha), max(G.diag))


# ---------------------------------------------------------------- constant terms

def _todd_factor_series(order: int) -> list[Fraction]:
    """Coefficients of x / (1 - e^{-x}) up to x^order."""
    # (1 - e^{-x}) / x = sum_k (-1)^k x^k / (k+1)!
    d = [Fraction((-1) ** k, math.factorial(k + 1)) for k in range(order + 1)]
    inv = [Fraction(0)] * (order + 1)
    inv[0] = Fraction(1)
    for k in range(1, order + 1):
        inv[k] = -sum((d[j] * inv[k - j] for j in range(1, k + 1)), Fraction(0))
    return inv


def todd_polynomials(betas: Sequence, n: int) -> list[Fraction]:
    """td_0..td_n with prod_i beta_i tau / (1 - e^{-beta_i tau}) = sum_j td_j tau^j."""
    series = _todd_factor_series(n)
    acc = [Fraction(1)] + [Fraction(0)] * n
    for beta in betas:
        beta = to_fraction(beta)
        factor = [series[k] * beta ** k for k in range(n + 1)]
        acc = [sum((acc[i] * factor[k - i] for i in range(k + 1)), Fraction(0)) for k in range(n + 1)]
    return acc


def pi_hat_tables(tbl: NumeratorTable, todd: Sequence[Fraction], delta: int | None = None) -> dict:
    """pi_hat_k(g) = sum_j td_{k-j} / (delta^j j!) sum_i eps_i(g) (-i)^j for k = 0..n."""
    delta = tbl.delta if delta is None else delta
    n = len(todd) - 1
    out = {}
    for g, poly in tbl.eps.items():
        moments = [sum((c * (-e) ** j for e, c in poly.items()), 0) for j in range(n + 1)]
        scaled = [Fraction(moments[j], delta ** j * math.factorial(j)) for j in range(n + 1)]
        out[g] = [sum((todd[k - j] * scaled[j] for j in range(k + 1)), Fraction(0)) for k in range(n + 1)]
    return out


@dataclass(frozen=True)
class PeriodicPiece:
    """pi_k tables of one simplicial cone {x : A x <= T}.

    value(T) = sum_k pi_k(P T mod S) <c_B, T>^k counts the integer points.
    """

    A: tuple[tuple[int, ...], ...]
    P: tuple[tuple[int, ...], ...]
    diag: tuple[int, ...]
    c_B: tuple[Fraction, ...]
    tables: dict

    @property
    def n(self) -> int:
        return len(self.A)

    def residue(self, T: Sequence[int]) -> GroupElem:
        return tuple(int(v) % d for v, d in zip(matvec(self.P, T), self.diag))

    def coefficients(self, T: Sequence[int]) -> list[Fraction]:
        return self.tables[self.residue(T)]

    def linear_form(self, T: Sequence) -> Fraction:
        return sum((cb * to_fraction(t) for cb, t in zip(self.c_B, T)), Fraction(0))

    def value(self, T: Sequence[int]) -> Fraction:
        coeffs = self.coefficients(T)
        s = self.linear_form(T)
        acc = Fraction(0)
        for pk in reversed(coeffs):
            acc = acc * s + pk
        return acc

    @property
    def period_product(self) -> int:
        return math.prod(self.diag)

    def table_size(self) -> int:
        return sum(len(v) for v in self.tables.values())


def constant_term_piece(A_B: Sequence[Sequence[int]], c: Sequence[int], sf: SmithForm | None = None) -> PeriodicPiece:
    """pi_k(g) = pi_hat_{n-k}(g) / (k! prod beta_i) for every residue g."""
    A_B = [list(map(int, r)) for r in A_B]
    n = len(A_B)
    if sf is None:
        sf = smith_normal_form(A_B)
    tbl = numerator_table(A_B, c, sf)
    betas = tbl.rational_betas
    todd = todd_polynomials(betas, n)
    hats = pi_hat_tables(tbl, todd)
    prod_beta = math.prod(betas, start=Fraction(1))
    tables = {g: tuple(hat[n - k] / (math.factorial(k) * prod_beta) for k in range(n + 1))
              for g, hat in hats.items()}
    inv = inverse_rational(A_B)
    c_B = tuple(sum((inv[r][i] * c[r] for r in range(n)), Fraction(0)) for i in range(n))
    return PeriodicPiece(tuple(map(tuple, A_B)), tuple(map(tuple, sf.P)),
                         tuple(sf.S[i][i] for i in range(n)), c_B, tables)


@dataclass(frozen=True)
class OrientedPiece:
    """A cone {x : A x <= T} rewritten so that <c, h_i> > 0 for every edge.

    Rows i with <c, h_i> < 0 are flipped: the cone's generating function equals
    (-1)^{#flips} times that of {A' x <= T'} with A'_i = -A_i, T'_i = -T_i - 1,
    modulo sets containing lines.
    """

    rows: tuple[int, ...]
    flips: tuple[bool, ...]
    piece: PeriodicPiece

    @property
    def sign(self) -> int:
        return -1 if sum(self.flips) % 2 else 1

    def flipped_rhs(self, T: Sequence[int]) -> list[int]:
        return [-t - 1 if f else t for t, f in zip(T, self.flips)]

    def value(self, T: Sequence[int]) -> Fraction:
        return self.sign * self.piece.value(self.flipped_rhs(T))


def orient_piece(A_B: Sequence[Sequence[int]], c: Sequence[int], rows: Sequence[int] = ()) -> OrientedPiece:
    _, h = edge_vectors(A_B)
    alpha = [dot(c, hi) for hi in h]
    if any(a == 0 for a in alpha):
        raise GenericityError("c is orthogonal to an edge direction")
    flips = tuple(a < 0 for a in alpha)
    A2 = [[-v for v in row] if f else list(row) for row, f in zip(A_B, flips)]
    return OrientedPiece(tuple(rows), flips, constant_term_piece(A2, c))


# ---------------------------------------------------------------- series oracle helpers

def truncated_series(numerator: Poly, betas: Sequence[int], order: int) -> list[int]:
    """Expand numerator / prod(1 - x^beta) as a power series up to x^order."""
    coeffs = [0] * (order + 1)
    for e, c in numerator.items():
        if 0 <= e <= order:
            coeffs[e] += c
    for beta in betas:
        for e in range(beta, order + 1):
            coeffs[e] += coeffs[e - beta]
    return coeffs
