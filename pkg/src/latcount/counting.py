"""Exact counting of integer points in {x : A x <= b} for fixed b.

count_fixed sums the constant terms of the tangent-cone pieces over all
vertices; brute_force_count enumerates a bounding box and serves as the oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from .cones import edge_directions, pick_generic_c, triangulate_cone
from .exact_arith import (
    clear_denominators, determinant, floor_vec, rank, smith_normal_form, solve_rational,
    to_fraction, vec_gcd, nullspace,
)
from .group_gf import orient_piece
from .polyhedron import (
    ParametricSystem, fourier_motzkin, implicit_equalities, recession_rays, reduce_fiber_dimension,
)


class _Infinite:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "INFINITE"

    __str__ = __repr__


INFINITE = _Infinite()


class BudgetError(RuntimeError):
    """Raised when a brute-force box exceeds the configured budget."""


@dataclass(frozen=True)
class VertexBasis:
    basis: tuple[int, ...]
    vertex: tuple[Fraction, ...]
    active: tuple[int, ...]


def enumerate_vertices_by_bases(A: Sequence[Sequence[int]], b: Sequence) -> list[VertexBasis]:
    """All distinct vertices of {A x <= b}, each with one basis and its active set."""
    A = [list(map(int, r)) for r in A]
    b = [to_fraction(v) for v in b]
    n = len(A[0]) if A else 0
    found: dict[tuple[Fraction, ...], VertexBasis] = {}
    for B in combinations(range(len(A)), n):
        A_B = [A[i] for i in B]
        if determinant(A_B) == 0:
            continue
        v = tuple(solve_rational(A_B, [b[i] for i in B]))
        if v in found:
            continue
        vals = [sum((a * x for a, x in zip(row, v)), Fraction(0)) for row in A]
        if all(val <= bi for val, bi in zip(vals, b)):
            active = tuple(j for j, (val, bi) in enumerate(zip(vals, b)) if val == bi)
            found[v] = VertexBasis(B, v, active)
    return list(found.values())


def _reduce_columns(A: Sequence[Sequence[int]]):
    """Unimodular Q with A Q = [A' 0], A' of full column rank."""
    sf = smith_normal_form([list(r) for r in A])
    r = sum(1 for i in range(min(len(sf.S), len(sf.S[0]))) if sf.S[i][i] != 0)
    AQ = [[sum(row[k] * sf.Q[k][j] for k in range(len(row))) for j in range(len(row))] for row in A]
    return [row[:r] for row in AQ], r


def _box_from_vertices_and_rays(vertices, rays, n):
    lo, hi = [], []
    for t in range(n):
        vmin = min(v[t] for v in vertices)
        vmax = max(v[t] for v in vertices)
        lo.append(math.floor(vmin + sum(min(0, r[t]) for r in rays)))
        hi.append(math.ceil(vmax + sum(max(0, r[t]) for r in rays)))
    return lo, hi


def count_fixed(A: Sequence[Sequence[int]], b: Sequence, seed: int = 0):
    """|{x in Z^n : A x <= b}| via vertex tangent cones, or INFINITE."""
    A = [list(map(int, r)) for r in A]
    b = [to_fraction(v) for v in b]
    n = len(A[0]) if A else 0
    if n == 0:
        return 1 if all(v >= 0 for v in b) else 0
    if not A:
        return INFINITE
    if rank(A) < n:
        A_red, r = _reduce_columns(A)
        if r == 0:
            inner = 1 if all(v >= 0 for v in b) else 0
        else:
            inner = count_fixed(A_red, b, seed)
        return INFINITE if inner != 0 else 0
    imp = implicit_equalities(A, b)
    if imp is None:
        return 0
    imp = [j for j in imp if any(A[j])]
    if imp:
        sys = ParametricSystem.make(A, [[] for _ in A], b, n_y=0)
        red = reduce_fiber_dimension(sys, [], row=imp[0])
        if not red.system.conditions_hold([]):
            return 0
        if red.system.n_x == 0:
            return 1
        if not red.system.m:
            return INFINITE
        return count_fixed(red.system.A, red.system.b, seed)
    rays = recession_rays(A)
    if rays:
        verts = enumerate_vertices_by_bases(A, b)
        lo, hi = _box_from_vertices_and_rays([v.vertex for v in verts], rays, n)
        box_rows = [[int(i == t) for i in range(n)] for t in range(n)] + \
                   [[-int(i == t) for i in range(n)] for t in range(n)]
        inner = count_fixed(A + box_rows, b + [Fraction(h) for h in hi] + [Fraction(-l) for l in lo], seed)
        return INFINITE if inner else 0
    return _brion_sum(A, b, seed)


def vertex_cone_pieces(A: Sequence[Sequence[int]], active: Sequence[int]):
    """Simplicial pieces (row index tuples) triangulating cone(A_J^T)."""
    active = [j for j in active if any(A[j])]
    tri = triangulate_cone([A[j] for j in active], row_ids=active)
    return [p.basis_rows for p in tri.pieces]


def _brion_sum(A, b, seed):
    verts = enumerate_vertices_by_bases(A, b)
    if not verts:
        return 0
    bases = []
    for v in verts:
        bases.extend(vertex_cone_pieces(A, v.active))
    E = edge_directions([[A[i] for i in B] for B in bases])
    c = pick_generic_c(E, seed=seed)
    cache = {}
    total = Fraction(0)
    for B in bases:
        if B not in cache:
            cache[B] = orient_piece([A[i] for i in B], c, B)
        T = floor_vec([b[i] for i in B])
        total += cache[B].value(T)
    if total.denominator != 1 or total < 0:
        raise AssertionError(f"non-integral or negative count {total}")
    return int(total)


# ---------------------------------------------------------------- brute-force oracle

def brute_force_count(A: Sequence[Sequence[int]], b: Sequence, budget: int = 2_000_000):
    """Enumerate integer points of {A x <= b} in an exact bounding box."""
    A = [list(map(int, r)) for r in A]
    b = [to_fraction(v) for v in b]
    n = len(A[0]) if A else 0
    if n == 0:
        return 1 if all(v >= 0 for v in b) else 0
    if not A:
        return INFINITE
    if rank(A) < n:
        A_red, r = _reduce_columns(A)
        inner = (1 if all(v >= 0 for v in b) else 0) if r == 0 else brute_force_count(A_red, b, budget)
        return INFINITE if inner != 0 else 0
    lo, hi = [], []
    bounded = True
    for t in range(n):
        proj = fourier_motzkin(A, b, [i for i in range(n) if i != t], prune=False)
        if proj is None:
            return 0
        rows, rhs = proj
        up = [h / r[0] for r, h in zip(rows, rhs) if r[0] > 0]
        down = [h / r[0] for r, h in zip(rows, rhs) if r[0] < 0]
        if not up or not down:
            bounded = False
            break
        lo.append(math.ceil(max(down)))
        hi.append(math.floor(min(up)))
    if bounded:
        return _enumerate_box(A, b, lo, hi, budget, stop_at_first=False)
    lo, hi = _oracle_minkowski_box(A, b)
    if lo is None:
        return 0
    return INFINITE if _enumerate_box(A, b, lo, hi, budget, stop_at_first=True) else 0


def _enumerate_box(A, b, lo, hi, budget, stop_at_first):
    if any(l > h for l, h in zip(lo, hi)):
        return 0
    volume = math.prod(h - l + 1 for l, h in zip(lo, hi))
    if volume > budget:
        raise BudgetError(f"box of {volume} points exceeds budget {budget}")
    count = 0
    for x in product(*(range(l, h + 1) for l, h in zip(lo, hi))):
        if all(sum(a * xi for a, xi in zip(row, x)) <= bi for row, bi in zip(A, b)):
            count += 1
            if stop_at_first:
                return 1
    return count


def _oracle_minkowski_box(A, b):
    """Box around conv(vertices) + sum [0, 1] * rays, from a direct basis scan."""
    n = len(A[0])
    verts = []
    for B in combinations(range(len(A)), n):
        M = [A[i] for i in B]
        if rank(M) < n:
            continue
        v = solve_rational(M, [b[i] for i in B])
        if all(sum(a * x for a, x in zip(row, v)) <= bi for row, bi in zip(A, b)):
            verts.append(v)
    if not verts:
        return None, None
    rays = []
    for B in combinations(range(len(A)), n - 1):
        M = [A[i] for i in B]
        ker = nullspace(M, n) if M else [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        if len(ker) != 1:
            continue
        d, _ = clear_denominators(ker[0])
        g = vec_gcd(d)
        d = [x // g for x in d]
        for s in (1, -1):
            r = [s * x for x in d]
            if all(sum(a * x for a, x in zip(row, r)) <= 0 for row in A):
                rays.append(r)
    return _box_from_vertices_and_rays(verts, rays, n)
