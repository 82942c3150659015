"""Tangent cones, placing triangulations, edge directions and generic directions."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import exact_lp
from .exact_arith import (
    DegenerateInputError, adjugate_columns, determinant, dot, nullspace, primitive,
    rank, to_fraction, clear_denominators,
)


class RankError(ValueError):
    """Raised when cone generators do not span the ambient space."""


class MembershipError(ValueError):
    """Raised when a point is not in the polyhedron."""


@dataclass(frozen=True)
class SimplicialCone:
    basis_rows: tuple[int, ...]
    A_B: tuple[tuple[int, ...], ...]


@dataclass
class Triangulation:
    pieces: list[SimplicialCone]
    mu_measured: int = 0


@dataclass
class EdgeDirectionSet:
    directions: list[tuple[int, ...]] = field(default_factory=list)
    chi: int | None = None


def active_rows(A: Sequence[Sequence[int]], b: Sequence, v: Sequence) -> list[int]:
    """Indices j with A_j v = b_j; raises MembershipError if A v <= b fails."""
    out = []
    for j, (row, bj) in enumerate(zip(A, b)):
        val = sum((a * to_fraction(x) for a, x in zip(row, v)), Fraction(0))
        bj = to_fraction(bj)
        if val > bj:
            raise MembershipError(f"row {j} violated: {val} > {bj}")
        if val == bj:
            out.append(j)
    return out


def _is_pointed(gens: Sequence[Sequence[int]]) -> bool:
    n = len(gens[0])
    status, _, _ = exact_lp.maximize([0] * n, [[-a for a in g] for g in gens], [-1] * len(gens), nvars=n)
    return status == exact_lp.OPTIMAL


def _facet_normal(gens, facet: Sequence[int], opposite: int) -> list[Fraction]:
    n = len(gens[0])
    ker = nullspace([gens[i] for i in facet], n)
    nu = ker[0]
    if dot(nu, gens[opposite]) > 0:
        nu = [-a for a in nu]
    return nu


def triangulate_cone(generators: Sequence[Sequence[int]], row_ids: Sequence[int] | None = None) -> Triangulation:
    """Placing triangulation of the pointed cone spanned by the generators.

    Generators are inserted in index order; each new one is joined to every
    boundary facet it sees strictly. Pieces record generator indices, or the
    matching entries of ``row_ids`` when given.
    """
    gens = [tuple(int(a) for a in g) for g in generators]
    if not gens:
        raise RankError("no generators")
    n = len(gens[0])
    if rank(gens) < n:
        raise RankError("generators do not span the space")
    if not _is_pointed(gens):
        raise ValueError("cone is not pointed")
    ids = list(row_ids) if row_ids is not None else list(range(len(gens)))
    initial: list[int] = []
    for i, g in enumerate(gens):
        if rank([gens[j] for j in initial] + [g]) > len(initial):
            initial.append(i)
        if len(initial) == n:
            break
    simplices: list[tuple[int, ...]] = [tuple(initial)]
    if n > 1:
        for p in range(len(gens)):
            if p in initial:
                continue
            boundary = _boundary_facets(simplices)
            added = []
            for facet, opposite in boundary:
                nu = _facet_normal(gens, facet, opposite)
                if dot(nu, gens[p]) > 0:
                    added.append(tuple(sorted(facet + (p,))))
            simplices.extend(added)
    pieces = [SimplicialCone(tuple(ids[i] for i in s), tuple(gens[i] for i in s)) for s in simplices]
    return Triangulation(pieces, len(pieces))


def _boundary_facets(simplices) -> list[tuple[tuple[int, ...], int]]:
    count: dict[tuple[int, ...], list[int]] = {}
    for s in simplices:
        for k in range(len(s)):
            facet = s[:k] + s[k + 1:]
            count.setdefault(facet, []).append(s[k])
    return [(f, opp[0]) for f, opp in count.items() if len(opp) == 1]


def canonical_direction(v: Sequence[int]) -> tuple[int, ...]:
    """Primitive form with first nonzero entry positive."""
    p = primitive(v)
    for a in p:
        if a != 0:
            return p if a > 0 else tuple(-x for x in p)
    raise DegenerateInputError("zero direction")


def edge_directions(pieces: Sequence) -> EdgeDirectionSet:
    """Columns of det(M) M^{-1} for every piece, primitive and deduplicated up to sign."""
    seen: dict[tuple[int, ...], None] = {}
    for piece in pieces:
        M = piece.A_B if isinstance(piece, SimplicialCone) else piece
        _, H = adjugate_columns([list(r) for r in M])
        for j in range(len(H)):
            seen.setdefault(canonical_direction([row[j] for row in H]), None)
    return EdgeDirectionSet(list(seen))


def pick_generic_c(E: EdgeDirectionSet | Sequence[Sequence[int]], A_B: Sequence[Sequence[int]] | None = None,
                   seed: int = 0) -> list[int]:
    """Integer c with c.h != 0 for every h in E, as c = A_B^T z.

    z is drawn with entries in [-|E|, |E|] from a seeded generator, up to 64
    tries, then falls back to (1, t, t^2, ...) which always separates.
    """
    dirs = E.directions if isinstance(E, EdgeDirectionSet) else [tuple(h) for h in E]
    if not dirs:
        raise ValueError("empty edge-direction set")
    if any(all(a == 0 for a in h) for h in dirs):
        raise DegenerateInputError("zero edge direction")
    n = len(dirs[0])
    M = [list(r) for r in A_B] if A_B is not None else [[int(i == j) for j in range(n)] for i in range(n)]
    # c.h = z.(A_B h), so z only has to avoid the images A_B h
    images = [[sum(M[i][j] * h[j] for j in range(n)) for i in range(n)] for h in dirs]
    rng = random.Random(seed)
    bound = max(1, len(dirs))
    z = None
    for _ in range(64):
        cand = [rng.randint(-bound, bound) for _ in range(n)]
        if all(dot(cand, w) != 0 for w in images):
            z = cand
            break
    if z is None:
        t = 1 + max(sum(abs(a) for a in w) for w in images)
        z = [t ** i for i in range(n)]
    c = [sum(M[i][j] * z[i] for i in range(n)) for j in range(n)]
    if any(dot(c, h) == 0 for h in dirs):
        raise AssertionError("generic direction check failed")
    if isinstance(E, EdgeDirectionSet):
        E.chi = max(abs(dot(c, h)) for h in dirs)
    return c


def cone_contains(gens: Sequence[Sequence[int]], point: Sequence, strict: bool = False) -> bool:
    """Whether point lies in the simplicial cone spanned by the n generators."""
    from .exact_arith import solve_rational
    coeffs = solve_rational([list(col) for col in zip(*gens)], [to_fraction(p) for p in point])
    if strict:
        return all(c > 0 for c in coeffs)
    return all(c >= 0 for c in coeffs)


def integer_vector(v: Sequence) -> list[int]:
    return clear_denominators(v)[0]


def piece_determinant(piece: SimplicialCone) -> int:
    return int(determinant([list(r) for r in piece.A_B]))
