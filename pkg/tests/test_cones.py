import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from latcount.cones import (
    MembershipError, RankError, active_rows, canonical_direction, cone_contains, edge_directions, pick_generic_c,
    piece_determinant, triangulate_cone,
)
from latcount.exact_arith import rank


def test_active_rows():
    A = [[1, 0], [0, 1], [-1, -1]]
    assert active_rows(A, [1, 1, 0], [1, Fraction(-1, 2)]) == [0]
    assert active_rows(A, [1, 1, 0], [0, 0]) == [2]
    with pytest.raises(MembershipError):
        active_rows(A, [1, 1, 0], [2, 0])


def test_canonical_direction():
    assert canonical_direction([0, -2, 4]) == (0, 1, -2)


def test_triangulate_square_pyramid():
    gens = [[1, 0, 1], [0, 1, 1], [-1, 0, 1], [0, -1, 1]]
    tri = triangulate_cone(gens)
    assert len(tri.pieces) == 2
    assert all(piece_determinant(p) != 0 for p in tri.pieces)


def test_triangulate_errors():
    with pytest.raises(RankError):
        triangulate_cone([[1, 0, 0], [0, 1, 0]])
    with pytest.raises(ValueError):
        triangulate_cone([[1, 0], [-1, 0], [0, 1]])


def _random_pointed_gens(rng, n, k):
    # generators in the open half-space x_n > 0 give a pointed cone
    while True:
        gens = [[rng.randint(-3, 3) for _ in range(n - 1)] + [rng.randint(1, 3)] for _ in range(k)]
        if rank(gens) == n:
            return gens


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_triangulation_partitions_cone(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 3)
    gens = _random_pointed_gens(rng, n, rng.randint(n, n + 3))
    tri = triangulate_cone(gens)
    for _ in range(30):
        lam = [Fraction(rng.randint(1, 997), rng.randint(1, 991)) for _ in gens]
        p = [sum((l * g[i] for l, g in zip(lam, gens)), Fraction(0)) for i in range(n)]
        inside = [cone_contains(piece.A_B, p) for piece in tri.pieces]
        assert any(inside)
        # a generic point lies in the interior of exactly one piece
        assert sum(cone_contains(piece.A_B, p, strict=True) for piece in tri.pieces) == 1


def test_pick_generic_c_avoids_all_directions_and_is_deterministic():
    pieces = [[[1, 0], [0, 1]], [[1, 1], [1, -1]], [[2, 1], [1, 3]]]
    E = edge_directions(pieces)
    c1 = pick_generic_c(E, seed=5)
    c2 = pick_generic_c(edge_directions(pieces), seed=5)
    assert c1 == c2
    assert all(sum(a * b for a, b in zip(c1, h)) != 0 for h in E.directions)
    assert E.chi == max(abs(sum(a * b for a, b in zip(c1, h))) for h in E.directions)


def test_pick_generic_c_with_basis():
    A_B = [[1, 2], [0, 1]]
    dirs = [(1, 0), (0, 1), (1, -1), (1, 1), (2, 1)]
    c = pick_generic_c(dirs, A_B=A_B, seed=1)
    assert all(sum(a * b for a, b in zip(c, h)) != 0 for h in dirs)
