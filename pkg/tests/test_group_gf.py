import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from latcount.exact_arith import determinant, smith_normal_form
from latcount.group_gf import (
    GenericityError, SmithGroup, constant_term_piece, edge_vectors, element_order, group_data, numerator_table,
    orient_piece, todd_polynomials, truncated_series,
)
from oracles import cone_series_by_slacks, representative_rhs


def _oriented(A, c):
    _, h = edge_vectors(A)
    return [[-v for v in row] if sum(a * b for a, b in zip(c, hi)) < 0 else list(row) for row, hi in zip(A, h)]


def test_todd_factor_known_values():
    # x / (1 - e^{-x}) = 1 + x/2 + x^2/12 - x^4/720 + ...
    assert todd_polynomials([1], 4) == [1, Fraction(1, 2), Fraction(1, 12), 0, Fraction(-1, 720)]


def test_todd_product_of_two():
    t = todd_polynomials([1, 2], 2)
    assert t[1] == Fraction(1, 2) + 1
    assert t[2] == Fraction(1, 12) + Fraction(4, 12) + Fraction(1, 2) * 1


def test_element_order():
    G = SmithGroup((2, 6))
    assert element_order(G, (1, 0)) == 2
    assert element_order(G, (0, 4)) == 3
    assert element_order(G, (1, 3)) == 2
    assert element_order(G, (0, 0)) == 1


def test_group_generators_cover_group():
    A = [[2, 1], [0, 3]]
    G, gens, orders = group_data(smith_normal_form(A))
    assert G.order == abs(determinant(A))
    reach = {G.zero}
    for g in gens:
        reach |= {G.add(r, g, k) for r in reach for k in range(G.order)}
    assert reach == set(G.elements())


def test_non_positive_alpha_rejected():
    with pytest.raises(GenericityError):
        numerator_table([[1, 0], [0, 1]], [1, 0])
    with pytest.raises(ValueError):
        numerator_table([[1, 0], [0, 1]], [-1, 1])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_numerators_match_slack_enumeration(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    while True:
        A = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
        if determinant(A) != 0 and abs(determinant(A)) <= 10:
            break
    _, h = edge_vectors(A)
    while True:
        c = [rng.randint(-5, 5) for _ in range(n)]
        if all(sum(a * b for a, b in zip(c, hi)) != 0 for hi in h):
            break
    A = _oriented(A, c)
    tbl = numerator_table(A, c)
    assert all(a > 0 for a in tbl.alpha)
    sf = smith_normal_form(A)
    order = 3 * max(tbl.betas)
    for g in tbl.group.elements():
        T = representative_rhs(sf.P, g)
        assert truncated_series(tbl.eps[g], tbl.betas, order) == cone_series_by_slacks(A, T, tbl.alpha, order)


def test_unimodular_piece_is_the_constant_one_on_orthant():
    # {x : -x <= T} for n = 1: count of x >= -T truncated by the Brion partner
    piece = constant_term_piece([[1]], [1])
    assert piece.period_product == 1
    lower = orient_piece([[-1]], [1])
    # vertex cones of [0, t]: {x <= t} and {-x <= 0}
    for t in range(0, 6):
        assert piece.value([t]) + lower.value([0]) == t + 1


def test_segment_with_step_two():
    # {0 <= 2x <= t}: floor(t/2) + 1 points
    c = [1]
    up = orient_piece([[2]], c)
    down = orient_piece([[-2]], c)
    for t in range(0, 12):
        assert up.value([t]) + down.value([0]) == t // 2 + 1
    assert up.piece.period_product == 2


def test_piece_degree_and_table_shape():
    A = [[1, 2], [3, -1]]
    c = [1, 1]
    op = orient_piece(A, c)
    assert len(op.piece.tables) == abs(determinant(A))
    assert all(len(v) == 3 for v in op.piece.tables.values())
    assert math.prod(op.piece.diag) == abs(determinant(A))
