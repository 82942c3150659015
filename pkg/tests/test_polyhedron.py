import json
import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from latcount.counting import INFINITE, brute_force_count
from latcount.exact_arith import rank
from latcount.polyhedron import (
    STANDARD, NormalizationSignal, ParametricSystem, bound_parametrically, eliminate_lines, ensure_full_dim,
    fourier_motzkin, implicit_equalities, parameter_projection, recession_cone_is_zero, recession_rays,
    reduce_fiber_dimension, reduce_parametric_rank, remove_redundant, standard_to_canonical, system_from_json,
    system_to_json,
)


def fiber_count(sys, y):
    """Brute-force count of the canonical fiber at y, honouring side conditions."""
    if not sys.conditions_hold(y):
        return 0
    if sys.n_x == 0:
        return int(all(r >= 0 for r in sys.rhs(y)))
    return brute_force_count(sys.A, sys.rhs(y))


def standard_count(A, B, b, y, bound):
    """Literal count of x in [0, bound]^n with A x = b + B y."""
    n = len(A[0])
    rhs = [bi + sum(v * t for v, t in zip(row, y)) for bi, row in zip(b, B)]
    return sum(1 for x in product(range(bound + 1), repeat=n)
               if all(sum(a * v for a, v in zip(row, x)) == r for row, r in zip(A, rhs)))


def test_make_validates_shapes():
    with pytest.raises(ValueError):
        ParametricSystem.make([[1, 0], [1]], [[0], [0]], [0, 0])
    with pytest.raises(ValueError):
        ParametricSystem.make([[1]], [[0]], [0, 1])


def test_json_round_trip(tmp_path):
    sys = ParametricSystem.make([[1, 0], [0, -1]], [[Fraction(1, 2)], [0]], [3, Fraction(-1, 3)])
    again = system_from_json(json.loads(json.dumps(system_to_json(sys))))
    assert again == sys


def test_malformed_json():
    with pytest.raises(ValueError):
        system_from_json({"A": [[1]], "b": ["x"]})


def test_fourier_motzkin_triangle():
    # 0 <= y, 0 <= x <= y, y <= 3: projection on y is [0, 3]
    rows = [[-1, 0], [1, -1], [0, 1], [0, -1]]
    rhs = [0, 0, 3, 0]
    out_rows, out_rhs = fourier_motzkin(rows, rhs, [0])
    lo = max(-h / r[0] for r, h in zip(out_rows, out_rhs) if r[0] < 0)
    hi = min(h / r[0] for r, h in zip(out_rows, out_rhs) if r[0] > 0)
    assert (lo, hi) == (0, 3)
    assert fourier_motzkin([[1], [-1]], [0, -1], [0]) is None


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=2, max_size=6),
       st.lists(st.integers(-3, 3), min_size=6, max_size=6))
def test_projection_matches_fiber_emptiness(rows, rhs):
    # A x <= b + B y with one x and two y
    A = [[r[0]] for r in rows]
    B = [[-r[1], -r[2]] for r in rows]
    sys = ParametricSystem.make(A, B, rhs[:len(rows)])
    proj = parameter_projection(sys)
    for y in product(range(-3, 4), repeat=2):
        rhs_y = sys.rhs(y)
        lo = max([Fraction(h) / a[0] for a, h in zip(A, rhs_y) if a[0] < 0], default=None)
        hi = min([Fraction(h) / a[0] for a, h in zip(A, rhs_y) if a[0] > 0], default=None)
        zero_ok = all(h >= 0 for a, h in zip(A, rhs_y) if a[0] == 0)
        nonempty = zero_ok and (lo is None or hi is None or lo <= hi)
        inside = proj is not None and all(sum(g * v for g, v in zip(G, y)) <= h for G, h in zip(*proj))
        assert nonempty == inside


def test_remove_redundant():
    rows, rhs = remove_redundant([[1, 0], [1, 0], [0, 1], [1, 1]], [1, 2, 1, 5])
    assert sorted(zip(map(tuple, rows), rhs)) == [((0, 1), 1), ((1, 0), 1)]


def test_implicit_equalities():
    assert implicit_equalities([[1, 0], [-1, 0], [0, 1], [0, -1]], [1, -1, 3, 0]) == [0, 1]
    assert implicit_equalities([[1], [-1]], [0, -1]) is None


def test_recession():
    assert recession_cone_is_zero([[1, 0], [0, 1], [-1, -1]])
    assert not recession_cone_is_zero([[1, 0], [0, 1]])
    assert recession_rays([[-1, 0], [0, -1]]) == [(0, 1), (1, 0)]


def test_standard_to_canonical_counts():
    rng = random.Random(3)
    for _ in range(25):
        n, m = rng.randint(2, 3), rng.randint(1, 2)
        A = [[rng.randint(1, 3) for _ in range(n)]] + [[rng.randint(-2, 2) for _ in range(n)] for _ in range(m - 1)]
        B = [[rng.randint(-1, 2)] for _ in range(m)]
        b = [rng.randint(0, 4) for _ in range(m)]
        std = ParametricSystem.make(A, B, b, form=STANDARD)
        can = standard_to_canonical(std)
        for y in range(0, 5):
            bound = max(0, b[0] + B[0][0] * y)
            assert fiber_count(can, [y]) == standard_count(A, B, b, [y], bound)


def test_reduce_parametric_rank():
    sys = ParametricSystem.make([[1], [-1]], [[1, 2], [0, 0]], [0, 0])
    red, M = reduce_parametric_rank(sys)
    assert red.n_y == 1
    for y in product(range(-2, 3), repeat=2):
        y2 = [sum(a * v for a, v in zip(row, y)) for row in M]
        assert fiber_count(sys, list(y)) == fiber_count(red, y2)


def test_reduce_fiber_dimension_preserves_counts():
    # x1 + 2 x2 = y (as two inequalities), 0 <= x1, x2
    sys = ParametricSystem.make([[1, 2], [-1, -2], [-1, 0], [0, -1]], [[1], [-1], [0], [0]], [0, 0, 0, 0])
    red = reduce_fiber_dimension(sys, [4])
    assert red.system.n_x == 1
    for y in [Fraction(v, 2) for v in range(-2, 20)]:
        assert fiber_count(red.system, [y]) == fiber_count(sys, [y])
    # lifted points satisfy the original system
    y = [6]
    for t in range(-10, 10):
        if red.system.conditions_hold(y) and all(
                sum(a * t for a in row) <= r for row, r in zip(red.system.A, red.system.rhs(y))):
            x = red.lift([t], y)
            assert sys.contains(x, y)


def test_ensure_full_dim_adds_no_integer_points():
    sys = ParametricSystem.make([[1], [-1]], [[1], [-1]], [0, 0])  # x = y
    relaxed, trace = ensure_full_dim(sys)
    assert trace.epsilon_relaxations
    for y in range(-3, 4):
        assert fiber_count(relaxed, [y]) == fiber_count(sys, [y]) == 1


def test_eliminate_lines_keeps_feasibility():
    sys = ParametricSystem.make([[1, -1], [-1, 1]], [[1], [0]], [0, 0])  # 0 <= x1 - x2 <= y
    out, I, alphas, witnesses = eliminate_lines(sys)
    assert rank(out.A) == 2
    for y in range(-2, 3):
        before = brute_force_count(sys.A, sys.rhs([y]))
        after = brute_force_count(out.A, out.rhs([y]))
        assert (before == 0) == (after == 0)
    with pytest.raises(NormalizationSignal):
        eliminate_lines(ParametricSystem.make([[1], [-1]], [[0], [0]], [1, 1]))


def test_bound_parametrically_keeps_feasibility():
    sys = ParametricSystem.make([[-1, 0], [0, -1], [1, -1]], [[0], [0], [1]], [0, 0, -1])
    out, rec = bound_parametrically(sys)
    assert recession_cone_is_zero(out.A)
    for y in range(-3, 4):
        before = brute_force_count(sys.A, sys.rhs([y]))
        after = brute_force_count(out.A, out.rhs([y, rec.g([y])]))
        assert before is INFINITE or before == 0
        assert (before == 0) == (after == 0)
