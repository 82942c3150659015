import json
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from latcount.chambers import OUTSIDE
from latcount.counting import BudgetError, brute_force_count, enumerate_vertices_by_bases
from latcount.param_count import (
    DomainError, InvariantViolation, UnsupportedInstanceError, build_representation, chamber_coefficients,
    complete_integer_ehrhart, ehrhart_coefficient, evaluate, evaluate_integer, load_representation, multi_indices,
    periodicity_check, quasi_polynomial_value, representation_from_json, representation_to_json,
    save_representation,
)
from latcount.polyhedron import ParametricSystem
from latcount.sampling import random_parametric_system, sample_parameters


def segment():
    return ParametricSystem.make([[-1], [1]], [[0], [1]], [0, 0])  # 0 <= x <= y


def half_segment():
    return ParametricSystem.make([[-2], [2]], [[0], [1]], [0, 0])  # 0 <= 2x <= y


def simplex(n):
    # x >= 0, sum x <= t
    A = [[-int(i == j) for j in range(n)] for i in range(n)] + [[1] * n]
    return ParametricSystem.make(A, [[0]] * n + [[1]], [0] * (n + 1))


def test_segment():
    rep = build_representation(segment())
    assert evaluate(rep, [Fraction(7, 2)]) == 4
    assert evaluate(rep, [0]) == 1
    assert evaluate(rep, [-1]) is OUTSIDE
    cr = rep.lookup([3])
    assert ehrhart_coefficient(rep, cr, [0], [3]) == 1
    assert ehrhart_coefficient(rep, cr, [1], [3]) == 1


def test_half_segment_is_period_two():
    rep = build_representation(half_segment())
    for t in range(0, 20):
        assert evaluate(rep, [t]) == t // 2 + 1
    cr = rep.lookup([5])
    assert cr.chamber.denominators(rep.system)[0] == 2
    assert ehrhart_coefficient(rep, cr, [1], [4]) == Fraction(1, 2)
    assert ehrhart_coefficient(rep, cr, [0], [4]) == 1
    assert ehrhart_coefficient(rep, cr, [0], [5]) == Fraction(1, 2)
    tables = complete_integer_ehrhart(rep)
    assert tables[cr.chamber.ident].modulus == 2
    for t in range(0, 20):
        assert evaluate_integer(rep, tables, [t]) == t // 2 + 1


@pytest.mark.parametrize("n", [1, 2, 3])
def test_simplex_dilations(n):
    rep = build_representation(simplex(n))
    for t in range(0, 9):
        assert evaluate(rep, [t]) == math.comb(t + n, n)
    cr = rep.lookup([1])
    assert ehrhart_coefficient(rep, cr, [n], [1]) == Fraction(1, math.factorial(n))


def test_quasi_polynomial_reproduces_counts():
    rep = build_representation(half_segment())
    for y in [Fraction(v, 3) for v in range(0, 40)]:
        cr = rep.lookup([y])
        assert quasi_polynomial_value(chamber_coefficients(rep, cr, [y]), [y]) == evaluate(rep, [y])


def test_domain_error_outside_chamber():
    sys = ParametricSystem.make([[-1], [1], [1]], [[0, 0], [1, 0], [0, 1]], [0, 0, 0])
    rep = build_representation(sys)
    cr = rep.lookup([3, 1])
    with pytest.raises(DomainError):
        ehrhart_coefficient(rep, cr, [0, 0], [1, 3])
    with pytest.raises(ValueError):
        ehrhart_coefficient(rep, cr, [2, 0], [3, 1])


def test_unsupported_instances():
    with pytest.raises(UnsupportedInstanceError):
        build_representation(ParametricSystem.make([[-1]], [[0]], [0]))  # unbounded
    with pytest.raises(UnsupportedInstanceError):
        build_representation(ParametricSystem.make([[1], [-1]], [[0], [0]], [0, -1]))  # empty


def test_multi_indices_order():
    assert multi_indices(2, 2) == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


def test_json_round_trip(tmp_path):
    sys = ParametricSystem.make([[-1, 0], [0, -1], [1, 2], [2, 1]], [[0, 0], [0, 0], [1, 0], [0, 1]], [0, 0, 0, 0])
    rep = build_representation(sys)
    path = tmp_path / "rep.json"
    save_representation(rep, str(path))
    again = load_representation(str(path))
    assert representation_to_json(again) == representation_to_json(rep)
    for y in [(3, 4), (Fraction(5, 2), 7), (0, 0), (-1, 2), (6, 1)]:
        assert evaluate(again, y) == evaluate(rep, y)
    with pytest.raises(ValueError):
        representation_from_json({**json.loads(path.read_text()), "schema": 99})


def test_threads_give_identical_output():
    sys = ParametricSystem.make([[-1, 0], [0, -1], [1, 1], [1, -1]], [[0, 0], [0, 0], [1, 0], [0, 1]], [0, 0, 0, 0])
    one = representation_to_json(build_representation(sys, threads=1))
    two = representation_to_json(build_representation(sys, threads=2))
    assert one == two


def test_periodicity_on_half_segment():
    rep = build_representation(half_segment())
    cr = rep.lookup([3])
    verdict = periodicity_check(rep, cr, [3], [Fraction(7, 3)])
    assert verdict.passed
    assert verdict.chdenom_Q == 2  # the vertex y/2 needs a factor 2
    assert verdict.q_shift == 6


def _fiber_count(sys, y):
    if not enumerate_vertices_by_bases(sys.A, sys.rhs(y)):
        return OUTSIDE
    return brute_force_count(sys.A, sys.rhs(y))


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_systems_match_brute_force(seed):
    rng = random.Random(seed)
    sys = random_parametric_system(rng, nx_max=2, ny_max=2, m_max=5)
    try:
        rep = build_representation(sys, seed=seed)
    except UnsupportedInstanceError:
        return
    ints, rats = sample_parameters(rep, rng, radius=4)
    tables = complete_integer_ehrhart(rep)
    for y in ints + rats:
        try:
            expected = _fiber_count(sys, y)
        except BudgetError:
            continue
        assert evaluate(rep, y) == expected
        if all(v.denominator == 1 for v in y):
            assert evaluate_integer(rep, tables, y) == expected
        cr = rep.lookup(y)
        if cr is not OUTSIDE:
            assert quasi_polynomial_value(chamber_coefficients(rep, cr, y), y) == expected


def test_invariant_violation_is_assertion():
    assert issubclass(InvariantViolation, AssertionError)


def test_lazy_tables_match_eager_tables():
    sys = ParametricSystem.make([[-1, 0], [0, -1], [3, 2], [1, 3]], [[0, 0], [0, 0], [1, 0], [0, 1]], [0, 0, 0, 0])
    rep = build_representation(sys)
    eager = complete_integer_ehrhart(rep, eager_limit=10 ** 9)
    lazy = complete_integer_ehrhart(rep, eager_limit=0)
    for e, l in zip(eager, lazy):
        assert l.materialize(2) == e.tables
    for y in [(5, 7), (0, 0), (11, 3), (2, 13)]:
        assert evaluate_integer(rep, complete_integer_ehrhart(rep, eager_limit=0), y) == evaluate(rep, y)


def test_zero_dimensional_chamber_table_uses_residue():
    # the fiber is a single point only at y = -3; its side conditions hold only there
    sys = ParametricSystem.make([[-3], [-2], [1], [-1]], [[1], [0], [-1], [-1]], [0, -1, -2, 3])
    rep = build_representation(sys)
    tables = complete_integer_ehrhart(rep)
    for y in range(-10, 3):
        assert evaluate_integer(rep, tables, [y]) == evaluate(rep, [y])
