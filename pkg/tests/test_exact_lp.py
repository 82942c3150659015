from fractions import Fraction
from itertools import combinations

from hypothesis import given, settings, strategies as st

from latcount import exact_lp
from latcount.exact_arith import determinant, solve_rational


def vertex_optimum(c, A, b):
    """Best objective over all basic feasible points of a bounded {A x <= b}."""
    n = len(c)
    best = None
    for B in combinations(range(len(A)), n):
        M = [A[i] for i in B]
        if determinant(M) == 0:
            continue
        x = solve_rational(M, [b[i] for i in B])
        if all(sum(a * v for a, v in zip(row, x)) <= bi for row, bi in zip(A, b)):
            val = sum(ci * xi for ci, xi in zip(c, x))
            best = val if best is None else max(best, val)
    return best


def test_free_variables_case():
    # x1 >= 1, x2 <= -1 has feasible points with a negative coordinate
    status, _, x = exact_lp.maximize([0, 0], [[-1, 0], [0, 1]], [-1, -1], nvars=2)
    assert status == exact_lp.OPTIMAL
    assert x[0] >= 1 and x[1] <= -1


def test_infeasible_and_unbounded():
    assert exact_lp.maximize([1], [[1], [-1]], [0, -1], nvars=1)[0] == exact_lp.INFEASIBLE
    assert exact_lp.maximize([1], [[-1]], [0], nvars=1)[0] == exact_lp.UNBOUNDED


def test_equalities():
    status, val, x = exact_lp.maximize([1, 1], [[1, 0], [0, 1]], [5, 5], [[1, -1]], [Fraction(1, 2)], nvars=2)
    assert status == exact_lp.OPTIMAL
    assert val == Fraction(19, 2)
    assert x[0] - x[1] == Fraction(1, 2)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(
    st.lists(st.integers(-3, 3), min_size=n, max_size=n),
    st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=0, max_size=4),
    st.lists(st.integers(-5, 5), min_size=4, max_size=4))))
def test_optimum_matches_vertex_scan(data):
    c, extra, rhs = data
    n = len(c)
    # box rows keep the region bounded so that the optimum sits at a vertex
    A = [[int(i == j) for j in range(n)] for i in range(n)] + [[-int(i == j) for j in range(n)] for i in range(n)]
    b = [4] * (2 * n)
    A += extra
    b += rhs[:len(extra)]
    status, val, x = exact_lp.maximize(c, A, b, nvars=n)
    expect = vertex_optimum(c, A, b)
    if expect is None:
        assert status == exact_lp.INFEASIBLE
    else:
        assert status == exact_lp.OPTIMAL
        assert val == expect
        assert all(sum(a * v for a, v in zip(row, x)) <= bi for row, bi in zip(A, b))


def test_interior_point_strictness():
    # 0 < x < 1 strictly, and x = 1 exactly is infeasible for the strict version
    x = exact_lp.interior_point([[1], [-1]], [1, 0], [True, True], nvars=1)
    assert 0 < x[0] < 1
    assert exact_lp.interior_point([[1], [-1]], [0, 0], [True, False], nvars=1) is None
