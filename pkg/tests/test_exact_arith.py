from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, settings, strategies as st

from latcount.exact_arith import (
    DegenerateInputError, SingularMatrixError, adjugate_columns, determinant, hnf_row, integer_denominator, inverse_rational,
    matmul, matvec, nullspace, rank, rational_denominator, smith_normal_form, solve_rational, vec_gcd,
)


def leibniz_det(M):
    n = len(M)
    total = 0
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = (-1) ** inv
        for i in range(n):
            term *= M[i][perm[i]]
        total += term
    return total


def square(n_max=4, lo=-6, hi=6):
    return st.integers(1, n_max).flatmap(
        lambda n: st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=n, max_size=n))


def matrices(r_max=4, c_max=4, lo=-6, hi=6):
    return st.tuples(st.integers(1, r_max), st.integers(1, c_max)).flatmap(
        lambda rc: st.lists(st.lists(st.integers(lo, hi), min_size=rc[1], max_size=rc[1]),
                            min_size=rc[0], max_size=rc[0]))


@settings(max_examples=150, deadline=None)
@given(square())
def test_determinant_matches_permutation_expansion(M):
    assert determinant(M) == leibniz_det(M)


def test_determinant_known_values():
    assert determinant([[2, 1], [1, 1]]) == 1
    assert determinant([[0, 1], [1, 0]]) == -1
    assert determinant([[1, 2], [2, 4]]) == 0


@settings(max_examples=100, deadline=None)
@given(square())
def test_inverse_and_adjugate(M):
    d = determinant(M)
    if d == 0:
        with pytest.raises(SingularMatrixError):
            adjugate_columns(M)
        return
    inv = inverse_rational(M)
    n = len(M)
    assert matmul(M, inv) == [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    absdet, H = adjugate_columns(M)
    assert absdet == abs(d)
    assert matmul(M, H) == [[d * int(i == j) for j in range(n)] for i in range(n)]


@settings(max_examples=100, deadline=None)
@given(square(), st.lists(st.integers(-9, 9), min_size=4, max_size=4))
def test_solve_rational(M, rhs):
    if determinant(M) == 0:
        return
    b = rhs[:len(M)]
    assert matvec(M, solve_rational(M, b)) == b


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_nullspace_dimension_and_kernel(M):
    n = len(M[0])
    ker = nullspace(M, n)
    assert len(ker) == n - rank(M)
    for v in ker:
        assert all(x == 0 for x in matvec(M, v))


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_smith_normal_form_properties(M):
    sf = smith_normal_form(M)
    assert matmul(matmul(sf.P, M), sf.Q) == sf.S
    assert abs(determinant(sf.P)) == 1
    assert abs(determinant(sf.Q)) == 1
    r, c = len(M), len(M[0])
    diag = [sf.S[i][i] for i in range(min(r, c))]
    for i in range(r):
        for j in range(c):
            if i != j:
                assert sf.S[i][j] == 0
    assert all(d >= 0 for d in diag)
    nz = [d for d in diag if d]
    assert diag[:len(nz)] == nz  # nonzero entries come first
    for a, b in zip(nz, nz[1:]):
        assert b % a == 0
    assert len(nz) == rank(M)


def test_smith_normal_form_example():
    sf = smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert sf.diagonal == [2, 6, 12]


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(-12, 12), min_size=1, max_size=4))
def test_hnf_row(v):
    if not any(v):
        with pytest.raises(DegenerateInputError):
            hnf_row(v)
        return
    H, Q = hnf_row(v)
    assert H[1:] == [0] * (len(v) - 1)
    assert H[0] == vec_gcd(v)
    assert abs(determinant(Q)) == 1
    assert matvec([list(r) for r in zip(*Q)], H) == v  # v = H Q as a row vector


def test_denominators():
    vals = [Fraction(1, 2), Fraction(2, 3), Fraction(0)]
    assert integer_denominator(vals) == 6
    assert rational_denominator(vals) == 6
    assert rational_denominator([Fraction(4, 3), Fraction(2)]) == Fraction(3, 2)
    assert rational_denominator([Fraction(0)]) == 1
