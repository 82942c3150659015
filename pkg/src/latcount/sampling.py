"""Random instances and parameter samples shared by selftest and the test suites."""
from __future__ import annotations

import random
from fractions import Fraction

from .chambers import OUTSIDE
from .counting import enumerate_vertices_by_bases
from .polyhedron import ParametricSystem, recession_cone_is_zero


def random_fixed_system(rng: random.Random, n_max: int = 3, m_max: int = 7, lo: int = -4, hi: int = 4,
                        bounded: bool | None = None, nonempty: bool = False):
    """(A, b) with entries in [lo, hi].

    bounded=True rejects until {A x <= 0} = {0}; nonempty=True additionally
    rejects systems without a rational point (decided by vertex enumeration).
    """
    while True:
        n = rng.randint(1, n_max)
        m = rng.randint(1, m_max)
        A = [[rng.randint(lo, hi) for _ in range(n)] for _ in range(m)]
        if bounded and not recession_cone_is_zero(A):
            continue
        b = [rng.randint(lo, hi) for _ in range(m)]
        if nonempty and bounded and not enumerate_vertices_by_bases(A, b):
            continue
        return A, b


def random_parametric_system(rng: random.Random, nx_max: int = 3, ny_max: int = 2, m_max: int = 6,
                             lo: int = -3, hi: int = 3) -> ParametricSystem:
    """Canonical system whose fibers are bounded ({A x <= 0} = {0}); P may still be empty."""
    while True:
        nx = rng.randint(1, nx_max)
        ny = rng.randint(1, ny_max)
        m = rng.randint(nx + 1, max(nx + 1, m_max))
        A = [[rng.randint(lo, hi) for _ in range(nx)] for _ in range(m)]
        if not recession_cone_is_zero(A):
            continue
        B = [[rng.randint(lo, hi) for _ in range(ny)] for _ in range(m)]
        b = [rng.randint(lo, hi) for _ in range(m)]
        return ParametricSystem.make(A, B, b, n_y=ny)


def sample_parameters(rep, rng: random.Random, radius: int = 6, tries: int = 400, min_ints: int = 9,
                      min_rats: int = 4):
    """Distinct integer and non-integer rational parameter points, preferring points of the projection.

    Returns (integer_points, rational_points) with at least min_ints and
    min_rats entries. Chamber witnesses are included so that lower-dimensional
    chambers are exercised. If the projection is too thin, the lists are padded
    with points drawn from a widening box, which may lie outside it.
    """
    n_y = rep.system.n_y
    ints: dict = {}
    rats: dict = {}
    for cr in rep.chambers:
        w = tuple(cr.chamber.witness)
        if max((abs(v) for v in w), default=0) > 4 * radius:
            continue
        (ints if all(v.denominator == 1 for v in w) else rats)[w] = None
    for _ in range(tries):
        y = tuple(Fraction(rng.randint(-radius, radius)) for _ in range(n_y))
        if rep.lookup(y) is not OUTSIDE:
            ints[y] = None
        if len(ints) >= min_ints + 3:
            break
    for _ in range(tries):
        y = tuple(Fraction(rng.randint(-radius * 4, radius * 4), rng.randint(2, 5)) for _ in range(n_y))
        if all(v.denominator == 1 for v in y):
            continue
        if rep.lookup(y) is not OUTSIDE:
            rats[y] = None
        if len(rats) >= min_rats + 4:
            break
    r = radius
    while len(ints) < min_ints:
        ints[tuple(Fraction(rng.randint(-r, r)) for _ in range(n_y))] = None
        r += 1
    while len(rats) < min_rats:
        rats[tuple(Fraction(2 * rng.randint(-r, r) + 1, 2) for _ in range(n_y))] = None
        r += 1
    return [list(y) for y in ints], [list(y) for y in rats]
