"""Parametric systems {x : A x <= b + B y} and their normalizations.

Every normalization here is a pure function returning a new system plus the
record needed to translate queries on the original system.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from . import exact_lp
from .exact_arith import (
    as_int, clear_denominators, fraction_str, hnf_row, inverse_rational,
    matmul, matvec, nullspace, rank, rref, smith_normal_form, to_fraction, vec_gcd,
)

CANONICAL = "canonical"
STANDARD = "standard"


class NormalizationSignal(Exception):
    """Raised when a normalization does not apply (the no-op cases)."""


@dataclass(frozen=True)
class Condition:
    """A side condition on y.

    kind "integral": coeffs.y + const must be an integer.
    kind "zero": coeffs.y + const must vanish.
    kind "nonneg": coeffs.y + const must be >= 0.
    """

    kind: str
    coeffs: tuple[Fraction, ...]
    const: Fraction

    def value(self, y: Sequence[Fraction]) -> Fraction:
        return sum((c * yi for c, yi in zip(self.coeffs, y)), Fraction(0)) + self.const

    def holds(self, y: Sequence[Fraction]) -> bool:
        v = self.value(y)
        if self.kind == "integral":
            return v.denominator == 1
        if self.kind == "zero":
            return v == 0
        return v >= 0


@dataclass(frozen=True)
class ParametricSystem:
    """{x : A x <= b + B y} (canonical) or {x >= 0 : A x = b + B y} (standard).

    ``conditions`` are extra predicates on y that must hold for a fiber to be
    nonempty; they arise from form conversion and dimension reduction.
    """

    A: tuple[tuple[int, ...], ...]
    B: tuple[tuple[Fraction, ...], ...]
    b: tuple[Fraction, ...]
    n_x: int
    n_y: int
    form: str = CANONICAL
    conditions: tuple[Condition, ...] = ()

    @staticmethod
    def make(A, B, b, n_y: int | None = None, form: str = CANONICAL, conditions=()):
        A_t = tuple(tuple(as_int(a) for a in row) for row in A)
        m = len(A_t)
        if n_y is None:
            n_y = len(B[0]) if B and len(B) else 0
        B_t = tuple(tuple(to_fraction(v) for v in row) for row in B) if B else tuple(() for _ in range(m))
        if not B_t:
            B_t = tuple(() for _ in range(m))
        n_x = len(A_t[0]) if m else 0
        b_t = tuple(to_fraction(v) for v in b)
        if len(B_t) != m or len(b_t) != m:
            raise ValueError("A, B, b have inconsistent row counts")
        if any(len(row) != n_y for row in B_t) or any(len(row) != n_x for row in A_t):
            raise ValueError("ragged A or B")
        if form not in (CANONICAL, STANDARD):
            raise ValueError(f"unknown form {form!r}")
        return ParametricSystem(A_t, B_t, b_t, n_x, n_y, form, tuple(conditions))

    @property
    def m(self) -> int:
        return len(self.A)

    def rhs(self, y: Sequence) -> list[Fraction]:
        """b + B y for a concrete parameter vector."""
        y = [to_fraction(v) for v in y]
        if len(y) != self.n_y:
            raise ValueError(f"expected {self.n_y} parameters, got {len(y)}")
        return [bi + sum((Bij * yj for Bij, yj in zip(row, y)), Fraction(0))
                for bi, row in zip(self.b, self.B)]

    def conditions_hold(self, y: Sequence) -> bool:
        y = [to_fraction(v) for v in y]
        return all(c.holds(y) for c in self.conditions)

    def contains(self, x: Sequence, y: Sequence) -> bool:
        r = self.rhs(y)
        if self.form == STANDARD:
            return all(xi >= 0 for xi in x) and all(
                sum(a * xi for a, xi in zip(row, x)) == ri for row, ri in zip(self.A, r))
        return all(sum(a * xi for a, xi in zip(row, x)) <= ri for row, ri in zip(self.A, r))


@dataclass
class NormalizationTrace:
    """What was done to a system, so that queries can be replayed."""

    dropped_B_columns: list[int] = field(default_factory=list)
    parameter_map: list[list[Fraction]] | None = None
    epsilon_relaxations: list[tuple[int, Fraction]] = field(default_factory=list)
    line_elimination: dict | None = None
    bounding: "BoundingRecord | None" = None
    fiber_reduction: list[dict] = field(default_factory=list)
    empty: bool = False

    def to_json(self) -> dict:
        out = {
            "dropped_B_columns": self.dropped_B_columns,
            "parameter_map": None if self.parameter_map is None else
            [[fraction_str(v) for v in row] for row in self.parameter_map],
            "epsilon_relaxations": [[j, fraction_str(e)] for j, e in self.epsilon_relaxations],
            "line_elimination": self.line_elimination,
            "bounding": None if self.bounding is None else self.bounding.to_json(),
            "fiber_reduction": self.fiber_reduction,
            "empty": self.empty,
        }
        return out

    @staticmethod
    def from_json(d: dict) -> "NormalizationTrace":
        tr = NormalizationTrace()
        tr.dropped_B_columns = list(d.get("dropped_B_columns", []))
        pm = d.get("parameter_map")
        tr.parameter_map = None if pm is None else [[Fraction(v) for v in row] for row in pm]
        tr.epsilon_relaxations = [(int(j), Fraction(e)) for j, e in d.get("epsilon_relaxations", [])]
        tr.line_elimination = d.get("line_elimination")
        bd = d.get("bounding")
        tr.bounding = None if bd is None else BoundingRecord.from_json(bd)
        tr.fiber_reduction = list(d.get("fiber_reduction", []))
        tr.empty = bool(d.get("empty", False))
        return tr

    def map_query(self, y: Sequence) -> list[Fraction]:
        """Translate an original parameter vector into the normalized system's parameters."""
        y = [to_fraction(v) for v in y]
        if self.parameter_map is not None:
            y = [sum((a * v for a, v in zip(row, y)), Fraction(0)) for row in self.parameter_map]
        if self.bounding is not None:
            y = y + [Fraction(self.bounding.g(y))]
        return y


# ---------------------------------------------------------------- JSON format

def system_to_json(sys: ParametricSystem) -> dict:
    out = {
        "form": sys.form,
        "A": [[str(a) for a in row] for row in sys.A],
        "B": [[fraction_str(v) for v in row] for row in sys.B],
        "b": [fraction_str(v) for v in sys.b],
    }
    if sys.n_y and not sys.m:
        out["n_y"] = sys.n_y
    if sys.conditions:
        out["conditions"] = [
            {"kind": c.kind, "coeffs": [fraction_str(v) for v in c.coeffs], "const": fraction_str(c.const)}
            for c in sys.conditions]
    return out


def system_from_json(d: dict) -> ParametricSystem:
    try:
        form = d.get("form", CANONICAL)
        A = [[as_int(a) for a in row] for row in d["A"]]
        b = [to_fraction(v) for v in d["b"]]
        B = d.get("B")
        if B is None or len(B) == 0:
            n_y = int(d.get("n_y", 0))
            B = [[Fraction(0)] * n_y for _ in A]
        else:
            B = [[to_fraction(v) for v in row] for row in B]
            n_y = len(B[0]) if B else int(d.get("n_y", 0))
        conds = tuple(
            Condition(c["kind"], tuple(to_fraction(v) for v in c["coeffs"]), to_fraction(c["const"]))
            for c in d.get("conditions", []))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed system JSON: {exc}") from exc
    return ParametricSystem.make(A, B, b, n_y=n_y, form=form, conditions=conds)


def load_system(path: str) -> ParametricSystem:
    with open(path) as fh:
        return system_from_json(json.load(fh))


def dump_system(sys: ParametricSystem, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(system_to_json(sys), fh, indent=1)


# ---------------------------------------------------------------- helpers

def _rows_xy(sys: ParametricSystem) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Rows of P in (x, y)-space: [A | -B] (x, y) <= b."""
    rows = [[Fraction(a) for a in arow] + [-v for v in brow] for arow, brow in zip(sys.A, sys.B)]
    return rows, list(sys.b)


def normalize_row(row: Sequence, rhs) -> tuple[tuple[int, ...], Fraction]:
    """Scale an inequality to coprime integer coefficients (rhs may stay rational)."""
    ints, d = clear_denominators(row)
    g = vec_gcd(ints)
    if g == 0:
        return tuple(0 for _ in row), to_fraction(rhs)
    return tuple(a // g for a in ints), to_fraction(rhs) * d / g


def fourier_motzkin(rows: Sequence[Sequence], rhs: Sequence, eliminate: Sequence[int],
                    prune: bool = True) -> tuple[list[tuple], list[Fraction]] | None:
    """Project {z : rows z <= rhs} by eliminating the listed coordinates.

    Returns (rows, rhs) over the kept coordinates (in original order), or None
    if the polyhedron is empty. Redundant rows are removed by exact LP.
    """
    keep = [i for i in range(len(rows[0]) if rows else 0) if i not in set(eliminate)]
    cur = [normalize_row(r, h) for r, h in zip(rows, rhs)]
    cur_rows = [list(map(Fraction, r)) for r, _ in cur]
    cur_rhs = [h for _, h in cur]
    for k in eliminate:
        pos = [i for i, r in enumerate(cur_rows) if r[k] > 0]
        neg = [i for i, r in enumerate(cur_rows) if r[k] < 0]
        zero = [i for i, r in enumerate(cur_rows) if r[k] == 0]
        new_rows = [cur_rows[i] for i in zero]
        new_rhs = [cur_rhs[i] for i in zero]
        for p in pos:
            for q in neg:
                a, c = cur_rows[p][k], -cur_rows[q][k]
                new_rows.append([c * u + a * v for u, v in zip(cur_rows[p], cur_rows[q])])
                new_rhs.append(c * cur_rhs[p] + a * cur_rhs[q])
        cur_rows, cur_rhs = _tidy(new_rows, new_rhs)
        if cur_rows is None:
            return None
        if prune:
            cur_rows, cur_rhs = remove_redundant(cur_rows, cur_rhs)
            if cur_rows is None:
                return None
    out_rows = [tuple(r[i] for i in keep) for r in cur_rows]
    return [tuple(int(v) for v in r) for r in out_rows], cur_rhs


def _tidy(rows, rhs):
    """Normalize rows, drop trivial ones and duplicates; None when infeasible."""
    seen = {}
    for r, h in zip(rows, rhs):
        nr, nh = normalize_row(r, h)
        if all(v == 0 for v in nr):
            if nh < 0:
                return None, None
            continue
        if nr not in seen or nh < seen[nr]:
            seen[nr] = nh
    keys = sorted(seen)
    return [list(map(Fraction, k)) for k in keys], [seen[k] for k in keys]


def remove_redundant(rows, rhs):
    """Drop inequalities implied by the others (exact LP per row)."""
    rows = list(rows)
    rhs = list(rhs)
    if not rows:
        return rows, rhs
    n = len(rows[0])
    status, _, _ = exact_lp.maximize([0] * n, rows, rhs, nvars=n)
    if status == exact_lp.INFEASIBLE:
        return None, None
    i = 0
    while i < len(rows):
        others = rows[:i] + rows[i + 1:]
        orhs = rhs[:i] + rhs[i + 1:]
        status, val, _ = exact_lp.maximize(rows[i], others, orhs, nvars=n)
        if status == exact_lp.OPTIMAL and val <= rhs[i]:
            rows, rhs = others, orhs
        else:
            i += 1
    return rows, rhs


def parameter_projection(sys: ParametricSystem):
    """H-description (G, h) of the projection of P onto y: {y : G y <= h}.

    Returns None when P is empty.
    """
    rows, rhs = _rows_xy(sys)
    if not rows:
        return [], []
    return fourier_motzkin(rows, rhs, list(range(sys.n_x)))


def fiber_is_empty(sys: ParametricSystem, y) -> bool:
    status, _, _ = exact_lp.maximize([0] * sys.n_x, sys.A, sys.rhs(y), nvars=sys.n_x)
    return status == exact_lp.INFEASIBLE


def implicit_equalities(A: Sequence[Sequence], b: Sequence) -> list[int] | None:
    """Rows j of {A z <= b} with A_j z = b_j on the whole polyhedron; None if empty."""
    n = len(A[0]) if A else 0
    status, _, _ = exact_lp.maximize([0] * n, A, b, nvars=n)
    if status == exact_lp.INFEASIBLE:
        return None
    out = []
    for j, row in enumerate(A):
        status, val, _ = exact_lp.maximize([-a for a in row], A, b, nvars=n)
        # minimum slack is b_j - max(A_j z); row is tight everywhere iff max(-A_j z) = -b_j
        if status == exact_lp.OPTIMAL and val == -to_fraction(b[j]):
            out.append(j)
    return out


def recession_cone_is_zero(A: Sequence[Sequence[int]]) -> bool:
    """True when {d : A d <= 0} = {0}, by an exhaustive basis ray scan."""
    n = len(A[0]) if A else 0
    if n == 0:
        return True
    if rank(A) < n:
        return False
    return not recession_rays(A)


def recession_rays(A: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Extreme rays of the pointed cone {d : A d <= 0} (primitive integer vectors)."""
    n = len(A[0])
    rays = set()
    for sub in combinations(range(len(A)), n - 1):
        M = [A[i] for i in sub]
        if n > 1 and rank(M) != n - 1:
            continue
        ker = nullspace(M, n) if n > 1 else [[Fraction(1)]]
        if len(ker) != 1:
            continue
        d, _ = clear_denominators(ker[0])
        g = vec_gcd(d)
        d = [v // g for v in d]
        for s in (1, -1):
            v = [s * x for x in d]
            if all(sum(a * x for a, x in zip(row, v)) <= 0 for row in A):
                rays.add(tuple(v))
    return sorted(rays)


# ---------------------------------------------------------------- normalizations

def standard_to_canonical(sys: ParametricSystem) -> ParametricSystem:
    """Convert {x >= 0 : A x = b + B y} into canonical form in fewer variables.

    Integer points correspond through x = U (z1(y), z2) with U unimodular; the
    divisibility and consistency requirements on y become ``conditions``.
    """
    if sys.form == CANONICAL:
        return sys
    n, n_y = sys.n_x, sys.n_y
    red, pivots = rref([list(map(Fraction, r)) for r in sys.A]) if sys.m else ([], [])
    k = len(pivots)
    conditions = list(sys.conditions)
    # dependent rows give consistency predicates: lambda (b + B y) = 0 with lambda A = 0
    aug = [[Fraction(a) for a in row] for row in sys.A]
    lam_basis = nullspace([list(col) for col in zip(*aug)], sys.m) if sys.m else []
    for lam in lam_basis:
        coeffs = tuple(sum((l * sys.B[i][t] for i, l in enumerate(lam)), Fraction(0)) for t in range(n_y))
        const = sum((l * sys.b[i] for i, l in enumerate(lam)), Fraction(0))
        conditions.append(Condition("zero", coeffs, const))
    # independent rows
    indep = _independent_rows(sys.A)
    A_k = [list(sys.A[i]) for i in indep]
    b_k = [sys.b[i] for i in indep]
    B_k = [list(sys.B[i]) for i in indep]
    if k == 0:
        A_new = [[-int(i == j) for j in range(n)] for i in range(n)]
        return ParametricSystem.make(A_new, [[Fraction(0)] * n_y for _ in range(n)],
                                     [Fraction(0)] * n, n_y=n_y, conditions=conditions)
    sf = smith_normal_form(A_k)
    U = sf.Q
    # A_k U = P^{-1} S = [H 0]; z1 = H^{-1}(b + B y) = D^{-1} P (b + B y)
    d = [sf.S[i][i] for i in range(k)]
    Pb = matvec(sf.P, b_k)
    PB = matmul(sf.P, B_k) if n_y else [[] for _ in range(k)]
    z1_const = [Fraction(Pb[i]) / d[i] for i in range(k)]
    z1_coef = [[Fraction(v) / d[i] for v in PB[i]] for i in range(k)]
    for i in range(k):
        if d[i] != 1:
            conditions.append(Condition("integral", tuple(z1_coef[i]), z1_const[i]))
    U1 = [row[:k] for row in U]
    U2 = [row[k:] for row in U]
    # x = U1 z1 + U2 z2 >= 0  <=>  -U2 z2 <= U1 z1
    A_new = [[-v for v in row] for row in U2]
    b_new = [sum((U1[r][i] * z1_const[i] for i in range(k)), Fraction(0)) for r in range(n)]
    B_new = [[sum((U1[r][i] * z1_coef[i][t] for i in range(k)), Fraction(0)) for t in range(n_y)]
             for r in range(n)]
    return ParametricSystem.make(A_new, B_new, b_new, n_y=n_y, conditions=conditions)


def _independent_rows(M) -> list[int]:
    chosen: list[int] = []
    for i, row in enumerate(M):
        if rank([M[j] for j in chosen] + [row]) > len(chosen):
            chosen.append(i)
    return chosen


def reduce_parametric_rank(sys: ParametricSystem):
    """Drop linearly dependent columns of B.

    Returns (sys', M) where the reduced parameters are y' = M y and the counting
    function of sys' at y' equals that of sys at y.
    """
    cols = [list(c) for c in zip(*sys.B)] if sys.n_y else []
    keep: list[int] = []
    for j, col in enumerate(cols):
        if rank([cols[i] for i in keep] + [col]) > len(keep):
            keep.append(j)
    if len(keep) == sys.n_y:
        return sys, [[Fraction(int(i == j)) for j in range(sys.n_y)] for i in range(sys.n_y)]
    # express every column in terms of the kept ones: B = B_keep M
    M = [[Fraction(0)] * sys.n_y for _ in keep]
    basis = [cols[i] for i in keep]
    for j, col in enumerate(cols):
        coeff = _express(basis, col)
        for r, cval in enumerate(coeff):
            M[r][j] = cval
    B_new = [[row[i] for i in keep] for row in sys.B]
    conds = tuple(_map_condition(c, M) for c in sys.conditions) if sys.conditions else ()
    if any(c is None for c in conds):
        raise NormalizationSignal("side conditions do not factor through the reduced parameters")
    out = ParametricSystem.make(sys.A, B_new, sys.b, n_y=len(keep), conditions=conds)
    return out, M


def _express(basis: list[list[Fraction]], col: list[Fraction]) -> list[Fraction]:
    """Coefficients c with sum c_i basis_i = col (basis linearly independent)."""
    if not basis:
        return []
    m = len(col)
    aug = [[basis[i][r] for i in range(len(basis))] + [col[r]] for r in range(m)]
    red, piv = rref(aug)
    out = [Fraction(0)] * len(basis)
    for r, p in enumerate(piv):
        if p < len(basis):
            out[p] = red[r][-1]
    return out


def _map_condition(c: Condition, M) -> Condition | None:
    # a condition on y survives only if its coefficients factor through y' = M y
    w = _express([list(r) for r in M], list(c.coeffs)) if M else []
    back = [sum((w[r] * M[r][j] for r in range(len(M))), Fraction(0)) for j in range(len(c.coeffs))]
    if back != list(c.coeffs):
        return None
    return Condition(c.kind, tuple(w), c.const)


def ensure_full_dim(sys: ParametricSystem) -> tuple[ParametricSystem, NormalizationTrace]:
    """Relax implicit equalities of P so that P becomes full-dimensional.

    Each implicit row, scaled to coprime integer coefficients with right-hand
    side beta, is loosened by (floor(beta) + 1 - beta) / 2, which is 1/2 for
    integral beta; no new integer point (x, y) appears.
    """
    trace = NormalizationTrace()
    rows, rhs = _rows_xy(sys)
    imp = implicit_equalities(rows, rhs) if rows else []
    if imp is None:
        trace.empty = True
        return sys, trace
    if not imp:
        return sys, trace
    A = [list(r) for r in sys.A]
    B = [list(r) for r in sys.B]
    b = list(sys.b)
    for j in imp:
        coeffs, beta = normalize_row(rows[j], rhs[j])
        eps = (math.floor(beta) + 1 - beta) / 2
        A[j] = [int(v) for v in coeffs[:sys.n_x]]
        B[j] = [-Fraction(v) for v in coeffs[sys.n_x:]]
        b[j] = beta + eps
        trace.epsilon_relaxations.append((j, eps))
    out = ParametricSystem.make(A, B, b, n_y=sys.n_y, conditions=sys.conditions)
    return out, trace


def eliminate_lines(sys: ParametricSystem):
    """Append sign constraints alpha_i x_i >= 0 so that fibers contain no lines.

    Returns (sys', I, alpha, witnesses). Raises NormalizationSignal when A has
    full column rank already.
    """
    n = sys.n_x
    r = rank(sys.A) if sys.m else 0
    if r == n:
        raise NormalizationSignal("A has full column rank; no lines to eliminate")
    basis_rows = [list(map(Fraction, sys.A[i])) for i in _independent_rows(sys.A)] if sys.m else []
    I: list[int] = []
    cur = list(basis_rows)
    for i in range(n):
        e = [Fraction(int(t == i)) for t in range(n)]
        if rank(cur + [e]) > len(cur):
            cur.append(e)
            I.append(i)
        if len(cur) == n:
            break
    # witness v^(i) in ker A with v_I = e_i
    ker = nullspace(sys.A, n) if sys.m else [[Fraction(int(s == t)) for t in range(n)] for s in range(n)]
    alphas: list[int] = []
    witnesses: list[list[int]] = []
    for i in I:
        target = [Fraction(int(t == i)) for t in I]
        coeff = _solve_in_span(ker, I, target)
        v = [sum((c * kv[t] for c, kv in zip(coeff, ker)), Fraction(0)) for t in range(n)]
        vi, _ = clear_denominators(v)
        witnesses.append(vi)
        alphas.append(1 if vi[i] > 0 else -1)
    A = [list(row) for row in sys.A]
    B = [list(row) for row in sys.B]
    b = list(sys.b)
    for i, a in zip(I, alphas):
        A.append([-a if t == i else 0 for t in range(n)])
        B.append([Fraction(0)] * sys.n_y)
        b.append(Fraction(0))
    out = ParametricSystem.make(A, B, b, n_y=sys.n_y, conditions=sys.conditions)
    return out, I, alphas, witnesses


def _solve_in_span(ker, I, target):
    # find coefficients c with (sum c_k ker_k)_I = target
    rows = [[kv[i] for kv in ker] + [t] for i, t in zip(I, target)]
    red, piv = rref(rows)
    out = [Fraction(0)] * len(ker)
    for r, p in enumerate(piv):
        if p < len(ker):
            out[p] = red[r][-1]
    return out


@dataclass(frozen=True)
class BoundingRecord:
    """Appended row c.x <= y_new and the bound g(y) used to fill y_new."""

    c: tuple[int, ...]
    A_max: int
    n_x: int
    b: tuple[Fraction, ...]
    B: tuple[tuple[Fraction, ...], ...]
    B_scale: int

    def g(self, y: Sequence) -> int:
        y = [to_fraction(v) for v in y]
        by = [math.floor(bi + sum((v * t for v, t in zip(row, y)), Fraction(0)))
              for bi, row in zip(self.b, self.B)]
        base = max([self.A_max] + [abs(v) for v in by])
        n = self.n_x
        root = math.isqrt(n ** n)
        if root * root < n ** n:
            root += 1
        return root * sum(abs(v) for v in self.c) * base ** n

    def to_json(self) -> dict:
        return {"c": [str(v) for v in self.c], "A_max": str(self.A_max), "n_x": self.n_x,
                "b": [fraction_str(v) for v in self.b],
                "B": [[fraction_str(v) for v in row] for row in self.B], "B_scale": str(self.B_scale)}

    @staticmethod
    def from_json(d: dict) -> "BoundingRecord":
        return BoundingRecord(tuple(int(v) for v in d["c"]), int(d["A_max"]), int(d["n_x"]),
                              tuple(Fraction(v) for v in d["b"]),
                              tuple(tuple(Fraction(v) for v in row) for row in d["B"]),
                              int(d["B_scale"]))


def bound_parametrically(sys: ParametricSystem):
    """Append c.x <= y_new making every fiber bounded while keeping feasibility.

    c is minus the sum of the rows of a basis of A. Returns (sys', record);
    the original fiber at y has an integer point iff the new fiber at
    (y, record.g(y)) has one.
    """
    n = sys.n_x
    if rank(sys.A) < n:
        raise ValueError("bound_parametrically needs rank(A) = n_x")
    if recession_cone_is_zero(sys.A):
        raise NormalizationSignal("fibers are already bounded")
    basis = _independent_rows(sys.A)[:n]
    c = tuple(-sum(sys.A[i][t] for i in basis) for t in range(n))
    A = [list(row) for row in sys.A] + [list(c)]
    B = [list(row) + [Fraction(0)] for row in sys.B] + [[Fraction(0)] * sys.n_y + [Fraction(1)]]
    b = list(sys.b) + [Fraction(0)]
    B_scale = 1
    for row in sys.B:
        for v in row:
            B_scale = B_scale * v.denominator // math.gcd(B_scale, v.denominator)
    rec = BoundingRecord(c, max((abs(a) for row in sys.A for a in row), default=0), n,
                         sys.b, sys.B, B_scale)
    conds = tuple(Condition(cd.kind, cd.coeffs + (Fraction(0),), cd.const) for cd in sys.conditions)
    out = ParametricSystem.make(A, B, b, n_y=sys.n_y + 1, conditions=conds)
    return out, rec


@dataclass(frozen=True)
class FiberReduction:
    """Result of substituting out one coordinate fixed by an implicit equality.

    The original x equals ``unimodular_inverse`` applied to (fixed(y), x_reduced).
    """

    system: ParametricSystem
    row: int
    gcd: int
    unimodular: tuple[tuple[int, ...], ...]
    unimodular_inverse: tuple[tuple[int, ...], ...]
    fixed_coeffs: tuple[Fraction, ...]
    fixed_const: Fraction

    def fixed_value(self, y: Sequence) -> Fraction:
        return sum((c * to_fraction(v) for c, v in zip(self.fixed_coeffs, y)), Fraction(0)) + self.fixed_const

    def lift(self, x_reduced: Sequence, y: Sequence) -> list[Fraction]:
        z = [self.fixed_value(y)] + [to_fraction(v) for v in x_reduced]
        return matvec(self.unimodular_inverse, z)

    def to_json(self) -> dict:
        return {"row": self.row, "gcd": str(self.gcd),
                "unimodular": [[str(v) for v in r] for r in self.unimodular]}


def reduce_fiber_dimension(sys: ParametricSystem, witness_y: Sequence, row: int | None = None) -> FiberReduction:
    """Substitute out one variable fixed by an implicit equality of the fiber at witness_y.

    The new system keeps the same parameters; the fixed coordinate
    (b_j + B_j y) / gcd(A_j) must be an integer, recorded as a condition.
    """
    rhs = sys.rhs(witness_y)
    if row is None:
        imp = implicit_equalities(sys.A, rhs)
        if imp is None:
            raise ValueError("fiber is empty at the witness")
        imp = [j for j in imp if any(sys.A[j])]
        if not imp:
            raise ValueError("fiber is full-dimensional at the witness")
        row = imp[0]
    Aj = sys.A[row]
    H, Q = hnf_row(Aj)
    g = H[0]
    Qinv = [[int(v) for v in r] for r in inverse_rational(Q)]
    AQ = matmul([list(r) for r in sys.A], Qinv)
    fixed_coeffs = tuple(v / g for v in sys.B[row])
    fixed_const = sys.b[row] / g
    conds = list(sys.conditions)
    # rational parameters can make even an integer-coefficient fixed coordinate fractional
    if any(fixed_coeffs) or fixed_const.denominator != 1:
        conds.append(Condition("integral", fixed_coeffs, fixed_const))
    A_new, B_new, b_new = [], [], []
    for i in range(sys.m):
        if i == row:
            continue
        a0 = AQ[i][0]
        coeffs = [sys.B[i][t] - a0 * fixed_coeffs[t] for t in range(sys.n_y)]
        const = sys.b[i] - a0 * fixed_const
        rest = AQ[i][1:]
        if all(v == 0 for v in rest):
            conds.append(Condition("nonneg", tuple(coeffs), const))
            continue
        A_new.append(rest)
        B_new.append(coeffs)
        b_new.append(const)
    new = ParametricSystem.make(A_new, B_new, b_new, n_y=sys.n_y, conditions=conds) if A_new else \
        ParametricSystem(tuple(), tuple(), tuple(), sys.n_x - 1, sys.n_y, CANONICAL, tuple(conds))
    return FiberReduction(new, row, g, tuple(tuple(r) for r in Q), tuple(tuple(r) for r in Qinv),
                          fixed_coeffs, fixed_const)
