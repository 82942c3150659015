"""Piece-wise periodic step-polynomial representation of the counting function.

For every chamber the count is a sum over simplicial cone pieces of
sum_k pi_k(P T mod S) <c_B, T>^k, where T = floor(b_B + B_B y). The same data
yields the Ehrhart quasi-polynomial coefficients of each chamber.
"""
from __future__ import annotations

import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from .chambers import (
    OUTSIDE, Chamber, ChamberIndex, Functional, build_chamber_decomposition, chamber_lookup,
    fiber_rational_denominator, rational_lcm,
)
from .cones import edge_directions, pick_generic_c
from .counting import enumerate_vertices_by_bases, vertex_cone_pieces
from .exact_arith import (
    determinant, floor_vec, fraction_str, smith_normal_form, to_fraction,
)
from .group_gf import OrientedPiece, PeriodicPiece, orient_piece
from .polyhedron import (
    STANDARD, NormalizationTrace, ParametricSystem, recession_cone_is_zero,
    reduce_fiber_dimension, standard_to_canonical, system_from_json, system_to_json,
)

SCHEMA = 1


class UnsupportedInstanceError(ValueError):
    """The system has no bounded nonempty fiber."""


class DomainError(ValueError):
    """A query point lies outside the relative interior of the requested chamber."""


class InvariantViolation(AssertionError):
    """An internal consistency check failed; always a bug."""


@dataclass(frozen=True)
class StepTerm:
    """One cone piece: oriented.value(floor(b_B + B_B y))."""

    rows: tuple[int, ...]
    b_B: tuple[Fraction, ...]
    B_B: tuple[tuple[Fraction, ...], ...]
    oriented: OrientedPiece

    def step(self, y: Sequence[Fraction]) -> list[int]:
        return floor_vec([b + sum((a * v for a, v in zip(row, y)), Fraction(0))
                          for b, row in zip(self.b_B, self.B_B)])

    def value(self, y: Sequence[Fraction]) -> Fraction:
        return self.oriented.value(self.step(y))

    def quasi_terms(self, y: Sequence[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
        """(pi_bar_k(y) for k = 0..n, w) so that the term equals sum_k pi_bar_k (w.y)^k.

        The sign of the orientation is folded into pi_bar.
        """
        piece = self.oriented.piece
        flips = self.oriented.flips
        u = [b + sum((a * v for a, v in zip(row, y)), Fraction(0)) for b, row in zip(self.b_B, self.B_B)]
        T = floor_vec(u)
        coeffs = piece.coefficients(self.oriented.flipped_rhs(T))
        D = [-1 if f else 1 for f in flips]
        cb = piece.c_B
        psi = sum((cb[i] * (D[i] * (self.b_B[i] - (u[i] - T[i])) - int(flips[i])) for i in range(len(cb))),
                  Fraction(0))
        n_y = len(y)
        w = [sum((cb[i] * D[i] * self.B_B[i][s] for i in range(len(cb))), Fraction(0)) for s in range(n_y)]
        n = len(coeffs) - 1
        sign = self.oriented.sign
        pibar = []
        for k in range(n + 1):
            acc = Fraction(0)
            for i in range(k, n + 1):
                acc += coeffs[i] * math.comb(i, k) * psi ** (i - k)
            pibar.append(sign * acc)
        return pibar, w


@dataclass
class ChamberRep:
    chamber: Chamber
    system: ParametricSystem
    reductions: list[dict]
    terms: list[StepTerm]
    constant: int | None
    mu: int
    c: tuple[int, ...]

    def conditions_hold(self, y: Sequence[Fraction]) -> bool:
        return self.system.conditions_hold(y)

    def integrality_holds(self, y: Sequence[Fraction]) -> bool:
        # sign and zero conditions hold on the whole chamber; only the lattice ones are periodic
        return all(c.holds(y) for c in self.system.conditions if c.kind == "integral")


@dataclass
class PiecewisePeriodicStepPolynomial:
    system: ParametricSystem
    trace: NormalizationTrace
    chambers: list[ChamberRep]
    index: ChamberIndex
    c: tuple[int, ...]
    chi: int
    mu_measured: int
    delta_measured: int
    f_vector: dict[int, int] = field(default_factory=dict)
    seed: int = 0

    def lookup(self, y: Sequence):
        ch = chamber_lookup(self.index, [cr.chamber for cr in self.chambers], y)
        return OUTSIDE if ch is OUTSIDE else self.chambers[ch.ident]


# ---------------------------------------------------------------- build

def _chamber_structure(sys: ParametricSystem, chamber: Chamber):
    """Fiber-dimension reductions and cone pieces of one chamber, taken at its witness."""
    y0 = list(chamber.witness)
    cur = sys
    reductions = []
    while True:
        if cur.n_x == 0:
            return cur, reductions, None
        verts = enumerate_vertices_by_bases(cur.A, cur.rhs(y0))
        if not verts:
            raise InvariantViolation(f"chamber {chamber.ident} has an empty fiber at its witness")
        common = set(verts[0].active)
        for v in verts[1:]:
            common &= set(v.active)
        implicit = sorted(j for j in common if any(cur.A[j]))
        if not implicit:
            break
        red = reduce_fiber_dimension(cur, y0, row=implicit[0])
        reductions.append(red.to_json())
        cur = red.system
    pieces = []
    for v in verts:
        pieces.extend(vertex_cone_pieces(cur.A, v.active))
    return cur, reductions, pieces


def _max_minor(A: Sequence[Sequence[int]]) -> int:
    n = len(A[0]) if A else 0
    best = 0
    for rows in combinations(range(len(A)), n):
        best = max(best, abs(int(determinant([A[i] for i in rows]))))
    return best


def _structure_job(args):
    sys, chamber = args
    return _chamber_structure(sys, chamber)


def build_representation(sys: ParametricSystem, seed: int = 0, threads: int = 1) -> PiecewisePeriodicStepPolynomial:
    """Chamber decomposition plus per-chamber cone pieces with exact pi tables."""
    trace = NormalizationTrace()
    if sys.form == STANDARD:
        sys = standard_to_canonical(sys)
    if sys.n_x == 0:
        raise UnsupportedInstanceError("system has no counting variables")
    if sys.m == 0 or not recession_cone_is_zero(sys.A):
        raise UnsupportedInstanceError("no bounded fiber exists: {x : A x <= 0} is not {0}")
    chambers, index = build_chamber_decomposition(sys)
    if not chambers:
        raise UnsupportedInstanceError("no bounded fiber exists: every fiber is empty")
    jobs = [(sys, ch) for ch in chambers]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            structures = list(pool.map(_structure_job, jobs))
    else:
        structures = [_structure_job(j) for j in jobs]

    full_pieces = sorted({B for (cur, reds, pieces) in structures if not reds and pieces for B in pieces})
    c_global: tuple[int, ...] = ()
    chi = 0
    if full_pieces:
        E = edge_directions([[sys.A[i] for i in B] for B in full_pieces])
        c_global = tuple(pick_generic_c(E, seed=seed))
        chi = E.chi
    cache: dict = {}
    reps = []
    for ch, (cur, reds, pieces) in zip(chambers, structures):
        if pieces is None:
            reps.append(ChamberRep(ch, cur, reds, [], 1, 0, ()))
            continue
        if reds:
            E = edge_directions([[cur.A[i] for i in B] for B in pieces])
            c = tuple(pick_generic_c(E, seed=seed))
            chi = max(chi, E.chi)
        else:
            c = c_global
        terms = []
        for B in pieces:
            A_B = tuple(tuple(cur.A[i]) for i in B)
            key = (A_B, c)
            if key not in cache:
                cache[key] = orient_piece([list(r) for r in A_B], list(c), B)
            op = cache[key]
            if op.rows != B:
                op = OrientedPiece(B, op.flips, op.piece)
            terms.append(StepTerm(B, tuple(cur.b[i] for i in B), tuple(cur.B[i] for i in B), op))
        reps.append(ChamberRep(ch, cur, reds, terms, None, len(pieces), c))
    f_vector: dict[int, int] = {}
    for ch in chambers:
        f_vector[ch.dim] = f_vector.get(ch.dim, 0) + 1
    mu = max((r.mu for r in reps), default=0)
    return PiecewisePeriodicStepPolynomial(sys, trace, reps, index, c_global, chi, mu,
                                           _max_minor(sys.A), f_vector, seed)


# ---------------------------------------------------------------- queries

def _as_point(y: Sequence) -> list[Fraction]:
    return [to_fraction(v) for v in y]


def _chamber_value(cr: ChamberRep, y: Sequence[Fraction]) -> Fraction:
    if not cr.conditions_hold(y):
        return Fraction(0)
    if cr.constant is not None:
        return Fraction(cr.constant)
    return sum((t.value(y) for t in cr.terms), Fraction(0))


def evaluate(rep: PiecewisePeriodicStepPolynomial, y: Sequence):
    """Number of integer points of the fiber at y, or OUTSIDE when y is not in the projection."""
    yq = rep.trace.map_query(_as_point(y))
    if len(yq) != rep.system.n_y:
        raise ValueError(f"expected {rep.system.n_y} parameters, got {len(yq)}")
    cr = rep.lookup(yq)
    if cr is OUTSIDE:
        return OUTSIDE
    total = _chamber_value(cr, yq)
    if total.denominator != 1 or total < 0:
        raise InvariantViolation(f"chamber {cr.chamber.ident} produced {total} at y = {yq}")
    return int(total)


def multi_indices(n_y: int, max_degree: int) -> list[tuple[int, ...]]:
    """All j in Z_{>=0}^{n_y} with |j| <= max_degree, by degree then lexicographically."""
    out = []
    for k in range(max_degree + 1):
        for j in product(range(k + 1), repeat=n_y):
            if sum(j) == k:
                out.append(j)
    return sorted(out, key=lambda j: (sum(j), tuple(-v for v in j)))


def _multinomial(j: Sequence[int]) -> int:
    out = math.factorial(sum(j))
    for v in j:
        out //= math.factorial(v)
    return out


def chamber_coefficients(rep: PiecewisePeriodicStepPolynomial, cr: ChamberRep, y: Sequence) -> dict:
    """All quasi-polynomial coefficients a_j of the chamber's formula, evaluated at y.

    No membership check: the formula is periodic on the whole parameter space.
    """
    y = _as_point(y)
    n_y = rep.system.n_y
    idx = multi_indices(n_y, rep.system.n_x)
    out = {j: Fraction(0) for j in idx}
    if not cr.integrality_holds(y):
        return out
    if cr.constant is not None:
        out[(0,) * n_y] = Fraction(cr.constant)
        return out
    for t in cr.terms:
        pibar, w = t.quasi_terms(y)
        for j in idx:
            k = sum(j)
            if k >= len(pibar) or pibar[k] == 0:
                continue
            mon = Fraction(1)
            for ws, js in zip(w, j):
                mon *= ws ** js
            out[j] += _multinomial(j) * pibar[k] * mon
    return out


def _resolve_chamber(rep, chamber) -> ChamberRep:
    if isinstance(chamber, ChamberRep):
        return chamber
    if isinstance(chamber, Chamber):
        return rep.chambers[chamber.ident]
    return rep.chambers[int(chamber)]


def ehrhart_coefficient(rep: PiecewisePeriodicStepPolynomial, chamber, j: Sequence[int], y: Sequence) -> Fraction:
    """a_j(y) of the chamber's quasi-polynomial; y must lie in the chamber's relative interior."""
    cr = _resolve_chamber(rep, chamber)
    yq = rep.trace.map_query(_as_point(y))
    j = tuple(int(v) for v in j)
    if len(j) != rep.system.n_y or any(v < 0 for v in j) or sum(j) > rep.system.n_x:
        raise ValueError(f"multi-index {j} out of range")
    found = rep.lookup(yq)
    if found is OUTSIDE or found.chamber.ident != cr.chamber.ident:
        raise DomainError(f"y = {yq} is not in the relative interior of chamber {cr.chamber.ident}")
    return chamber_coefficients(rep, cr, yq)[j]


def quasi_polynomial_value(coeffs: dict, y: Sequence) -> Fraction:
    y = _as_point(y)
    total = Fraction(0)
    for j, a in coeffs.items():
        if a:
            mon = Fraction(1)
            for v, e in zip(y, j):
                mon *= v ** e
            total += a * mon
    return total


# ---------------------------------------------------------------- integer tables

def _flat_integer_point_exists(chamber: Chamber) -> bool:
    if chamber.dim == 0:
        return all(v.denominator == 1 for v in chamber.witness)
    if not chamber.flat_equations:
        return True
    rows = [list(f.a) for f in chamber.flat_equations]
    rhs = [-f.a0 for f in chamber.flat_equations]
    sf = smith_normal_form(rows)
    Pc = [sum((p * r for p, r in zip(prow, rhs)), Fraction(0)) for prow in sf.P]
    diag = sf.diagonal
    for i, v in enumerate(Pc):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if v != 0:
                return False
        elif (v / d).denominator != 1:
            return False
    return True


@dataclass
class IntegerEhrhartTable:
    """a_j per residue of y modulo the integer chamber denominator.

    Tables with more than ``eager_limit`` residues are filled on first access;
    every entry is computed at the residue representative, never at the query.
    """

    chamber: int
    modulus: int
    tables: dict  # residue tuple -> {j: a_j}
    complete: bool = True
    _fill: object = field(default=None, repr=False, compare=False)

    def entry(self, key: tuple[int, ...]) -> dict | None:
        if key not in self.tables and not self.complete:
            self.tables[key] = self._fill(key)
        return self.tables.get(key)

    def materialize(self, n_y: int) -> dict:
        """Fill every residue and return the full table."""
        if not self.complete:
            for r in product(range(self.modulus), repeat=n_y):
                self.entry(r)
            self.tables = {r: row for r, row in self.tables.items() if row is not None}
            self.complete = True
        return self.tables


def complete_integer_ehrhart(rep: PiecewisePeriodicStepPolynomial, eager_limit: int = 1024) -> list[IntegerEhrhartTable]:
    """Per chamber, a_j at every residue of y modulo the integer chamber denominator."""
    out = []
    n_y = rep.system.n_y
    for cr in rep.chambers:
        ch = cr.chamber
        q, _ = ch.denominators(rep.system)
        if not _flat_integer_point_exists(ch):
            out.append(IntegerEhrhartTable(ch.ident, q, {}))
            continue

        def fill(r, cr=cr, ch=ch, q=q):
            if ch.flat_equations and not _residue_on_flat(ch, r, q):
                return None
            return chamber_coefficients(rep, cr, r)

        if q ** n_y > eager_limit:
            out.append(IntegerEhrhartTable(ch.ident, q, {}, complete=False, _fill=fill))
            continue
        tables = {}
        for r in product(range(q), repeat=n_y):
            row = fill(r)
            if row is not None:
                tables[r] = row
        out.append(IntegerEhrhartTable(ch.ident, q, tables))
    return out


def _residue_on_flat(ch: Chamber, r: Sequence[int], q: int) -> bool:
    """Whether some integer y = r + q t satisfies the flat's equations."""
    rows = [[v * q for v in f.a] for f in ch.flat_equations]
    rhs = [-f.a0 - sum((a * ri for a, ri in zip(f.a, r)), Fraction(0)) for f in ch.flat_equations]
    sf = smith_normal_form(rows)
    Pc = [sum((p * v for p, v in zip(prow, rhs)), Fraction(0)) for prow in sf.P]
    diag = sf.diagonal
    for i, v in enumerate(Pc):
        d = diag[i] if i < len(diag) else 0
        if (d == 0 and v != 0) or (d != 0 and (v / d).denominator != 1):
            return False
    return True


def evaluate_integer(rep: PiecewisePeriodicStepPolynomial, tables: Sequence[IntegerEhrhartTable], y: Sequence[int]):
    """Count at an integer point via chamber lookup, table lookup and polynomial evaluation."""
    y = [int(v) for v in y]
    cr = rep.lookup([Fraction(v) for v in y])
    if cr is OUTSIDE:
        return OUTSIDE
    tab = tables[cr.chamber.ident]
    key = tuple(v % tab.modulus for v in y)
    row = tab.entry(key)
    if row is None:
        raise InvariantViolation(f"residue {key} missing from the table of chamber {tab.chamber}")
    val = quasi_polynomial_value(row, y)
    if val.denominator != 1 or val < 0:
        raise InvariantViolation(f"table evaluation gave {val} at {y}")
    return int(val)


# ---------------------------------------------------------------- periodicity

@dataclass
class PeriodicityVerdict:
    passed: bool
    per_index: dict
    q_shift: Fraction
    chdenom_Q: Fraction
    samples: int


def periodicity_check(rep: PiecewisePeriodicStepPolynomial, chamber, y: Sequence, z: Sequence,
                      trials: int = 3, seed: int = 0) -> PeriodicityVerdict:
    """Check a_j(y) = a_j(y + q (z - y)) and a_j(y) = a_j(y + chdenom_Q t) for integer t.

    The chamber's formula is evaluated wherever the shifted point lands: its
    coefficients are periodic on the whole parameter space, not only on the
    chamber. t runs over the all-ones vector and ``trials`` random small
    integer vectors.
    """
    cr = _resolve_chamber(rep, chamber)
    y = _as_point(y)
    z = _as_point(z)
    base = chamber_coefficients(rep, cr, y)
    per = {j: True for j in base}
    q = rational_lcm([fiber_rational_denominator(rep.system, y), fiber_rational_denominator(rep.system, z)])
    shifted = [a + q * (b - a) for a, b in zip(y, z)]
    for j, v in chamber_coefficients(rep, cr, shifted).items():
        per[j] &= v == base[j]
    _, chq = cr.chamber.denominators(rep.system)
    rng = random.Random(seed)
    n_y = rep.system.n_y
    shifts = [[1] * n_y]
    while len(shifts) < trials + 1:
        t = [rng.randint(-3, 3) for _ in range(n_y)]
        if any(t):
            shifts.append(t)
    for t in shifts:
        moved = [a + chq * ti for a, ti in zip(y, t)]
        for j, v in chamber_coefficients(rep, cr, moved).items():
            per[j] &= v == base[j]
    return PeriodicityVerdict(all(per.values()), per, q, chq, 1 + len(shifts))


# ---------------------------------------------------------------- persistence

def _fs(v) -> str:
    return fraction_str(v)


def _piece_to_json(p: PeriodicPiece) -> dict:
    return {
        "A": [list(r) for r in p.A], "P": [list(r) for r in p.P], "diag": list(p.diag),
        "c_B": [_fs(v) for v in p.c_B],
        "tables": [[list(g), [_fs(v) for v in vals]] for g, vals in sorted(p.tables.items())],
    }


def _piece_from_json(d: dict) -> PeriodicPiece:
    return PeriodicPiece(tuple(tuple(int(v) for v in r) for r in d["A"]),
                         tuple(tuple(int(v) for v in r) for r in d["P"]),
                         tuple(int(v) for v in d["diag"]),
                         tuple(Fraction(v) for v in d["c_B"]),
                         {tuple(g): tuple(Fraction(v) for v in vals) for g, vals in d["tables"]})


def _chamber_to_json(ch: Chamber) -> dict:
    return {
        "id": ch.ident, "dim": ch.dim, "sign_vector": list(ch.sign_vector),
        "witness": [_fs(v) for v in ch.witness],
        "flat_equations": [{"a": list(f.a), "a0": _fs(f.a0)} for f in ch.flat_equations],
        "flat_directions": [[_fs(v) for v in d] for d in ch.flat_directions],
        "valid_bases": [list(B) for B in ch.valid_bases],
        "active_sets": [list(a) for a in ch.active_sets],
    }


def _chamber_from_json(d: dict, sys: ParametricSystem) -> Chamber:
    bases = [tuple(B) for B in d["valid_bases"]]
    return Chamber(int(d["id"]), int(d["dim"]), tuple(d["sign_vector"]), tuple(Fraction(v) for v in d["witness"]),
                   [Functional(tuple(f["a"]), Fraction(f["a0"])) for f in d["flat_equations"]],
                   [[Fraction(v) for v in r] for r in d["flat_directions"]], bases,
                   [], [tuple(a) for a in d["active_sets"]])


def representation_to_json(rep: PiecewisePeriodicStepPolynomial) -> dict:
    pieces: dict = {}
    chambers = []
    for cr in rep.chambers:
        terms = []
        for t in cr.terms:
            key = id(t.oriented.piece)
            if key not in pieces:
                pieces[key] = (len(pieces), _piece_to_json(t.oriented.piece))
            terms.append({"rows": list(t.rows), "b_B": [_fs(v) for v in t.b_B],
                          "B_B": [[_fs(v) for v in r] for r in t.B_B],
                          "flips": list(t.oriented.flips), "piece": pieces[key][0]})
        chambers.append({"chamber": _chamber_to_json(cr.chamber), "system": system_to_json(cr.system),
                         "reductions": cr.reductions, "terms": terms, "constant": cr.constant,
                         "mu": cr.mu, "c": list(cr.c)})
    return {
        "schema": SCHEMA,
        "system": system_to_json(rep.system),
        "trace": rep.trace.to_json(),
        "hyperplanes": [{"a": list(h.a), "a0": _fs(h.a0)} for h in rep.index.hyperplanes],
        "c": list(rep.c), "chi": rep.chi, "mu_measured": rep.mu_measured,
        "delta_measured": rep.delta_measured,
        "f_vector": {str(k): v for k, v in sorted(rep.f_vector.items())},
        "seed": rep.seed,
        "pieces": [p for _, p in sorted(pieces.values(), key=lambda e: e[0])],
        "chambers": chambers,
    }


def representation_from_json(d: dict) -> PiecewisePeriodicStepPolynomial:
    if d.get("schema") != SCHEMA:
        raise ValueError(f"unsupported representation schema {d.get('schema')!r}")
    sys = system_from_json(d["system"])
    pieces = [_piece_from_json(p) for p in d["pieces"]]
    hyps = [Functional(tuple(h["a"]), Fraction(h["a0"])) for h in d["hyperplanes"]]
    reps = []
    by_sign = {}
    for cd in d["chambers"]:
        ch = _chamber_from_json(cd["chamber"], sys)
        csys = system_from_json(cd["system"])
        terms = [StepTerm(tuple(t["rows"]), tuple(Fraction(v) for v in t["b_B"]),
                          tuple(tuple(Fraction(v) for v in r) for r in t["B_B"]),
                          OrientedPiece(tuple(t["rows"]), tuple(bool(f) for f in t["flips"]), pieces[t["piece"]]))
                 for t in cd["terms"]]
        reps.append(ChamberRep(ch, csys, cd["reductions"], terms, cd["constant"], int(cd["mu"]), tuple(cd["c"])))
        by_sign[ch.sign_vector] = ch.ident
    index = ChamberIndex(hyps, by_sign, None)
    return PiecewisePeriodicStepPolynomial(
        sys, NormalizationTrace.from_json(d["trace"]), reps, index, tuple(d["c"]), int(d["chi"]),
        int(d["mu_measured"]), int(d["delta_measured"]), {int(k): v for k, v in d["f_vector"].items()},
        int(d.get("seed", 0)))


def save_representation(rep: PiecewisePeriodicStepPolynomial, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(representation_to_json(rep), fh, indent=1)


def load_representation(path: str) -> PiecewisePeriodicStepPolynomial:
    with open(path) as fh:
        return representation_from_json(json.load(fh))
