"""Chamber decomposition of the parameter space.

Chambers are the relatively open cells of the arrangement formed by the facet
hyperplanes of all validity domains, restricted to the projection of P onto y.
Inside one cell the set of parametric vertices and their active sets are fixed.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from . import exact_lp
from .counting import enumerate_vertices_by_bases
from .exact_arith import (
    clear_denominators, determinant, inverse_rational, integer_denominator, lcm_list, nullspace,
    rational_denominator, rref, solve_rational, to_fraction, vec_gcd,
)
from .polyhedron import ParametricSystem, parameter_projection, remove_redundant


class _Outside:
    def __repr__(self) -> str:
        return "OUTSIDE"

    __str__ = __repr__


OUTSIDE = _Outside()


@dataclass(frozen=True)
class Functional:
    """Affine functional a.y + a0 with coprime integer a, first nonzero entry positive."""

    a: tuple[int, ...]
    a0: Fraction

    def __call__(self, y: Sequence) -> Fraction:
        return sum((ai * to_fraction(v) for ai, v in zip(self.a, y)), Fraction(0)) + self.a0

    def sign(self, y: Sequence) -> int:
        v = self(y)
        return (v > 0) - (v < 0)


def canonical_functional(a: Sequence, a0) -> tuple[Functional, int] | None:
    """Scale a.y + a0 to canonical form; returns (functional, orientation) or None if a = 0."""
    ints, d = clear_denominators(list(a) + [a0])
    coeffs = ints[:-1]
    g = vec_gcd(coeffs)
    if g == 0:
        return None
    lead = next(v for v in coeffs if v != 0)
    s = 1 if lead > 0 else -1
    f = Functional(tuple(s * v // g for v in coeffs), Fraction(s * ints[-1], g))
    return f, s


@dataclass(frozen=True)
class ParametricVertexMap:
    """V_B(y) = T y + t = A_B^{-1} (b_B + B_B y)."""

    basis: tuple[int, ...]
    T: tuple[tuple[Fraction, ...], ...]
    t: tuple[Fraction, ...]

    def __call__(self, y: Sequence) -> list[Fraction]:
        y = [to_fraction(v) for v in y]
        return [sum((a * v for a, v in zip(row, y)), Fraction(0)) + c for row, c in zip(self.T, self.t)]


def vertex_map(sys: ParametricSystem, B: Sequence[int]) -> ParametricVertexMap:
    inv = inverse_rational([sys.A[i] for i in B])
    n = sys.n_x
    T = tuple(tuple(sum((inv[r][k] * sys.B[B[k]][s] for k in range(n)), Fraction(0)) for s in range(sys.n_y))
              for r in range(n))
    t = tuple(sum((inv[r][k] * sys.b[B[k]] for k in range(n)), Fraction(0)) for r in range(n))
    return ParametricVertexMap(tuple(B), T, t)


def slack_functionals(sys: ParametricSystem, vm: ParametricVertexMap) -> list[tuple[list[Fraction], Fraction]]:
    """Slack b_j + B_j y - A_j V_B(y) of every row as (coeffs, const)."""
    out = []
    for j in range(sys.m):
        coeffs = [sys.B[j][s] - sum((sys.A[j][r] * vm.T[r][s] for r in range(sys.n_x)), Fraction(0))
                  for s in range(sys.n_y)]
        const = sys.b[j] - sum((sys.A[j][r] * vm.t[r] for r in range(sys.n_x)), Fraction(0))
        out.append((coeffs, const))
    return out


def validity_domain(sys: ParametricSystem, B: Sequence[int]):
    """Irredundant inequalities f(y) >= 0 describing where V_B(y) is feasible.

    Returns a list of Functionals with orientation signs folded in as
    (functional, orientation) pairs, or None when the domain is empty.
    """
    if determinant([sys.A[i] for i in B]) == 0:
        return None
    vm = vertex_map(sys, B)
    rows, rhs = [], []
    for coeffs, const in slack_functionals(sys, vm):
        if all(c == 0 for c in coeffs):
            if const < 0:
                return None
            continue
        # coeffs.y + const >= 0  <=>  -coeffs.y <= const
        rows.append([-c for c in coeffs])
        rhs.append(const)
    if not rows:
        return []
    red_rows, red_rhs = remove_redundant(rows, rhs)
    if red_rows is None:
        return None
    out = []
    seen = set()
    for r, h in zip(red_rows, red_rhs):
        f, s = canonical_functional([-v for v in r], h)
        if (f, s) not in seen:
            seen.add((f, s))
            out.append((f, s))
    return out


@dataclass
class Chamber:
    """One relatively open cell with its vertex data taken at an interior witness."""

    ident: int
    dim: int
    sign_vector: tuple[int, ...]
    witness: tuple[Fraction, ...]
    flat_equations: list[Functional]
    flat_directions: list[list[Fraction]]
    valid_bases: list[tuple[int, ...]]
    vertices: list[ParametricVertexMap]
    active_sets: list[tuple[int, ...]]
    _chdenom: tuple | None = None

    def contains(self, hyperplanes: Sequence[Functional], y: Sequence) -> bool:
        """Relative-interior membership through the H-description (sign conditions)."""
        return all(h.sign(y) == s for h, s in zip(hyperplanes, self.sign_vector))

    def h_description(self, hyperplanes: Sequence[Functional]) -> list[tuple[Functional, int]]:
        return list(zip(hyperplanes, self.sign_vector))

    def denominators(self, sys: ParametricSystem) -> tuple[int, Fraction]:
        """(integer chamber denominator, rational chamber denominator)."""
        if self._chdenom is None:
            entries: list[Fraction] = []
            for B in self.valid_bases:
                vm = vertex_map(sys, B)
                for row in vm.T:
                    entries.extend(row)
                entries.extend(vm.t)
            self._chdenom = (integer_denominator(entries), rational_denominator(entries))
        return self._chdenom


@dataclass
class ChamberIndex:
    hyperplanes: list[Functional]
    by_sign: dict[tuple[int, ...], int]
    projection: tuple | None = None

    def sign_vector(self, y: Sequence) -> tuple[int, ...]:
        return tuple(h.sign(y) for h in self.hyperplanes)


def chamber_lookup(index: ChamberIndex, chambers: Sequence[Chamber], y: Sequence):
    """The chamber whose relative interior contains y, or OUTSIDE."""
    key = index.sign_vector([to_fraction(v) for v in y])
    cid = index.by_sign.get(key)
    return OUTSIDE if cid is None else chambers[cid]


# ---------------------------------------------------------------- arrangement cells

def _flat_data(hyps: Sequence[Functional], members: Sequence[int], n_y: int):
    """Equations, direction basis, and a point of the flat cut out by members; None if empty."""
    if not members:
        return [], [[Fraction(int(i == j)) for j in range(n_y)] for i in range(n_y)], [Fraction(0)] * n_y
    A = [list(hyps[i].a) for i in members]
    b = [-hyps[i].a0 for i in members]
    R, pivots = rref([row + [bi] for row, bi in zip(A, b)])
    if n_y in pivots:
        return None
    x = [Fraction(0)] * n_y
    for r, pc in enumerate(pivots):
        x[pc] = R[r][n_y]
    return A, nullspace(A, n_y), x


def enumerate_flats(hyps: Sequence[Functional], n_y: int) -> list[tuple[frozenset, tuple[list, list]]]:
    """All nonempty intersections of hyperplanes, as (closure, (direction basis, point)) pairs."""
    _, dirs0, p0 = _flat_data(hyps, [], n_y)
    flats: dict[frozenset, tuple] = {frozenset(): (dirs0, p0)}
    frontier = [frozenset()]
    while frontier:
        nxt = []
        for Z in frontier:
            for i in range(len(hyps)):
                if i in Z:
                    continue
                members = sorted(Z | {i})
                data = _flat_data(hyps, members, n_y)
                if data is None:
                    continue
                _, dirs, point = data
                if len(dirs) == len(flats[Z][0]):
                    continue  # parallel hyperplane does not cut this flat, or already contains it
                closure = frozenset(k for k in range(len(hyps))
                                    if hyps[k](point) == 0 and all(
                                        sum((a * d for a, d in zip(hyps[k].a, dv)), Fraction(0)) == 0
                                        for dv in dirs))
                if closure not in flats:
                    flats[closure] = (dirs, point)
                    nxt.append(closure)
        frontier = nxt
    return list(flats.items())


def _cells_in_flat(hyps, closure, n_y, required_positive, point, dirs):
    """Relatively open cells of the arrangement inside the flat, within the required half-spaces.

    Works in flat coordinates u (y = point + dirs^T u). Each split LP is centred
    at the current cell's witness, so only the new constraint starts violated.
    """
    dim = len(dirs)
    # restricted functionals g.u + c
    restricted = []
    for h in hyps:
        g = [sum((a * d for a, d in zip(h.a, dv)), Fraction(0)) for dv in dirs]
        restricted.append((g, h(point)))
    fixed: dict[int, int] = {i: 0 for i in closure}
    free = []
    for i, (g, c) in enumerate(restricted):
        if i in closure:
            continue
        if not any(g):
            s = (c > 0) - (c < 0)
            if i in required_positive and s <= 0:
                return []
            fixed[i] = s
        elif i in required_positive:
            fixed[i] = 1
        else:
            free.append(i)

    def val(i, u):
        g, c = restricted[i]
        return sum((a * x for a, x in zip(g, u)), Fraction(0)) + c

    def split_lp(signs, u0, target, s):
        """Point with the given signs plus s * f_target > 0, searched around u0."""
        rows, rhs = [], []
        for i, si in list(signs.items()) + [(target, s)]:
            if si == 0 or not any(restricted[i][0]):
                continue
            g = restricted[i][0]
            rows.append([-si * a for a in g] + [1])
            rhs.append(si * val(i, u0))
        rows.append([0] * dim + [1])
        rhs.append(1)
        status, t, x = exact_lp.maximize([0] * dim + [1], rows, rhs, nvars=dim + 1)
        if status != exact_lp.OPTIMAL or t <= 0:
            return None
        return [a + d for a, d in zip(u0, x[:dim])]

    def ray_shoot(signs, u0, target, s):
        """Cheap certificate: walk from u0 along s * g across the target hyperplane inside the cell."""
        g = restricted[target][0]
        gg = sum((a * a for a in g), Fraction(0))
        span = abs(val(target, u0)) / gg  # u0 + s * span * g lies on the hyperplane
        limit = None
        for i, si in signs.items():
            if si == 0:
                continue
            rate = si * s * sum((a * b for a, b in zip(restricted[i][0], g)), Fraction(0))
            if rate < 0:
                reach = si * val(i, u0) / -rate
                limit = reach if limit is None else min(limit, reach)
        if limit is not None and limit <= span:
            return None
        go = span + 1 if limit is None else (span + limit) / 2
        return [a + s * go * b for a, b in zip(u0, g)]

    if dim == 0:
        if all(val(i, []) * s > 0 for i, s in fixed.items() if s != 0):
            return [(dict(fixed), list(point))]
        return []
    start = _start_point(fixed, restricted, dim)
    if start is None:
        return []
    cells = [(dict(fixed), start)]
    for i in free:
        new_cells = []
        for signs, w in cells:
            sw = val(i, w)
            sw = (sw > 0) - (sw < 0)
            for s in (1, -1):
                trial = dict(signs)
                trial[i] = s
                if sw == s:
                    new_cells.append((trial, w))
                    continue
                w2 = ray_shoot(signs, w, i, s)
                if w2 is None:
                    w2 = split_lp(signs, w, i, s)
                if w2 is not None:
                    new_cells.append((trial, w2))
        cells = new_cells
    out = []
    for signs, u in cells:
        y = [p + sum((u[k] * dirs[k][r] for k in range(dim)), Fraction(0)) for r, p in enumerate(point)]
        out.append((signs, y))
    return out


def _start_point(fixed, restricted, dim):
    rows, rhs, strict = [], [], []
    for i, s in fixed.items():
        g, c = restricted[i]
        if s == 0 or not any(g):
            continue
        rows.append([-s * a for a in g])
        rhs.append(s * c)
        strict.append(True)
    return exact_lp.interior_point(rows, rhs, strict, nvars=dim)


def build_chamber_decomposition(sys: ParametricSystem):
    """Chambers of all dimensions and the sign-vector index.

    Returns (chambers, index); both empty when the projection of P is empty.
    """
    n_y = sys.n_y
    proj = parameter_projection(sys)
    if proj is None:
        return [], ChamberIndex([], {}, None)
    hyps: list[Functional] = []
    pos: dict[Functional, int] = {}

    def add(f: Functional) -> int:
        if f not in pos:
            pos[f] = len(hyps)
            hyps.append(f)
        return pos[f]

    bases = [B for B in combinations(range(sys.m), sys.n_x) if determinant([sys.A[i] for i in B]) != 0]
    for B in bases:
        dom = validity_domain(sys, B)
        if dom is None:
            continue
        for f, _ in dom:
            add(f)
    # projection facets: G y <= h  <=>  -G y + h >= 0
    required: list[int] = []
    orient: dict[int, int] = {}
    for row, h in zip(*proj):
        cf = canonical_functional([-v for v in row], h)
        if cf is None:
            continue
        f, s = cf
        idx = add(f)
        required.append(idx)
        orient[idx] = s
    flats = enumerate_flats(hyps, n_y)
    chambers: list[Chamber] = []
    by_sign: dict[tuple[int, ...], int] = {}
    for closure, (dirs, point) in sorted(flats, key=lambda fd: (-len(fd[1][0]), sorted(fd[0]))):
        cells = _cells_in_flat_oriented(hyps, closure, n_y, required, orient, point, dirs)
        for signs, w in cells:
            sv = tuple(signs.get(i, hyps[i].sign(w)) for i in range(len(hyps)))
            if any(hyps[i].sign(w) != sv[i] for i in range(len(hyps))):
                raise AssertionError("cell witness does not realize its sign vector")
            if sv in by_sign:
                continue
            ch = _make_chamber(sys, len(chambers), sv, w, [hyps[i] for i in sorted(closure)], dirs, bases)
            if ch is None:
                continue
            by_sign[sv] = ch.ident
            chambers.append(ch)
    return chambers, ChamberIndex(hyps, by_sign, proj)


def _cells_in_flat_oriented(hyps, closure, n_y, required, orient, point, dirs):
    # projection functionals must be positive in canonical orientation s: s * f > 0
    neg = [i for i in required if orient[i] < 0 and i not in closure]
    if not neg:
        return _cells_in_flat(hyps, closure, n_y, required, point, dirs)
    flipped = list(hyps)
    for i in neg:
        flipped[i] = Functional(tuple(-v for v in hyps[i].a), -hyps[i].a0)
    cells = _cells_in_flat(flipped, closure, n_y, required, point, dirs)
    out = []
    for signs, w in cells:
        fixed = {i: (-s if i in neg else s) for i, s in signs.items()}
        out.append((fixed, w))
    return out


def _make_chamber(sys, ident, sv, witness, equations, dirs, bases):
    rhs = sys.rhs(witness)
    verts = enumerate_vertices_by_bases(sys.A, rhs)
    if not verts:
        return None
    valid = []
    for B in bases:
        x = solve_rational([sys.A[i] for i in B], [rhs[i] for i in B])
        if all(sum((a * v for a, v in zip(row, x)), Fraction(0)) <= h for row, h in zip(sys.A, rhs)):
            valid.append(B)
    vertex_maps = [vertex_map(sys, v.basis) for v in verts]
    return Chamber(ident, len(dirs), sv, tuple(witness), equations, dirs, valid, vertex_maps,
                   [v.active for v in verts])


def vertex_key(vm: ParametricVertexMap, chamber: Chamber) -> tuple:
    """Key of a parametric vertex restricted to the chamber's affine hull."""
    TD = tuple(tuple(sum((row[s] * d[s] for s in range(len(d))), Fraction(0)) for d in chamber.flat_directions)
               for row in vm.T)
    return TD, tuple(vm(chamber.witness))


def dedup_vertex_maps(maps: Sequence[ParametricVertexMap], chamber: Chamber) -> list[ParametricVertexMap]:
    seen = {}
    for vm in maps:
        seen.setdefault(vertex_key(vm, chamber), vm)
    return list(seen.values())


def fiber_rational_denominator(sys: ParametricSystem, y: Sequence) -> Fraction:
    """Smallest rational q > 0 with q * vertex integral for every vertex of the fiber at y."""
    verts = enumerate_vertices_by_bases(sys.A, sys.rhs(y))
    return rational_denominator([c for v in verts for c in v.vertex])


def rational_lcm(values: Sequence[Fraction]) -> Fraction:
    """Least positive rational that is an integer multiple of every value."""
    vals = [to_fraction(v) for v in values]
    return Fraction(lcm_list(v.numerator for v in vals), vec_gcd([v.denominator for v in vals]))


def chambers_to_json(chambers: Sequence[Chamber], index: ChamberIndex) -> dict:
    from .exact_arith import fraction_str
    return {
        "hyperplanes": [{"a": [str(v) for v in h.a], "a0": fraction_str(h.a0)} for h in index.hyperplanes],
        "chambers": [
            {"id": ch.ident, "dim": ch.dim, "sign_vector": list(ch.sign_vector),
             "witness": [fraction_str(v) for v in ch.witness],
             "bases": [list(B) for B in ch.valid_bases],
             "vertices": [{"basis": list(vm.basis),
                           "T": [[fraction_str(v) for v in row] for row in vm.T],
                           "t": [fraction_str(v) for v in vm.t]} for vm in ch.vertices]}
            for ch in chambers],
    }
