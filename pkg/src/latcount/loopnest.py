"""Affine loop nests: parser, compilation to a parametric system, and a literal simulator.

Grammar (whitespace and newlines are insignificant):

    nest := {"param" id+}* {"for" id ":=" expr "to" expr ["do"]}+ [body]
    expr := affine combination of integer literals and ids using + - * ( )
            and "/" by a positive integer literal

Anything after the last loop header is the statement body and is ignored.
Parameters not declared with "param" are taken in order of first use.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact_arith import lcm_list
from .polyhedron import ParametricSystem

KEYWORDS = {"param", "for", "to", "do"}
_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<id>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>:=|[-+*/()])|(?P<other>\S))")


class LoopNestSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class UnsupportedConstructError(ValueError):
    """A bound is not affine (e.g. a product of two variables)."""


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


@dataclass
class Affine:
    coeffs: dict[str, Fraction] = field(default_factory=dict)
    const: Fraction = Fraction(0)

    def scaled(self, f: Fraction) -> "Affine":
        return Affine({k: v * f for k, v in self.coeffs.items() if v * f != 0}, self.const * f)

    def plus(self, other: "Affine", sign: int = 1) -> "Affine":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + sign * v
            if out[k] == 0:
                del out[k]
        return Affine(out, self.const + sign * other.const)

    def is_constant(self) -> bool:
        return not self.coeffs

    def value(self, env: dict[str, Fraction]) -> Fraction:
        return self.const + sum((v * env[k] for k, v in self.coeffs.items()), Fraction(0))


@dataclass
class Loop:
    var: str
    lower: Affine
    upper: Affine
    line: int
    col: int


@dataclass
class LoopNestAst:
    parameters: list[str]
    loops: list[Loop]

    @property
    def iterators(self) -> list[str]:
        return [lp.var for lp in self.loops]


def tokenize(text: str) -> list[Token]:
    """Tokens with 1-based line and column; unknown characters become "other" tokens."""
    tokens = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.lastgroup is None:
            break  # only trailing whitespace is left
        ws = text[pos:m.start(m.lastgroup)]
        if "\n" in ws:
            line += ws.count("\n")
            col = len(ws) - ws.rfind("\n")
        else:
            col += len(ws)
        kind = m.lastgroup
        word = m.group(kind)
        if kind == "id" and word in KEYWORDS:
            kind = word
        tokens.append(Token(kind, word, line, col))
        col += len(word)
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], text: str):
        self.toks = tokens
        self.i = 0
        lines = text.split("\n")
        self.end = (len(lines), len(lines[-1]) + 1)

    def peek(self) -> Token | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def where(self) -> tuple[int, int]:
        t = self.peek()
        return (t.line, t.col) if t else self.end

    def fail(self, msg: str):
        raise LoopNestSyntaxError(msg, *self.where())

    def take(self, kind: str, what: str | None = None) -> Token:
        t = self.peek()
        if t is None or t.kind != kind:
            found = "end of input" if t is None else repr(t.text)
            self.fail(f"expected {what or kind}, found {found}")
        self.i += 1
        return t

    def take_op(self, text: str) -> Token:
        t = self.peek()
        if t is None or t.kind != "op" or t.text != text:
            found = "end of input" if t is None else repr(t.text)
            self.fail(f"expected {text!r}, found {found}")
        self.i += 1
        return t

    def accept(self, kind: str) -> Token | None:
        t = self.peek()
        if t is not None and t.kind == kind:
            self.i += 1
            return t
        return None

    def expr(self) -> tuple[Affine, list[Token]]:
        used: list[Token] = []
        e = self.term(used)
        while True:
            t = self.peek()
            if t is not None and t.kind == "op" and t.text in "+-":
                self.i += 1
                e = e.plus(self.term(used), 1 if t.text == "+" else -1)
            else:
                return e, used

    def term(self, used) -> Affine:
        e = self.factor(used)
        while True:
            t = self.peek()
            if t is None or t.kind != "op" or t.text not in "*/":
                return e
            self.i += 1
            if t.text == "*":
                rhs = self.factor(used)
                if e.is_constant():
                    e = rhs.scaled(e.const)
                elif rhs.is_constant():
                    e = e.scaled(rhs.const)
                else:
                    raise UnsupportedConstructError(
                        f"line {t.line}, column {t.col}: product of two non-constant expressions")
            else:
                d = self.take("int", "a positive integer literal after '/'")
                if int(d.text) == 0:
                    raise LoopNestSyntaxError("division by zero", d.line, d.col)
                e = e.scaled(Fraction(1, int(d.text)))

    def factor(self, used) -> Affine:
        t = self.peek()
        if t is None:
            self.fail("expected an expression, found end of input")
        if t.kind == "int":
            self.i += 1
            return Affine({}, Fraction(int(t.text)))
        if t.kind == "id":
            self.i += 1
            used.append(t)
            return Affine({t.text: Fraction(1)})
        if t.kind == "op" and t.text == "-":
            self.i += 1
            return self.factor(used).scaled(Fraction(-1))
        if t.kind == "op" and t.text == "+":
            self.i += 1
            return self.factor(used)
        if t.kind == "op" and t.text == "(":
            self.i += 1
            e, inner = self.expr()
            used.extend(inner)
            self.take_op(")")
            return e
        self.fail(f"expected an expression, found {t.text!r}")


def parse_loopnest(text: str) -> LoopNestAst:
    """Parse a loop nest; raises LoopNestSyntaxError with line and column on bad input."""
    p = _Parser(tokenize(text), text)
    declared: list[str] = []
    while p.accept("param"):
        names = [p.take("id", "a parameter name")]
        while p.peek() is not None and p.peek().kind == "id":
            names.append(p.take("id"))
        for name in names:
            if name.text in declared:
                raise LoopNestSyntaxError(f"parameter {name.text!r} declared twice", name.line, name.col)
            declared.append(name.text)
    raw = []
    if p.peek() is None or p.peek().kind != "for":
        p.fail("expected 'for'")
    while p.peek() is not None and p.peek().kind == "for":
        head = p.take("for")
        var = p.take("id", "an iterator name")
        p.take_op(":=")
        lo, lo_used = p.expr()
        p.take("to", "'to'")
        hi, hi_used = p.expr()
        p.accept("do")
        raw.append((var, lo, hi, lo_used + hi_used, head))
    # the rest is the statement body
    iterators = [r[0].text for r in raw]
    if len(set(iterators)) != len(iterators):
        dup = next(r[0] for k, r in enumerate(raw) if r[0].text in iterators[:k])
        raise LoopNestSyntaxError(f"iterator {dup.text!r} defined twice", dup.line, dup.col)
    params = list(declared)
    loops = []
    for depth, (var, lo, hi, used, head) in enumerate(raw):
        for tok in used:
            name = tok.text
            if name in iterators:
                if iterators.index(name) >= depth:
                    raise LoopNestSyntaxError(f"iterator {name!r} used before its loop is defined", tok.line, tok.col)
            elif name not in params:
                if declared:
                    raise LoopNestSyntaxError(f"undeclared parameter {name!r}", tok.line, tok.col)
                params.append(name)
        loops.append(Loop(var.text, lo, hi, head.line, head.col))
    overlap = set(params) & set(iterators)
    if overlap:
        raise LoopNestSyntaxError(f"name used as both parameter and iterator: {sorted(overlap)}", 1, 1)
    return LoopNestAst(params, loops)


def nest_to_polyhedron(ast: LoopNestAst) -> ParametricSystem:
    """One inequality per bound, with denominators cleared: x = iterators, y = parameters."""
    its = ast.iterators
    rows_A, rows_B, rhs = [], [], []

    def emit(expr: Affine, var: str, upper: bool):
        # lower: expr <= var  ->  expr_x - e_var <= -expr_c - expr_y.y
        # upper: var <= expr  ->  e_var - expr_x <= expr_c + expr_y.y
        s = 1 if upper else -1
        a = [Fraction(0)] * len(its)
        a[its.index(var)] += s
        for name, v in expr.coeffs.items():
            if name in its:
                a[its.index(name)] -= s * v
        bvec = [s * expr.coeffs.get(name, Fraction(0)) for name in ast.parameters]
        c = s * expr.const
        den = lcm_list([v.denominator for v in a + bvec + [c]])
        rows_A.append([int(v * den) for v in a])
        rows_B.append([v * den for v in bvec])
        rhs.append(c * den)

    for lp in ast.loops:
        emit(lp.lower, lp.var, upper=False)
        emit(lp.upper, lp.var, upper=True)
    return ParametricSystem.make(rows_A, rows_B, rhs, n_y=len(ast.parameters))


def simulate_nest(ast: LoopNestAst, y: Sequence[int]) -> int:
    """Literal iteration count of the nest for integer parameter values."""
    if len(y) != len(ast.parameters):
        raise ValueError(f"expected {len(ast.parameters)} parameter values, got {len(y)}")
    env = {name: Fraction(int(v)) for name, v in zip(ast.parameters, y)}

    def run(depth: int) -> int:
        if depth == len(ast.loops):
            return 1
        lp = ast.loops[depth]
        lo = math.ceil(lp.lower.value(env))
        hi = math.floor(lp.upper.value(env))
        total = 0
        for v in range(lo, hi + 1):
            env[lp.var] = Fraction(v)
            total += run(depth + 1)
        env.pop(lp.var, None)
        return total

    return run(0)
