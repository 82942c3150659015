"""Command-line interface: count, build, eval, ehrhart, chambers, loopnest, selftest.

Exit codes: 0 success, 1 usage, 2 input parse error, 3 unsupported instance,
4 internal invariant violation.
"""
from __future__ import annotations

import argparse
import json
import random
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .chambers import OUTSIDE, build_chamber_decomposition, chambers_to_json
from .counting import INFINITE, BudgetError, brute_force_count, count_fixed
from .exact_arith import fraction_str
from .loopnest import LoopNestSyntaxError, UnsupportedConstructError, nest_to_polyhedron, parse_loopnest, simulate_nest
from .param_count import (
    DomainError, InvariantViolation, UnsupportedInstanceError, build_representation, chamber_coefficients,
    complete_integer_ehrhart, evaluate, load_representation, multi_indices, save_representation,
)
from .polyhedron import load_system, standard_to_canonical, system_to_json
from .sampling import random_fixed_system, random_parametric_system, sample_parameters

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_UNSUPPORTED, EXIT_INTERNAL = 0, 1, 2, 3, 4
_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


@dataclass
class CliConfig:
    seed: int = 0
    budget: int = 2_000_000
    threads: int = 1
    fmt: str = "table"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_rational(text: str) -> Fraction:
    if not _RATIONAL.match(text.strip()):
        raise InputError(f"not an integer or p/q rational: {text!r}")
    value = Fraction(text.strip())
    return value


def _show(value) -> str:
    if value is OUTSIDE or value is INFINITE:
        return str(value)
    if isinstance(value, Fraction):
        return fraction_str(value)
    return str(value)


def _emit(cfg: CliConfig, payload: dict, out=None) -> None:
    out = out or sys.stdout
    if cfg.fmt == "json":
        out.write(json.dumps(payload, indent=1, sort_keys=True) + "\n")
        return
    width = max((len(k) for k in payload), default=0)
    for k, v in payload.items():
        if isinstance(v, (list, dict)):
            v = json.dumps(v, sort_keys=True)
        out.write(f"{k.ljust(width)}  {v}\n")


def _load_system(path: str):
    try:
        return load_system(path)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read system {path}: {exc}") from exc


def _load_repr(path: str):
    try:
        return load_representation(path)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read representation {path}: {exc}") from exc


def _fmt_point(y) -> list[str]:
    return [fraction_str(v) for v in y]


# ---------------------------------------------------------------- subcommands

def cmd_count(args, cfg: CliConfig) -> int:
    sys_ = _load_system(args.system)
    y = [parse_rational(v) for v in (args.y or [])]
    if len(y) != sys_.n_y:
        raise UsageError(f"system has {sys_.n_y} parameters; pass them with --y")
    if sys_.form != "canonical":
        sys_ = standard_to_canonical(sys_)
        if not sys_.conditions_hold(y):
            _emit(cfg, {"count": "0"})
            return EXIT_OK
    # with no rows left every integer x qualifies, unless there is no x at all
    value = count_fixed(sys_.A, sys_.rhs(y), seed=cfg.seed) if sys_.m or sys_.n_x == 0 else INFINITE
    _emit(cfg, {"count": _show(value)})
    return EXIT_OK


def cmd_build(args, cfg: CliConfig) -> int:
    rep = build_representation(_load_system(args.system), seed=cfg.seed, threads=cfg.threads)
    save_representation(rep, args.output)
    _emit(cfg, {
        "chambers": len(rep.chambers),
        "f_vector": {str(k): v for k, v in sorted(rep.f_vector.items())},
        "mu_measured": rep.mu_measured,
        "delta_measured": rep.delta_measured,
        "c": list(rep.c),
        "chi": rep.chi,
        "output": args.output,
    })
    return EXIT_OK


def cmd_eval(args, cfg: CliConfig) -> int:
    rep = _load_repr(args.repr)
    y = [parse_rational(v) for v in args.y]
    if len(y) != rep.system.n_y:
        raise UsageError(f"representation has {rep.system.n_y} parameters, got {len(y)}")
    _emit(cfg, {"y": _fmt_point(y), "count": _show(evaluate(rep, y))})
    return EXIT_OK


def cmd_ehrhart(args, cfg: CliConfig) -> int:
    rep = _load_repr(args.repr)
    y = [parse_rational(v) for v in args.chamber_of]
    if len(y) != rep.system.n_y:
        raise UsageError(f"representation has {rep.system.n_y} parameters, got {len(y)}")
    cr = rep.lookup(y)
    if cr is OUTSIDE:
        _emit(cfg, {"y": _fmt_point(y), "chamber": "OUTSIDE"})
        return EXIT_OK
    coeffs = chamber_coefficients(rep, cr, y)
    payload = {"y": _fmt_point(y), "chamber": cr.chamber.ident, "chamber_dim": cr.chamber.dim}
    if args.j is not None:
        j = tuple(int(v) for v in args.j)
        if j not in coeffs:
            raise UsageError(f"multi-index {j} must have {rep.system.n_y} entries summing to <= {rep.system.n_x}")
        payload["a" + _jname(j)] = fraction_str(coeffs[j])
    else:
        payload["coefficients"] = {_jname(j): fraction_str(coeffs[j]) for j in multi_indices(rep.system.n_y,
                                                                                              rep.system.n_x)}
    if args.complete:
        table = complete_integer_ehrhart(rep, eager_limit=0)[cr.chamber.ident]
        payload["modulus"] = table.modulus
        payload["table"] = {",".join(map(str, r)): {_jname(j): fraction_str(v) for j, v in row.items()}
                            for r, row in sorted(table.materialize(rep.system.n_y).items())}
    _emit(cfg, payload)
    return EXIT_OK


def _jname(j) -> str:
    return "(" + ",".join(str(v) for v in j) + ")"


def cmd_chambers(args, cfg: CliConfig) -> int:
    sys_ = _load_system(args.system)
    chambers, index = build_chamber_decomposition(sys_)
    dump = chambers_to_json(chambers, index)
    if cfg.fmt == "json":
        _emit(cfg, dump)
    else:
        sys.stdout.write(f"{len(index.hyperplanes)} hyperplanes, {len(chambers)} chambers\n")
        for ch in chambers:
            sys.stdout.write(f"  #{ch.ident:<3} dim {ch.dim}  signs {''.join('+0-'[1 - s] for s in ch.sign_vector)}"
                             f"  witness ({', '.join(_fmt_point(ch.witness))})  vertices {len(ch.vertices)}\n")
    return EXIT_OK


def cmd_loopnest(args, cfg: CliConfig) -> int:
    try:
        with open(args.file) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(str(exc)) from exc
    ast = parse_loopnest(text)
    sys_ = nest_to_polyhedron(ast)
    if args.eval is None:
        payload = {"parameters": ast.parameters, "iterators": ast.iterators}
        payload.update(system_to_json(sys_))
        if args.build:
            rep = build_representation(sys_, seed=cfg.seed, threads=cfg.threads)
            save_representation(rep, args.build)
            payload["representation"] = args.build
            payload["chambers"] = len(rep.chambers)
        _emit(cfg, payload)
        return EXIT_OK
    y = [parse_rational(v) for v in args.eval]
    if any(v.denominator != 1 for v in y):
        raise InputError("loop-nest parameters must be integers")
    y = [int(v) for v in y]
    if len(y) != len(ast.parameters):
        raise UsageError(f"nest has parameters {ast.parameters}; got {len(y)} values")
    counted = count_fixed(sys_.A, sys_.rhs(y), seed=cfg.seed)
    simulated = simulate_nest(ast, y)
    match = counted == simulated
    _emit(cfg, {"parameters": dict(zip(ast.parameters, y)), "count": _show(counted),
                "simulated": simulated, "match": match})
    if not match:
        sys.stderr.write("MISMATCH between counting and simulation\n")
        return EXIT_INTERNAL
    return EXIT_OK


def cmd_selftest(args, cfg: CliConfig) -> int:
    rng = random.Random(cfg.seed)
    fixed_pass = fixed_fail = 0
    for k in range(args.n):
        A, b = random_fixed_system(rng, bounded=(k % 2 == 0))
        try:
            expect = brute_force_count(A, b, budget=cfg.budget)
        except BudgetError:
            continue
        if count_fixed(A, b, seed=cfg.seed) == expect:
            fixed_pass += 1
        else:
            fixed_fail += 1
    param_pass = param_fail = 0
    built = 0
    while built < max(1, args.n // 20):
        sys_ = random_parametric_system(rng)
        try:
            rep = build_representation(sys_, seed=cfg.seed)
        except UnsupportedInstanceError:
            continue
        built += 1
        ints, rats = sample_parameters(rep, rng)
        for y in ints + rats:
            try:
                expect = brute_force_count(sys_.A, sys_.rhs(y), budget=cfg.budget)
            except BudgetError:
                continue
            got = evaluate(rep, y)
            got = 0 if got is OUTSIDE else got
            if got == expect:
                param_pass += 1
            else:
                param_fail += 1
    _emit(cfg, {"fixed_pass": fixed_pass, "fixed_fail": fixed_fail,
                "parametric_systems": built, "parametric_pass": param_pass, "parametric_fail": param_fail})
    return EXIT_OK if fixed_fail == 0 and param_fail == 0 else EXIT_INTERNAL


# ---------------------------------------------------------------- entry point

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for the generic direction (default 0)")
    p.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker processes for build (default 1)")
    p.add_argument("--budget", type=int, default=argparse.SUPPRESS, help="brute-force box budget")
    p.add_argument("--format", choices=("json", "table"), default=argparse.SUPPRESS, help="output format")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="latcount", description="Count integer points in parametric polyhedra.")
    _common(parser)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("count", help="count integer points of a system at fixed parameters")
    p.add_argument("system")
    p.add_argument("--y", nargs="+", help="parameter values (integers or p/q)")
    _common(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("build", help="build and save the parametric representation")
    p.add_argument("system")
    p.add_argument("-o", "--output", required=True)
    _common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("eval", help="evaluate a saved representation")
    p.add_argument("repr")
    p.add_argument("--y", nargs="+", required=True)
    _common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ehrhart", help="quasi-polynomial coefficients of the chamber containing a point")
    p.add_argument("repr")
    p.add_argument("--chamber-of", nargs="+", required=True, dest="chamber_of")
    p.add_argument("--j", nargs="+", help="one multi-index (default: all)")
    p.add_argument("--complete", action="store_true", help="also print the integer residue tables")
    _common(p)
    p.set_defaults(func=cmd_ehrhart)

    p = sub.add_parser("chambers", help="print the chamber decomposition")
    p.add_argument("system")
    _common(p)
    p.set_defaults(func=cmd_chambers)

    p = sub.add_parser("loopnest", help="compile a loop nest; optionally count or build")
    p.add_argument("file")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--eval", nargs="+", help="integer parameter values")
    g.add_argument("--build", metavar="REPR", nargs="?", const="loopnest.repr.json",
                   help="build a representation (default path loopnest.repr.json)")
    _common(p)
    p.set_defaults(func=cmd_loopnest)

    p = sub.add_parser("selftest", help="oracle-equivalence suites on random systems")
    p.add_argument("--n", type=int, default=100, help="number of fixed systems (default 100)")
    _common(p)
    p.set_defaults(func=cmd_selftest)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            raise UsageError("missing subcommand")
        cfg = CliConfig(seed=getattr(args, "seed", 0), budget=getattr(args, "budget", 2_000_000),
                        threads=getattr(args, "threads", 1), fmt=getattr(args, "format", "table"))
        return args.func(args, cfg)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (InputError, LoopNestSyntaxError, UnsupportedConstructError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_PARSE
    except (UnsupportedInstanceError, DomainError) as exc:
        sys.stderr.write(f"unsupported instance: {exc}\n")
        return EXIT_UNSUPPORTED
    except (InvariantViolation, AssertionError) as exc:
        sys.stderr.write(f"internal invariant violation: {exc}\n")
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())
