"""
Iteration count of an affine loop nest
======================================

The nest in example.nest is compiled to a parametric polytope in the
iterators (i, j, k) with parameters (n, m, p). One preprocessing pass gives a
formula that is then queried on a grid and compared with running the loops.
"""
from itertools import product
from pathlib import Path
import time

from latcount.chambers import OUTSIDE
from latcount.loopnest import nest_to_polyhedron, parse_loopnest, simulate_nest
from latcount.param_count import build_representation, evaluate

text = (Path(__file__).parent / "example.nest").read_text()
print(text)
ast = parse_loopnest(text)
system = nest_to_polyhedron(ast)

print("A | B | b")
for a, bb, c in zip(system.A, system.B, system.b):
    print(f"  {list(a)} | {[int(v) for v in bb]} | {c}")

t0 = time.time()
rep = build_representation(system)
print(f"built {len(rep.chambers)} chambers in {time.time() - t0:.2f}s")

# OUTSIDE means the rational fiber is empty; the loops then run zero times
bad = 0
for y in product(range(7), repeat=3):
    got = evaluate(rep, y)
    bad += (0 if got is OUTSIDE else got) != simulate_nest(ast, y)
print("grid [0,6]^3 mismatches:", bad)
print("(n, m, p) = (6, 6, 6):", evaluate(rep, (6, 6, 6)), "iterations")
