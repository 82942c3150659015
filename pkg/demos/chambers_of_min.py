"""
Chambers of a two-parameter family
==================================

{x : 0 <= x <= min(y1, y2)} changes shape along y1 = y2: on one side the
upper vertex is y1, on the other it is y2. The chamber decomposition has two
open cones, three rays and the apex.
"""
from latcount.chambers import build_chamber_decomposition
from latcount.param_count import build_representation, evaluate
from latcount.polyhedron import ParametricSystem

system = ParametricSystem.make([[-1], [1], [1]], [[0, 0], [1, 0], [0, 1]], [0, 0, 0])
chambers, index = build_chamber_decomposition(system)
print("hyperplanes:", [(h.a, str(h.a0)) for h in index.hyperplanes])
for ch in chambers:
    signs = "".join("+0-"[1 - s] for s in ch.sign_vector)
    print(f"  chamber {ch.ident}: dim {ch.dim}, signs {signs}, witness {[str(v) for v in ch.witness]}")

rep = build_representation(system)
for y in [(3, 5), (5, 3), (4, 4), (0, 2), (-1, 3)]:
    print(y, "->", evaluate(rep, y))
