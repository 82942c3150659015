"""
Counting at rational parameters
===============================

The fiber {x : 0 <= 2 x <= y} has floor(y/2) + 1 integer points for y >= 0.
The representation answers at any rational y, and its chamber formula has
coefficients that repeat with period 2 in y.
"""
from fractions import Fraction

from latcount.param_count import build_representation, chamber_coefficients, evaluate
from latcount.polyhedron import ParametricSystem

# rows of A x <= b + B y: -2x <= 0 and 2x <= y
system = ParametricSystem.make([[-2], [2]], [[0], [1]], [0, 0])
rep = build_representation(system)
print("chambers:", len(rep.chambers), " f-vector:", rep.f_vector)

for y in [0, 1, 2, Fraction(7, 2), Fraction(9, 2), 10, -1]:
    print(f"y = {str(y):>4}  count = {evaluate(rep, [y])}")

# a_0 + a_1 y with a_0 depending on the parity of y
cr = rep.lookup([5])
for y in range(6):
    a = chamber_coefficients(rep, cr, [y])
    print(f"y = {y}: a_0 = {a[(0,)]}, a_1 = {a[(1,)]}")
