"""
Ehrhart polynomials of dilated simplices
========================================

For the standard simplex {x >= 0, x_1 + ... + x_n <= t} the count is
C(t + n, n). The chamber t > 0 carries a polynomial whose coefficients are
read off with ehrhart_coefficient.
"""
import math

from latcount.param_count import build_representation, ehrhart_coefficient, evaluate
from latcount.polyhedron import ParametricSystem

for n in (1, 2, 3):
    A = [[-int(i == j) for j in range(n)] for i in range(n)] + [[1] * n]
    rep = build_representation(ParametricSystem.make(A, [[0]] * n + [[1]], [0] * (n + 1)))
    cr = rep.lookup([1])
    coeffs = [ehrhart_coefficient(rep, cr, [j], [1]) for j in range(n + 1)]
    print(f"n = {n}: coefficients a_0..a_{n} = {[str(a) for a in coeffs]}")
    print("   counts t = 0..8:", [evaluate(rep, [t]) for t in range(9)])
    print("   C(t+n, n)      :", [math.comb(t + n, n) for t in range(9)])
