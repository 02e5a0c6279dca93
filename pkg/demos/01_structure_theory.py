#!/usr/bin/env python3
"""Tour of the SL(n,R) structure-theory layer.

Cartan and Jordan projections, the KA+K decomposition, the opposition involution,
the Iwasawa cocycle, and the symmetric-space distance, on hand-picked matrices.
"""

import math

import numpy as np

from slnlab import (
    GroupElement,
    cartan_of_power,
    cartan_projection,
    iwasawa_cocycle,
    jordan_projection,
    kak_decomposition,
    opposition_involution,
    simple_root_values,
    standard_flag,
    symmetric_space_distance,
)

g = GroupElement.from_matrix([[0.0, 2.0], [-0.5, 0.0]])
print("g =\n", g.entries)
print("kappa(g) =", cartan_projection(g).coords, " (log 2, -log 2)")

fib = GroupElement.from_matrix([[2, 1], [1, 1]])
print("\nfib =\n", fib.entries)
print("lambda(fib) =", jordan_projection(fib).coords)
print("log golden-ratio^2 =", math.log((3 + math.sqrt(5)) / 2))

print("\nJordan projection as the power average of the Cartan projection:")
for m in (4, 16, 64):
    avg = cartan_of_power(fib, m).coords / m
    print(f"  kappa(fib^{m:>2})/{m:<2} = {np.round(avg, 6)}")

dec = kak_decomposition(fib)
print("\nKA+K: k =\n", np.round(dec.k, 6))
print("a =", np.round(dec.a.coords, 6), " l =\n", np.round(dec.l, 6))
print("reconstruction error:", np.abs(dec.reconstruct() - fib.entries).max())

h = cartan_projection(GroupElement.from_matrix(np.diag([math.e**3, math.e**-1, math.e**-2])))
print("\nchamber point", h.coords, "has simple-root values",
      [rv.value for rv in simple_root_values(h)])
print("opposition involution sends it to", opposition_involution(h).coords)

flag = standard_flag(3)
d = GroupElement.from_matrix(np.diag([math.e**3, math.e**-1, math.e**-2]))
print("\nIwasawa cocycle of the diagonal at the standard flag:",
      iwasawa_cocycle(d, flag))

a = GroupElement.identity(2)
b = GroupElement.from_matrix(np.diag([math.e**2, math.e**-2]))
print("d(o, b o) =", symmetric_space_distance(a, b), " = sqrt(8) =", math.sqrt(8))
