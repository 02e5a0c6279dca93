#!/usr/bin/env python3
"""Symmetric-space shadows: membership by chamber minimization, the member ray
bound, overlap separation, and calibration of the radius that swallows the flag
shadow of a contracting element.
"""

import math

import numpy as np

from slnlab import (
    Flag,
    GroupElement,
    SymShadowQuery,
    calibrate_radius,
    kak_decomposition,
    overlap_distance_bound,
    ray_distance_bound,
    shadows_certified_disjoint,
    sym_shadow_membership,
)

ident = GroupElement.identity(2)
g = GroupElement.from_matrix(np.diag([math.e**5, math.e**-5]))

own = Flag(kak_decomposition(g).k)
res = sym_shadow_membership(SymShadowQuery(ident, g, 1e-3), own)
print(f"own orientation flag: member={res.member}, achieved distance {res.achieved:.2e}")
print("minimizing chamber point:", np.round(res.minimizer.coords, 4))

opposite = Flag(np.array([[0.0, 1.0], [1.0, 0.0]]))
res2 = sym_shadow_membership(SymShadowQuery(ident, g, 1.0), opposite)
print(f"\nflag at the repelling direction: member={res2.member}, "
      f"achieved {res2.achieved:.2f} (lower-bounded by ~{5 * math.sqrt(2):.2f})")

lhs, bound, holds = ray_distance_bound(own, g, R=1.0)
print(f"\nmember ray bound: distance {lhs:.2e} <= {bound} -> {holds}")

r = GroupElement.from_matrix([[0.0, -1.0], [1.0, 0.0]])
h = r.matmul(g).matmul(r.inverse())
inter, bound_ok = overlap_distance_bound(g, h, R=0.25, probe_budget=16)
print(f"\northogonal-axis pair: shadows intersect={inter}; "
      f"closed-form disjointness: {shadows_certified_disjoint(g, h, 0.25)}")

d = GroupElement.from_exact([["148", "0"], ["0", "1/148"]])
rows, r_min = calibrate_radius(d, epsilon=0.1, radii=[0.05, 0.2, 0.5, 1.0, 2.0],
                               probe_budget=24)
print("\ncalibration sweep (epsilon, n, R, violations, probes):")
for row in rows:
    print("  ", row)
print("smallest clean radius:", r_min)
