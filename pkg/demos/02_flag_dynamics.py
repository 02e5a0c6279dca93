#!/usr/bin/env python3
"""Flags, the group action, metrics, and north-south dynamics.

A loxodromic element pulls every flag that is transverse to its repelling data
toward its attracting flag; the table below shows the decay under iteration.
"""

import math

import numpy as np

from slnlab import (
    Flag,
    GroupElement,
    act_on_flag,
    attracting_flag,
    flag_distance,
    flag_from_frame,
    repelling_flag,
    transversality_margin,
)

g = GroupElement.from_matrix(np.diag([math.e**2, 1.0, math.e**-2]))
xp = attracting_flag(g)
xm = repelling_flag(g)
print("attracting flag fixed:", flag_distance(act_on_flag(g, xp), xp))
print("fixed-data separation:", transversality_margin(xp, xm).value)

rng = np.random.default_rng(5)
f = flag_from_frame(rng.standard_normal((3, 3)))
print("\nstarting flag margin against the repelling data:",
      round(transversality_margin(f, xm).value, 4))
print(f"{'step':>4}  {'distance to attracting flag':>28}")
cur = f
for step in range(9):
    print(f"{step:>4}  {flag_distance(cur, xp):>28.3e}")
    cur = act_on_flag(g, cur)

print("\ntransversality margins on lines (n=2):")
for deg in (90, 60, 45, 20, 5, 0):
    phi = math.radians(deg)
    x = Flag(np.array([[1.0, 0.0], [0.0, 1.0]]))
    from slnlab import OppositeFlag

    y = OppositeFlag(np.array([[-math.sin(phi), math.cos(phi)],
                               [math.cos(phi), math.sin(phi)]]))
    print(f"  angle {deg:>3} deg -> margin {transversality_margin(x, y).value:.4f}")
