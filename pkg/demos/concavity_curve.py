"""Minimal L^2 integrals of f = 1 + z on the unit disc with a 2-jet at 0.

Prints r, I(-log r) and the closed form pi sqrt(r) + pi r / 2, then the
second differences that certify concavity.
"""
import math

import numpy as np

from l2lab import Ball, Monomial, PoleFunction, Zero, build_space, minimal_integral_curve
from l2lab.extension import concavity_report, default_grid

s = build_space(Ball(1), Zero(), Monomial(24))
f = np.zeros(s.dim, complex)
f[:2] = 1.0
curve = minimal_integral_curve(s, PoleFunction(Ball(1), [0.0], 4.0), f, 1, default_grid(17))

print(f"{'r':>10} {'I(-log r)':>18} {'closed form':>18}")
for r, v in zip(curve.r, curve.values):
    print(f"{r:10.4f} {v:18.12f} {math.pi * math.sqrt(r) + math.pi * r / 2:18.12f}")

rep = concavity_report(curve)
print("concave:", rep.concave, " max second difference:", float(np.max(rep.second_differences)))
