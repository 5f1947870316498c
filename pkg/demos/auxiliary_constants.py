"""The constant C(chi, c) for the linear and kappa choices of chi."""
import math

from l2lab.auxiliary import Piecewise, chi_kappa, chi_linear, constant_C, demext_constant, kappa_constant

print(f"{'a':>4} {'C(1-t)':>14} {'e^a + 1':>14} {'C(kappa)':>14} {'bound':>14}")
for a in (1.0, 2.0, 4.0, 8.0):
    chi, dchi = chi_linear()
    lin = constant_C(chi, Piecewise(a), a, dchi).value
    k = kappa_constant(a)
    chi, dchi = chi_kappa(k.kappa)
    kap = constant_C(chi, Piecewise(a), a, dchi).value
    print(f"{a:4g} {lin:14.8f} {math.exp(a) + 1:14.8f} {kap:14.8f} {k.bound:14.8f}")

for m, p, eps in ((0, 1, 1.0), (1, 1, 1.0), (0, 2, 0.5), (2, 3, 4.0)):
    print(f"demext({m}, {p}, {eps:g}) = {demext_constant(m, p, eps):.12f}")
