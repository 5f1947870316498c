"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py`` (the lines appear in the terminal
summary) or ``python tests/test_acceptance.py``.
"""
import math
import time

import numpy as np
import pytest
from scipy.special import betainc

from l2lab.auxiliary import (
    Const,
    ExpT,
    Piecewise,
    build_aux_triple,
    chi_kappa,
    chi_linear,
    constant_C,
    demext_constant,
    kappa_constant,
    verify_ode_identities,
)
from l2lab.bergman import Monomial, build_space, kernel_at
from l2lab.domains import Annulus, Ball, Polydisc, named_balanced
from l2lab.extension import (
    concavity_report,
    default_grid,
    linearity_restriction_check,
    minimal_integral_curve,
)
from l2lab.green import PoleFunction, indicatrix_volume, tube_mass_limit
from l2lab.products import ProductSpace, layer_compatibility, product_min_extension_check
from l2lab.suita import (
    AnnulusGap,
    blocki_extension_check,
    blocki_volume_check,
    equality_locus_scan,
    kernel_deterioration,
    suita_report,
)
from l2lab.weights import Zero

RESULTS = {}
A_VALUES = (0.5, 1.0, 2.0, 5.0)


def record(num, title, ok, detail):
    RESULTS[num] = (ok, f"{'PASS' if ok else 'FAIL'}  [{num:2d}] {title}: {detail}")
    assert ok, RESULTS[num][1]


def homogeneous_cases():
    for n in (1, 2):
        d = Ball(n)
        s = build_space(d, Zero(), Monomial(24 if n == 1 else 12, n))
        for m in range(4):
            f = np.zeros(s.dim, complex)
            for i, al in enumerate(s.exponents):
                if sum(al) == m:
                    f[i] = 1.0 + 0.25j * i
            yield n, m, s, PoleFunction(d, [0.0] * n, 2.0 * (n + m)), f


def random_battery():
    rng = np.random.default_rng(2024)
    s = build_space(Ball(1), Zero(), Monomial(24))
    poles = (0.0, 0.3, -0.4j)
    for i in range(50):
        deg = int(rng.integers(0, 9))
        f = np.zeros(s.dim, complex)
        f[: deg + 1] = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        m = i % 3
        yield s, PoleFunction(Ball(1), [poles[i % 3]], 2.0 * (1 + m)), f, m


def test_01_sharpness():
    t0 = time.perf_counter()
    worst = 0.0
    for n, m, s, p, f in homogeneous_cases():
        c = minimal_integral_curve(s, p, f, m, [0.0, *A_VALUES])
        for a, Ia in zip(A_VALUES, c.values[1:]):
            worst = max(worst, abs(c.values[0] - math.exp(a) * Ia) / c.values[0])
    dt = time.perf_counter() - t0
    record(1, "sharpness of e^a", worst < 1e-10 and dt < 5, f"max rel dev {worst:.2e}, {dt:.2f}s")


def test_02_optimal_constant():
    t0 = time.perf_counter()
    worst = -math.inf
    for s, p, f, m in random_battery():
        c = minimal_integral_curve(s, p, f, m, [0.0, *A_VALUES])
        worst = max(worst, max(c.values[0] - math.exp(a) * Ia for a, Ia in zip(A_VALUES, c.values[1:])))
    dt = time.perf_counter() - t0
    record(2, "I(0) <= e^a I(a)", worst <= 1e-10 and dt < 10, f"max I(0) - e^a I(a) = {worst:.2e}, {dt:.2f}s")


def test_03_concavity():
    grid = default_grid(33)
    ok = True
    worst = -math.inf
    for s, p, f, m in random_battery():
        rep = concavity_report(minimal_integral_curve(s, p, f, m, grid))
        ok &= rep.concave
        worst = max(worst, float(np.max(rep.second_differences - rep.tolerances)))
    s = build_space(Ball(1), Zero(), Monomial(24))
    f = np.zeros(s.dim, complex)
    f[:2] = 1.0
    c = minimal_integral_curve(s, PoleFunction(Ball(1), [0.0], 4.0), f, 1, grid)
    dev = float(np.max(np.abs(c.values - (math.pi * np.sqrt(c.r) + math.pi / 2 * c.r))))
    record(3, "concavity of r -> I(-log r)", ok and dev < 1e-8,
           f"max (second diff - tol) {worst:.2e}, closed form dev {dev:.2e}")


def test_04_linearity_restriction():
    worst = 0.0
    ok = True
    for n, m, s, p, f in homogeneous_cases():
        lc = linearity_restriction_check(minimal_integral_curve(s, p, f, m, default_grid(33)))
        ok &= lc.passed
        worst = max(worst, lc.max_deviation)
    record(4, "linearity forces restriction", ok and worst < 1e-8, f"max coefficient deviation {worst:.2e}")


def product_instances(count=100):
    rng = np.random.default_rng(5)

    def sites():
        k = int(rng.integers(1, 3))
        while True:
            z = 0.7 * np.sqrt(rng.random(k)) * np.exp(2j * np.pi * rng.random(k))
            if k == 1 or abs(z[0] - z[1]) >= 0.4:
                return list(z)

    def poly(S, m, vanish):
        g = (rng.normal(size=5) + 1j * rng.normal(size=5)) / (1.0 + np.arange(5))
        if vanish:
            for z in S:
                for _ in range(m):
                    g = np.convolve(g, [-z, 1.0])
        out = np.zeros(13, complex)
        out[: g.size] = g
        return out

    for _ in range(count):
        m1, m2 = (int(v) for v in rng.integers(0, 3, size=2))
        S1, S2 = sites(), sites()
        vanish = bool(rng.random() < 0.5)
        yield poly(S1, m1, vanish), poly(S2, m2, vanish), S1, S2, m1, m2


def test_05_product_property():
    t0 = time.perf_counter()
    disc = build_space(Ball(1), Zero(), Monomial(12))
    ps = ProductSpace(disc, disc)
    worst_margin, worst_eq, n_eq = math.inf, 0.0, 0
    for f1, f2, S1, S2, m1, m2 in product_instances():
        r = product_min_extension_check(ps, f1, f2, S1, S2, m1, m2)
        worst_margin = min(worst_margin, r.margin)
        if r.equality_expected:
            n_eq += 1
            worst_eq = max(worst_eq, abs(r.margin), r.tensor_match)
    layer = max(c.residual for c in layer_compatibility(ps, [0.0, 0.5], [0.3j], 2))
    dt = time.perf_counter() - t0
    ok = worst_margin >= -1e-10 and worst_eq <= 1e-10 and layer < 1e-8 and dt < 30
    record(5, "product property", ok,
           f"min margin {worst_margin:.2e}, equality dev {worst_eq:.2e} over {n_eq} cases, "
           f"layer residual {layer:.2e}, {dt:.2f}s")


def test_06_disc_suita():
    gaps = [abs(suita_report(Ball(1), complex(r), 0).gap) for r in (0.0, 0.3, 0.6, 0.9)]
    record(6, "disc Suita equality", max(gaps) < 1e-8, f"max |pi B - c^2| {max(gaps):.2e}")


def test_07_annulus_loci():
    t0 = time.perf_counter()
    notes = []
    ok = True
    for R, m, expected in ((4.0, 1, [2.0]), (8.0, 2, [2.0, 4.0]), (2.0, 0, [])):
        loc = equality_locus_scan(R, m, truncation=200)
        good = loc.matches(1e-4) and sorted(loc.predicted) == pytest.approx(expected)
        if expected:
            rel = [abs(suita_report(Annulus(R), r, m, truncation=200).gap) / float(AnnulusGap(R, m).rhs(r))
                   for r in loc.detected]
            good &= max(rel) < 1e-6
            notes.append(f"R={R:g} m={m} -> {[round(r, 6) for r in loc.detected]}")
        else:
            good &= loc.min_gap > 0
            notes.append(f"R={R:g} m={m} -> none, min gap {loc.min_gap:.2e}")
        ok &= good
    dt = time.perf_counter() - t0
    record(7, "annulus equality loci", ok and dt < 60, "; ".join(notes) + f"; {dt:.2f}s")


def test_08_blocki():
    rng = np.random.default_rng(8)
    ok = True
    worst_ext = -math.inf
    worst_vol = math.inf
    for d, pts, N in ((Ball(1), [[0.0], [0.3], [0.2 + 0.4j]], 24),
                      (Polydisc((1.0, 1.0)), [[0.0, 0.0], [0.3, -0.2]], 12)):
        s = build_space(d, Zero(), Monomial(N, d.dim))
        low = np.nonzero(np.sum(s.exponents, axis=1) <= 6)[0]
        for z in pts:
            for a in (0.5, 1.0, 2.0):
                for _ in range(5):
                    f = np.zeros(s.dim, complex)
                    f[low] = rng.normal(size=low.size) + 1j * rng.normal(size=low.size)
                    r = blocki_extension_check(s, z, f, a)
                    ok &= r.lhs <= r.rhs + 1e-10
                    worst_ext = max(worst_ext, r.lhs - r.rhs)
                v = blocki_volume_check(s, z, a)
                ok &= v.lhs >= 1 - 1e-8
                worst_vol = min(worst_vol, v.lhs)
    record(8, "Blocki bounds", ok, f"max lhs - rhs {worst_ext:.2e}, min B e^(2na) Vol {worst_vol:.10f}")


def test_09_azukawa():
    ok = True
    notes = []
    for d, z in ((Ball(1), [0.0]), (Ball(2), [0.0, 0.0]), (Ball(3), [0.0, 0.0, 0.0]), (Ball(1), [0.5])):
        B = kernel_at(build_space(d), z, tail=False).diagonal
        val = B * indicatrix_volume(d, z).volume
        ok &= abs(val - 1) < 1e-6
        notes.append(f"{val - 1:.1e}")
    d = named_balanced("max", 2)
    s = build_space(d)
    ind = indicatrix_volume(d, [0.0, 0.0])
    val = kernel_at(s, [0.0, 0.0], tail=False).diagonal * ind.volume
    tol = ind.error_estimate / ind.volume + s.norm_rel_error
    ok &= abs(val - 1) <= max(tol, 1e-6)
    notes.append(f"max-gauge {val - 1:.1e} (tol {tol:.1e})")
    record(9, "Azukawa volume bound", ok, "B Vol - 1: " + ", ".join(notes))


def test_10_tube_mass():
    rels = []
    for z0 in (0.0, 0.5):
        lim = tube_mass_limit(PoleFunction(Ball(1), [complex(z0)], 2.0))
        rels.append(abs(lim.value - lim.reference) / lim.reference)
    record(10, "tube mass limit", max(rels) < 1e-4, f"max rel dev {max(rels):.2e}")


def test_11_auxiliary():
    ode = max(verify_ode_identities(build_aux_triple(c, 1.0), 100).max
              for c in (Const(2.0), ExpT(), Piecewise(1.0)))
    chi, dchi = chi_linear()
    cdev = max(abs(constant_C(chi, Piecewise(a), a, dchi).value - (math.exp(a) + 1)) for a in (0.0, 1.0, 2.0, 5.0))
    kap = True
    for a in (1.0, 2.0, 4.0):
        k = kappa_constant(a)
        ch, dch = chi_kappa(k.kappa)
        kap &= k.holds and constant_C(ch, Piecewise(a), a, dch).value < k.cap
    rng = np.random.default_rng(11)
    beta = 0.0
    for _ in range(10):
        m, p = int(rng.integers(0, 4)), int(rng.integers(1, 4))
        eps = float(rng.uniform(0.05, 1.0)) * (m + p)
        v, ref = demext_constant(m, p, eps), 1 / betainc(m + p, eps, 0.5)
        beta = max(beta, abs(v - ref) / ref)
    exact = demext_constant(0, 1, 1) == 2.0
    ok = ode < 1e-8 and cdev < 1e-10 and kap and exact and beta < 1e-8
    record(11, "auxiliary machinery", ok,
           f"ODE {ode:.1e}, C dev {cdev:.1e}, kappa {'ok' if kap else 'fails'}, demext exact={exact} beta {beta:.1e}")


def test_12_deterioration():
    ts = np.linspace(0.0, 4.0, 17)
    worst_inc = -math.inf
    worst_spread = 0.0
    for z0 in (0.0, 0.3, 0.5j):
        v = kernel_deterioration(Ball(1), [z0], ts)
        worst_inc = max(worst_inc, float(np.max(np.diff(v))) / v[0])
        worst_spread = max(worst_spread, float(np.ptp(v)) / v[0])
    record(12, "monotone kernel deterioration", worst_inc <= 1e-8 and worst_spread < 1e-8,
           f"max relative increase {worst_inc:.1e}, spread {worst_spread:.1e}")


if __name__ == "__main__":
    for name, fn in sorted((k, v) for k, v in globals().items() if k.startswith("test_")):
        try:
            fn()
        except AssertionError:
            pass
    for k in sorted(RESULTS):
        print(RESULTS[k][1])
