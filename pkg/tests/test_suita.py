import math

import numpy as np
import pytest

from l2lab.bergman import Monomial, ProductBasis, build_space
from l2lab.domains import Annulus, Ball, Disc, Polydisc, Product
from l2lab.errors import InvalidParameter, UnsupportedWeight
from l2lab.suita import (
    AnnulusGap,
    blocki_extension_check,
    blocki_volume_check,
    equality_locus_scan,
    kernel_deterioration,
    suita_report,
)
from l2lab.weights import Zero


@pytest.mark.parametrize("r", [0.0, 0.3, 0.6, 0.9])
@pytest.mark.parametrize("m", [0, 1, 2])
def test_disc_equality(r, m):
    rep = suita_report(Ball(1), r * np.exp(0.7j), m)
    assert abs(rep.gap) < 1e-8 * max(1.0, rep.rhs)
    assert abs(rep.gap) <= max(5 * rep.error, 1e-12 * rep.rhs)


def test_disc_unweighted_value():
    # pi B(z0) = c(z0)^2 = 1 / (1 - |z0|^2)^2
    rep = suita_report(Ball(1), 0.5, 0)
    assert rep.piB == pytest.approx(1 / 0.75 ** 2, rel=1e-12)


def test_annulus_strict_at_geometric_mean():
    rep = suita_report(Annulus(2.0), math.sqrt(2), 0)
    assert rep.gap >= -rep.error
    g = AnnulusGap(2.0, 0)
    val = g(g.ctx.sqrt(2))
    assert val > 1000 * g.error
    assert float(val) == pytest.approx(rep.relative_gap, abs=5 * rep.error / rep.rhs)


def test_annulus_jet_equality_point():
    rep = suita_report(Annulus(4.0), 2.0, 1)
    assert abs(rep.gap) < max(1e-6 * rep.rhs, 5 * rep.error)


@pytest.mark.parametrize("R,m", [(2.0, 0), (4.0, 1), (8.0, 2), (3.0, 1)])
def test_double_matches_high_precision(R, m):
    g = AnnulusGap(R, m)
    for frac in (0.2, 0.5, 0.8):
        r = R ** frac
        rep = suita_report(Annulus(R), r, m)
        assert rep.piB == pytest.approx(float(g.pi_jet(r)), rel=1e-11)
        assert rep.rhs == pytest.approx(float(g.rhs(r)), rel=1e-11)


def test_weighted_annulus_inequality():
    for alpha in (-0.7, 0.5):
        for m in (0, 1):
            g = AnnulusGap(3.0, m, alpha)
            rep = suita_report(Annulus(3.0), 1.7, m, alpha)
            assert rep.gap >= -rep.error
            assert rep.piB == pytest.approx(float(g.pi_jet(1.7)), rel=1e-11)


@pytest.mark.parametrize("R,m,expected", [(4.0, 1, [2.0]), (8.0, 2, [2.0, 4.0]), (2.0, 0, [])])
def test_equality_loci(R, m, expected):
    loc = equality_locus_scan(R, m)
    assert loc.predicted == pytest.approx(expected)
    assert loc.matches(1e-4)
    assert sorted(loc.detected) == pytest.approx(expected, abs=1e-4)
    if not expected:
        assert loc.min_gap > 0
    for r in loc.detected:
        rep = suita_report(Annulus(R), r, m)
        assert abs(rep.gap) < 1e-6 * rep.rhs


def test_locus_scan_grid_too_small():
    with pytest.raises(InvalidParameter):
        equality_locus_scan(4.0, 1, radial_grid=32)


@pytest.mark.parametrize("R,m", [(3.0, 0), (3.0, 1), (8.0, 2)])
def test_inversion_symmetry(R, m):
    # z -> R / z maps the annulus to itself; the relative gap is invariant
    g = AnnulusGap(R, m)
    for r in (1.2, 1.5, 2.0):
        a, b = g(r), g(g.ctx.mpf(R) / r)
        assert abs(a - b) < 1e-30 + 1e-20 * abs(a)


@pytest.mark.parametrize("lam", [2.0, 1 / 3])
@pytest.mark.parametrize("m", [0, 1])
def test_disc_scaling_invariance(lam, m):
    z0 = 0.4 + 0.1j
    a = suita_report(Disc(1.0), z0, m)
    b = suita_report(Disc(lam), lam * z0, m)
    assert abs(a.relative_gap - b.relative_gap) < 1e-10
    assert b.piB == pytest.approx(a.piB * lam ** (-2 * m - 2), rel=1e-10)


@pytest.mark.parametrize("R", [2.0, 4.0, 8.0])
def test_truncation_doubling(R):
    for frac in (0.3, 0.5, 0.7):
        rep = suita_report(Annulus(R), R ** frac, 1, truncation=200)
        assert rep.truncation_change < 1e-10 * rep.piB


def test_errors():
    with pytest.raises(UnsupportedWeight):
        suita_report(Ball(1), 0.3, 0, alpha=0.5)
    with pytest.raises(InvalidParameter):
        suita_report(Ball(2), [0.0, 0.0], 0)
    with pytest.raises(InvalidParameter):
        suita_report(Annulus(2.0), 0.5, 0)


# -- deterioration along sublevel sets

@pytest.mark.parametrize("z0", [0.0, 0.3, 0.5j])
def test_disc_deterioration_constant(z0):
    ts = np.linspace(0, 4, 9)
    v = kernel_deterioration(Ball(1), [z0], ts)
    assert np.all(np.diff(v) <= 1e-8 * v[0])
    assert np.ptp(v) < 1e-8 * v[0]
    c2 = 1 / (1 - abs(z0) ** 2) ** 2
    assert v[0] == pytest.approx(c2 / math.pi, rel=1e-10)


def test_annulus_deterioration_nonincreasing():
    v = kernel_deterioration(Annulus(2.0), [1.5], [0.0, 1.0, 2.0, 4.0], N=24)
    assert np.all(np.diff(v) <= 1e-8 * v[0])
    # B_t e^{-t} tends to c^2 / pi, which is below B_0 by the Suita gap
    rep = suita_report(Annulus(2.0), 1.5, 0)
    assert v[-1] == pytest.approx(rep.rhs / math.pi, rel=1e-9)


# -- Blocki-type bounds

def test_blocki_extension_disc_battery():
    s = build_space(Ball(1), Zero(), Monomial(10))
    rng = np.random.default_rng(11)
    for z0 in (0.0, 0.3, -0.2 + 0.4j):
        for a in (0.5, 1.0, 2.0):
            for _ in range(4):
                f = rng.normal(size=s.dim) + 1j * rng.normal(size=s.dim)
                assert blocki_extension_check(s, [z0], f, a).passed


def test_blocki_extension_bidisc():
    d = Polydisc((1.0, 1.0))
    s = build_space(d, Zero(), Monomial(5, 2))
    rng = np.random.default_rng(12)
    for z0 in ([0.0, 0.0], [0.3, -0.2]):
        for a in (0.5, 1.0):
            f = rng.normal(size=s.dim) + 1j * rng.normal(size=s.dim)
            r = blocki_extension_check(s, z0, f, a)
            assert r.passed, (z0, a, r)


def test_blocki_disc_origin_is_sharp_for_constants():
    s = build_space(Ball(1), Zero(), Monomial(6))
    f = np.zeros(s.dim, complex)
    f[0] = 1.0
    r = blocki_extension_check(s, [0.0], f, 1.0)
    # |1|^2 pi vs e^2 * pi e^{-2}
    assert r.lhs == pytest.approx(r.rhs, rel=1e-12)


@pytest.mark.parametrize("d,pts", [(Ball(1), [[0.0], [0.3], [0.5j]]),
                                   (Polydisc((1.0, 1.0)), [[0.0, 0.0], [0.3, -0.2]])])
def test_blocki_volume(d, pts):
    s = build_space(d, Zero(), Monomial(24 if d.dim == 1 else 10, d.dim))
    for w in pts:
        for a in (0.5, 1.0, 2.0):
            r = blocki_volume_check(s, w, a)
            assert r.passed and r.lhs >= 1 - 1e-8


def test_blocki_volume_product_basis():
    d = Product(Ball(1), Ball(1))
    s = build_space(d, Zero(), ProductBasis(Monomial(12), Monomial(12)))
    assert blocki_volume_check(s, [0.0, 0.0], 1.0).lhs == pytest.approx(1.0, rel=1e-12)
