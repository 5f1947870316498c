import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import betainc

from l2lab.auxiliary import (
    CFamily,
    Const,
    ExpT,
    Piecewise,
    Rational,
    build_aux_triple,
    check_admissible,
    chi_kappa,
    chi_linear,
    constant_C,
    demext_constant,
    ineq_for_c_margin,
    kappa_constant,
    smoothing_eval,
    verify_ode_identities,
)
from l2lab.errors import DenominatorVanishes, InadmissibleC, InvalidGrid, InvalidParameter, InvalidParameters


# -- triple

@pytest.mark.parametrize("a", [0.0, 1.0, 3.5])
def test_constant_profile_closed_forms(a):
    t3 = build_aux_triple(Const(a + 1), a)
    for t in np.linspace(0.05, a + 0.9, 7):
        L = a + 1 - t
        u, s, g = t3.values(t)
        assert u == pytest.approx(a - math.log(L), abs=1e-13)
        assert s == pytest.approx(L / 2, rel=1e-13)
        assert g == pytest.approx(L / 2, rel=1e-13)


def test_expt_profile_closed_forms():
    a = 2.0
    A = a + 1
    t3 = build_aux_triple(ExpT(), a)
    for t in (0.1, 1.0, 2.5):
        I1 = math.exp(A) - math.exp(t)
        I2 = math.exp(A) * (A - t - 1) + math.exp(t)
        u, s, g = t3.values(t)
        assert u == pytest.approx(a - math.log(I1), abs=1e-13)
        assert s == pytest.approx(I2 / I1, rel=1e-12)
        assert g == pytest.approx((I1 ** 2 - math.exp(t) * I2) / (math.exp(t) * I1), rel=1e-12)


@pytest.mark.parametrize("a", [0.0, 1.0, 5.0])
def test_ode_residuals_constant(a):
    r = verify_ode_identities(build_aux_triple(Const(a + 1), a), 100)
    assert r.first < 1e-10 and r.second < 1e-10 and r.third < 1e-10
    assert r.signs_ok


@pytest.mark.parametrize("c,a", [(ExpT(), 1.0), (ExpT(), 5.0), (Piecewise(1.0), 1.0), (Piecewise(5.0), 5.0),
                                 (Rational(1, 1, 0.5), 2.0)])
def test_ode_residuals_general(c, a):
    r = verify_ode_identities(build_aux_triple(c, a), 100)
    assert r.max < 1e-8
    assert r.signs_ok


@pytest.mark.parametrize("c,a", [(Const(3.0), 2.0), (ExpT(), 2.0), (Piecewise(2.0), 2.0)])
def test_third_identity_pointwise(c, a):
    t3 = build_aux_triple(c, a)
    for t in np.linspace(0.03, a + 0.97, 11):
        u, s, g = t3.values(t)
        assert math.exp(a - u) / (s + g) == pytest.approx(t3.c(t), rel=1e-10)


def test_degenerate_grid():
    t3 = build_aux_triple(Const(2.0), 1.0)
    with pytest.raises(InvalidGrid):
        verify_ode_identities(t3, 1)


def test_profile_must_cover_interval():
    with pytest.raises(InadmissibleC):
        build_aux_triple(Const(0.5), 1.0)
    with pytest.raises(InvalidParameter):
        build_aux_triple(Piecewise(2.0), 1.0)


def test_rational_admissibility_and_turning_point():
    c = Rational(1, 1, 0.5)
    assert np.all(check_admissible(c, -20.0, 30.0) > 0)
    t0 = c.t0
    assert t0 == pytest.approx(2 * math.log(4), rel=1e-15)
    left = np.linspace(t0 - 10, t0 - 1e-3, 50)
    right = np.linspace(t0 + 1e-3, t0 + 10, 50)
    assert np.all(c.dlog(left) > 0) and np.all(c.dlog(right) < 0)
    assert abs(c.dlog(t0)) < 1e-14


@pytest.mark.parametrize("c", [Piecewise(3.0), Rational(0, 2, 1.0), Rational(2, 1, 0.3)])
def test_ineq_for_c_on_grid(c):
    A = c.A if math.isfinite(c.A) else None
    grid = np.linspace(-5.0 if A is None else 0.0, 3.9, 200)
    assert np.all(ineq_for_c_margin(c, grid, A) > 0)


def test_rational_profile_values():
    c = Rational(1, 2, 0.7)
    for t in (-3.0, 0.0, 2.0, 40.0):
        ref = math.exp(t) / (1 + math.exp(t / 3)) ** 3.7
        assert c(t) == pytest.approx(ref, rel=1e-13)
    with pytest.raises(InvalidParameters):
        Rational(1, 0, 0.5)


# -- C(chi, c)

@pytest.mark.parametrize("a", [0.0, 1.0, 2.0, 5.0])
def test_constant_C_linear_chi(a):
    chi, dchi = chi_linear()
    r = constant_C(chi, Piecewise(a), a, dchi)
    assert r.value == pytest.approx(math.exp(a) + 1, abs=1e-10)


def test_constant_C_numeric_derivative_agrees():
    chi, dchi = chi_linear()
    a = 1.0
    assert constant_C(chi, Piecewise(a), a).value == pytest.approx(
        constant_C(chi, Piecewise(a), a, dchi).value, rel=1e-8)


@pytest.mark.parametrize("c", [Piecewise(1.0), ExpT()])
def test_constant_C_at_least_exp_a(c):
    a = 1.0
    for chi, dchi in (chi_linear(), chi_kappa(0.7), chi_kappa(2.0)):
        assert constant_C(chi, c, a, dchi).value >= math.exp(a) - 1e-12


def test_constant_C_unit_profile():
    # c = 1 with linear chi: the sup sits at the left end
    chi, dchi = chi_linear()
    r = constant_C(chi, Const(2.0), 1.0, dchi)
    assert r.at_left_limit and r.value == pytest.approx(3.0, abs=1e-10)


def test_constant_C_denominator():
    with pytest.raises(DenominatorVanishes):
        chi, dchi = chi_linear()
        constant_C(chi, Rational(0, 1, 10.0), 1.0, dchi)


# -- kappa

@pytest.mark.parametrize("a", [1.0, 2.0, 4.0])
def test_kappa_bound(a):
    k = kappa_constant(a)
    assert k.kappa / math.expm1(k.kappa) == pytest.approx(math.sqrt(1 - math.exp(-a)), abs=1e-12)
    assert k.holds and k.bound < k.cap
    chi, dchi = chi_kappa(k.kappa)
    assert chi(1e-12) == pytest.approx(1.0, abs=1e-10) and chi(1 - 1e-12) == pytest.approx(0.0, abs=1e-10)
    assert constant_C(chi, Piecewise(a), a, dchi).value <= k.bound + 1e-10


def test_kappa_large_a_limit():
    gaps = [kappa_constant(a).bound - math.exp(a) for a in (5.0, 10.0, 20.0, 30.0)]
    assert all(g >= 0 for g in gaps)
    assert gaps[-1] < 1e-6 and gaps == sorted(gaps, reverse=True)
    assert kappa_constant(30.0).kappa < 1e-6


def test_kappa_needs_a_at_least_one():
    with pytest.raises(InvalidParameter):
        kappa_constant(0.5)


# -- Beta ratio

def midpoint_oracle(m, p, eps, n=1_000_000):
    """Midpoint rule; for eps < 1 both integrals go through 1 - tau = x^{1/eps} first."""
    k = m + p
    x = (np.arange(n) + 0.5) / n
    if eps >= 1:
        f = lambda tau: tau ** (k - 1) * (1 - tau) ** (eps - 1)
        return np.mean(f(x)) / (0.5 * np.mean(f(0.5 * x)))
    num = np.mean((1 - x ** (1 / eps)) ** (k - 1)) / eps
    lo = 0.5 ** eps
    xs = lo + (1 - lo) * x
    den = (1 - lo) * np.mean((1 - xs ** (1 / eps)) ** (k - 1)) / eps
    return num / den


def test_demext_examples():
    assert demext_constant(0, 1, 1) == 2.0
    assert demext_constant(1, 1, 1) == pytest.approx(4.0, rel=1e-14)
    assert demext_constant(0, 2, 0.5) == pytest.approx(midpoint_oracle(0, 2, 0.5), rel=1e-8)


def test_demext_random_against_beta():
    rng = np.random.default_rng(7)
    for _ in range(10):
        m = int(rng.integers(0, 4))
        p = int(rng.integers(1, 4))
        eps = float(rng.uniform(0.05, m + p))
        v = demext_constant(m, p, eps)
        assert v == pytest.approx(1 / betainc(m + p, eps, 0.5), rel=1e-8)
        assert v == pytest.approx(midpoint_oracle(m, p, eps, 200_000), rel=1e-6)


def test_demext_invalid():
    for args in ((0, 0, 0.5), (0, 1, 0.0), (0, 1, 1.5), (-1, 2, 0.5)):
        with pytest.raises(InvalidParameters):
            demext_constant(*args)


# -- v_{a,b}, chi_{a,b}

def test_smoothing_examples():
    a, b = 1.0, 2.0
    assert smoothing_eval(a, b, -a - b) == pytest.approx((-a - b / 2, 1.0))
    assert smoothing_eval(a, b, -a) == pytest.approx((-a, 0.0))
    v, chi = smoothing_eval(a, b, -a - b / 2)
    assert v >= -a - b / 2 and chi == pytest.approx(0.5)


@settings(max_examples=60, deadline=None)
@given(st.floats(-3, 3), st.floats(0.01, 5))
def test_smoothing_properties(a, b):
    t = np.linspace(-a - b - 3, -a + 3, 2001)
    v, chi = smoothing_eval(a, b, t)
    assert np.all((chi >= 0) & (chi <= 1))
    assert np.all(v >= t - 1e-12)
    assert np.allclose(v[t >= -a], t[t >= -a])
    assert np.allclose(v[t <= -a - b], -a - b / 2)
    dv = np.diff(v) / np.diff(t)
    assert np.all(dv >= -1e-9) and np.all(dv <= 1 + 1e-9)
    assert np.all(np.diff(dv) >= -1e-7)
    assert np.max(np.abs(np.diff(v))) <= np.max(np.diff(t)) + 1e-12      # continuity


def test_smoothing_requires_positive_b():
    with pytest.raises(InvalidParameter):
        smoothing_eval(1.0, 0.0, 0.0)


def test_unknown_kind():
    with pytest.raises(InvalidParameter):
        CFamily("Cubic")(0.5)
