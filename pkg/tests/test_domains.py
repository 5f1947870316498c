import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from l2lab.domains import (
    Annulus,
    Ball,
    MonteCarlo,
    Polydisc,
    Sublevel,
    UnitBall,
    build_domain,
    contains,
    named_balanced,
    volume,
)
from l2lab.errors import DimensionMismatch, ExactUnavailable, InvalidParameter, NonHomogeneousGauge
from l2lab.green import PoleFunction
from l2lab.quadrature import quadrature_for
from l2lab.weights import RadialLog, Zero


def test_build_unit_disc():
    d = build_domain({"kind": "UnitBall", "n": 1})
    assert d == UnitBall(1)
    assert d.dim == 1


def test_max_gauge_is_polydisc():
    d = build_domain({"kind": "balanced", "gauge": "max", "n": 2})
    rng = np.random.default_rng(1)
    z = 1.2 * (rng.uniform(-1, 1, (2000, 2)) + 1j * rng.uniform(-1, 1, (2000, 2)))
    assert np.array_equal(contains(d, z), contains(Polydisc((1.0, 1.0)), z))


@pytest.mark.parametrize("cfg", [{"kind": "annulus", "R": 0.5}, {"kind": "annulus", "R": 1.0},
                                 {"kind": "polydisc", "radii": [1.0, -1.0]}, {"kind": "ball", "n": 0}])
def test_invalid_parameters(cfg):
    with pytest.raises(InvalidParameter):
        build_domain(cfg)


def test_non_homogeneous_gauge_rejected():
    with pytest.raises(NonHomogeneousGauge):
        build_domain({"kind": "balanced", "n": 2, "gauge": lambda z: np.sum(np.abs(z) ** 2, axis=-1)})


def test_unknown_keys_rejected():
    with pytest.raises(InvalidParameter):
        build_domain({"kind": "disc", "radius": 1.0, "colour": "red"})


def test_contains_examples():
    assert contains(Ball(1), 0.5)
    assert not contains(Annulus(2.0), 1.0)
    p = PoleFunction(Ball(1), [0.0], 2.0)
    assert contains(Sublevel(Ball(1), p, 1.0), 0.5)
    assert not contains(Sublevel(Ball(1), p, 1.0), 0.7)


def test_contains_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        contains(Ball(2), np.array([0.1, 0.2, 0.3]))


def test_volume_examples():
    assert volume(Ball(2)).value == pytest.approx(math.pi ** 2 / 2, rel=1e-15)
    assert volume(Annulus(2.0)).value == pytest.approx(3 * math.pi, rel=1e-15)
    p = PoleFunction(Ball(1), [0.0], 2.0)
    for a in (0.0, 0.5, 3.0):
        assert volume(Sublevel(Ball(1), p, a)).value == pytest.approx(math.pi * math.exp(-a), rel=1e-14)


def test_exact_volume_unavailable_is_explicit():
    d = build_domain({"kind": "balanced", "n": 2, "gauge": lambda z: np.max(np.abs(z), axis=-1) * 1.0})
    with pytest.raises(ExactUnavailable):
        volume(d, "Exact")
    q = volume(d, "Quadrature")
    # a custom gauge is not known to be Reinhardt, so directions are sampled
    assert 0 < q.error_bound < 1e-2 * q.value
    assert abs(q.value - math.pi ** 2) <= 4 * q.error_bound


@pytest.mark.parametrize("d", [Ball(1), Ball(2), Polydisc((1.0, 0.5)), Annulus(2.0),
                               named_balanced("lp", 2, 3.0)])
def test_monte_carlo_within_four_standard_errors(d):
    mc = volume(d, MonteCarlo(seed=3, samples=200_000))
    ex = volume(d, "Exact")
    assert abs(mc.value - ex.value) <= 4 * mc.error_bound


def test_monte_carlo_deterministic():
    a = volume(Ball(2), MonteCarlo(seed=5, samples=50_000))
    b = volume(Ball(2), MonteCarlo(seed=5, samples=50_000))
    assert a == b


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 4.0), st.floats(0.01, 3.0), st.floats(0.0, 0.8), st.floats(0, 2 * math.pi))
def test_sublevel_nesting(a1, da, r0, th):
    d = Ball(1)
    p = PoleFunction(d, [r0 * 0.5 * complex(math.cos(th), math.sin(th))], 2.0)
    rng = np.random.default_rng(0)
    z = np.sqrt(rng.random(500)) * np.exp(2j * np.pi * rng.random(500))
    inner = contains(Sublevel(d, p, a1 + da), z)
    outer = contains(Sublevel(d, p, a1), z)
    base = contains(d, z)
    assert np.all(outer[inner])
    assert np.all(base[outer])


# -- quadrature exactness against closed-form radial integrals

def _ball_moment(n, alpha):
    return math.pi ** n * math.prod(math.factorial(a) for a in alpha) / math.factorial(n + sum(alpha))


def _moment(rule, a, b):
    z = rule.nodes
    return rule.integrate(np.prod(z ** np.asarray(a), axis=1) * np.prod(np.conj(z) ** np.asarray(b), axis=1))


def test_quadrature_examples():
    r = quadrature_for(Ball(1), Zero(), 4)
    assert _moment(r, (2,), (2,)).real == pytest.approx(math.pi / 3, rel=1e-14)
    r = quadrature_for(Annulus(2.0), Zero(), 3)
    assert _moment(r, (-1,), (-1,)).real == pytest.approx(2 * math.pi * math.log(2), rel=1e-14)
    r = quadrature_for(Ball(1), RadialLog(-1.0), 2)
    assert _moment(r, (1,), (1,)).real == pytest.approx(math.pi / 3, rel=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=2, max_size=2), st.lists(st.integers(0, 5), min_size=2, max_size=2))
def test_ball_quadrature_exact(a, b):
    r = quadrature_for(Ball(2), Zero(), max(sum(a), sum(b)))
    v = _moment(r, a, b)
    ref = _ball_moment(2, a) if a == b else 0.0
    assert abs(v - ref) < 1e-12 * _ball_moment(2, a)


@settings(max_examples=30, deadline=None)
@given(st.integers(-4, 4), st.integers(-4, 4), st.floats(1.2, 6.0))
def test_annulus_quadrature_exact(a, b, R):
    r = quadrature_for(Annulus(R), Zero(), 4)
    v = _moment(r, (a,), (b,))
    lam = 2 * a + 2
    norm = 2 * math.pi * math.log(R) if lam == 0 else math.pi * (R ** lam - 1) / (a + 1)
    ref = norm if a == b else 0.0
    assert abs(v - ref) < 1e-12 * max(norm, 1.0)


def test_polydisc_quadrature_and_volume():
    d = Polydisc((1.0, 0.5))
    r = quadrature_for(d, Zero(), 3)
    assert np.all(r.weights > 0)
    assert abs(float(np.sum(r.weights)) - volume(d).value) <= max(r.error_bound, 1e-14)
    v = _moment(r, (1, 2), (1, 2)).real
    ref = (math.pi / 2) * (math.pi * 0.5 ** 6 / 3)
    assert v == pytest.approx(ref, rel=1e-12)
