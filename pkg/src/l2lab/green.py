"""Pluricomplex Green functions and the quantities built from them.

Formulas per domain:

* ball: ``log|phi_w(z)|`` with the ball automorphism ``phi_w`` (Moebius map
  in one variable);
* polydisc and products: maximum of the factor Green functions;
* balanced domain, pole 0: ``log h``;
* annulus ``1 < |z| < R``: a product (prime function) formula, with the
  quasi-periodicity of the product making both boundary circles level 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domains import (
    Annulus,
    Ball,
    Balanced,
    Polydisc,
    Product,
    Sublevel,
    as_points,
    contains,
    distance_to_boundary,
    exact_volume,
    resolve_sublevel,
    sphere_directions,
)
from .errors import (
    ExactUnavailable,
    InvalidParameter,
    NonConvergent,
    NotOneDimensional,
    PointOutsideDomain,
    UnsupportedPole,
)
from .extrapolation import Extrapolation, richardson

EPS = np.finfo(float).eps


# ----------------------------------------------------------------- formulas

def _disc_green(z, w):
    """Unit disc, pole w; z of any shape."""
    with np.errstate(divide="ignore"):
        return np.log(np.abs(z - w)) - np.log(np.abs(1 - np.conj(w) * z))


def _ball_green(z, w):
    """Unit ball in C^n, pole w; z of shape (..., n).

    ``|phi_w(z)|^2 = (|d|^2 - |d ^ w|^2) / |1 - <z, w>|^2`` with ``d = z - w``;
    written this way there is no cancellation as z approaches w.
    """
    w = np.asarray(w)
    d = z - w
    num = np.sum(np.abs(d) ** 2, axis=-1)
    n = z.shape[-1]
    for i in range(n):
        for j in range(i + 1, n):
            num = num - np.abs(d[..., i] * w[j] - d[..., j] * w[i]) ** 2
    den = np.abs(1 - np.sum(z * np.conj(w), axis=-1)) ** 2
    with np.errstate(divide="ignore"):
        return 0.5 * (np.log(np.maximum(num, 0.0)) - np.log(den))


def _log_prime(diff, zeta, q, tol=1e-17):
    """``log|P(zeta)|`` with ``P(x) = (1-x) prod_k (1-q^2k x)(1-q^2k / x)``.

    ``diff`` is ``log|1 - zeta|`` supplied by the caller so that the
    factor vanishing at the pole is computed without cancellation.
    """
    out = diff.copy()
    q2 = q * q
    qk = q2
    big = np.maximum(np.abs(zeta), 1 / np.abs(zeta))
    while True:
        t1 = np.log(np.abs(1 - qk * zeta))
        t2 = np.log(np.abs(1 - qk / zeta))
        out = out + t1 + t2
        if float(np.max(qk * big)) < tol:
            break
        qk *= q2
    return out


def _annulus_green(z, z0, R):
    q = 1.0 / R
    u = z / R
    w = z0 / R
    with np.errstate(divide="ignore"):
        near = np.log(np.abs(w - u)) - np.log(np.abs(w))   # log|1 - u/w|
        far = np.log(np.abs(1 - u * np.conj(w)))
    la = _log_prime(near, u / w, q)
    lb = _log_prime(far, u * np.conj(w), q)
    lw = math.log(abs(w))
    return la - lb + lw - np.log(np.abs(u)) * lw / math.log(q)


def _green(d, z0, z):
    z0 = np.asarray(z0, dtype=complex)
    if isinstance(d, Ball):
        c = np.asarray(d.center)
        zn = (z - c) / d.radius
        wn = (z0 - c) / d.radius
        if d.n == 1:
            return _disc_green(zn[..., 0], wn[0])
        return _ball_green(zn, wn)
    if isinstance(d, Polydisc):
        vals = [_disc_green((z[..., j] - c) / r, (z0[j] - c) / r)
                for j, (r, c) in enumerate(zip(d.radii, d.center))]
        return np.max(np.stack(vals, axis=0), axis=0)
    if isinstance(d, Annulus):
        return _annulus_green(z[..., 0], z0[0], d.R)
    if isinstance(d, Balanced):
        if not np.allclose(z0, 0, rtol=0, atol=0):
            raise UnsupportedPole("balanced domains support the pole 0 only")
        with np.errstate(divide="ignore"):
            return np.log(np.asarray(d.h(z), dtype=float) / d.scale)
    if isinstance(d, Product):
        n1 = d.left.dim
        return np.maximum(_green(d.left, z0[:n1], z[..., :n1]),
                          _green(d.right, z0[n1:], z[..., n1:]))
    if isinstance(d, Sublevel):
        if np.array_equal(z0, np.asarray(d.pole.z0)):
            return _green(d.base, z0, z) + d.level / d.pole.multiplier
        r = resolve_sublevel(d)
        if r is None:
            raise UnsupportedPole("no Green function for this sublevel set and pole")
        return _green(r, z0, z)
    raise InvalidParameter(f"unknown domain {type(d).__name__}")


def green_eval(d, z0, z):
    """``G_d(z, z0)``; vectorized over the leading axes of ``z``.

    Returns ``-inf`` at the pole.
    """
    z0p = as_points(d, z0).reshape(-1)
    if not contains(d, z0p):
        raise PointOutsideDomain("pole must lie in the domain")
    zp = as_points(d, z)
    out = _green(d, z0p, zp)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class PoleFunction:
    """``psi = multiplier * G_domain(., z0)``."""

    domain: object
    z0: tuple
    multiplier: float = 2.0

    def __post_init__(self):
        z0 = tuple(complex(v) for v in np.atleast_1d(np.asarray(self.z0, dtype=complex)))
        if len(z0) != self.domain.dim:
            from .errors import DimensionMismatch

            raise DimensionMismatch("pole has wrong dimension")
        if not self.multiplier > 0:
            raise InvalidParameter("multiplier must be positive")
        object.__setattr__(self, "z0", z0)
        object.__setattr__(self, "multiplier", float(self.multiplier))
        if not contains(self.domain, np.asarray(z0)):
            raise PointOutsideDomain("pole must lie in the domain")

    def evaluate(self, z):
        zp = as_points(self.domain, z)
        return self.multiplier * _green(self.domain, np.asarray(self.z0), zp)

    __call__ = evaluate


# ----------------------------------------------------------------- capacity

@dataclass(frozen=True)
class CapacityResult:
    value: float
    extrapolation_trace: tuple
    error_estimate: float


def _ring_average(d, z0, radii, angles=16):
    th = 2 * np.pi * (np.arange(angles) + 0.5) / angles
    pts = z0 + radii[:, None] * np.exp(1j * th)[None, :]
    g = _green(d, np.array([z0]), pts[..., None])
    return np.mean(g, axis=1) - np.log(radii)


def _closed_log_capacity(d, z0):
    """Exact ``log c_beta`` where the limit can be taken by hand, else None."""
    if isinstance(d, Ball) and d.n == 1:
        rho = d.radius
        w = abs(z0 - d.center[0]) / rho
        return -math.log(rho) - math.log1p(-w * w)
    if isinstance(d, Annulus):
        q = 1.0 / d.R
        w = abs(z0) / d.R
        lw = math.log(w)
        k = np.arange(1, 200)
        qk = q ** (2 * k)
        theta = 2 * float(np.sum(np.log1p(-qk[qk > 1e-300])))
        lb = float(_log_prime(np.array([math.log1p(-w * w)]), np.array([w * w]), q)[0])
        return -math.log(d.R) + theta - lb - lw * lw / math.log(q)
    return None


def log_capacity(d, z0) -> CapacityResult:
    """``c_beta(z0) = lim exp(G(w, z0) - log|w - z0|)`` on a planar domain.

    The limit is extrapolated from ring averages at radii ``delta 10^-k``.
    Where the limit is also available in closed form (discs, annuli) that
    value is returned, after checking it against the extrapolation.
    """
    if d.dim != 1:
        raise NotOneDimensional("logarithmic capacity needs a planar domain")
    z0 = complex(as_points(d, z0).reshape(-1)[0])
    if not contains(d, z0):
        raise PointOutsideDomain("point must lie in the domain")
    delta = distance_to_boundary(d, z0)
    radii = delta * 10.0 ** -np.arange(1, 6)
    vals = _ring_average(d, z0, radii)
    ex = richardson(radii, vals, what="capacity", scale=float(np.max(np.abs(np.log(radii)))))
    c = math.exp(ex.value)
    trace = tuple((h, math.exp(v)) for h, v in ex.trace)
    exact = _closed_log_capacity(d, z0)
    if exact is None:
        return CapacityResult(c, trace, c * ex.error_estimate)
    if abs(exact - ex.value) > 10 * ex.error_estimate + 1e-12:
        raise NonConvergent(f"capacity extrapolation {ex.value!r} disagrees with the limit {exact!r}")
    ce = math.exp(exact)
    return CapacityResult(ce, trace, ce * 16 * EPS * max(1.0, abs(exact)))


# ----------------------------------------------------------------- volumes

def sublevel_volume(p: PoleFunction, a: float) -> float:
    """``Vol({psi < -a})``; exact when the set has a closed form."""
    if a < 0:
        raise InvalidParameter("a must be >= 0")
    d = Sublevel(p.domain, p, a)
    try:
        return exact_volume(d)
    except ExactUnavailable:
        pass
    from .quadrature import quadrature_for

    rule = quadrature_for(d, None, 0)
    return float(np.sum(rule.weights))


@dataclass(frozen=True)
class LimitResult:
    value: float
    reference: float
    trace: tuple
    error_estimate: float


def tube_mass_limit(p: PoleFunction, g=None, a_grid=(4.0, 6.0, 8.0, 10.0)) -> LimitResult:
    """``lim_{a -> inf} e^a int_{psi < -a} g`` for ``psi = 2 G(., z0)`` in the plane.

    The sublevel sets are conformal images of small discs, so the scaled
    mass is a smooth function of ``e^{-a}`` and Richardson extrapolation in
    that variable applies.  ``reference`` is ``pi g(z0) / c_beta(z0)^2``.
    """
    from .quadrature import quadrature_for

    d = p.domain
    if d.dim != 1:
        raise NotOneDimensional("tube mass limit is planar")
    if abs(p.multiplier - 2.0) > 1e-14:
        raise InvalidParameter("tube mass limit uses psi = 2 G")
    if g is None:
        g = lambda z: np.ones(np.shape(z)[:-1])
    masses = []
    for a in a_grid:
        rule = quadrature_for(Sublevel(d, p, a), None, 8)
        masses.append(math.exp(a) * float(np.sum(rule.weights * np.real(g(rule.nodes)))))
    h = np.exp(-np.asarray(a_grid, dtype=float))
    ex = richardson(h, masses, noise=1e-10, what="tube mass")
    cap = log_capacity(d, p.z0).value
    ref = math.pi * float(np.real(g(np.array([p.z0]))[0])) / cap ** 2
    return LimitResult(ex.value, ref, ex.trace, ex.error_estimate)


# ----------------------------------------------------------------- Azukawa

def _azukawa_many(d, z, X, phases=8, levels=4):
    """A_d(z; X) for each row of X (shape (k, n)); returns (values, errors)."""
    z = np.asarray(z, dtype=complex)
    X = np.asarray(X, dtype=complex)
    norms = np.linalg.norm(X, axis=1)
    if np.any(norms == 0):
        raise InvalidParameter("direction X must be nonzero")
    delta = distance_to_boundary(d, z)
    steps = 10.0 ** -np.arange(1, levels + 1)             # relative |lambda|
    th = 2 * np.pi * (np.arange(phases) + 0.5) / phases
    lam = (delta / norms)[:, None, None] * steps[None, :, None] * np.exp(1j * th)[None, None, :]
    pts = z + lam[..., None] * X[:, None, None, :]
    g = _green(d, z, pts)
    v = np.mean(g, axis=2) - np.log(np.abs(lam[:, :, 0]))  # (k, levels)
    scale = np.max(np.abs(np.log(np.abs(lam[:, :, 0]))), axis=1)
    vals = np.empty(len(X))
    errs = np.empty(len(X))
    for i in range(len(X)):
        ex = richardson(steps, v[i], what="Azukawa", scale=scale[i])
        vals[i] = ex.value
        errs[i] = ex.error_estimate
    return vals, errs


def azukawa_metric(d, z, X) -> float:
    """``A_d(z; X) = limsup_{lambda -> 0} G(z + lambda X, z) - log|lambda|``."""
    zp = as_points(d, z).reshape(-1)
    if not contains(d, zp):
        raise PointOutsideDomain("base point must lie in the domain")
    Xp = np.atleast_1d(np.asarray(X, dtype=complex)).reshape(1, -1)
    if Xp.shape[1] != d.dim:
        from .errors import DimensionMismatch

        raise DimensionMismatch("direction has wrong dimension")
    vals, _ = _azukawa_many(d, zp, Xp)
    return float(vals[0])


@dataclass(frozen=True)
class AzukawaIndicatrix:
    center: tuple
    directions: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    volume: float = 0.0
    error_estimate: float = 0.0

    @property
    def directional_values(self):
        return list(zip(self.directions, self.values))


def indicatrix_volume(d, z, directions: int = 1024, replicates: int = 8) -> AzukawaIndicatrix:
    """Volume of ``{X : A_d(z; X) < 0}`` from ``(1/2n) int r(xi)^{2n} d sigma``.

    In one variable the directions are equispaced; otherwise each replicate
    is a scrambled Sobol set and the error estimate is four standard errors
    of the replicate mean (plus the extrapolation error).
    """
    if directions < 64:
        raise InvalidParameter("need at least 64 directions")
    zp = as_points(d, z).reshape(-1)
    if not contains(d, zp):
        raise PointOutsideDomain("base point must lie in the domain")
    n = d.dim
    area = 2 * math.pi ** n / math.factorial(n - 1)
    if n == 1:
        th = 2 * np.pi * np.arange(directions) / directions
        xi = np.exp(1j * th)[:, None]
        A, err = _azukawa_many(d, zp, xi)
        r2n = np.exp(-2 * A)
        vol = area / 2 * float(np.mean(r2n))
        half = area / 2 * float(np.mean(r2n[::2]))
        e = abs(vol - half) + vol * 2 * float(np.max(err))
        return AzukawaIndicatrix(tuple(zp), xi, A, vol, e)
    estimates, xs, As, errs = [], [], [], []
    for rep in range(replicates):
        xi = sphere_directions(n, directions, seed=1000 + rep)
        A, err = _azukawa_many(d, zp, xi)
        estimates.append(area / (2 * n) * float(np.mean(np.exp(-2 * n * A))))
        xs.append(xi)
        As.append(A)
        errs.append(float(np.max(err)))
    est = np.array(estimates)
    vol = float(np.mean(est))
    se = float(np.std(est, ddof=1) / math.sqrt(replicates))
    e = 4 * se + vol * 2 * n * max(errs) + 64 * EPS * vol
    return AzukawaIndicatrix(tuple(zp), np.concatenate(xs), np.concatenate(As), vol, e)
