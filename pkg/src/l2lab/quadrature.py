"""Quadrature: radial moments and node/weight rules on catalog domains.

Circled domains get tensor rules (trapezoid in the angles, which is exact
for trigonometric polynomials, times Gauss-Jacobi nodes in the radius), so
integrals of ``z^a conj(z)^b`` against radial weights are exact up to
rounding.  Everything else gets a sampling rule with an error estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp, roots_jacobi, roots_legendre

from .domains import (
    Annulus,
    Ball,
    Balanced,
    Polydisc,
    Product,
    Sublevel,
    _contains,
    bounding_box,
    contains,
    resolve_sublevel,
    sphere_directions,
)
from .errors import InvalidParameter, UnsupportedSublevel, UnsupportedWeight
from .weights import WeightSpec, Zero

EPS = np.finfo(float).eps
RADIAL_NODES = 64


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray      # shape (N, n), complex
    weights: np.ndarray    # shape (N,), positive
    exactness: str
    error_bound: float

    def integrate(self, values):
        return np.sum(self.weights * np.asarray(values))

    def inner(self, f_vals, g_vals):
        """``sum w f conj(g)`` for value arrays of shape (N, ...)."""
        return np.einsum("i,i...->...", self.weights, f_vals * np.conj(g_vals))


# ------------------------------------------------------------- 1-D pieces

def gauss_jacobi_01(npts: int, a: float = 0.0, b: float = 0.0):
    """Nodes/weights on [0, 1] for the weight ``(1-s)^a s^b``."""
    x, w = roots_jacobi(npts, a, b)
    return (1 + x) / 2, w * 2.0 ** (-(a + b + 1))


def radial_nodes(npts: int, rho: float, gamma: float):
    """Gauss-Jacobi on [0, rho] with weight ``r^gamma`` (gamma > -1)."""
    s, w = gauss_jacobi_01(npts, 0.0, gamma)
    return rho * s, w * rho ** (gamma + 1)


def log_disc_moments(powers, rho: float, gamma: float, npts: int | None = None):
    """``log int_0^rho r^(p + gamma) dr`` for an array of even powers ``p``.

    Returns ``(log_values, rel_err)`` where ``rel_err`` compares two node
    counts.
    """
    p = np.asarray(powers, dtype=float)
    if gamma <= -1:
        raise UnsupportedWeight(f"r^{gamma:g} is not integrable at 0")
    pmax = float(np.max(p)) if p.size else 0.0
    if npts is None:
        npts = max(RADIAL_NODES, int(pmax) // 2 + 2)
    out = []
    for m in (npts, npts + 8):
        s, w = gauss_jacobi_01(m, 0.0, gamma)
        lv = logsumexp(np.log(w)[None, :] + np.outer(p, np.log(s)), axis=1)
        out.append(lv + (gamma + 1.0 + p) * math.log(rho))
    rel = np.abs(np.expm1(out[1] - out[0])) + 4 * EPS
    return out[0], rel


def log_shell_moments(exponents, r0: float, r1: float):
    """``log int_{r0}^{r1} r^e dr`` for real exponents ``e`` (``r0 > 0``).

    The integral is ``r0^lam (e^{lam L} - 1) / lam`` with ``lam = e + 1`` and
    ``L = log(r1/r0)``; it is evaluated in log form with ``expm1`` so that
    neither huge exponents nor ``lam`` near 0 lose accuracy.
    """
    lam = np.asarray(exponents, dtype=float) + 1.0
    L = math.log(r1 / r0)
    out = np.empty_like(lam)
    pos = lam > 0
    neg = lam < 0
    zero = ~(pos | neg)
    lp = lam[pos]
    out[pos] = lp * math.log(r1) + np.log(-np.expm1(-lp * L)) - np.log(lp)
    ln = lam[neg]
    out[neg] = ln * math.log(r0) + np.log(-np.expm1(ln * L)) - np.log(-ln)
    out[zero] = math.log(L)
    rel = np.full(lam.shape, 8 * EPS)
    return out, rel


def log_sphere_factor(alpha):
    """``log int_{S^{2n-1}} |xi^alpha|^2 d sigma`` for rows of multi-indices.

    Polar coordinates ``|z_j|^2 = r^2 u_j`` turn the angular integral into a
    Dirichlet integral over the simplex, which is evaluated in closed form.
    """
    a = np.atleast_2d(np.asarray(alpha, dtype=float))
    n = a.shape[1]
    return ((1 - n) * math.log(2) + n * math.log(2 * math.pi)
            + np.sum(gammaln(a + 1), axis=1) - gammaln(n + np.sum(a, axis=1)))


# ------------------------------------------------------------- node rules

def _trap_angles(m: int):
    return 2 * np.pi * np.arange(m) / m, 2 * np.pi / m


def _simplex_rule(n: int, npts: int):
    """Collapsed Gauss-Jacobi rule on the simplex ``sum u_j = 1``, u in R^n."""
    if n == 1:
        return np.ones((1, 1)), np.ones(1)
    grids, wts = [], []
    for k in range(1, n):
        s, w = gauss_jacobi_01(npts, float(n - 1 - k), 0.0)
        grids.append(s)
        wts.append(w)
    S = np.stack(np.meshgrid(*grids, indexing="ij"), axis=-1).reshape(-1, n - 1)
    W = np.prod(np.stack(np.meshgrid(*wts, indexing="ij"), axis=-1).reshape(-1, n - 1), axis=1)
    U = np.empty((S.shape[0], n))
    rest = np.ones(S.shape[0])
    for k in range(n - 1):
        U[:, k] = S[:, k] * rest
        rest = rest * (1 - S[:, k])
    U[:, n - 1] = rest
    return U, W


def _ball_rule(n, rho, center, gamma_extra, degree):
    """Tensor rule on a ball; radial density ``r^gamma_extra`` about center."""
    npts = max(degree + 1, 4)
    r, wr = radial_nodes(npts, rho, 2 * n - 1 + gamma_extra)
    U, wu = _simplex_rule(n, npts)
    m = degree + 1
    ang, dphi = _trap_angles(m)
    phases = np.stack(np.meshgrid(*([ang] * n), indexing="ij"), axis=-1).reshape(-1, n)
    mod = np.sqrt(U)                      # (Nu, n)
    z = (r[:, None, None, None] * mod[None, :, None, :]
         * np.exp(1j * phases)[None, None, :, :])
    w = (wr[:, None, None] * wu[None, :, None]
         * np.full(phases.shape[0], dphi ** n)[None, None, :]) * 2.0 ** (1 - n)
    return z.reshape(-1, n) + np.asarray(center), w.ravel()


def _annulus_rule(R, gamma_extra, degree, per_panel=32):
    lam = 2 * degree + 2 + abs(gamma_extra)
    L = math.log(R)
    panels = max(1, math.ceil(lam * L / 6))
    x, w = roots_legendre(per_panel)
    edges = np.linspace(0.0, L, panels + 1)
    h = np.diff(edges)
    s = (edges[:-1, None] + (x[None, :] + 1) * h[:, None] / 2).ravel()
    ws = (w[None, :] * h[:, None] / 2).ravel()
    r = np.exp(s)
    wr = ws * r ** (2 + gamma_extra)     # dr = r ds, area element r dr
    ang, dphi = _trap_angles(2 * degree + 1)
    z = (r[:, None] * np.exp(1j * ang)[None, :]).reshape(-1, 1)
    return z, (wr[:, None] * dphi * np.ones_like(ang)[None, :]).ravel()


def _theta_panels(kinks, per_panel):
    edges = [0.0] + sorted(float(k) for k in kinks) + [math.pi / 2]
    x, w = roots_legendre(per_panel)
    th, wt = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        th.append(a + (x + 1) * (b - a) / 2)
        wt.append(w * (b - a) / 2)
    return np.concatenate(th), np.concatenate(wt)


def balanced_profile(d: Balanced, theta):
    """Boundary radius ``scale / h(cos t, sin t)`` of a Reinhardt domain in C^2."""
    pts = np.stack([np.cos(theta), np.sin(theta)], axis=-1).astype(complex)
    return d.scale / np.asarray(d.h(pts), dtype=float)


def _balanced2_rule(d: Balanced, gamma_extra, degree, per_panel=RADIAL_NODES):
    th, wt = _theta_panels(d.kinks, per_panel)
    rb = balanced_profile(d, th)
    npts = max(degree + 1, 4)
    s, ws = gauss_jacobi_01(npts, 0.0, 3 + gamma_extra)
    m = degree + 1
    ang, dphi = _trap_angles(m)
    p1, p2 = np.meshgrid(ang, ang, indexing="ij")
    p1, p2 = p1.ravel(), p2.ravel()
    r = rb[:, None] * s[None, :]                              # (Nt, Nr)
    wrad = wt[:, None] * ws[None, :] * rb[:, None] ** (4 + gamma_extra) \
        * (np.cos(th) * np.sin(th))[:, None]
    z1 = (r * np.cos(th)[:, None])[:, :, None] * np.exp(1j * p1)[None, None, :]
    z2 = (r * np.sin(th)[:, None])[:, :, None] * np.exp(1j * p2)[None, None, :]
    z = np.stack([z1, z2], axis=-1).reshape(-1, 2)
    w = (wrad[:, :, None] * dphi * dphi * np.ones_like(p1)[None, None, :]).ravel()
    return z, w


def _sphere_polar_rule(d: Balanced, gamma_extra, degree, directions, seed=0):
    """Directions on the sphere times exact radial nodes (balanced domains)."""
    n = d.n
    xi = sphere_directions(n, directions, seed=seed)
    rb = d.scale / np.asarray(d.h(xi), dtype=float)
    npts = max(degree + 1, 4)
    s, ws = gauss_jacobi_01(npts, 0.0, 2 * n - 1 + gamma_extra)
    area = 2 * math.pi ** n / math.factorial(n - 1)
    z = (rb[:, None, None] * s[None, :, None]) * xi[:, None, :]
    w = (area / directions) * rb[:, None] ** (2 * n + gamma_extra) * ws[None, :]
    return z.reshape(-1, n), w.ravel()


def _tensor(z1, w1, z2, w2):
    Z = np.concatenate([np.repeat(z1, len(w2), axis=0), np.tile(z2, (len(w1), 1))], axis=1)
    return Z, np.outer(w1, w2).ravel()


def _mc_rule(d, samples, seed):
    c, hw = bounding_box(d)
    n = d.dim
    rng = np.random.default_rng(seed)
    u = rng.uniform(-1, 1, size=(samples, n)) + 1j * rng.uniform(-1, 1, size=(samples, n))
    z = c + hw * u
    inside = np.asarray(_contains(d, z))
    box = float(np.prod((2 * hw) ** 2))
    p = inside.mean()
    se = box * math.sqrt(max(p * (1 - p), 0.0) / samples)
    z = z[inside]
    return z, np.full(len(z), box / samples), se


def _ray_exit(base, z0, e, dmax):
    """Distance from z0 along direction e to the first boundary point of base."""
    ts = np.linspace(0, dmax, 513)[1:]
    inside = np.asarray(_contains(base, (z0 + ts * e)[:, None]))
    if inside.all():
        return float(dmax)
    k = int(np.argmin(inside))
    lo = ts[k - 1] if k > 0 else 0.0
    hi = ts[k]
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _contains(base, np.array([[z0 + mid * e]]))[0]:
            lo = mid
        else:
            hi = mid
    return lo


def _star_rule(d: Sublevel, degree, fine=False):
    """Polar rule around the pole of a planar sublevel set.

    Each ray is cut where psi first reaches the level; the set must be
    star-shaped about the pole, which is checked on the sampled ray.
    """
    from scipy.optimize import brentq

    z0 = complex(np.asarray(d.pole.z0).ravel()[0])
    target = -d.level
    nang = max(2 * degree + 2, 96) * (2 if fine else 1)
    nrad = max(degree + 1, 32) * (2 if fine else 1)
    ang, dphi = _trap_angles(nang)
    _, hw = bounding_box(d.base)
    dmax = 2.0 * float(np.max(hw)) + abs(z0)
    radii = np.empty(nang)
    for j, t in enumerate(ang):
        e = np.exp(1j * t)
        exit_ = _ray_exit(d.base, z0, e, dmax)
        if exit_ < dmax and _reenters(d, z0 + exit_ * e, e, dmax - exit_, target):
            raise UnsupportedSublevel("sublevel set is not star-shaped about the pole")
        ts = np.linspace(0, exit_, 257)[1:-1]
        psi = np.asarray(d.pole.evaluate((z0 + ts * e)[:, None]))
        above = psi >= target
        if not above.any():
            radii[j] = exit_
            continue
        k = int(np.argmax(above))
        if not above[k:].all():
            raise UnsupportedSublevel("sublevel set is not star-shaped about the pole")
        f = lambda rho: float(d.pole.evaluate(np.array([[z0 + rho * e]]))[0]) - target
        lo = ts[k - 1] if k > 0 else ts[0] * 1e-6
        radii[j] = brentq(f, lo, ts[k], xtol=1e-15, rtol=4 * EPS)
    s, ws = gauss_jacobi_01(nrad, 0.0, 1.0)
    r = radii[:, None] * s[None, :]
    z = (z0 + r * np.exp(1j * ang)[:, None]).reshape(-1, 1)
    w = (radii[:, None] ** 2 * ws[None, :] * dphi).ravel()
    return z, w


def _reenters(d: Sublevel, start, e, length, target):
    """Does the ray beyond a boundary exit meet the sublevel set again?"""
    ts = np.linspace(0, length, 513)[1:]
    pts = (start + ts * e)[:, None]
    inside = np.asarray(_contains(d.base, pts))
    if not inside.any():
        return False
    psi = np.asarray(d.pole.evaluate(pts[inside]))
    return bool(np.any(psi < target))


def _ring_rule(d: Sublevel, degree, fine=False):
    """Polar rule about the origin for planar sublevel sets of an annulus.

    Every ray from the origin must meet the set in one interval (possibly
    empty); this covers the sets that wrap around the hole, where the
    pole-centred rule does not apply.
    """
    from scipy.optimize import brentq

    R = d.base.R
    target = -d.level
    nang = max(2 * degree + 2, 128) * (2 if fine else 1)
    nrad = max(degree + 1, 32) * (2 if fine else 1)
    ang, dphi = _trap_angles(nang)
    rs = np.exp(np.linspace(0.0, math.log(R), 1025))[1:-1]
    s, ws = gauss_jacobi_01(nrad, 0.0, 0.0)
    zs, wts = [], []
    for t in ang:
        e = np.exp(1j * t)
        psi = lambda rho: float(d.pole.evaluate(np.array([[rho * e]]))[0]) - target
        below = np.asarray(d.pole.evaluate((rs * e)[:, None])) < target
        if not below.any():
            continue
        idx = np.flatnonzero(below)
        if np.any(np.diff(idx) > 1):
            raise UnsupportedSublevel("a ray meets the sublevel set in several intervals")
        i, j = idx[0], idx[-1]
        a = 1.0 if i == 0 else brentq(psi, rs[i - 1], rs[i], xtol=1e-15, rtol=4 * EPS)
        b = R if j == len(rs) - 1 else brentq(psi, rs[j], rs[j + 1], xtol=1e-15, rtol=4 * EPS)
        r = a + (b - a) * s
        zs.append(r * e)
        wts.append((b - a) * ws * r * dphi)
    if not zs:
        return np.zeros((0, 1), complex), np.zeros(0)
    return np.concatenate(zs)[:, None], np.concatenate(wts)


# ------------------------------------------------------------- dispatcher

def _radial_ok(d, e):
    """Radial density |z|^e handled exactly by the tensor rule of ``d``?"""
    if e == 0.0:
        return True
    if isinstance(d, (Ball, Balanced)):
        return np.allclose(d.center, 0)
    if isinstance(d, Polydisc):
        return d.dim == 1 and np.allclose(d.center, 0)
    return isinstance(d, Annulus)


def _origin_inside(d):
    try:
        return bool(contains(d, np.zeros(d.dim, complex)))
    except Exception:
        return True


def _raw_rule(d, e, degree, seed, samples, fine=False):
    """Nodes, weights, description and bound (0 exact, None unknown)."""
    if isinstance(d, Sublevel):
        r = resolve_sublevel(d)
        if r is not None:
            return _raw_rule(r, e, degree, seed, samples, fine)
        if d.dim == 1:
            try:
                z, w = _star_rule(d, degree, fine)
            except UnsupportedSublevel:
                if not isinstance(d.base, Annulus):
                    raise
                z, w = _ring_rule(d, degree, fine)
                return z, w, "polar rule around the origin", None
            return z, w, "polar rule around the pole", None
        z, w, se = _mc_rule(d, samples, seed + (101 if fine else 0))
        return z, w, "Monte Carlo", se
    if isinstance(d, Ball):
        z, w = _ball_rule(d.n, d.radius, d.center, e, degree)
        return z, w, f"exact for z^a conj(z)^b, |a|,|b| <= {degree}", 0.0
    if isinstance(d, Polydisc):
        z = np.zeros((1, 0), complex)
        w = np.ones(1)
        for rho, c in zip(d.radii, d.center):
            z1, w1 = _ball_rule(1, rho, (c,), e if d.dim == 1 else 0.0, degree)
            z, w = _tensor(z, w, z1, w1)
        return z, w, f"exact for z^a conj(z)^b, |a|,|b| <= {degree}", 0.0
    if isinstance(d, Annulus):
        z, w = _annulus_rule(d.R, e, degree, 48 if fine else 32)
        return z, w, f"Laurent exponents |k| <= {degree}, Gauss panels in log r", None
    if isinstance(d, Balanced):
        if d.reinhardt and d.n == 2:
            z, w = _balanced2_rule(d, e, degree, 96 if fine else RADIAL_NODES)
            return z, w, "angles exact, theta panels split at kinks", None
        z, w = _sphere_polar_rule(d, e, degree, 4096, seed + (101 if fine else 0))
        return z, w, "quasi-random directions, exact radial nodes", None
    if isinstance(d, Product):
        z1, w1, _, b1 = _raw_rule(d.left, 0.0, degree, seed, samples, fine)
        z2, w2, _, b2 = _raw_rule(d.right, 0.0, degree, seed + 1, samples, fine)
        z, w = _tensor(z1, w1, z2, w2)
        if b1 == 0.0 and b2 == 0.0:
            return z, w, "tensor of exact factor rules", 0.0
        return z, w, "tensor rule", None
    raise InvalidParameter(f"no quadrature for {type(d).__name__}")


def quadrature_for(d, w: WeightSpec | None = None, degree: int = 0, seed: int = 0,
                   samples: int = 400_000) -> QuadratureRule:
    """Quadrature rule on ``d`` for the measure ``e^{-phi} dV``.

    On circled domains the rule integrates ``z^a conj(z)^b`` exactly for
    ``|a|, |b| <= degree`` against radial weights.  The error bound is an
    estimate: rounding level for exact rules, a refinement difference for
    curved boundaries, a standard error for sampling rules.
    """
    w = w or Zero()
    if degree < 0:
        raise InvalidParameter("degree must be >= 0")
    e = w.radial_exponent
    if e is not None and _radial_ok(_resolved(d), e):
        z, wt, desc, bound = _raw_rule(d, e, degree, seed, samples)
        if bound is None:
            _, wt2, _, _ = _raw_rule(d, e, degree, seed, samples, fine=True)
            bound = abs(float(np.sum(wt2)) - float(np.sum(wt)))
        return QuadratureRule(z, wt, desc, max(bound, 64 * EPS * float(np.sum(wt))))
    # fold a non-radial (or off-center) density into the weights
    polynomial = e is not None and e >= 0 and float(e / 2).is_integer()
    if e is not None and not polynomial and _origin_inside(d):
        raise UnsupportedWeight("singular radial weight off the domain center")
    extra = int(e // 2) if polynomial else 0
    z, wt, desc, bound = _raw_rule(d, 0.0, degree + extra, seed, samples)
    wt = wt * w.density(z)
    if bound != 0.0 or e is None:
        z2, wt2, _, _ = _raw_rule(d, 0.0, 2 * degree + extra + 4, seed, samples, fine=True)
        b2 = abs(float(np.sum(wt2 * w.density(z2))) - float(np.sum(wt)))
        bound = b2 if bound is None else max(bound, b2)
    keep = wt > 0
    return QuadratureRule(z[keep], wt[keep], desc + " (density folded)",
                          max(bound, 64 * EPS * float(np.sum(wt))))


def _resolved(d):
    if isinstance(d, Sublevel):
        r = resolve_sublevel(d)
        return r if r is not None else d
    return d
