"""Auxiliary one-variable functions behind the extension estimates.

``c`` is a positive weight profile on an interval ending at ``A``.  From it
the triple

    u = a - log I1,   s = I2 / I1,   g = (I1^2 - c I2) / (c I1),

is built, with ``I1(t) = int_t^A c`` and ``I2(t) = int_t^A (tau - t) c(tau) dtau``
(the iterated integral written as a single one).  The module also covers the
constant ``C(chi, c)``, the kappa refinement, the Beta-ratio constant and the
``v_{a,b}``, ``chi_{a,b}`` pair.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar
from scipy.special import roots_legendre

from .errors import DenominatorVanishes, InadmissibleC, InvalidGrid, InvalidParameter, InvalidParameters

QUAD_OPTS = dict(epsabs=0.0, epsrel=1e-13, limit=200)


# ------------------------------------------------------------------ c(t)

@dataclass(frozen=True)
class CFamily:
    """A profile ``c`` on ``(-inf, A)`` (or ``(0, A)`` for the bounded kinds).

    kinds: ``Const`` (c = 1), ``ExpT`` (c = e^t), ``Piecewise`` (1 on (0, 1),
    e^{t-1} on [1, a+1)) and ``Rational`` (``e^t / (1 + e^{t/k})^{k + eps}``
    with ``k = m + p``).
    """

    kind: str
    A: float = math.inf
    m: int = 0
    p: int = 1
    eps: float = 1.0
    kinks: tuple = ()

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "Const":
            out = np.ones_like(t)
        elif self.kind == "ExpT":
            out = np.exp(t)
        elif self.kind == "Piecewise":
            out = np.where(t < 1.0, 1.0, np.exp(t - 1.0))
        elif self.kind == "Rational":
            k = self.m + self.p
            # log form avoids overflow of e^{t/k} for large t
            out = np.exp(t - (k + self.eps) * np.logaddexp(0.0, t / k))
        else:
            raise InvalidParameter(f"unknown c kind {self.kind!r}")
        return out if out.ndim else float(out)

    def dlog(self, t):
        """``(log c)'``."""
        t = np.asarray(t, dtype=float)
        if self.kind == "Const":
            return np.zeros_like(t)
        if self.kind == "ExpT":
            return np.ones_like(t)
        if self.kind == "Piecewise":
            return np.where(t < 1.0, 0.0, 1.0)
        k = self.m + self.p
        e = np.exp(-np.logaddexp(0.0, -t / k))           # e^{t/k} / (1 + e^{t/k})
        return (k * (1 - e) - self.eps * e) / k

    @property
    def t0(self):
        """Turning point of ``c`` for the rational kind."""
        if self.kind != "Rational":
            raise InvalidParameter("t0 is defined for the rational profile")
        k = self.m + self.p
        return k * math.log(k / self.eps)


def Const(A: float) -> CFamily:
    return CFamily("Const", float(A))


def ExpT(A: float = math.inf) -> CFamily:
    return CFamily("ExpT", float(A))


def Piecewise(a: float) -> CFamily:
    return CFamily("Piecewise", float(a) + 1.0, kinks=(1.0,))


def Rational(m: int, p: int, eps: float, A: float = math.inf) -> CFamily:
    if p < 1 or m < 0 or not eps > 0:
        raise InvalidParameters("need m >= 0, p >= 1, eps > 0")
    return CFamily("Rational", float(A), int(m), int(p), float(eps))


def _quad(f, lo, hi, kinks=()):
    pts = [k for k in kinks if lo < k < hi]
    if math.isinf(hi):
        total, piece_lo = 0.0, lo
        for k in pts:
            total += quad(f, piece_lo, k, **QUAD_OPTS)[0]
            piece_lo = k
        return total + quad(f, piece_lo, hi, **QUAD_OPTS)[0]
    return quad(f, lo, hi, points=pts or None, **QUAD_OPTS)[0]


def tail_integrals(c: CFamily, t: float, A: Optional[float] = None):
    """``(I1, I2)`` at t with upper end A (default ``c.A``)."""
    A = c.A if A is None else A
    I1 = _quad(lambda x: c(x), t, A, c.kinks)
    I2 = _quad(lambda x: (x - t) * c(x), t, A, c.kinks)
    return I1, I2


def ineq_for_c_margin(c: CFamily, grid, A: Optional[float] = None):
    """``I1^2 - c I2`` divided by ``I1^2`` on the grid (must be positive)."""
    out = []
    for t in grid:
        I1, I2 = tail_integrals(c, t, A)
        out.append((I1 * I1 - c(t) * I2) / (I1 * I1))
    return np.array(out)


def check_admissible(c: CFamily, lo: float, hi: float, points: int = 200):
    """Grid check of positivity, finiteness and the tail-integral inequality."""
    grid = np.linspace(lo, hi, points + 2)[1:-1]
    vals = c(grid)
    if not np.all(vals > 0) or not np.all(np.isfinite(vals)):
        raise InadmissibleC("c must be positive and finite")
    I1, _ = tail_integrals(c, grid[0])
    if not np.isfinite(I1):
        raise InadmissibleC("c is not integrable up to A")
    if c.kind in ("ExpT", "Rational"):
        far = np.linspace(-60.0, min(lo, 0.0), 50)
        if not np.min(c(far) * np.exp(-far)) > 0:
            raise InadmissibleC("liminf c(t) e^{-t} must be positive")
    margin = ineq_for_c_margin(c, grid)
    if not np.all(margin > 0):
        raise InadmissibleC(f"tail-integral inequality fails (min margin {np.min(margin):.3g})")
    return margin


# ------------------------------------------------------------------ (u, s, g)

@dataclass
class AuxTriple:
    c: CFamily
    a: float
    admissibility_margin: np.ndarray = field(repr=False, default=None)

    @property
    def end(self):
        return self.a + 1.0

    def integrals(self, t):
        return tail_integrals(self.c, float(t), self.end)

    def u(self, t):
        I1, _ = self.integrals(t)
        return self.a - math.log(I1)

    def s(self, t):
        I1, I2 = self.integrals(t)
        return I2 / I1

    def g(self, t):
        I1, I2 = self.integrals(t)
        ct = self.c(t)
        return (I1 * I1 - ct * I2) / (ct * I1)

    def values(self, t):
        I1, I2 = self.integrals(t)
        ct = self.c(t)
        return self.a - math.log(I1), I2 / I1, (I1 * I1 - ct * I2) / (ct * I1)


def build_aux_triple(c: CFamily, a: float) -> AuxTriple:
    """``(u, s, g)`` on ``(0, a+1)`` for the profile c."""
    if not a >= 0:
        raise InvalidParameter("a must be >= 0")
    if c.kind == "Piecewise" and abs(c.A - (a + 1.0)) > 1e-15:
        raise InvalidParameter("piecewise profile was built for another a")
    if c.A < a + 1.0:
        raise InadmissibleC("c must be defined on (0, a+1)")
    cc = c if c.A == a + 1.0 else CFamily(c.kind, a + 1.0, c.m, c.p, c.eps, c.kinks)
    margin = check_admissible(cc, 0.0, a + 1.0)
    return AuxTriple(cc, float(a), margin)


# nine-point central stencils
_D1 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
_D2 = np.array([-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560])
_GL_X, _GL_W = roots_legendre(24)


def _short_integrals(c, x, d):
    """``int_x^{x+d} c`` and ``int_x^{x+d} (x + d - tau) c(tau) dtau`` (signed d)."""
    tau = x + d * (_GL_X + 1) / 2
    w = _GL_W * d / 2
    cv = c(tau)
    return float(w @ cv), float(w @ ((x + d - tau) * cv))


@dataclass(frozen=True)
class OdeResiduals:
    first: float          # s u' - s' - 1
    second: float         # s u'' - s'' - s'^2 / g
    third: float          # e^{a-u} / (s + g) - c   (relative)
    signs_ok: bool        # s > 0, g > 0, u' > 0, s' < 0

    @property
    def max(self):
        return max(self.first, self.second, self.third)


def verify_ode_identities(t: AuxTriple, grid: int = 100, h: float = 2e-2) -> OdeResiduals:
    """Residuals of the three identities by finite differences on a grid.

    Stencil values enter as increments over the center point, obtained from
    short Gauss-Legendre integrals, so the differencing does not amplify
    rounding in u and s themselves.  The step is at most a hundredth of the
    distance to the ends and to kinks of c; every stencil sees one smooth
    piece.
    """
    if grid < 2:
        raise InvalidGrid("need at least 2 grid points")
    lo, hi = 0.0, t.end
    pts = np.linspace(lo, hi, grid + 2)[1:-1]
    guard = [lo, hi] + list(t.c.kinks)
    r1 = r2 = r3 = 0.0
    ok = True
    used = 0
    ks = np.arange(-4, 5)
    for x in pts:
        dist = min(abs(x - k) for k in guard)
        if dist < 1e-9:
            continue
        used += 1
        hh = min(h, dist / 100.0)
        I1, I2 = t.integrals(x)
        cx = t.c(x)
        du = np.zeros(len(ks))
        dsv = np.zeros(len(ks))
        for i, k in enumerate(ks):
            if k == 0:
                continue
            d = k * hh
            J1, J2 = _short_integrals(t.c, x, d)
            I1k = I1 - J1
            du[i] = -math.log1p(-J1 / I1)
            dsv[i] = (-d * I1 * I1 + J1 * I2 + J2 * I1) / (I1 * I1k)
        s = I2 / I1
        g = (I1 * I1 - cx * I2) / (cx * I1)
        d1u = _D1 @ du / hh
        d1s = _D1 @ dsv / hh
        d2u = _D2 @ du / hh ** 2
        d2s = _D2 @ dsv / hh ** 2
        r1 = max(r1, abs(s * d1u - d1s - 1.0))
        r2 = max(r2, abs(s * d2u - d2s - d1s * d1s / g))
        r3 = max(r3, abs(I1 / (s + g) / cx - 1.0))        # e^{a-u} = I1
        ok &= bool(s > 0 and g > 0 and d1u > 0 and d1s < 0)
    if used == 0:
        raise InvalidGrid("no grid point is away from the kinks")
    return OdeResiduals(r1, r2, r3, ok)


# ------------------------------------------------------------------ C(chi, c)

def chi_linear():
    return (lambda t: 1.0 - t), (lambda t: -1.0)


def chi_kappa(kappa: float):
    """``(e^k - e^{k t}) / (e^k - 1)`` and its derivative."""
    den = math.expm1(kappa)
    return ((lambda t: (math.exp(kappa) - math.exp(kappa * t)) / den),
            (lambda t: -kappa * math.exp(kappa * t) / den))


@dataclass(frozen=True)
class ConstantResult:
    value: float
    argmax: float
    at_left_limit: bool


def constant_C(chi: Callable, c: CFamily, a: float, chi_prime: Optional[Callable] = None,
               grid: int = 10_000) -> ConstantResult:
    """``sup_{0<t<1} chi'(t)^2 I1(t) + c(t) / (c(t) - t) chi(t)^2``.

    A 10^4-point grid locates the maximum, a bounded scalar search refines
    it, and the one-sided limits at 0 and 1 are included.
    """
    if chi_prime is None:
        hd = 1e-6
        chi_prime = lambda t: (chi(t + hd) - chi(t - hd)) / (2 * hd)
    A = a + 1.0

    def I1(t):
        return _quad(lambda x: c(x), t, A, c.kinks)

    def F(t):
        ct = c(t)
        den = ct - t
        if not den > 0:
            raise DenominatorVanishes(f"c(t) - t = {den:.3g} at t = {t:.6g}")
        return chi_prime(t) ** 2 * I1(t) + ct / den * chi(t) ** 2

    ts = (np.arange(grid) + 0.5) / grid
    if not np.all(c(ts) - ts > 0):
        raise DenominatorVanishes("c(t) <= t somewhere on (0, 1)")
    # I1(t) = I1(0) - int_0^t c, accumulated on the grid (trapezoid is enough to locate)
    vals = np.array([F(float(x)) for x in ts]) if grid <= 2000 else _fast_F(F, ts)
    i = int(np.argmax(vals))
    lo = ts[max(i - 1, 0)]
    hi = ts[min(i + 1, grid - 1)]
    res = minimize_scalar(lambda x: -F(x), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    best, arg = max((F(float(res.x)), float(res.x)), (vals[i], float(ts[i])))
    left = F(1e-14)
    right = F(1 - 1e-14)
    if left >= best and left >= right:
        return ConstantResult(left, 0.0, True)
    if right > best:
        return ConstantResult(right, 1.0, False)
    return ConstantResult(best, arg, False)


def _fast_F(F, ts):
    # F is cheap apart from I1; evaluate it exactly on a coarse subgrid and
    # everywhere else only where the coarse scan says the maximum may lie
    coarse = ts[::50]
    cv = np.array([F(float(x)) for x in coarse])
    out = np.full(len(ts), -np.inf)
    out[::50] = cv
    j = int(np.argmax(cv))
    lo = max((j - 1) * 50, 0)
    hi = min((j + 1) * 50 + 1, len(ts))
    for k in range(lo, hi):
        out[k] = F(float(ts[k]))
    return out


# ------------------------------------------------------------------ kappa

@dataclass(frozen=True)
class KappaResult:
    a: float
    kappa: float
    bound: float           # e^a + (k e^k / (e^k - 1))^2 - 1
    cap: float             # e^a + (25/16) e^{-a}
    holds: bool


def kappa_constant(a: float, tol: float = 1e-12) -> KappaResult:
    """Root of ``k / (e^k - 1) = sqrt(1 - e^{-a})`` by bisection, with the bound check."""
    if not a >= 1:
        raise InvalidParameter("a must be >= 1")
    target = math.sqrt(-math.expm1(-a))
    f = lambda k: k / math.expm1(k) - target
    lo, hi = 1e-300, 1.0
    while f(hi) > 0:
        hi *= 2.0
    # f decreases from 1 - target > 0 at 0+ to negative at hi
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    k = 0.5 * (lo + hi)
    q = k * math.exp(k) / math.expm1(k)
    bound = math.exp(a) + q * q - 1.0
    cap = math.exp(a) + 25.0 / 16.0 * math.exp(-a)
    return KappaResult(float(a), k, bound, cap, bool(bound < cap))


# ------------------------------------------------------------------ Beta ratio

def demext_constant(m: float, p: float, eps: float) -> float:
    """``int_0^1 t^{m+p-1} (1-t)^{eps-1} / int_0^{1/2} t^{m+p-1} (1-t)^{eps-1}``."""
    if not (p >= 1 and m >= 0 and 0 < eps <= m + p):
        raise InvalidParameters("need 0 < eps <= m + p, p >= 1, m >= 0")
    k = m + p
    num = quad(lambda t: 1.0, 0.0, 1.0, weight="alg", wvar=(k - 1, eps - 1), epsabs=0, epsrel=1e-13)[0]
    den = quad(lambda t: (1 - t) ** (eps - 1), 0.0, 0.5, weight="alg", wvar=(k - 1, 0.0),
               epsabs=0, epsrel=1e-13)[0]
    return num / den


# ------------------------------------------------------------------ v_{a,b}, chi_{a,b}

def smoothing_eval(a: float, b: float, t):
    """``(v_{a,b}(t), chi_{a,b}(t))``: v is constant, then a quadratic ramp, then t."""
    if not b > 0:
        raise InvalidParameter("b must be positive")
    t = np.asarray(t, dtype=float)
    lo = -a - b
    x = np.clip((t - lo) / b, 0.0, 1.0)
    ramp = (t - lo) ** 2 / (2 * b) - a - b / 2
    v = np.where(t <= lo, -a - b / 2, np.where(t >= -a, t, ramp))
    chi = 1.0 - x
    if v.ndim == 0:
        return float(v), float(chi)
    return v, chi
