"""Suita-type inequalities with jets on the disc and the annulus.

The comparison is between ``pi |z0|^{-2 alpha} B^(m)(z0)`` (the jet kernel
of ``A^2`` with density ``|z|^{-2 alpha}``) and ``m! (m+1)! c(z0)^{2m+2}``
with ``c`` the logarithmic capacity.  The annulus uses a Laurent basis, the
disc a monomial basis whose degree is doubled until the kernel settles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from .bergman import BergmanSpace, JetFunctional, Laurent, Monomial, build_space, jet_kernel, kernel_at
from .domains import Annulus, Ball, Polydisc, Sublevel, as_points, contains
from .errors import InvalidParameter, NonConvergent, UnsupportedWeight
from .extension import recenter
from .green import PoleFunction, log_capacity, sublevel_volume
from .quadrature import quadrature_for
from .weights import HarmonicLog, Zero

EPS = np.finfo(float).eps
LAURENT_K = 200


@dataclass(frozen=True)
class SuitaReport:
    z0: complex
    m: int
    alpha: float
    piB: float
    rhs: float
    gap: float
    error: float
    truncation: int
    truncation_change: float
    capacity: float
    capacity_error: float

    @property
    def relative_gap(self):
        return self.gap / self.rhs


def _is_disc(d):
    return isinstance(d, Ball) and d.n == 1


def _space_for(d, alpha, size):
    if isinstance(d, Annulus):
        return build_space(d, HarmonicLog(alpha), Laurent(-size, size))
    return build_space(d, Zero(), Monomial(size))


def _pi_jet(s: BergmanSpace, z0, m, alpha):
    B = jet_kernel(s, JetFunctional((z0,), m, {(m,): 1.0}))
    return math.pi * abs(z0) ** (-2 * alpha) * B if alpha else math.pi * B


def suita_report(d, z0, m: int = 0, alpha: float = 0.0, truncation: int | None = None,
                 with_doubling: bool = True) -> SuitaReport:
    """Both sides of the jet Suita inequality at ``z0`` with a combined error.

    ``truncation`` is the Laurent range K (annulus, default 200) or the
    starting monomial degree (disc, default 24, doubled until the kernel
    changes by less than 1e-11 relative).
    """
    if m < 0:
        raise InvalidParameter("m must be >= 0")
    if not (isinstance(d, Annulus) or _is_disc(d)):
        raise InvalidParameter("Suita reports are available on discs and annuli")
    if alpha and not isinstance(d, Annulus):
        raise UnsupportedWeight("alpha log|z| is harmonic only away from 0; use an annulus")
    z0 = complex(as_points(d, z0).reshape(-1)[0])
    if not contains(d, z0):
        raise InvalidParameter("z0 must be an interior point")

    if isinstance(d, Annulus):
        K = laurent_range(d.R, z0, m, LAURENT_K if truncation is None else int(truncation))
        s = _space_for(d, alpha, K)
        piB = _pi_jet(s, z0, m, alpha)
        change = abs(_pi_jet(s.doubled(), z0, m, alpha) - piB) if with_doubling else 0.0
    else:
        K = 24 if truncation is None else int(truncation)
        s = _space_for(d, 0.0, K)
        piB = _pi_jet(s, z0, m, 0.0)
        change = math.inf
        for _ in range(8):
            s2 = s.doubled()
            nxt = _pi_jet(s2, z0, m, 0.0)
            change = abs(nxt - piB)
            s, piB, K = s2, nxt, K * 2
            if change <= 1e-11 * piB:      # below this the doubling only moves rounding
                break
        else:
            raise NonConvergent(f"disc jet kernel did not settle (change {change:.3g})")

    cap = log_capacity(d, z0)
    c = cap.value
    rhs = math.factorial(m) * math.factorial(m + 1) * c ** (2 * m + 2)
    rhs_err = rhs * (2 * m + 2) * cap.error_estimate / c
    err = change + rhs_err + piB * (s.norm_rel_error + 64 * EPS) + 64 * EPS * rhs
    return SuitaReport(z0, m, float(alpha), piB, rhs, piB - rhs, err, K, change, c,
                       cap.error_estimate)


def laurent_range(R, z0, m, K=LAURENT_K):
    """K, raised near the boundary circles so that the dropped terms are negligible.

    Laurent terms of the kernel at ``|z0| = r`` decay like ``r^{-2k}`` and
    ``(r/R)^{2k}``, so ``K >= 40 / min(log r, log(R/r))`` keeps the tail
    below about e^-40.
    """
    r = abs(z0)
    delta = min(math.log(r), math.log(R / r))
    need = math.ceil((40 + 2 * m) / delta)
    if need <= K:
        return int(K)
    return int(LAURENT_K * math.ceil(need / LAURENT_K))


# --------------------------------------------------------------- equality loci

@dataclass
class EqualityLocus:
    R: float
    m: int
    alpha: float
    detected: list
    predicted: list
    spurious: list = field(default_factory=list)
    scan_radii: np.ndarray = field(repr=False, default=None)
    scan_relative_gap: np.ndarray = field(repr=False, default=None)
    min_gap: float = math.inf

    def matches(self, tol=1e-4):
        """Every detected radius is near a predicted one and vice versa."""
        if len(self.detected) != len(self.predicted):
            return False
        return all(abs(a - b) < tol for a, b in zip(sorted(self.detected), sorted(self.predicted)))


class AnnulusGap:
    """High-precision relative gap ``piB / rhs - 1`` on the annulus at real ``r``.

    Near the equality radii and close to the boundary circles the relative
    gap is far below double-precision rounding (for R = 2 it never exceeds
    about 1e-11), so the scan works in ``dps``-digit arithmetic: exact
    Laurent norms, the closed-form capacity limit, and the jet kernel as a
    Schur complement of the (m+1) x (m+1) Gram matrix of Taylor rows.
    """

    def __init__(self, R, m, alpha=0.0, dps=50):
        self.R, self.m, self.alpha, self.dps = float(R), int(m), float(alpha), int(dps)
        self.ctx = mp.mp.clone()
        self.ctx.dps = self.dps
        self.error = mp.mpf(10) ** (-(self.dps - 15))
        self._norms = {}

    def _inv_norm2(self, k):
        ctx = self.ctx
        if k not in self._norms:
            R = ctx.mpf(self.R)
            lam = 2 * k + 2 - 2 * ctx.mpf(self.alpha)
            n2 = 2 * ctx.pi * ctx.log(R) if lam == 0 else 2 * ctx.pi * (R ** lam - 1) / lam
            self._norms[k] = 1 / n2
        return self._norms[k]

    def _range(self, r):
        delta = min(math.log(r), math.log(self.R / r))
        return int(math.ceil(((self.dps + 5) * math.log(10) + 20 * (self.m + 1)) / (2 * delta)))

    def pi_jet(self, r):
        ctx = self.ctx
        m = self.m
        rr = ctx.mpf(r)
        K = self._range(float(r))
        G = ctx.zeros(m + 1, m + 1)
        for k in range(-K, K + 1):
            w = self._inv_norm2(k)
            base = rr ** (k - m)
            row = []
            c = ctx.mpf(1)
            for j in range(m + 1):
                # binom(k, j) r^{k - j}
                row.append(c * base * rr ** (m - j))
                c = c * (k - j) / (j + 1)
            for i in range(m + 1):
                for j in range(i, m + 1):
                    G[i, j] += w * row[i] * row[j]
        for i in range(m + 1):
            for j in range(i):
                G[i, j] = G[j, i]
        B = ctx.factorial(m) ** 2 / (G ** -1)[m, m]
        return ctx.pi * rr ** (-2 * ctx.mpf(self.alpha)) * B

    def log_capacity(self, r):
        ctx = self.ctx
        R = ctx.mpf(self.R)
        q = 1 / R
        w = ctx.mpf(r) / R
        kmax = int(math.ceil((self.dps + 5) * math.log(10) / (2 * math.log(self.R)))) + 2
        theta = 2 * ctx.fsum(ctx.log(1 - q ** (2 * k)) for k in range(1, kmax))
        z = w * w
        lb = ctx.log(1 - z) + ctx.fsum(ctx.log(1 - q ** (2 * k) * z) + ctx.log(1 - q ** (2 * k) / z)
                                      for k in range(1, kmax))
        return -ctx.log(R) + theta - lb - ctx.log(w) ** 2 / ctx.log(q)

    def rhs(self, r):
        ctx = self.ctx
        m = self.m
        return ctx.factorial(m) * ctx.factorial(m + 1) * ctx.exp((2 * m + 2) * self.log_capacity(r))

    def __call__(self, r):
        return self.pi_jet(r) / self.rhs(r) - 1

    def refine_minimum(self, lo, hi):
        """Minimiser of the gap in ``log r`` inside ``(lo, hi)``, or None.

        The derivative must change sign from negative to positive across
        the bracket; the zero is then found by a bracketing solver.
        """
        ctx = self.ctx
        f = lambda x: self(ctx.exp(x))
        df = lambda x: ctx.diff(f, x)
        a, b = ctx.mpf(lo), ctx.mpf(hi)
        if not (df(a) < 0 < df(b)):
            return None
        x = ctx.findroot(df, (a, b), solver="illinois", verify=False)
        if not (a < x < b):
            return None
        return x


def equality_locus_scan(R: float, m: int, alpha: float = 0.0, radial_grid: int = 64,
                        truncation: int = LAURENT_K, dps: int = 50) -> EqualityLocus:
    """Radii in ``1 < |z0| < R`` where the jet Suita inequality is an equality.

    The relative gap is sampled on a log-uniform grid in ``dps``-digit
    arithmetic; each interior local minimum is refined by solving for a
    zero of the derivative.  A refined minimum counts as equality when
    ``|gap| < min(1e-6 rhs, 5 err)``, otherwise it is listed as spurious,
    as is a candidate whose refinement leaves its bracket.  The refined
    radii are cross-checked with the double-precision ``suita_report``
    (truncation ``truncation``).  Predicted radii ``R^{k/(m+1)}`` are given
    for the unweighted case only.
    """
    if not R > 1:
        raise InvalidParameter("R must exceed 1")
    if radial_grid < 64:
        raise InvalidParameter("radial grid needs at least 64 points")
    gap = AnnulusGap(R, m, alpha, dps)
    ctx = gap.ctx
    logR = math.log(R)
    u = (np.arange(radial_grid) + 0.5) / radial_grid
    radii = np.exp(u * logR)
    q = [gap(ctx.exp(ctx.mpf(x))) for x in u * logR]
    detected, spurious = [], []
    min_gap = min(q)
    for i in range(1, radial_grid - 1):
        if not (q[i] <= q[i - 1] and q[i] <= q[i + 1]):
            continue
        lo, hi = u[i - 1] * logR, u[i + 1] * logR
        x = gap.refine_minimum(lo, hi)
        if x is None:
            spurious.append(float(radii[i]))
            continue
        r_star = ctx.exp(x)
        val = gap(r_star)
        min_gap = min(min_gap, val)
        thr = min(mp.mpf("1e-6"), 5 * gap.error)
        if abs(val) < thr:
            rep = suita_report(Annulus(R), float(r_star), m, alpha, truncation=truncation)
            if abs(rep.gap) > max(1e-6 * rep.rhs, 5 * rep.error):
                raise NonConvergent(f"double-precision check disagrees at r = {float(r_star)!r}")
            detected.append(float(r_star))
        else:
            spurious.append(float(r_star))
    predicted = [R ** (k / (m + 1)) for k in range(1, m + 1)] if alpha == 0 else []
    return EqualityLocus(float(R), int(m), float(alpha), detected, predicted, spurious,
                         radii, np.array([float(v) for v in q]), float(min_gap))


# --------------------------------------------------------------- kernel deterioration

def kernel_deterioration(d, z0, ts, N: int = 48):
    """``B_t(z0) e^{-t}`` on the sublevel sets ``{2 G(., z0) < -t}``."""
    p = PoleFunction(d, z0, 2.0 * d.dim)
    out = []
    for t in ts:
        sub = Sublevel(d, p, float(t))
        if isinstance(d, Annulus):
            s = _annulus_sublevel_space(sub, N)
        else:
            s = build_space(sub, Zero(), Monomial(N, d.dim))
        B = kernel_at(s, p.z0, tail=False).diagonal
        out.append(B * math.exp(-float(t)))
    return np.array(out)


def _annulus_sublevel_space(sub: Sublevel, N: int) -> BergmanSpace:
    # a set wrapping around the hole needs Laurent terms about 0; a set that
    # is star-shaped about the pole is served best by powers of (z - z0)
    if sub.level <= 0:
        K = laurent_range(sub.base.R, complex(sub.pole.z0[0]), 0)
        return build_space(sub.base, Zero(), Laurent(-K, K))
    if quadrature_for(sub, Zero(), 0).exactness.startswith("polar rule around the pole"):
        return build_space(sub, Zero(), Monomial(N), center=sub.pole.z0)
    return build_space(sub, Zero(), Laurent(-N, N))


# --------------------------------------------------------------- Blocki-type bounds

@dataclass(frozen=True)
class BlockiCheck:
    lhs: float
    rhs: float
    passed: bool


def blocki_extension_check(s: BergmanSpace, z0, f, a: float, tol: float = 1e-10) -> BlockiCheck:
    """``|f(z0)|^2 / B(z0) <= e^{2na} int_{G(., z0) < -a} |f|^2``."""
    n = s.n
    p = PoleFunction(s.domain, z0, 1.0)
    B = kernel_at(s, p.z0, tail=False).diagonal
    val = s.evaluate(f, np.asarray(p.z0))[0]
    sa = build_space(Sublevel(s.domain, p, a), s.weight, s.basis)
    lhs = abs(val) ** 2 / B
    rhs = math.exp(2 * n * a) * sa.norm2(recenter(s, f, sa))
    return BlockiCheck(lhs, rhs, bool(lhs <= rhs + tol * max(1.0, rhs)))


def blocki_volume_check(s: BergmanSpace, w, a: float, tol: float = 1e-8) -> BlockiCheck:
    """``B(w) e^{2na} Vol({G(., w) < -a}) >= 1``."""
    n = s.n
    p = PoleFunction(s.domain, w, 1.0)
    B = kernel_at(s, p.z0, tail=False).diagonal
    v = B * math.exp(2 * n * a) * sublevel_volume(p, a)
    return BlockiCheck(v, 1.0, bool(v >= 1.0 - tol))
