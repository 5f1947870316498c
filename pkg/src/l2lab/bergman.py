"""Truncated weighted Bergman spaces.

Functions are stored as coefficient vectors in the raw basis
``u_gamma(z) = (z - center)^gamma`` (monomials, or Laurent monomials on the
annulus).  On circled domains with radial weights the raw basis is
orthogonal and only ``log ||u_gamma||^2`` is kept, which avoids overflow
for the long Laurent ranges used on annuli.  Elsewhere a Gram matrix is
assembled by quadrature and an orthonormal basis ``e = u M`` is obtained
from a rank-revealing eigendecomposition.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .domains import (
    Annulus,
    Ball,
    Balanced,
    Polydisc,
    Product,
    Sublevel,
    as_points,
    contains,
    resolve_sublevel,
)
from .errors import (
    FunctionalVanishes,
    IllConditionedGram,
    InvalidParameter,
    PointOutsideDomain,
    UnsupportedWeight,
)
from .quadrature import (
    RADIAL_NODES,
    _theta_panels,
    balanced_profile,
    log_disc_moments,
    log_shell_moments,
    log_sphere_factor,
    quadrature_for,
)
from .weights import WeightSpec, Zero, check_integrable

EPS = np.finfo(float).eps
PIVOT_TOL = 1e-12


# ------------------------------------------------------------------ bases

def multi_indices(n: int, max_total: int, min_total: int = 0):
    """All alpha in N^n with min_total <= |alpha| <= max_total, graded order."""
    out = []
    for t in range(min_total, max_total + 1):
        for combo in itertools.combinations_with_replacement(range(n), t):
            a = [0] * n
            for c in combo:
                a[c] += 1
            out.append(tuple(a))
    # inside one degree, lexicographically decreasing (z1^t first)
    out.sort(key=lambda a: (sum(a), tuple(-x for x in a)))
    return out


@dataclass(frozen=True)
class BasisSpec:
    kind: str
    exponents: tuple          # tuple of integer tuples
    params: tuple = ()
    parts: tuple = ()         # factor bases for products

    @property
    def size(self):
        return len(self.exponents)

    @property
    def nvars(self):
        return len(self.exponents[0])

    @property
    def array(self):
        return np.array(self.exponents, dtype=int).reshape(self.size, self.nvars)

    @property
    def max_degree(self):
        return int(np.max(np.abs(self.array).sum(axis=1)))

    def doubled(self) -> "BasisSpec":
        if self.kind == "Monomial":
            return Monomial(2 * max(self.params[0], 1), self.params[1])
        if self.kind == "Laurent":
            kmin, kmax = self.params
            return Laurent(2 * kmin, 2 * kmax)
        if self.kind == "Box":
            return Box(tuple(2 * max(d, 1) for d in self.params))
        return ProductBasis(self.parts[0].doubled(), self.parts[1].doubled())


def Monomial(N: int, n: int = 1) -> BasisSpec:
    """All monomials of total degree <= N in n variables."""
    if N < 0:
        raise InvalidParameter("degree must be >= 0")
    return BasisSpec("Monomial", tuple(multi_indices(n, N)), (int(N), int(n)))


def Box(degrees) -> BasisSpec:
    """Monomials with per-variable degree bounds."""
    degrees = tuple(int(d) for d in degrees)
    exps = sorted(itertools.product(*[range(d + 1) for d in degrees]),
                  key=lambda a: (sum(a), tuple(-x for x in a)))
    return BasisSpec("Box", tuple(exps), degrees)


def Laurent(kmin: int, kmax: int) -> BasisSpec:
    if not kmin <= 0 <= kmax:
        raise InvalidParameter("Laurent range must contain 0")
    return BasisSpec("Laurent", tuple((k,) for k in range(kmin, kmax + 1)), (int(kmin), int(kmax)))


def ProductBasis(left: BasisSpec, right: BasisSpec) -> BasisSpec:
    """Tensor pairs in row-major order: index (i, j) -> i * len(right) + j."""
    exps = tuple(a + b for a in left.exponents for b in right.exponents)
    return BasisSpec("ProductBasis", exps, (), (left, right))


def default_basis(d) -> BasisSpec:
    """24 in one variable (Laurent -24..24 on annuli), total degree 12 otherwise."""
    if isinstance(d, Sublevel):
        return default_basis(d.base)
    if isinstance(d, Annulus):
        return Laurent(-24, 24)
    if isinstance(d, Product):
        return ProductBasis(default_basis(d.left), default_basis(d.right))
    return Monomial(24 if d.dim == 1 else 12, d.dim)


# ------------------------------------------------------------------ helpers

def _log_binom(g, a):
    """log|C(g, a)|, its sign, and a mask where it vanishes (g integer, a >= 0)."""
    g = np.asarray(g, dtype=float)
    a = np.asarray(a, dtype=float)
    pos = g >= 0
    zero = pos & (a > g)
    gp = np.where(pos & ~zero, g, a)          # safe arguments
    lpos = gammaln(gp + 1) - gammaln(a + 1) - gammaln(gp - a + 1)
    gn = np.where(pos, -1.0, g)
    lneg = gammaln(a - gn) - gammaln(a + 1) - gammaln(-gn)
    logc = np.where(pos, lpos, lneg)
    sign = np.where(pos, 1.0, np.where(a % 2 == 0, 1.0, -1.0))
    return logc, sign, zero


def taylor_table(exps, center, point, orders, log_scale=None):
    """Taylor coefficients at ``point`` of ``(z - center)^gamma``.

    Entry ``[j, i]`` is the coefficient of ``(z - point)^orders[j]`` in the
    expansion of basis function ``i``, multiplied by ``exp(-log_scale[i])``.
    Computed in log form so that large exponents do not overflow.
    """
    exps = np.asarray(exps, dtype=float)
    orders = np.asarray(orders, dtype=float).reshape(-1, exps.shape[1])
    b = np.asarray(point, dtype=complex).reshape(-1) - np.asarray(center, dtype=complex).reshape(-1)
    J, K = len(orders), len(exps)
    logmag = np.zeros((J, K))
    phase = np.zeros((J, K))
    sign = np.ones((J, K))
    zero = np.zeros((J, K), dtype=bool)
    for j in range(exps.shape[1]):
        g = exps[None, :, j]
        a = orders[:, None, j]
        lc, sg, z = _log_binom(g, a)
        logmag += np.where(z, 0.0, lc)
        sign *= sg
        zero |= z
        if b[j] == 0:
            zero |= np.broadcast_to(g != a, (J, K))
        else:
            logmag += (g - a) * math.log(abs(b[j]))
            phase += (g - a) * np.angle(b[j])
    if log_scale is not None:
        logmag = logmag - np.asarray(log_scale)[None, :]
    with np.errstate(over="ignore", invalid="ignore"):
        val = sign * np.exp(logmag) * np.exp(1j * phase)
    return np.where(zero, 0.0, val)


def values_table(exps, center, points, log_scale=None):
    """Values of the (scaled) raw basis at many points; shape (N, K)."""
    exps = np.asarray(exps, dtype=float)
    z = np.asarray(points, dtype=complex).reshape(-1, exps.shape[1]) - np.asarray(center)
    N, K = len(z), len(exps)
    logmag = np.zeros((N, K))
    phase = np.zeros((N, K))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for j in range(exps.shape[1]):
            e = exps[None, :, j]
            logmag += np.where(e == 0, 0.0, e * np.log(np.abs(z[:, j]))[:, None])
            phase += e * np.angle(z[:, j])[:, None]
        if log_scale is not None:
            logmag = logmag - np.asarray(log_scale)[None, :]
        return np.exp(logmag) * np.exp(1j * phase)


# ------------------------------------------------------------------ norms

def _weight_exponent(w: WeightSpec):
    e = w.radial_exponent
    return e


def _diagonal_lognorms(d, w: WeightSpec, exps: np.ndarray):
    """(log ||u||^2, relative error) if the raw basis is orthogonal, else None."""
    e = _weight_exponent(w)
    if e is None:
        return None
    if isinstance(d, Sublevel):
        r = resolve_sublevel(d)
        return None if r is None else _diagonal_lognorms(r, w, exps)
    centered = np.allclose(d.center, 0, rtol=0, atol=0)
    if isinstance(d, Ball):
        if e != 0 and not centered:
            return None
        check_integrable(w, d.n, True)
        if np.any(exps < 0):
            return None
        tot = exps.sum(axis=1)
        lr, rel = log_disc_moments(2 * tot, d.radius, 2 * d.n - 1 + e)
        return log_sphere_factor(exps) + lr, rel
    if isinstance(d, Polydisc):
        if np.any(exps < 0) or (e != 0 and not (d.dim == 1 and centered)):
            return None
        if e != 0:
            check_integrable(w, 1, True)
        out = np.zeros(len(exps))
        rel = np.zeros(len(exps))
        for j, rho in enumerate(d.radii):
            lr, rl = log_disc_moments(2 * exps[:, j], rho, 1 + (e if d.dim == 1 else 0.0))
            out += math.log(2 * math.pi) + lr
            rel += rl
        return out, rel
    if isinstance(d, Annulus):
        lr, rel = log_shell_moments(2 * exps[:, 0] + 1 + e, 1.0, d.R)
        return math.log(2 * math.pi) + lr, rel
    if isinstance(d, Balanced):
        if np.any(exps < 0) or not d.reinhardt:
            return None
        check_integrable(w, d.n, True)
        if d.name == "euclid":
            return _diagonal_lognorms(Ball(d.n, d.scale), w, exps)
        if d.name == "max" and e == 0:
            return _diagonal_lognorms(Polydisc((d.scale,) * d.n), w, exps)
        if d.n != 2:
            return None
        return _reinhardt2_lognorms(d, e, exps)
    if isinstance(d, Product):
        return None          # products are assembled factor by factor
    return None


def _reinhardt2_lognorms(d: Balanced, e: float, exps: np.ndarray):
    """Reinhardt domains in C^2: exact radial integral, theta on kink-split panels."""
    res = []
    for per_panel in (RADIAL_NODES, RADIAL_NODES + 32):
        th, wt = _theta_panels(d.kinks, per_panel)
        rb = balanced_profile(d, th)
        a1 = exps[:, 0][:, None].astype(float)
        a2 = exps[:, 1][:, None].astype(float)
        p = 2 * (a1 + a2) + 4 + e
        logint = ((2 * a1 + 1) * np.log(np.cos(th))[None, :] + (2 * a2 + 1) * np.log(np.sin(th))[None, :]
                  + p * np.log(rb)[None, :] + np.log(wt)[None, :])
        from scipy.special import logsumexp

        res.append(2 * math.log(2 * math.pi) + logsumexp(logint, axis=1) - np.log(p[:, 0]))
    rel = np.abs(np.expm1(res[1] - res[0])) + 4 * EPS
    return res[0], rel


# ------------------------------------------------------------------ space

class BergmanSpace:
    """Truncated ``A^2(domain, e^{-phi})`` with an orthonormal basis.

    Attributes
    ----------
    log_norms2 : ndarray or None
        ``log ||u_gamma||^2`` when the raw basis is orthogonal.
    M : ndarray or None
        Map to the orthonormal basis ``e = u M`` in the Gram case.
    norm_rel_error : float
        Quadrature error estimate of the norms (relative).
    """

    def __init__(self, domain, weight: WeightSpec, basis: BasisSpec, *,
                 log_norms2=None, M=None, gram=None, norm_rel_error=0.0,
                 center=None, gram_rank=None):
        self.domain = domain
        self.weight = weight
        self.basis = basis
        self.log_norms2 = log_norms2
        self.M = M
        self.gram = gram
        self.norm_rel_error = float(norm_rel_error)
        self.center = np.asarray(center if center is not None else _center_of(domain), dtype=complex)
        self.gram_rank = gram_rank
        self._doubled = None
        self._exps = basis.array

    # -- structure
    @property
    def diagonal(self) -> bool:
        return self.log_norms2 is not None

    @property
    def dim(self) -> int:
        return self.basis.size if self.diagonal else self.M.shape[1]

    @property
    def n(self) -> int:
        return self.domain.dim

    @property
    def exponents(self):
        return self._exps

    @property
    def norms2(self):
        """``||u_gamma||^2`` (diagonal case; may overflow for huge exponents)."""
        if not self.diagonal:
            return np.real(np.diag(self.gram))
        with np.errstate(over="ignore"):
            return np.exp(self.log_norms2)

    # -- coordinates
    def onb_from_coeffs(self, f):
        f = np.asarray(f, dtype=complex)
        if self.diagonal:
            with np.errstate(over="ignore", invalid="ignore"):
                return f * np.exp(0.5 * self.log_norms2)
        # y = M^+ f restricted to the retained subspace
        return np.linalg.lstsq(self.M, f, rcond=None)[0]

    def coeffs_from_onb(self, y):
        y = np.asarray(y, dtype=complex)
        if self.diagonal:
            return y * np.exp(-0.5 * self.log_norms2)
        return self.M @ y

    def norm2(self, f) -> float:
        return float(np.sum(np.abs(self.onb_from_coeffs(f)) ** 2))

    def inner(self, f, g) -> complex:
        return complex(np.vdot(self.onb_from_coeffs(g), self.onb_from_coeffs(f)))

    # -- evaluation
    def onb_taylor_rows(self, point, orders):
        """Taylor coefficients at ``point`` of the orthonormal basis functions.

        Returns shape (len(orders), dim): entry ``[j, i]`` is the coefficient
        of ``(z - point)^orders[j]`` in ``e_i``.
        """
        point = self._point(point)
        if self.diagonal:
            return taylor_table(self._exps, self.center, point, orders, 0.5 * self.log_norms2)
        return taylor_table(self._exps, self.center, point, orders) @ self.M

    def raw_taylor_rows(self, point, orders):
        return taylor_table(self._exps, self.center, self._point(point), orders)

    def onb_values(self, points):
        pts = as_points(self.domain, points).reshape(-1, self.n)
        if self.diagonal:
            return values_table(self._exps, self.center, pts, 0.5 * self.log_norms2)
        return values_table(self._exps, self.center, pts) @ self.M

    def evaluate(self, f, points):
        """Values of the function with raw coefficients ``f``."""
        pts = as_points(self.domain, points).reshape(-1, self.n)
        return values_table(self._exps, self.center, pts) @ np.asarray(f, dtype=complex)

    def _point(self, p):
        p = as_points(self.domain, p).reshape(-1)
        return p

    # -- truncation
    def doubled(self) -> "BergmanSpace":
        if self._doubled is None:
            self._doubled = build_space(self.domain, self.weight, self.basis.doubled())
        return self._doubled

    def truncation_diagnostic(self, points=None) -> float:
        """Relative change of the diagonal kernel when the truncation doubles."""
        if points is None:
            points = [self.center]
        worst = 0.0
        for p in points:
            k1 = np.sum(np.abs(self.onb_values(p)) ** 2)
            k2 = np.sum(np.abs(self.doubled().onb_values(p)) ** 2)
            worst = max(worst, float(abs(k2 - k1) / k2))
        return worst

    def __repr__(self):
        kind = "diagonal" if self.diagonal else f"gram(rank {self.gram_rank})"
        return f"BergmanSpace({type(self.domain).__name__}, {self.basis.kind}[{self.basis.size}], {kind})"


def _center_of(d):
    if isinstance(d, Sublevel):
        r = resolve_sublevel(d)
        return _center_of(r if r is not None else d.base)
    return np.asarray(d.center)


def build_space(d, w: WeightSpec | None = None, b: BasisSpec | None = None, *,
                strict: bool = False, seed: int = 0, center=None) -> BergmanSpace:
    """Build the truncated space on ``d`` with weight ``w`` and basis ``b``.

    Circled domains with radial weights give a diagonal norm table;
    everything else goes through a quadrature Gram matrix.  With
    ``strict=True`` a numerically rank-deficient Gram matrix raises
    :class:`IllConditionedGram` instead of reducing the basis.  A given
    ``center`` moves the expansion point and forces the Gram route.
    """
    w = w or Zero()
    b = b or default_basis(d)
    if b.nvars != d.dim:
        raise InvalidParameter(f"basis has {b.nvars} variables, domain dimension {d.dim}")
    exps = b.array
    if center is not None:
        center = np.asarray(center, dtype=complex).reshape(d.dim)
        if np.any(exps < 0) and bool(contains(d, center)):
            raise InvalidParameter("negative exponents need a center outside the domain")
        return _gram_space(d, w, b, center, strict, seed)
    center = _center_of(d)
    if np.any(exps < 0) and not _laurent_ok(d):
        raise InvalidParameter("negative exponents need a domain avoiding the center")

    dd = resolve_sublevel(d) if isinstance(d, Sublevel) else d
    if isinstance(dd, Product) and b.kind == "ProductBasis" and (w.kind == "Zero" or w.is_trivial):
        left = build_space(dd.left, Zero(), b.parts[0], strict=strict, seed=seed)
        right = build_space(dd.right, Zero(), b.parts[1], strict=strict, seed=seed + 1)
        return _product_of(d, left, right, b)

    diag = _diagonal_lognorms(d, w, exps)
    if diag is not None:
        logn, rel = diag
        return BergmanSpace(d, w, b, log_norms2=logn, norm_rel_error=float(np.max(rel)),
                            center=center)
    return _gram_space(d, w, b, center, strict, seed)


def _laurent_ok(d):
    dd = resolve_sublevel(d) if isinstance(d, Sublevel) else d
    if dd is None:
        return True
    try:
        return not contains(dd, np.zeros(dd.dim, complex))
    except Exception:
        return True


def _gram_space(d, w, b, center, strict, seed):
    # products u_a conj(u_b) times a non-polynomial density need headroom
    deg = 2 * b.max_degree + 4
    rule = quadrature_for(d, w, deg, seed=seed)
    V = values_table(b.array, center, rule.nodes)
    G = (V.conj().T * rule.weights) @ V
    G = 0.5 * (G + G.conj().T)
    lam, Q = np.linalg.eigh(G)
    top = float(lam[-1])
    if not top > 0:
        raise IllConditionedGram("Gram matrix has no positive eigenvalues")
    keep = lam > PIVOT_TOL * top
    if strict and not keep.all():
        raise IllConditionedGram(
            f"Gram matrix rank {int(keep.sum())} < {len(lam)} at relative pivot {PIVOT_TOL:g}")
    M = Q[:, keep] / np.sqrt(lam[keep])[None, :]
    rel = rule.error_bound / max(float(np.sum(rule.weights)), 1e-300)
    return BergmanSpace(d, w, b, M=M, gram=G, norm_rel_error=rel, center=center,
                        gram_rank=int(keep.sum()))


def _product_of(d, left: BergmanSpace, right: BergmanSpace, b: BasisSpec) -> BergmanSpace:
    """Tensor product space; orthonormal coordinates are Kronecker products."""
    center = np.concatenate([left.center, right.center])
    rel = left.norm_rel_error + right.norm_rel_error
    if left.diagonal and right.diagonal:
        logn = (left.log_norms2[:, None] + right.log_norms2[None, :]).ravel()
        sp = BergmanSpace(d, Zero(), b, log_norms2=logn, norm_rel_error=rel, center=center)
    else:
        ML = left.M if not left.diagonal else np.diag(np.exp(-0.5 * left.log_norms2))
        MR = right.M if not right.diagonal else np.diag(np.exp(-0.5 * right.log_norms2))
        sp = BergmanSpace(d, Zero(), b, M=np.kron(ML, MR), gram=None, norm_rel_error=rel,
                          center=center, gram_rank=ML.shape[1] * MR.shape[1])
    sp.factors = (left, right)
    return sp


def space_like(s: BergmanSpace, domain) -> BergmanSpace:
    """Same weight and basis on another domain."""
    return build_space(domain, s.weight, s.basis)


# ------------------------------------------------------------------ kernels

@dataclass(frozen=True)
class KernelReport:
    z: tuple
    w: tuple
    value: complex
    diagonal: Optional[float]
    truncation: int
    tail_estimate: float


def kernel_at(s: BergmanSpace, z, w=None, tail: bool = True) -> KernelReport:
    """``K(z, w) = sum_i e_i(z) conj(e_i(w))`` with a doubling tail estimate."""
    w = z if w is None else w
    zp = as_points(s.domain, z).reshape(-1)
    wp = as_points(s.domain, w).reshape(-1)
    for p in (zp, wp):
        if not contains(s.domain, p):
            raise PointOutsideDomain(f"{p} is not in the domain")
    val = complex(np.sum(s.onb_values(zp)[0] * np.conj(s.onb_values(wp)[0])))
    t = 0.0
    if tail:
        sd = s.doubled()
        v2 = complex(np.sum(sd.onb_values(zp)[0] * np.conj(sd.onb_values(wp)[0])))
        t = abs(v2 - val)
    same = np.array_equal(zp, wp)
    return KernelReport(tuple(zp), tuple(wp), val, float(val.real) if same else None,
                        s.basis.max_degree, t)


@dataclass(frozen=True)
class JetFunctional:
    """``f -> sum_alpha c_alpha d^alpha f(point)`` with all ``|alpha| = m``.

    ``H`` maps multi-indices to coefficients; ``None`` means ``d^m`` in one
    variable.
    """

    point: tuple
    m: int
    H: Optional[dict] = None

    def terms(self, n):
        if self.H is None:
            if n != 1:
                raise InvalidParameter("a plain order-m jet needs one variable; pass H")
            return {(self.m,): 1.0}
        out = {}
        for a, c in self.H.items():
            a = (a,) if isinstance(a, int) else tuple(a)
            if len(a) != n or sum(a) != self.m:
                raise InvalidParameter("H must be homogeneous of degree m")
            out[a] = complex(c)
        return out


def _orthonormal_rows(V, tol=PIVOT_TOL):
    """Orthonormal basis (columns) of the span of the conjugated rows of V."""
    if V.shape[0] == 0:
        return np.zeros((V.shape[1], 0), dtype=complex)
    _, sv, Wh = np.linalg.svd(V, full_matrices=False)
    r = int(np.sum(sv > tol * sv[0])) if sv.size and sv[0] > 0 else 0
    return Wh[:r].conj().T


def jet_kernel(s: BergmanSpace, j: JetFunctional) -> float:
    """``sup{|d^H f(w)|^2 : ||f|| <= 1, f vanishes to order m at w}``."""
    n = s.n
    p = as_points(s.domain, j.point).reshape(-1)
    if not contains(s.domain, p):
        raise PointOutsideDomain("jet point must lie in the domain")
    terms = j.terms(n)
    orders = list(terms)
    rows = s.onb_taylor_rows(p, orders)
    fact = np.array([np.prod([math.factorial(k) for k in a]) for a in orders])
    h = (np.array([terms[a] for a in orders]) * fact) @ rows      # functional row
    low = multi_indices(n, j.m - 1) if j.m > 0 else []
    V = s.onb_taylor_rows(p, low) if low else np.zeros((0, s.dim), complex)
    Q = _orthonormal_rows(V)
    g = np.conj(h)
    g = g - Q @ (Q.conj().T @ g)
    val = float(np.sum(np.abs(g) ** 2))
    if not val > 1e-28 * max(float(np.sum(np.abs(h) ** 2)), 1e-300):
        raise FunctionalVanishes("functional vanishes on the constrained subspace")
    return val
