"""Minimal L^2 extensions with jet constraints and the minimal-integral curve.

All solves happen in orthonormal coordinates ``y`` of a truncated space,
where the squared norm is ``|y|^2`` and a jet constraint is a linear system
``A y = b``.  The least-norm solution is ``y = A^+ b`` (SVD, relative rank
tolerance 1e-12).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bergman import BergmanSpace, build_space, multi_indices, taylor_table
from .domains import Sublevel, as_points, contains, resolve_sublevel
from .errors import (
    InfeasibleConstraint,
    InvalidGrid,
    InvalidParameter,
    NotApplicable,
    PointOutsideDomain,
    UnsupportedIdeal,
    UnsupportedSublevel,
)
from .green import PoleFunction

EPS = np.finfo(float).eps
RANK_TOL = 1e-12


@dataclass(frozen=True)
class JetConstraint:
    """Prescribed Taylor coefficients ``F_alpha = d^alpha F(z0) / alpha!`` for ``|alpha| <= m``."""

    point: tuple
    m: int
    target: dict

    @property
    def orders(self):
        return multi_indices(len(self.point), self.m)

    def vector(self):
        return np.array([complex(self.target.get(a, 0.0)) for a in self.orders])

    @staticmethod
    def from_function(s: BergmanSpace, f, point, m: int) -> "JetConstraint":
        """Jet of order m at ``point`` of the function with raw coefficients f."""
        p = as_points(s.domain, point).reshape(-1)
        orders = multi_indices(s.n, m)
        vals = s.raw_taylor_rows(p, orders) @ np.asarray(f, dtype=complex)
        return JetConstraint(tuple(p), int(m), dict(zip(orders, vals)))


@dataclass
class MinExtResult:
    coefficients: np.ndarray          # raw basis of the space
    onb: np.ndarray                   # orthonormal coordinates
    norm_squared: float
    constraint_residual: float
    orthogonality_residual: float
    rank: int


def constraint_matrix(s: BergmanSpace, point, orders):
    return s.onb_taylor_rows(point, orders)


def least_norm(A, b, rank_tol=RANK_TOL):
    """Least-norm solution of ``A y = b`` with residuals.

    Returns ``(y, residual, orthogonality, rank)``; ``orthogonality`` is the
    largest ``|<y, v>|`` over an orthonormal basis ``v`` of ker A.
    """
    U, S, Wh = np.linalg.svd(A, full_matrices=True)
    r = int(np.sum(S > rank_tol * S[0])) if S.size and S[0] > 0 else 0
    y = Wh[:r].conj().T @ ((U[:, :r].conj().T @ b) / S[:r])
    res = float(np.linalg.norm(A @ y - b))
    null = Wh[r:]
    orth = float(np.max(np.abs(null @ y))) if null.shape[0] else 0.0
    return y, res, orth, r


def minimal_extension(s: BergmanSpace, jc: JetConstraint) -> MinExtResult:
    """Least-norm element of ``s`` with the prescribed jet."""
    p = as_points(s.domain, jc.point).reshape(-1)
    if not contains(s.domain, p):
        raise PointOutsideDomain("constraint point must lie in the domain")
    A = constraint_matrix(s, p, jc.orders)
    b = jc.vector()
    y, res, orth, r = least_norm(A, b)
    if res > 1e-10 * (1 + float(np.linalg.norm(b))):
        raise InfeasibleConstraint(f"jet not attainable in the truncated space (residual {res:.3g})")
    return MinExtResult(s.coeffs_from_onb(y), y, float(np.sum(np.abs(y) ** 2)), res, orth, r)


def restrict_norms(s: BergmanSpace, p: PoleFunction, t: float) -> BergmanSpace:
    """The same basis and weight on ``{psi < -t}``."""
    if p.domain != s.domain:
        raise InvalidParameter("pole function is defined on another domain")
    if t < 0:
        raise InvalidParameter("t must be >= 0")
    if t == 0:
        return s
    sub = Sublevel(s.domain, p, t)
    if resolve_sublevel(sub) is None and s.n > 1:
        raise UnsupportedSublevel("only sublevel sets with a closed form are supported in C^n, n > 1")
    return build_space(sub, s.weight, s.basis)


def realized_order(p: PoleFunction, n: int) -> int:
    """``m`` with ``I(multiplier * G) = m^{m+1}`` at the pole."""
    return int(math.floor(p.multiplier / 2.0 + 1e-12)) - n


def recenter(s_from: BergmanSpace, coeffs, s_to: BergmanSpace):
    """Re-expand a polynomial about the center of ``s_to`` (exact for polynomials)."""
    if np.allclose(s_from.center, s_to.center, rtol=0, atol=0):
        return np.asarray(coeffs, dtype=complex)
    T = taylor_table(s_from.exponents, s_from.center, s_to.center, s_to.exponents)
    return T @ np.asarray(coeffs, dtype=complex)


@dataclass
class MinimalIntegralCurve:
    grid: np.ndarray
    values: np.ndarray
    quadrature_error: np.ndarray
    pole: PoleFunction
    constraint: JetConstraint
    coefficients: list = field(repr=False, default_factory=list)   # F_t about the base center
    space: Optional[BergmanSpace] = field(repr=False, default=None)

    @property
    def r(self):
        return np.exp(-self.grid)


def default_grid(points: int = 33, rmin: float = 1e-3):
    """Log-uniform r in [rmin, 1], returned as increasing t = -log r."""
    r = np.logspace(0.0, math.log10(rmin), points)
    t = -np.log(r)
    t[0] = 0.0
    return t


def minimal_integral_curve(s: BergmanSpace, p: PoleFunction, f, m: int, grid=None,
                           truncation_check: bool = True) -> MinimalIntegralCurve:
    """``I(t) = ||F_t||^2`` on ``{psi < -t}`` for the jet of f of order m at the pole.

    The per-point error combines the norm quadrature estimate with the
    change under one doubling of the truncation.
    """
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 1 or grid[0] < 0 or np.any(np.diff(grid) <= 0):
        raise InvalidGrid("grid must be increasing and start at t >= 0")
    n = s.n
    if realized_order(p, n) != m:
        raise UnsupportedIdeal(
            f"multiplier {p.multiplier:g} realizes jets of order {realized_order(p, n)}, not {m}")
    z0 = np.asarray(p.z0)
    if not np.isfinite(s.weight.phi(z0[None, :])[0]):
        raise UnsupportedIdeal("weight is singular at the pole")
    jc = JetConstraint.from_function(s, f, z0, m)
    vals, errs, coeffs = [], [], []
    for t in grid:
        st = restrict_norms(s, p, t)
        res = minimal_extension(st, jc)
        err = res.norm_squared * (st.norm_rel_error + 64 * EPS)
        if truncation_check and not _exact_jet_case(st, z0):
            res2 = minimal_extension(st.doubled(), jc)
            err += abs(res2.norm_squared - res.norm_squared)
        vals.append(res.norm_squared)
        errs.append(err)
        coeffs.append(recenter(st, res.coefficients, s))
    return MinimalIntegralCurve(grid, np.array(vals), np.array(errs), p, jc, coeffs, s)


def _exact_jet_case(s: BergmanSpace, z0):
    # diagonal space, jet at the basis center: the minimizer is the jet itself
    return s.diagonal and np.allclose(s.center, z0, rtol=0, atol=0) and s.basis.kind in ("Monomial", "Box", "ProductBasis")


@dataclass
class ConcavityReport:
    r: np.ndarray
    second_differences: np.ndarray
    tolerances: np.ndarray
    max_violation: float
    concave: bool
    optimal_constant_checks: list
    optimal_constant_ok: bool
    is_numerically_linear: bool
    linearity_threshold: float


def concavity_report(c: MinimalIntegralCurve) -> ConcavityReport:
    """Second differences of ``r -> I(-log r)`` and the ``I(t) e^t`` chain."""
    if len(c.grid) < 3:
        raise InvalidGrid("need at least 3 grid points")
    order = np.argsort(c.r)
    r = c.r[order]
    J = c.values[order]
    e = c.quadrature_error[order]
    h = np.diff(r)
    slopes = np.diff(J) / h
    D = np.diff(slopes)
    prop = (e[2:] / h[1:] + e[1:-1] * (1 / h[1:] + 1 / h[:-1]) + e[:-2] / h[:-1])
    # rounding in the differences themselves
    prop = prop + 8 * EPS * (np.abs(J[2:]) / h[1:] + np.abs(J[1:-1]) * (1 / h[1:] + 1 / h[:-1])
                             + np.abs(J[:-2]) / h[:-1])
    tol = 2 * prop
    maxv = float(max(np.max(D), 0.0))
    concave = bool(np.all(D <= tol))

    checks = []
    ok = True
    I0, e0 = c.values[0], c.quadrature_error[0]
    g, v, er = c.grid, c.values, c.quadrature_error
    for i in range(1, len(g)):
        a = v[i] * math.exp(g[i]) - I0
        b = v[i] * math.exp(g[i]) - v[i - 1] * math.exp(g[i - 1])
        ta = 2 * (er[i] * math.exp(g[i]) + e0)
        tb = 2 * (er[i] * math.exp(g[i]) + er[i - 1] * math.exp(g[i - 1]))
        passed = bool(a >= -ta and b >= -tb)
        ok &= passed
        checks.append({"t": float(g[i - 1]), "s": float(g[i]), "It_et_minus_I0": float(a),
                       "Is_es_minus_It_et": float(b), "tol": float(max(ta, tb)), "pass": passed})
    thr = max(1e-8, 10 * float(np.sum(c.quadrature_error)))
    linear = bool(np.all(np.abs(D) < thr))
    return ConcavityReport(r, D, tol, maxv, concave, checks, ok, linear, thr)


@dataclass(frozen=True)
class LinearityCheck:
    passed: bool
    max_deviation: float


def linearity_restriction_check(c: MinimalIntegralCurve, tol: float = 1e-8) -> LinearityCheck:
    """If ``r -> I(-log r)`` is linear, every ``F_t`` must equal ``F_0``."""
    if np.any(c.values <= 0):
        raise NotApplicable("I(t) must be positive")
    rep = concavity_report(c)
    if not rep.is_numerically_linear:
        raise NotApplicable("curve is not linear")
    F0 = c.coefficients[0]
    dev = max(float(np.max(np.abs(F - F0))) for F in c.coefficients)
    return LinearityCheck(dev < tol, dev)


def site_rows(s: BergmanSpace, sites, k: int):
    """Stacked Taylor rows of order <= k at every point of ``sites``."""
    orders = multi_indices(s.n, k)
    if k < 0 or not len(sites):
        return np.zeros((0, s.dim), complex)
    return np.vstack([s.onb_taylor_rows(p, orders) for p in sites])


def minimal_extension_sites(s: BergmanSpace, f, sites, m: int) -> MinExtResult:
    """Least-norm element agreeing with f to order m at every site."""
    y_f = s.onb_from_coeffs(f)
    A = site_rows(s, sites, m)
    b = A @ y_f
    y, res, orth, r = least_norm(A, b)
    if res > 1e-10 * (1 + float(np.linalg.norm(b))):
        raise InfeasibleConstraint(f"residual {res:.3g}")
    return MinExtResult(s.coeffs_from_onb(y), y, float(np.sum(np.abs(y) ** 2)), res, orth, r)
