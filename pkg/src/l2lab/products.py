"""Jet filtrations on product domains.

For a finite site S, ``J_k(S)`` is the subspace of functions vanishing to
order k on S and ``H_k(S) = J_{k-1}(S) - J_k(S)`` (orthogonal difference,
``J_{-1}`` the whole space).  Everything is done in orthonormal
coordinates, where the product space is the Kronecker product of its
factors.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .bergman import BergmanSpace, ProductBasis, _orthonormal_rows, _product_of, kernel_at
from .domains import Product
from .extension import least_norm, minimal_extension_sites, site_rows
from .weights import Grid, Zero

EPS = np.finfo(float).eps


class ProductSpace:
    """Tensor product of two truncated spaces; norms multiply."""

    def __init__(self, left: BergmanSpace, right: BergmanSpace):
        self.left = left
        self.right = right
        basis = ProductBasis(left.basis, right.basis)
        self.space = _product_of(Product(left.domain, right.domain), left, right, basis)
        if not (left.weight.is_trivial and right.weight.is_trivial):
            n1 = left.n
            wl, wr = left.weight, right.weight
            self.space.weight = Grid(lambda z: wl.phi(z[..., :n1]) + wr.phi(z[..., n1:]))

    def tensor(self, y_left, y_right):
        """Orthonormal coordinates of ``phi (x) psi``."""
        return np.kron(np.asarray(y_left), np.asarray(y_right))

    def tensor_coeffs(self, f_left, f_right):
        """Raw coefficients of ``f(z) g(w)``."""
        return np.kron(np.asarray(f_left), np.asarray(f_right))

    @staticmethod
    def sites(S1, S2):
        return [np.concatenate([np.atleast_1d(a), np.atleast_1d(b)]).astype(complex)
                for a, b in itertools.product(S1, S2)]


# ------------------------------------------------------------------ layers

def _projector_complement(s: BergmanSpace, sites, k):
    """Orthonormal basis Q of J_k(S)^perp (columns), so P_k = I - Q Q^*."""
    return _orthonormal_rows(site_rows(s, sites, k))


@dataclass
class DecompositionLayers:
    space: BergmanSpace
    sites: list
    m: int
    components: list                  # raw coefficients of f_0 .. f_m
    remainder: np.ndarray             # raw coefficients of g in J_m
    onb_components: list = field(repr=False, default_factory=list)
    onb_remainder: np.ndarray = field(repr=False, default=None)

    def orthogonality_residual(self):
        parts = self.onb_components + [self.onb_remainder]
        worst = 0.0
        for a, b in itertools.combinations(parts, 2):
            worst = max(worst, abs(np.vdot(a, b)))
        return worst


def layer_decompose(s: BergmanSpace, sites, m: int, f) -> DecompositionLayers:
    """Split f along ``H_0 + ... + H_m + J_m`` for the site set."""
    y = s.onb_from_coeffs(f)
    sites = [np.atleast_1d(np.asarray(p, dtype=complex)) for p in sites]
    proj = [y]                                   # P_{-1} y = y
    for k in range(m + 1):
        A = site_rows(s, sites, k)
        # the least-norm element sharing the k-jet of y is (I - P_k) y
        low, _, _, _ = least_norm(A, A @ y)
        proj.append(y - low)
    comps = [proj[k] - proj[k + 1] for k in range(m + 1)]
    rem = proj[-1]
    return DecompositionLayers(s, sites, m, [s.coeffs_from_onb(c) for c in comps],
                               s.coeffs_from_onb(rem), comps, rem)


def layer_bases(s: BergmanSpace, sites, m: int):
    """Orthonormal bases (columns) of H_0(S), ..., H_m(S)."""
    out = []
    prev = np.zeros((s.dim, 0), complex)
    for k in range(m + 1):
        Q = _projector_complement(s, sites, k)
        X = Q - prev @ (prev.conj().T @ Q)
        if X.shape[1]:
            U, sv, _ = np.linalg.svd(X, full_matrices=False)
            r = int(np.sum(sv > 1e-8))
            H = U[:, :r]
        else:
            H = X
        out.append(H)
        prev = np.hstack([prev, H])
    return out


@dataclass(frozen=True)
class CompatibilityResult:
    k: int
    dim_product: int
    dim_tensor: int
    residual: float

    @property
    def passed(self):
        return self.dim_product == self.dim_tensor and self.residual < 1e-8


def layer_compatibility(ps: ProductSpace, S1, S2, m: int):
    """Compare ``H_k(S1 x S2)`` with the sum of ``H_p(S1) (x) H_q(S2)``, p + q = k."""
    S = ProductSpace.sites(S1, S2)
    HL = layer_bases(ps.left, S1, m)
    HR = layer_bases(ps.right, S2, m)
    HP = layer_bases(ps.space, S, m)
    out = []
    for k in range(m + 1):
        blocks = [np.kron(HL[p], HR[k - p]) for p in range(k + 1)
                  if HL[p].shape[1] and HR[k - p].shape[1]]
        T = np.hstack(blocks) if blocks else np.zeros((ps.space.dim, 0))
        Qt = _orthonormal_rows(T.conj().T) if T.shape[1] else T
        L = HP[k]
        resid = L - Qt @ (Qt.conj().T @ L) if Qt.shape[1] else L
        res = float(np.linalg.norm(resid, 2)) if resid.size else 0.0
        out.append(CompatibilityResult(k, L.shape[1], T.shape[1], res))
    return out


def _random_vec(rng, n):
    return rng.normal(size=n) + 1j * rng.normal(size=n)


def lemma_in_check(ps: ProductSpace, S1, S2, p: int, q: int, rng) -> float:
    """phi in J_p(S1), psi in J_q(S2)  =>  phi (x) psi in J_{p+q+1}(S1 x S2)."""
    QL = _projector_complement(ps.left, S1, p)
    QR = _projector_complement(ps.right, S2, q)
    a = _random_vec(rng, ps.left.dim)
    b = _random_vec(rng, ps.right.dim)
    a -= QL @ (QL.conj().T @ a)
    b -= QR @ (QR.conj().T @ b)
    v = ps.tensor(a / np.linalg.norm(a), b / np.linalg.norm(b))
    A = site_rows(ps.space, ProductSpace.sites(S1, S2), p + q + 1)
    return float(np.max(np.abs(A @ v)))


def lemma_perp_check(ps: ProductSpace, S1, S2, p: int, q: int, rng) -> float:
    """phi perp J_p(S1), psi perp J_q(S2)  =>  phi (x) psi perp J_{p+q}(S1 x S2)."""
    QL = _projector_complement(ps.left, S1, p)
    QR = _projector_complement(ps.right, S2, q)
    a = QL @ _random_vec(rng, QL.shape[1])
    b = QR @ _random_vec(rng, QR.shape[1])
    v = ps.tensor(a / np.linalg.norm(a), b / np.linalg.norm(b))
    Q = _projector_complement(ps.space, ProductSpace.sites(S1, S2), p + q)
    c = _random_vec(rng, ps.space.dim)
    c -= Q @ (Q.conj().T @ c)
    return float(abs(np.vdot(c / np.linalg.norm(c), v)))


# ------------------------------------------------------------------ product property

@dataclass(frozen=True)
class ProductCheck:
    norm_F: float
    norm_product: float
    margin: float
    equality_expected: bool
    tensor_match: float
    passed: bool


def vanishes_to_order(s: BergmanSpace, f, sites, k: int, tol: float = 1e-12) -> bool:
    """True when all Taylor coefficients of order <= k vanish on the sites."""
    if k < 0:
        return True
    y = s.onb_from_coeffs(f)
    A = site_rows(s, sites, k)
    return bool(np.max(np.abs(A @ y), initial=0.0) <= tol * max(np.linalg.norm(y), 1e-300))


def product_min_extension_check(ps: ProductSpace, f1, f2, S1, S2, m1: int, m2: int,
                                tol: float = 1e-10) -> ProductCheck:
    """Compare the minimal extension of ``f1 (x) f2`` with the product of the factor ones."""
    S1 = [np.atleast_1d(np.asarray(p, dtype=complex)) for p in S1]
    S2 = [np.atleast_1d(np.asarray(p, dtype=complex)) for p in S2]
    F1 = minimal_extension_sites(ps.left, f1, S1, m1)
    F2 = minimal_extension_sites(ps.right, f2, S2, m2)
    F = minimal_extension_sites(ps.space, ps.tensor_coeffs(f1, f2),
                                ProductSpace.sites(S1, S2), m1 + m2)
    nF = math.sqrt(F.norm_squared)
    nP = math.sqrt(F1.norm_squared * F2.norm_squared)
    margin = nF - nP
    expected = vanishes_to_order(ps.left, f1, S1, m1 - 1) and vanishes_to_order(ps.right, f2, S2, m2 - 1)
    match = float(np.max(np.abs(F.onb - ps.tensor(F1.onb, F2.onb))))
    scale = max(nF, 1.0)
    passed = margin >= -tol * scale
    if expected:
        passed = passed and abs(margin) <= tol * scale and match <= tol * scale
    return ProductCheck(nF, nP, margin, expected, match, bool(passed))


def product_kernel_check(ps: ProductSpace, z, w) -> float:
    """Relative difference between the product kernel and the product of kernels."""
    n1 = ps.left.n
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    k = kernel_at(ps.space, z, w, tail=False).value
    k1 = kernel_at(ps.left, z[:n1], w[:n1], tail=False).value
    k2 = kernel_at(ps.right, z[n1:], w[n1:], tail=False).value
    return abs(k - k1 * k2) / max(abs(k), 1e-300)
