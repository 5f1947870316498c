"""Catalog of model domains in C^n.

Domains are small frozen dataclasses.  Points are complex arrays whose last
axis has length ``dim``; one-dimensional domains also accept plain complex
scalars.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import gammaln

from .errors import (
    DimensionMismatch,
    ExactUnavailable,
    InvalidParameter,
    NonHomogeneousGauge,
)


def _as_center(center, n):
    if center is None:
        return (0j,) * n
    c = tuple(complex(v) for v in np.atleast_1d(np.asarray(center, dtype=complex)))
    if len(c) != n:
        raise DimensionMismatch(f"center has length {len(c)}, expected {n}")
    return c


@dataclass(frozen=True)
class Ball:
    """Euclidean ball ``{|z - center| < radius}`` in C^n."""

    n: int = 1
    radius: float = 1.0
    center: tuple = None

    def __post_init__(self):
        if int(self.n) < 1:
            raise InvalidParameter("n must be >= 1")
        if not self.radius > 0 or not math.isfinite(self.radius):
            raise InvalidParameter("radius must be positive")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "center", _as_center(self.center, self.n))

    @property
    def dim(self):
        return self.n


def UnitBall(n: int = 1) -> Ball:
    return Ball(n)


def Disc(radius: float = 1.0, center: complex = 0j) -> Ball:
    return Ball(1, radius, (center,))


@dataclass(frozen=True)
class Polydisc:
    radii: tuple
    center: tuple = None

    def __post_init__(self):
        radii = tuple(float(r) for r in np.atleast_1d(self.radii))
        if not radii:
            raise InvalidParameter("polydisc needs at least one radius")
        if any(not (r > 0) or not math.isfinite(r) for r in radii):
            raise InvalidParameter("polydisc radii must be positive")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "center", _as_center(self.center, len(radii)))

    @property
    def dim(self):
        return len(self.radii)


@dataclass(frozen=True)
class Annulus:
    """``{1 < |z| < R}`` in the plane."""

    R: float

    def __post_init__(self):
        if not (float(self.R) > 1) or not math.isfinite(self.R):
            raise InvalidParameter(f"annulus needs R > 1, got {self.R}")
        object.__setattr__(self, "R", float(self.R))

    @property
    def dim(self):
        return 1

    @property
    def center(self):
        return (0j,)


@dataclass(frozen=True)
class Balanced:
    """Balanced domain ``{h(z) < scale}`` for a homogeneous gauge ``h``.

    ``reinhardt`` marks gauges depending only on ``|z_j|``; ``kinks`` lists
    the angles in ``(0, pi/2)`` where the profile ``theta -> h(cos, sin)``
    is not smooth (used by the n = 2 quadrature).
    """

    gauge: Callable = field(compare=False)
    n: int
    name: str = "custom"
    scale: float = 1.0
    reinhardt: bool = False
    kinks: tuple = ()
    params: tuple = ()

    def __post_init__(self):
        if int(self.n) < 1:
            raise InvalidParameter("n must be >= 1")
        if not self.scale > 0:
            raise InvalidParameter("scale must be positive")
        object.__setattr__(self, "n", int(self.n))

    @property
    def dim(self):
        return self.n

    @property
    def center(self):
        return (0j,) * self.n

    def h(self, z):
        return self.gauge(np.asarray(z, dtype=complex))

    def scaled(self, factor: float) -> "Balanced":
        return Balanced(self.gauge, self.n, self.name, self.scale * factor,
                        self.reinhardt, self.kinks, self.params)


@dataclass(frozen=True)
class Product:
    left: object
    right: object

    @property
    def dim(self):
        return self.left.dim + self.right.dim

    @property
    def center(self):
        return tuple(self.left.center) + tuple(self.right.center)


@dataclass(frozen=True)
class Sublevel:
    """``{z in base : psi(z) < -level}`` for a pole function ``psi``."""

    base: object
    pole: object
    level: float

    def __post_init__(self):
        if not (float(self.level) >= 0):
            raise InvalidParameter("sublevel needs level >= 0")
        if self.pole.domain != self.base:
            raise InvalidParameter("pole function lives on a different domain")
        object.__setattr__(self, "level", float(self.level))

    @property
    def dim(self):
        return self.base.dim


# ---------------------------------------------------------------- gauges

def _gauge_max(z):
    return np.max(np.abs(z), axis=-1)


def _gauge_euclid(z):
    return np.sqrt(np.sum(np.abs(z) ** 2, axis=-1))


def _gauge_lp(p):
    def h(z):
        return np.sum(np.abs(z) ** p, axis=-1) ** (1.0 / p)
    return h


def named_balanced(name: str, n: int = 2, p: float = 2.0, scale: float = 1.0) -> Balanced:
    """Balanced domains with known gauges: ``max``, ``euclid`` and ``lp``."""
    if name == "max":
        kinks = (math.pi / 4,) if n == 2 else ()
        return Balanced(_gauge_max, n, "max", scale, True, kinks)
    if name == "euclid":
        return Balanced(_gauge_euclid, n, "euclid", scale, True, ())
    if name == "lp":
        if not p >= 1:
            raise InvalidParameter("lp gauge needs p >= 1")
        return Balanced(_gauge_lp(float(p)), n, "lp", scale, True, (), (float(p),))
    raise InvalidParameter(f"unknown gauge {name!r}")


def check_homogeneity(d: Balanced, rays: int = 100, seed: int = 0, tol: float = 1e-10):
    """Spot-check ``h(tau z) = |tau| h(z)`` and positivity on random rays."""
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(rays, d.n)) + 1j * rng.normal(size=(rays, d.n))
    tau = rng.uniform(0.1, 3.0, rays) * np.exp(2j * np.pi * rng.uniform(size=rays))
    hz = np.asarray(d.h(z), dtype=float)
    htz = np.asarray(d.h(tau[:, None] * z), dtype=float)
    if hz.shape != (rays,) or np.any(~np.isfinite(hz)) or np.any(hz <= 0):
        raise NonHomogeneousGauge("gauge must be finite and positive away from 0")
    err = np.abs(htz - np.abs(tau) * hz)
    if np.any(err > tol * (1 + np.abs(tau) * hz)):
        raise NonHomogeneousGauge(f"homogeneity defect {err.max():.3g}")


# ---------------------------------------------------------------- config

_DOMAIN_KEYS = {
    "ball": {"kind", "n", "radius", "center"},
    "unitball": {"kind", "n"},
    "disc": {"kind", "radius", "center"},
    "polydisc": {"kind", "radii", "center"},
    "annulus": {"kind", "R"},
    "balanced": {"kind", "gauge", "n", "p", "scale"},
    "product": {"kind", "left", "right"},
    "sublevel": {"kind", "base", "pole", "multiplier", "level"},
}


def _complex_list(v):
    if isinstance(v, (int, float, complex)):
        return [complex(v)]
    out = []
    for x in v:
        if isinstance(x, (list, tuple)) and len(x) == 2:
            out.append(complex(x[0], x[1]))
        elif isinstance(x, str):
            out.append(complex(x.replace(" ", "")))
        else:
            out.append(complex(x))
    return out


def build_domain(config) -> object:
    """Build a validated domain from a plain description.

    ``config`` is either a domain object (returned unchanged after
    validation) or a dict such as ``{"kind": "ball", "n": 2}``,
    ``{"kind": "annulus", "R": 4}`` or
    ``{"kind": "balanced", "gauge": "max", "n": 2}``.  A ``gauge`` may also be
    a callable.  Points are lists of numbers, ``[re, im]`` pairs or strings
    like ``"0.5+0.1j"``.
    """
    if not isinstance(config, dict):
        if isinstance(config, Balanced):
            check_homogeneity(config)
        return config
    kind = str(config.get("kind", "")).lower().replace("_", "")
    if kind not in _DOMAIN_KEYS:
        raise InvalidParameter(f"unknown domain kind {config.get('kind')!r}")
    extra = set(config) - _DOMAIN_KEYS[kind]
    if extra:
        raise InvalidParameter(f"unknown keys for {kind}: {sorted(extra)}")
    if kind in ("ball", "unitball"):
        n = int(config.get("n", 1))
        center = _complex_list(config["center"]) if "center" in config else None
        return Ball(n, float(config.get("radius", 1.0)), center)
    if kind == "disc":
        center = _complex_list(config.get("center", 0.0))
        return Ball(1, float(config.get("radius", 1.0)), center)
    if kind == "polydisc":
        center = _complex_list(config["center"]) if "center" in config else None
        return Polydisc(tuple(config["radii"]), center)
    if kind == "annulus":
        return Annulus(float(config["R"]))
    if kind == "balanced":
        gauge = config.get("gauge", "max")
        n = int(config.get("n", 2))
        scale = float(config.get("scale", 1.0))
        if callable(gauge):
            d = Balanced(gauge, n, "custom", scale)
        else:
            d = named_balanced(str(gauge), n, float(config.get("p", 2.0)), scale)
        check_homogeneity(d)
        return d
    if kind == "product":
        return Product(build_domain(config["left"]), build_domain(config["right"]))
    # sublevel
    from .green import PoleFunction

    base = build_domain(config["base"])
    pole = PoleFunction(base, _complex_list(config.get("pole", [0.0] * base.dim)),
                        float(config.get("multiplier", 2 * base.dim)))
    return Sublevel(base, pole, float(config.get("level", 0.0)))


# ---------------------------------------------------------------- membership

def as_points(d, z):
    """Return ``z`` as a complex array of shape (..., dim)."""
    z = np.asarray(z, dtype=complex)
    if d.dim == 1 and (z.ndim == 0 or z.shape[-1] != 1):
        z = z[..., None]
    if z.ndim == 0 or z.shape[-1] != d.dim:
        raise DimensionMismatch(f"point has trailing length {z.shape[-1] if z.ndim else 0}, "
                                f"domain dimension is {d.dim}")
    return z


def contains(d, z):
    """Membership in the open domain; vectorized over leading axes."""
    z = as_points(d, z)
    out = _contains(d, z)
    return bool(out) if np.ndim(out) == 0 else out


def _contains(d, z):
    if isinstance(d, Ball):
        c = np.asarray(d.center)
        return np.sum(np.abs(z - c) ** 2, axis=-1) < d.radius ** 2
    if isinstance(d, Polydisc):
        c = np.asarray(d.center)
        return np.all(np.abs(z - c) < np.asarray(d.radii), axis=-1)
    if isinstance(d, Annulus):
        r = np.abs(z[..., 0])
        return (r > 1.0) & (r < d.R)
    if isinstance(d, Balanced):
        return np.asarray(d.h(z)) < d.scale
    if isinstance(d, Product):
        n1 = d.left.dim
        return _contains(d.left, z[..., :n1]) & _contains(d.right, z[..., n1:])
    if isinstance(d, Sublevel):
        inside = np.asarray(_contains(d.base, z))
        out = np.zeros(inside.shape, dtype=bool)
        if np.any(inside):
            zi = z[inside] if inside.ndim else z
            psi = np.asarray(d.pole.evaluate(zi))
            if inside.ndim:
                out[inside] = psi < -d.level
            else:
                out = np.asarray(psi < -d.level)
        return out
    raise InvalidParameter(f"unknown domain {type(d).__name__}")


def distance_to_boundary(d, z) -> float:
    """Lower bound for the distance from an interior point to the boundary."""
    z = as_points(d, z).reshape(-1)
    if isinstance(d, Ball):
        return d.radius - float(np.linalg.norm(z - np.asarray(d.center)))
    if isinstance(d, Polydisc):
        return float(np.min(np.asarray(d.radii) - np.abs(z - np.asarray(d.center))))
    if isinstance(d, Annulus):
        r = abs(z[0])
        return min(r - 1.0, d.R - r)
    if isinstance(d, Product):
        n1 = d.left.dim
        return min(distance_to_boundary(d.left, z[:n1]), distance_to_boundary(d.right, z[n1:]))
    if isinstance(d, Balanced):
        # the gauge is Lipschitz; estimate its constant from random directions
        dirs = sphere_directions(d.n, 512, seed=7)
        lip = float(np.max(d.h(dirs)))
        return max(d.scale - float(d.h(z)), 0.0) / lip
    if isinstance(d, Sublevel):
        r = resolve_sublevel(d)
        if r is not None:
            return distance_to_boundary(r, z)
        return _star_radius_min(d, z)
    raise InvalidParameter(f"unknown domain {type(d).__name__}")


def _star_radius_min(d, z):
    # shrink a circle around z until it lies in the domain (sampled check)
    theta = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    rad = distance_to_boundary(d.base, z)
    for _ in range(60):
        ring = z[0] + rad * np.exp(1j * theta)
        if np.all(_contains(d, ring[:, None])):
            return float(rad)
        rad *= 0.7
    return float(rad)


def bounding_box(d):
    """Per-coordinate (center, half-width) of a box containing the domain."""
    if isinstance(d, Ball):
        return np.asarray(d.center), np.full(d.n, d.radius)
    if isinstance(d, Polydisc):
        return np.asarray(d.center), np.asarray(d.radii)
    if isinstance(d, Annulus):
        return np.zeros(1, complex), np.array([d.R])
    if isinstance(d, Balanced):
        dirs = sphere_directions(d.n, 4096, seed=11)
        rmax = float(np.max(d.scale / d.h(dirs))) * 1.05
        return np.zeros(d.n, complex), np.full(d.n, rmax)
    if isinstance(d, Product):
        c1, w1 = bounding_box(d.left)
        c2, w2 = bounding_box(d.right)
        return np.concatenate([c1, c2]), np.concatenate([w1, w2])
    if isinstance(d, Sublevel):
        r = resolve_sublevel(d)
        return bounding_box(r if r is not None else d.base)
    raise InvalidParameter(f"unknown domain {type(d).__name__}")


def sphere_directions(n: int, count: int, seed: int = 0):
    """Deterministic quasi-random unit vectors in C^n (scrambled Sobol)."""
    from scipy.stats import qmc
    from scipy.special import ndtri

    m = int(math.ceil(math.log2(max(count, 2))))
    pts = qmc.Sobol(2 * n, scramble=True, seed=seed).random_base2(m)[:count]
    g = ndtri(np.clip(pts, 1e-15, 1 - 1e-15))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g[:, :n] + 1j * g[:, n:]


# ---------------------------------------------------------------- sublevels

def _mobius_disc(rho, c, w, r):
    """Disc ``{|phi_w| < r}`` inside the disc of radius rho at c."""
    u = (w - c) / rho
    den = 1.0 - r * r * abs(u) ** 2
    return c + rho * u * (1 - r * r) / den, rho * r * (1 - abs(u) ** 2) / den


def resolve_sublevel(d):
    """Rewrite a sublevel set as an explicit catalog domain when possible.

    Returns ``None`` when no closed-form description is known (for
    instance sublevel sets of the annulus Green function).
    """
    if not isinstance(d, Sublevel):
        return d
    base, pole = d.base, d.pole
    if d.level == 0.0:
        return base              # psi < 0 on the whole domain
    r = math.exp(-d.level / pole.multiplier)
    z0 = np.asarray(pole.z0)
    if isinstance(base, Ball):
        c = np.asarray(base.center)
        if np.allclose(z0, c, rtol=0, atol=1e-15):
            return Ball(base.n, base.radius * r, base.center)
        if base.n == 1:
            cc, rr = _mobius_disc(base.radius, c[0], z0[0], r)
            return Ball(1, rr, (cc,))
        return None
    if isinstance(base, Polydisc):
        cs, rs = [], []
        for rho, c, w in zip(base.radii, base.center, z0):
            cc, rr = _mobius_disc(rho, c, w, r)
            cs.append(cc)
            rs.append(rr)
        return Polydisc(tuple(rs), tuple(cs))
    if isinstance(base, Balanced):
        return base.scaled(r) if np.allclose(z0, 0, atol=1e-15) else None
    if isinstance(base, Product):
        from .green import PoleFunction

        n1 = base.left.dim
        parts = []
        for dom, w in ((base.left, z0[:n1]), (base.right, z0[n1:])):
            sub = Sublevel(dom, PoleFunction(dom, w, pole.multiplier), d.level)
            res = resolve_sublevel(sub)
            if res is None:
                return None
            parts.append(res)
        return Product(*parts)
    return None


# ---------------------------------------------------------------- volume

@dataclass(frozen=True)
class VolumeResult:
    value: float
    error_bound: float
    method: str


@dataclass(frozen=True)
class MonteCarlo:
    seed: int = 0
    samples: int = 200_000


def exact_volume(d) -> float:
    if isinstance(d, Ball):
        return math.pi ** d.n * d.radius ** (2 * d.n) / math.factorial(d.n)
    if isinstance(d, Polydisc):
        return float(np.prod([math.pi * r * r for r in d.radii]))
    if isinstance(d, Annulus):
        return math.pi * (d.R ** 2 - 1.0)
    if isinstance(d, Product):
        return exact_volume(d.left) * exact_volume(d.right)
    if isinstance(d, Balanced):
        n, s = d.n, d.scale
        if d.name == "max":
            return math.pi ** n * s ** (2 * n)
        if d.name == "euclid":
            return math.pi ** n * s ** (2 * n) / math.factorial(n)
        if d.name == "lp":
            p = d.params[0]
            # Dirichlet integral over {sum rho_j^p < 1} of prod rho_j
            logv = n * math.log(2 * math.pi) + n * gammaln(2.0 / p) - n * math.log(p) \
                - gammaln(2.0 * n / p + 1.0)
            return math.exp(logv) * s ** (2 * n)
        raise ExactUnavailable("no closed-form volume for a custom gauge")
    if isinstance(d, Sublevel):
        r = resolve_sublevel(d)
        if r is None:
            raise ExactUnavailable("sublevel set has no closed-form description")
        return exact_volume(r)
    raise ExactUnavailable(type(d).__name__)


def monte_carlo_volume(d, seed: int = 0, samples: int = 200_000) -> VolumeResult:
    c, w = bounding_box(d)
    n = d.dim
    rng = np.random.default_rng(seed)
    box = float(np.prod((2 * w) ** 2))
    hits = np.zeros(samples, dtype=float)
    chunk = 50_000
    for s in range(0, samples, chunk):
        k = min(chunk, samples - s)
        u = rng.uniform(-1, 1, size=(k, n)) + 1j * rng.uniform(-1, 1, size=(k, n))
        hits[s:s + k] = _contains(d, c + w * u)
    p = float(np.sum(hits)) / samples  # numpy sum is pairwise
    se = box * math.sqrt(max(p * (1 - p), 0.0) / samples)
    return VolumeResult(box * p, se, "MonteCarlo")


def volume(d, method="Exact") -> VolumeResult:
    """Volume with an error bound.

    ``method`` is ``"Exact"``, ``"Quadrature"`` or a :class:`MonteCarlo`
    instance.  ``Exact`` raises :class:`ExactUnavailable` when no closed
    form is known, so a fallback is always explicit.
    """
    if isinstance(method, MonteCarlo):
        return monte_carlo_volume(d, method.seed, method.samples)
    if method == "Exact":
        return VolumeResult(exact_volume(d), 0.0, "Exact")
    if method == "Quadrature":
        from .quadrature import quadrature_for
        from .weights import Zero

        rule = quadrature_for(d, Zero(), 0)
        return VolumeResult(float(np.sum(rule.weights)), rule.error_bound, "Quadrature")
    if method == "MonteCarlo":
        return monte_carlo_volume(d)
    raise InvalidParameter(f"unknown volume method {method!r}")
