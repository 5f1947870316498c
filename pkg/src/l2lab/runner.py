"""Experiment suites behind the ``l2lab`` command.

Each suite takes a plain dict (defaults merged with the user's JSON and
flags), runs the library functions and returns a :class:`Report` made of
named checks.  Library errors never escape: they become failed checks that
carry the error tag.
"""
from __future__ import annotations

import copy
import json
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import betainc

from . import __version__
from .auxiliary import (
    Const,
    ExpT,
    Piecewise,
    build_aux_triple,
    chi_kappa,
    chi_linear,
    constant_C,
    demext_constant,
    kappa_constant,
    verify_ode_identities,
)
from .bergman import Monomial, build_space, kernel_at
from .domains import Ball, _complex_list, build_domain
from .errors import ConfigError, L2LabError, NonConvergent
from .extension import (
    concavity_report,
    default_grid,
    linearity_restriction_check,
    minimal_integral_curve,
)
from .green import PoleFunction, indicatrix_volume, tube_mass_limit
from .products import ProductSpace, layer_compatibility, product_min_extension_check
from .suita import AnnulusGap, blocki_extension_check, blocki_volume_check, equality_locus_scan, suita_report

COMMON_KEYS = {"seed": 0, "truncation": None, "grid": None}


@dataclass
class Check:
    name: str
    computed: object
    reference: object
    tol: float
    passed: bool
    provenance: str
    error: Optional[str] = None

    def as_dict(self):
        d = {"name": self.name, "computed": _clean(self.computed), "reference": _clean(self.reference),
             "tol": _clean(self.tol), "pass": bool(self.passed), "provenance": self.provenance}
        if self.error is not None:
            d["error"] = self.error
        return d


@dataclass
class Report:
    suite: str
    config: dict
    checks: list = field(default_factory=list)
    curves: dict = field(default_factory=dict)     # name -> (header, rows)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def nonconvergent(self) -> bool:
        return any(c.error == NonConvergent.tag for c in self.checks)

    def as_dict(self):
        return {
            "suite": self.suite,
            "config": _clean(self.config),
            "checks": [c.as_dict() for c in self.checks],
            "pass": self.passed,
            "meta": {"seed": self.config.get("seed"), "truncation": self.config.get("truncation"),
                     "version": __version__},
        }

    def add(self, name, computed, reference, tol, passed, provenance):
        self.checks.append(Check(name, computed, reference, tol, bool(passed), provenance))

    def guarded(self, name: str, provenance: str, fn: Callable[[], None]):
        """Run ``fn``; any error becomes a failed check named ``name``."""
        try:
            fn()
        except L2LabError as e:
            self.checks.append(Check(name, None, None, None, False, provenance, e.tag))
        except (ArithmeticError, ValueError, np.linalg.LinAlgError) as e:
            self.checks.append(Check(name, None, None, None, False, provenance, type(e).__name__))


def _clean(x):
    """JSON-safe copy: complex as [re, im], non-finite floats as strings."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [_clean(float(x.real)), _clean(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x


# ------------------------------------------------------------------ config

def merge_config(suite: str, user: dict | None = None, overrides: dict | None = None) -> dict:
    """Defaults for ``suite`` updated by the file config, then by flags.

    Unknown keys raise :class:`ConfigError`.
    """
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    defaults = dict(COMMON_KEYS)
    defaults.update(copy.deepcopy(SUITES[suite][0]))
    cfg = dict(defaults)
    for src in (user or {}), (overrides or {}):
        if not isinstance(src, dict):
            raise ConfigError("config must be a JSON object")
        extra = set(src) - set(defaults)
        if extra:
            raise ConfigError(f"unknown keys for suite {suite}: {sorted(extra)}")
        cfg.update({k: v for k, v in src.items() if v is not None})
    seed = cfg["seed"]
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2 ** 64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    for k in ("truncation", "grid"):
        v = cfg[k]
        if v is not None and (not isinstance(v, int) or isinstance(v, bool) or v < 1):
            raise ConfigError(f"{k} must be a positive integer")
    return cfg


def load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON in {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data


def run_suite(suite: str, cfg: dict | None = None) -> Report:
    """Run a suite on a merged config (``merge_config`` is applied if needed)."""
    cfg = merge_config(suite, cfg) if cfg is None or set(COMMON_KEYS) - set(cfg) else cfg
    rep = Report(suite, cfg)
    try:
        SUITES[suite][1](cfg, rep)
    except (KeyError, TypeError) as e:
        raise ConfigError(f"bad value in config: {e}") from e
    return rep


def emit_report(rep: Report, out_dir) -> str:
    """Write ``report.json`` and ``curves/*.csv``; returns the report path."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "report.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(rep.as_dict(), sort_keys=True, indent=2, ensure_ascii=False))
        fh.write("\n")
    if rep.curves:
        cdir = os.path.join(out_dir, "curves")
        os.makedirs(cdir, exist_ok=True)
        for name, (header, rows) in sorted(rep.curves.items()):
            with open(os.path.join(cdir, name + ".csv"), "w", encoding="utf-8", newline="\n") as fh:
                fh.write(",".join(header) + "\n")
                for row in rows:
                    fh.write(",".join(repr(float(v)) for v in row) + "\n")
    return path


# ------------------------------------------------------------------ helpers

def _domain_name(desc) -> str:
    d = dict(desc)
    kind = str(d.pop("kind", "domain"))
    parts = [kind] + [f"{k}{v}" for k, v in sorted(d.items()) if not isinstance(v, (dict, list))]
    return "_".join(parts).replace(".", "p").replace("-", "m")


def _rng(cfg):
    return np.random.default_rng(cfg["seed"])


def _random_poly(rng, degree):
    k = np.arange(degree + 1)
    return (rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)) / (1.0 + k)


def _pad(f, size):
    out = np.zeros(size, complex)
    f = np.asarray(f, dtype=complex)
    if len(f) > size:
        raise ConfigError(f"polynomial of degree {len(f) - 1} exceeds the truncation")
    out[: len(f)] = f
    return out


def _monomial_index(s, alpha):
    hits = np.nonzero(np.all(s.exponents == np.asarray(alpha), axis=1))[0]
    if not hits.size:
        raise ConfigError(f"monomial {alpha} not in the basis; raise the truncation")
    return int(hits[0])


# ------------------------------------------------------------------ sharpness

SHARPNESS = {
    "domains": [{"kind": "ball", "n": 1}, {"kind": "ball", "n": 2}],
    "m": [0, 1, 2, 3],
    "a": [0.5, 1.0, 2.0, 5.0],
    "tol": 1e-10,
    "linearity_tol": 1e-8,
}


def _sharpness(cfg, rep: Report):
    prov_ratio = "optimal constant attained: homogeneous jets satisfy I(0) = e^a I(a)"
    prov_lin = "linear r -> I(-log r) forces the minimal extensions to coincide"
    for dspec in cfg["domains"]:
        dname = _domain_name(dspec)
        for m in cfg["m"]:
            tag = f"{dname} m={m}"

            def body(dspec=dspec, m=m, tag=tag, dname=dname):
                d = build_domain(dspec)
                n = d.dim
                N = cfg["truncation"] or (24 if n == 1 else 12)
                s = build_space(d, None, Monomial(max(N, m), n))
                f = np.zeros(s.dim, complex)
                f[_monomial_index(s, (m,) + (0,) * (n - 1))] = 1.0
                p = PoleFunction(d, [0.0] * n, 2.0 * (n + m))
                a_vals = sorted(float(a) for a in cfg["a"])
                if a_vals:
                    c = minimal_integral_curve(s, p, f, m, [0.0] + a_vals)
                    I0 = c.values[0]
                    for a, Ia in zip(a_vals, c.values[1:]):
                        ratio = I0 / (math.exp(a) * Ia)
                        rep.add(f"sharpness {tag} a={a:g}", ratio, 1.0, cfg["tol"],
                                abs(ratio - 1.0) < cfg["tol"], prov_ratio)
                lin = minimal_integral_curve(s, p, f, m, default_grid(cfg["grid"] or 33))
                lc = linearity_restriction_check(lin, cfg["linearity_tol"])
                rep.add(f"linearity restriction {tag}", lc.max_deviation, 0.0, cfg["linearity_tol"],
                        lc.passed, prov_lin)
                rep.curves[f"sharpness_{dname}_m{m}"] = (["r", "I"], list(zip(lin.r, lin.values)))

            rep.guarded(f"sharpness {tag}", prov_ratio, body)


# ------------------------------------------------------------------ concavity

CONCAVITY = {
    "domain": {"kind": "disc"},
    "pole": 0.0,
    "m": 1,
    "functions": [[1.0, 1.0]],
    "random": 0,
    "degree": 8,
    "a": [0.5, 1.0, 2.0, 5.0],
    "rmin": 1e-3,
    "tol": 1e-10,
    "closed_form_tol": 1e-8,
}


def _closed_curve(f, m, r):
    """``I`` on the unit disc with the jet at 0: sum_k pi |f_k|^2 rho^{2k+2}/(k+1), rho^{2m+2} = r."""
    out = np.zeros_like(r)
    for k in range(min(m + 1, len(f))):
        out += math.pi * abs(f[k]) ** 2 * r ** ((k + 1) / (m + 1)) / (k + 1)
    return out


def _concavity(cfg, rep: Report):
    prov_c = "r -> I(-log r) is concave on (0, 1]"
    prov_o = "optimal constant: I(0) <= e^t I(t) and e^t I(t) nondecreasing"
    prov_f = "closed-form minimal integrals on the unit disc with the jet at the center"
    rng = _rng(cfg)
    d = build_domain(cfg["domain"])
    n = d.dim
    m = int(cfg["m"])
    pole = _complex_list(cfg["pole"])
    funcs = [list(_complex_list(f)) for f in cfg["functions"]]
    funcs += [list(_random_poly(rng, int(cfg["degree"]))) for _ in range(int(cfg["random"]))]
    grid = default_grid(cfg["grid"] or 33, float(cfg["rmin"]))
    a_vals = sorted(float(a) for a in cfg["a"])
    disc_at_zero = isinstance(d, Ball) and n == 1 and d.radius == 1.0 and d.center[0] == 0 and pole[0] == 0
    for i, f in enumerate(funcs):

        def body(i=i, f=f):
            N = cfg["truncation"] or (24 if n == 1 else 12)
            s = build_space(d, None, Monomial(max(N, len(f) - 1), n))
            fc = _pad(f, s.dim)
            p = PoleFunction(d, pole, 2.0 * (n + m))
            c = minimal_integral_curve(s, p, fc, m, grid)
            r = concavity_report(c)
            rep.add(f"concave f{i}", r.max_violation, 0.0, float(np.max(r.tolerances)), r.concave, prov_c)
            rep.add(f"increasing e^t I(t) f{i}", min(min(x["It_et_minus_I0"], x["Is_es_minus_It_et"])
                                                     for x in r.optimal_constant_checks),
                    0.0, max(x["tol"] for x in r.optimal_constant_checks), r.optimal_constant_ok, prov_o)
            if a_vals:
                ca = minimal_integral_curve(s, p, fc, m, [0.0] + a_vals)
                worst = max(ca.values[0] - math.exp(a) * Ia for a, Ia in zip(a_vals, ca.values[1:]))
                rep.add(f"optimal constant f{i}", worst, 0.0, cfg["tol"], worst <= cfg["tol"], prov_o)
            if disc_at_zero:
                ref = _closed_curve(fc, m, c.r)
                dev = float(np.max(np.abs(c.values - ref)))
                rep.add(f"closed form f{i}", dev, 0.0, cfg["closed_form_tol"],
                        dev < cfg["closed_form_tol"], prov_f)
            rep.curves[f"concavity_f{i}"] = (["r", "I", "error"],
                                            list(zip(c.r, c.values, c.quadrature_error)))

        rep.guarded(f"concavity f{i}", prov_c, body)


# ------------------------------------------------------------------ product

PRODUCT = {
    "count": 100,
    "max_order": 2,
    "max_sites": 2,
    "degree": 4,
    "site_radius": 0.7,
    "site_separation": 0.4,
    "tol": 1e-10,
    "layer_tol": 1e-8,
}


def _product(cfg, rep: Report):
    prov_p = "product property: ||F|| >= ||F1|| ||F2||, equality and F = F1 (x) F2 under vanishing"
    prov_l = "jet layers of a product are sums of tensor products of factor layers"
    rng = _rng(cfg)
    N = cfg["truncation"] or 12
    disc = build_domain({"kind": "disc"})
    left = build_space(disc, None, Monomial(N))
    right = build_space(disc, None, Monomial(N))
    ps = ProductSpace(left, right)
    M = int(cfg["max_order"])
    margins, eq_dev, failed = [], [], []

    def sites():
        # nearly coalescing sites make the jet constraints numerically dependent
        k = int(rng.integers(1, int(cfg["max_sites"]) + 1))
        while True:
            rad = float(cfg["site_radius"]) * np.sqrt(rng.random(k))
            z = rad * np.exp(2j * np.pi * rng.random(k))
            gaps = np.abs(z[:, None] - z[None, :]) + np.eye(k) * 10
            if np.min(gaps) >= float(cfg["site_separation"]):
                return [np.array([v]) for v in z]

    def poly(S, m, vanish):
        g = _random_poly(rng, int(cfg["degree"]))
        if vanish:
            for z in S:
                for _ in range(m):
                    g = np.convolve(g, [-z[0], 1.0])
        return _pad(g, N + 1)

    for i in range(int(cfg["count"])):
        m1, m2 = (int(v) for v in rng.integers(0, M + 1, size=2))
        S1, S2 = sites(), sites()
        vanish = bool(rng.random() < 0.5)
        f1, f2 = poly(S1, m1, vanish), poly(S2, m2, vanish)

        def body(f1=f1, f2=f2, S1=S1, S2=S2, m1=m1, m2=m2, i=i):
            r = product_min_extension_check(ps, f1, f2, S1, S2, m1, m2, cfg["tol"])
            scale = max(r.norm_F, 1.0)
            margins.append(r.margin / scale)
            if r.equality_expected:
                eq_dev.append(max(abs(r.margin), r.tensor_match) / scale)
            if not r.passed:
                failed.append(i)

        rep.guarded(f"product instance {i}", prov_p, body)
    if margins:
        rep.add("product margin (min, relative)", min(margins), 0.0, cfg["tol"],
                min(margins) >= -cfg["tol"] and not failed, prov_p)
    if eq_dev:
        rep.add("product equality and tensor match (max)", max(eq_dev), 0.0, cfg["tol"],
                max(eq_dev) <= cfg["tol"], prov_p)

    def layers():
        S1 = [np.array([0.0]), np.array([0.5])]
        S2 = [np.array([0.3j])]
        worst, ok = 0.0, True
        for r in layer_compatibility(ps, S1, S2, M):
            worst = max(worst, r.residual)
            ok &= r.dim_product == r.dim_tensor
        rep.add("layer compatibility residual", worst, 0.0, cfg["layer_tol"],
                ok and worst < cfg["layer_tol"], prov_l)

    rep.guarded("layer compatibility residual", prov_l, layers)


# ------------------------------------------------------------------ suita

SUITA = {
    "R": 4.0,
    "m": 1,
    "alpha": 0.0,
    "dps": 50,
    "locus_tol": 1e-4,
    "gap_tol": 1e-6,
    "disc_radii": [0.0, 0.3, 0.6, 0.9],
    "disc_tol": 1e-8,
    "tube_poles": [0.0, 0.5],
    "tube_tol": 1e-4,
}


def _suita(cfg, rep: Report):
    prov_l = "annulus jet Suita equality exactly at |z0| = R^{k/(m+1)}"
    prov_d = "Suita equality pi B = c_beta^2 on the disc"
    prov_t = "tube mass e^a Vol({2G < -a}) tends to pi / c_beta^2"
    R, m, alpha = float(cfg["R"]), int(cfg["m"]), float(cfg["alpha"])
    K = cfg["truncation"] or 200

    def locus():
        loc = equality_locus_scan(R, m, alpha, max(cfg["grid"] or 64, 64), K, int(cfg["dps"]))
        rep.curves[f"suita_gap_R{R:g}_m{m}".replace(".", "p")] = (
            ["r", "relative_gap"], list(zip(loc.scan_radii, loc.scan_relative_gap)))
        rep.add("scan relative gap >= 0", loc.min_gap, 0.0, 1e-12, loc.min_gap >= -1e-12,
                "jet Suita inequality pi B^(m) >= m!(m+1)! c_beta^{2m+2}")
        if alpha != 0.0:
            rep.add("detected equality radii", len(loc.detected), None, 0.0, True, prov_l)
            return
        if len(loc.detected) == len(loc.predicted):
            dev = max((abs(a - b) for a, b in zip(sorted(loc.detected), sorted(loc.predicted))), default=0.0)
        else:
            dev = math.inf
        rep.add(f"equality locus R={R:g} m={m}", dev, 0.0, cfg["locus_tol"],
                loc.matches(cfg["locus_tol"]), prov_l)
        if loc.predicted:
            gap = AnnulusGap(R, m, alpha, int(cfg["dps"]))
            for r0 in loc.detected:
                g = abs(float(gap(r0)))
                rep.add(f"relative gap at r={r0:.12g}", g, 0.0, cfg["gap_tol"], g < cfg["gap_tol"], prov_l)
        else:
            rep.add("min relative gap > 0 (no equality)", loc.min_gap, 0.0, 0.0, loc.min_gap > 0, prov_l)

    rep.guarded(f"equality locus R={R:g} m={m}", prov_l, locus)
    disc = Ball(1)
    for r0 in cfg["disc_radii"]:
        def disc_body(r0=r0):
            sr = suita_report(disc, complex(r0), 0)
            dev = abs(sr.gap)
            rep.add(f"disc |pi B - c^2| at {r0:g}", dev, 0.0, cfg["disc_tol"], dev < cfg["disc_tol"], prov_d)

        rep.guarded(f"disc |pi B - c^2| at {r0:g}", prov_d, disc_body)
    for z0 in cfg["tube_poles"]:
        def tube_body(z0=z0):
            lim = tube_mass_limit(PoleFunction(disc, [complex(z0)], 2.0))
            rel = abs(lim.value - lim.reference) / lim.reference
            rep.add(f"tube mass limit at {z0:g}", lim.value, lim.reference, cfg["tube_tol"],
                    rel < cfg["tube_tol"], prov_t)

        rep.guarded(f"tube mass limit at {z0:g}", prov_t, tube_body)


# ------------------------------------------------------------------ azukawa

AZUKAWA = {
    "cases": [
        {"domain": {"kind": "ball", "n": 1}, "point": [0.0]},
        {"domain": {"kind": "ball", "n": 2}, "point": [0.0, 0.0]},
        {"domain": {"kind": "ball", "n": 3}, "point": [0.0, 0.0, 0.0]},
        {"domain": {"kind": "disc"}, "point": [0.5]},
        {"domain": {"kind": "balanced", "gauge": "max", "n": 2}, "point": [0.0, 0.0]},
    ],
    "directions": 1024,
    "replicates": 8,
    "tol": 1e-6,
}


def _azukawa(cfg, rep: Report):
    prov = "B_D(z) >= 1 / Vol(I_D(z)), with equality on balls and balanced domains at 0"
    for case in cfg["cases"]:
        name = f"B*Vol(I) {_domain_name(case['domain'])} at {case['point']}"

        def body(case=case, name=name):
            d = build_domain(case["domain"])
            z = _complex_list(case["point"])
            s = build_space(d, None, Monomial(cfg["truncation"], d.dim) if cfg["truncation"] else None)
            B = kernel_at(s, z, tail=False).diagonal
            ind = indicatrix_volume(d, z, int(cfg["directions"]), int(cfg["replicates"]))
            val = B * ind.volume
            tol = max(cfg["tol"], ind.error_estimate / ind.volume + s.norm_rel_error)
            rep.add(name, val, 1.0, tol, abs(val - 1.0) <= tol, prov)

        rep.guarded(name, prov, body)


# ------------------------------------------------------------------ blocki

BLOCKI = {
    "cases": [
        {"domain": {"kind": "disc"}, "points": [[0.0], [0.3], [[0.2, 0.4]]]},
        {"domain": {"kind": "polydisc", "radii": [1.0, 1.0]}, "points": [[0.0, 0.0], [0.3, -0.2]]},
    ],
    "a": [0.5, 1.0, 2.0],
    "count": 5,
    "degree": 6,
    "tol": 1e-10,
    "volume_tol": 1e-8,
}


def _blocki(cfg, rep: Report):
    prov_e = "|f(z0)|^2 / B(z0) <= e^{2na} int_{G < -a} |f|^2"
    prov_v = "B(w) e^{2na} Vol({G(., w) < -a}) >= 1"
    rng = _rng(cfg)
    for case in cfg["cases"]:
        dname = _domain_name(case["domain"])

        def body(case=case, dname=dname):
            d = build_domain(case["domain"])
            n = d.dim
            N = cfg["truncation"] or (24 if n == 1 else 12)
            s = build_space(d, None, Monomial(N, n))
            low = np.nonzero(np.sum(s.exponents, axis=1) <= int(cfg["degree"]))[0]
            fs = []
            for _ in range(int(cfg["count"])):
                f = np.zeros(s.dim, complex)
                f[low] = (rng.normal(size=low.size) + 1j * rng.normal(size=low.size)) / (
                    1.0 + np.sum(s.exponents[low], axis=1))
                fs.append(f)
            for pt in case["points"]:
                z = _complex_list(pt)
                for a in cfg["a"]:
                    worst = -math.inf
                    ok = True
                    for f in fs:
                        r = blocki_extension_check(s, z, f, float(a), cfg["tol"])
                        worst = max(worst, (r.lhs - r.rhs) / max(1.0, r.rhs))
                        ok &= r.passed
                    if fs:
                        rep.add(f"extension bound {dname} z={pt} a={a:g}", worst, 0.0, cfg["tol"], ok, prov_e)
                    v = blocki_volume_check(s, z, float(a), cfg["volume_tol"])
                    rep.add(f"volume bound {dname} z={pt} a={a:g}", v.lhs, 1.0, cfg["volume_tol"],
                            v.passed, prov_v)

        rep.guarded(f"blocki {dname}", prov_e, body)


# ------------------------------------------------------------------ auxconstants

AUXCONSTANTS = {
    "a": [0.0, 1.0, 2.0, 5.0],
    "chi": "linear",
    "tol": 1e-10,
    "kappa_a": [1.0, 2.0, 4.0],
    "ode_families": ["const", "exp", "piecewise"],
    "ode_a": 1.0,
    "ode_tol": 1e-8,
    "demext": [[0, 1, 1]],
    "demext_random": 10,
    "demext_tol": 1e-8,
}


def _family(name, a):
    if name == "const":
        return Const(a + 1.0)
    if name == "exp":
        return ExpT(a + 1.0)
    if name == "piecewise":
        return Piecewise(a)
    raise ConfigError(f"unknown c family {name!r}")


def _auxconstants(cfg, rep: Report):
    prov_c = "C(1 - t, piecewise c, a) = e^a + 1"
    prov_k = "kappa choice gives C < e^a + (25/16) e^{-a}"
    prov_o = "u, s, g solve the defining ODE system"
    prov_d = "demand-extension constant as a ratio of incomplete Beta integrals"
    if cfg["chi"] not in ("linear", "kappa"):
        raise ConfigError("chi must be 'linear' or 'kappa'")
    for a in cfg["a"]:
        def cbody(a=float(a)):
            if cfg["chi"] == "linear":
                chi, dchi = chi_linear()
                C = constant_C(chi, Piecewise(a), a, dchi).value
                ref = math.exp(a) + 1.0
                rep.add(f"C(1-t) a={a:g}", C, ref, cfg["tol"], abs(C - ref) <= cfg["tol"] * ref, prov_c)
            else:
                k = kappa_constant(a)
                chi, dchi = chi_kappa(k.kappa)
                C = constant_C(chi, Piecewise(a), a, dchi).value
                rep.add(f"C(kappa) a={a:g}", C, k.bound, cfg["tol"], C <= k.bound * (1 + cfg["tol"]), prov_k)

        rep.guarded(f"C a={a:g}", prov_c, cbody)
    for a in cfg["kappa_a"]:
        def kbody(a=float(a)):
            k = kappa_constant(a)
            rep.add(f"kappa bound a={a:g}", k.bound, k.cap, 0.0, k.holds, prov_k)

        rep.guarded(f"kappa bound a={a:g}", prov_k, kbody)
    for fam in cfg["ode_families"]:
        def obody(fam=fam):
            t = build_aux_triple(_family(fam, float(cfg["ode_a"])), float(cfg["ode_a"]))
            r = verify_ode_identities(t, cfg["grid"] or 100)
            rep.add(f"ODE residual {fam}", r.max, 0.0, cfg["ode_tol"], r.max < cfg["ode_tol"] and r.signs_ok, prov_o)

        rep.guarded(f"ODE residual {fam}", prov_o, obody)
    cases = [tuple(x) for x in cfg["demext"]]
    rng = _rng(cfg)
    for _ in range(int(cfg["demext_random"])):
        m = int(rng.integers(0, 4))
        p = int(rng.integers(1, 4))
        cases.append((m, p, float(rng.uniform(0.05, 1.0) * (m + p))))
    for m, p, eps in cases:
        name = f"demext({m:g},{p:g},{eps:.6g})"

        def dbody(m=m, p=p, eps=eps, name=name):
            v = demext_constant(m, p, eps)
            ref = 1.0 / float(betainc(m + p, eps, 0.5))
            rep.add(name, v, ref, cfg["demext_tol"], abs(v - ref) <= cfg["demext_tol"] * ref, prov_d)

        rep.guarded(name, prov_d, dbody)


SUITES = {
    "sharpness": (SHARPNESS, _sharpness),
    "concavity": (CONCAVITY, _concavity),
    "product": (PRODUCT, _product),
    "suita": (SUITA, _suita),
    "azukawa": (AZUKAWA, _azukawa),
    "blocki": (BLOCKI, _blocki),
    "auxconstants": (AUXCONSTANTS, _auxconstants),
}
