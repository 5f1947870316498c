"""Weights ``e^{-phi}`` for Bergman spaces."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidParameter, UnsupportedWeight


@dataclass(frozen=True)
class WeightSpec:
    """A weight ``phi``; the measure is ``e^{-phi} dV``.

    ``RadialLog(alpha)`` is ``phi = alpha log|z|^2`` and
    ``HarmonicLog(alpha)`` is ``eta = alpha log|z|`` used as ``e^{-2 eta}``;
    both give the density ``|z|^{-2 alpha}``.  ``Grid`` wraps an arbitrary
    evaluator of ``phi``.
    """

    kind: str = "Zero"
    alpha: float = 0.0
    phi_fn: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("Zero", "RadialLog", "HarmonicLog", "Grid"):
            raise InvalidParameter(f"unknown weight kind {self.kind!r}")
        if self.kind == "Grid" and self.phi_fn is None:
            raise InvalidParameter("Grid weight needs an evaluator")

    @property
    def radial_exponent(self) -> Optional[float]:
        """Exponent ``e`` with density ``|z|^e``, or None if not radial."""
        if self.kind == "Zero":
            return 0.0
        if self.kind in ("RadialLog", "HarmonicLog"):
            return -2.0 * float(self.alpha)
        return None

    @property
    def is_trivial(self) -> bool:
        return self.kind == "Zero" or (self.radial_exponent == 0.0)

    def phi(self, z):
        """``phi(z)`` for points of shape (..., n)."""
        z = np.asarray(z, dtype=complex)
        if self.kind == "Grid":
            return np.asarray(self.phi_fn(z), dtype=float)
        e = self.radial_exponent
        if e == 0.0:
            return np.zeros(z.shape[:-1])
        with np.errstate(divide="ignore"):
            return -e * np.log(np.linalg.norm(z, axis=-1))

    def density(self, z):
        with np.errstate(over="ignore"):
            return np.exp(-self.phi(z))


def Zero() -> WeightSpec:
    return WeightSpec("Zero")


def RadialLog(alpha: float) -> WeightSpec:
    return WeightSpec("RadialLog", float(alpha))


def HarmonicLog(alpha: float) -> WeightSpec:
    return WeightSpec("HarmonicLog", float(alpha))


def Grid(phi_fn: Callable) -> WeightSpec:
    return WeightSpec("Grid", 0.0, phi_fn)


def check_integrable(w: WeightSpec, n: int, contains_origin: bool):
    """Local integrability of ``|z|^e`` near the origin in C^n."""
    e = w.radial_exponent
    if e is not None and contains_origin and not (e + 2 * n > 0):
        raise UnsupportedWeight(f"|z|^{e:g} is not integrable near 0 in C^{n}")
