"""Richardson extrapolation with a convergence diagnostic."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonConvergent


@dataclass(frozen=True)
class Extrapolation:
    value: float
    trace: tuple          # (step, estimate) pairs, one per level
    error_estimate: float


def neville_to_zero(h, values):
    """Diagonal of the Neville table extrapolating ``values(h)`` to h = 0.

    Assumes a smooth expansion ``v(h) = v0 + c1 h + c2 h^2 + ...``.
    """
    h = np.asarray(h, dtype=float)
    T = [np.asarray(values, dtype=float).copy()]
    diag = [T[0][0]]
    for k in range(1, len(h)):
        prev = T[-1]
        cur = np.empty(len(prev) - 1)
        for i in range(len(cur)):
            # polynomial through points i..i+k evaluated at 0
            cur[i] = (h[i] * prev[i + 1] - h[i + k] * prev[i]) / (h[i] - h[i + k])
        T.append(cur)
        diag.append(cur[0])
    return np.array(diag)


def richardson(h, values, noise=1e-13, what="limit", scale=0.0, max_error=None) -> Extrapolation:
    """Extrapolate to h -> 0 and certify that the estimates settle down.

    The estimate is taken where the Cauchy differences of successive
    extrapolants first reach the noise floor ``noise * max(|value|, scale)``
    (or are smallest).  :class:`NonConvergent` is raised when the differences
    never decrease, or when the final difference exceeds ``max_error``.
    """
    h = np.asarray(h, dtype=float)
    v = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(v)):
        raise NonConvergent(f"{what}: non-finite samples")
    diag = neville_to_zero(h, v)
    if len(diag) == 1:
        return Extrapolation(float(diag[0]), ((float(h[0]), float(diag[0])),), 0.0)
    diffs = np.abs(np.diff(diag))
    floor = noise * max(abs(float(diag[-1])), scale, 1e-300)
    settled = np.nonzero(diffs <= floor)[0]
    k = int(settled[0]) if settled.size else int(np.argmin(diffs))
    if not settled.size and k == 0 and len(diffs) > 1:
        raise NonConvergent(f"{what}: Cauchy differences do not decrease {diffs.tolist()}")
    value = float(diag[k + 1])
    err = float(diffs[k]) + floor
    if max_error is not None and err > max_error:
        raise NonConvergent(f"{what}: error estimate {err:.3g} exceeds {max_error:.3g}")
    return Extrapolation(value, tuple(zip(h.tolist(), diag.tolist())), err)
