"""Numerical laboratory for optimal L^2 extension, jet Bergman kernels and Suita-type bounds."""

__version__ = "0.1.0"

from .errors import L2LabError  # noqa: E402
from .domains import Annulus, Ball, Disc, Polydisc, Product, Sublevel, UnitBall, build_domain  # noqa: E402
from .weights import HarmonicLog, RadialLog, Zero  # noqa: E402
from .bergman import Box, Laurent, Monomial, build_space, jet_kernel, kernel_at  # noqa: E402
from .green import PoleFunction, green_eval, log_capacity  # noqa: E402
from .extension import JetConstraint, minimal_extension, minimal_integral_curve  # noqa: E402

__all__ = [
    "L2LabError", "Annulus", "Ball", "Disc", "Polydisc", "Product", "Sublevel", "UnitBall",
    "build_domain", "HarmonicLog", "RadialLog", "Zero", "Box", "Laurent", "Monomial",
    "build_space", "jet_kernel", "kernel_at", "PoleFunction", "green_eval", "log_capacity",
    "JetConstraint", "minimal_extension", "minimal_integral_curve",
]
