"""Exception hierarchy.

Every error carries a short ``tag`` so that the CLI can record it inside a
failed check instead of crashing.
"""


class L2LabError(Exception):
    tag = "L2LabError"


class InvalidParameter(L2LabError, ValueError):
    tag = "InvalidParameter"


class InvalidParameters(InvalidParameter):
    tag = "InvalidParameters"


class NonHomogeneousGauge(L2LabError, ValueError):
    tag = "NonHomogeneousGauge"


class DimensionMismatch(L2LabError, ValueError):
    tag = "DimensionMismatch"


class ExactUnavailable(L2LabError):
    tag = "ExactUnavailable"


class UnsupportedWeight(L2LabError):
    tag = "UnsupportedWeight"


class UnsupportedPole(L2LabError):
    tag = "UnsupportedPole"


class UnsupportedSublevel(L2LabError):
    tag = "UnsupportedSublevel"


class UnsupportedIdeal(L2LabError):
    tag = "UnsupportedIdeal"


class NotOneDimensional(L2LabError):
    tag = "NotOneDimensional"


class NonConvergent(L2LabError, ArithmeticError):
    tag = "NonConvergent"


class IllConditionedGram(L2LabError, ArithmeticError):
    tag = "IllConditionedGram"


class PointOutsideDomain(L2LabError, ValueError):
    tag = "PointOutsideDomain"


class FunctionalVanishes(L2LabError):
    tag = "FunctionalVanishes"


class InfeasibleConstraint(L2LabError):
    tag = "InfeasibleConstraint"


class NotApplicable(L2LabError):
    tag = "NotApplicable"


class InadmissibleC(L2LabError):
    tag = "InadmissibleC"


class InvalidGrid(L2LabError, ValueError):
    tag = "InvalidGrid"


class DenominatorVanishes(L2LabError, ZeroDivisionError):
    tag = "DenominatorVanishes"


class ConfigError(L2LabError, ValueError):
    tag = "ConfigError"
