"""Computer algebra for l-regular partition congruences.

Truncated q-series over Z, Q and Z/l^m, eta quotients, level-1 modular forms,
the R_l(b) operator chain and the module-rank / scalar-relation machinery
built on it.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    RegpartError,
    RingMismatch,
    IncompatibleOffsets,
    NonIntegralExponents,
    NonUnitLeadingCoefficient,
    DenominatorNotCoprime,
    InvalidModulus,
    EmptyInput,
    DimensionMismatch,
    NotInSpan,
    NonUnit,
    NotPrime,
    PrimeTooSmall,
    InsufficientPrecision,
    NoMatch,
    NotFoundBelow,
    RankObstruction,
    NonUnitRatio,
    ComputationCapExceeded,
    Cancelled,
)
from .series import (  # noqa: F401
    QQ,
    ZZ,
    CoefficientRing,
    FracQSeries,
    Zmod,
    eta_expansion,
    extract_progression,
    reduce_mod,
    residue_ring,
    series_add,
    series_inverse,
    series_mul,
    series_pow,
)

__all__ = [
    "RegpartError",
    "RingMismatch",
    "IncompatibleOffsets",
    "NonIntegralExponents",
    "NonUnitLeadingCoefficient",
    "DenominatorNotCoprime",
    "InvalidModulus",
    "EmptyInput",
    "DimensionMismatch",
    "NotInSpan",
    "NonUnit",
    "NotPrime",
    "PrimeTooSmall",
    "InsufficientPrecision",
    "NoMatch",
    "NotFoundBelow",
    "RankObstruction",
    "NonUnitRatio",
    "ComputationCapExceeded",
    "Cancelled",
    "QQ",
    "ZZ",
    "CoefficientRing",
    "FracQSeries",
    "Zmod",
    "eta_expansion",
    "extract_progression",
    "reduce_mod",
    "residue_ring",
    "series_add",
    "series_inverse",
    "series_mul",
    "series_pow",
]
