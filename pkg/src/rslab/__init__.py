"""Numerical verification lab for the elliptic Baxter-Belavin R-matrix,
the associated exchange/identity relations, and the anisotropic spin
Macdonald-Ruijsenaars difference operators.

Everything is evaluated at desk scale in double precision; all asserted
relations are checked against scale-aware tolerances.
"""

__version__ = "0.1.0"

from .errors import (
    BadLeg,
    BadOrder,
    DimMismatch,
    ExtrapolationUnstable,
    InvalidModuli,
    NormalizerZero,
    OverlappingSubsets,
    PoleProximity,
    SamplingExhausted,
)
from .elliptic import EllipticParams

__all__ = [
    "__version__",
    "EllipticParams",
    "InvalidModuli",
    "PoleProximity",
    "NormalizerZero",
    "BadLeg",
    "DimMismatch",
    "OverlappingSubsets",
    "BadOrder",
    "SamplingExhausted",
    "ExtrapolationUnstable",
]
