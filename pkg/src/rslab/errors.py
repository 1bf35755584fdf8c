"""Exception types shared across the package."""


class RslabError(Exception):
    """Base class for all package-specific errors."""


class InvalidModuli(RslabError):
    """The lattice modulus is outside the supported half-plane."""


class PoleProximity(RslabError):
    """An argument landed too close to a pole or zero locus."""


class NormalizerZero(RslabError):
    """The normalizing scalar of a two-site operator is too close to zero."""


class BadLeg(RslabError):
    """A tensor-leg index is out of range or repeated."""


class DimMismatch(RslabError):
    """Operand dimensions are incompatible."""


class OverlappingSubsets(RslabError):
    """Index subsets required to be disjoint overlap."""


class BadOrder(RslabError):
    """An operator order/rank combination is not defined."""


class SamplingExhausted(RslabError):
    """Rejection sampling failed to find admissible points."""


class ExtrapolationUnstable(RslabError):
    """Successive extrapolation estimates disagree beyond tolerance."""
