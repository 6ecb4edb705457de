"""Exception types shared across the package."""


class ProbeError(Exception):
    """Base class for all errors raised by this package."""


class NonHermitianInput(ProbeError):
    """A matrix that must be Hermitian fails the symmetry check."""


class DimensionMismatch(ProbeError):
    """Operator and state dimensions are incompatible."""


class InvalidRank(ProbeError):
    """Requested rank is outside 1..dim."""


class InvalidParameter(ProbeError):
    """A state-family parameter is outside its admissible range."""


class NotNormalized(ProbeError):
    """A state vector is not normalized to unit length."""


class DegenerateSpectrum(ProbeError):
    """An operation requires all spectrum values to be distinct."""


class ZeroSusceptibility(ProbeError):
    """The probe state commutes with the generator; no precision bound exists."""


class PoleEvaluation(ProbeError):
    """A rational function of N was evaluated at a pole of its reduced form."""


class InvalidConfig(ProbeError):
    """A CLI run configuration violates its invariants."""
