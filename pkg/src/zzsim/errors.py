"""Exception types shared across the package."""

__all__ = [
    "ZzsimError",
    "RegimeError",
    "TruncationError",
    "SingularNetworkError",
    "DispersiveBreakdownError",
    "LabelingError",
    "BlockDiagonalizationError",
    "UnphysicalCardError",
    "ScheduleError",
    "CardValidationError",
    "FitError",
]


class ZzsimError(Exception):
    """Base class for all package-specific failures."""


class RegimeError(ZzsimError, ValueError):
    """Parameters outside the validity regime of a model."""


class TruncationError(ZzsimError):
    """A basis truncation has not converged."""


class SingularNetworkError(ZzsimError, ZeroDivisionError):
    """A capacitance combination vanished while deriving couplings."""


class DispersiveBreakdownError(ZzsimError):
    """A perturbative denominator is too close to resonance."""


class LabelingError(ZzsimError):
    """Max-overlap assignment of eigenvectors to bare labels is ambiguous."""


class BlockDiagonalizationError(ZzsimError):
    """Least-action block diagonalization failed (singular block of X)."""


class UnphysicalCardError(ZzsimError, ValueError):
    """Coherence or device parameters violate a physical constraint."""


class ScheduleError(ZzsimError, ValueError):
    """An echoed-CR pulse schedule cannot be realized."""


class CardValidationError(ZzsimError, ValueError):
    """A device card failed schema validation."""


class FitError(ZzsimError):
    """A nonlinear fit did not converge or its residual is too large."""
