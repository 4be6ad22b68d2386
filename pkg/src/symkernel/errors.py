"""Exception types raised across the package."""


class SymkernelError(Exception):
    """Base class for all package errors."""


class BadParams(SymkernelError):
    """Arguments outside the supported envelope."""


class SymmetryViolation(SymkernelError):
    """Input tensor breaks a required algebraic symmetry."""


class DegenerateSplit(SymkernelError):
    """An eigenvalue sits in the ambiguous band around the rank threshold."""


class NotClosed(SymkernelError):
    """Commutators do not close on the candidate generator set."""


class Unsupported(SymkernelError):
    """Requested construction is outside the implemented scope."""


class RepresentationBroken(SymkernelError):
    """Candidate generators fail the defining commutation relations."""


class BadAbelianField(SymkernelError):
    """Abelian background field is not supported on the flat directions only."""


class TruncationOverflow(SymkernelError):
    """Series arithmetic produced terms beyond the requested order."""


class PoleHit(SymkernelError):
    """Integrand evaluated within tolerance of a determinant zero."""


class QuadratureNotConverged(SymkernelError):
    """Node doubling failed to reach the requested tolerance."""


class TailTooLarge(SymkernelError):
    """Truncated sum's tail bound exceeds the requested tolerance."""


class MixedContourUnsupported(SymkernelError):
    """A principal-value segment remains after per-direction rotation."""


class NotCompact(SymkernelError):
    """Operation requires a compact space with a discrete spectrum."""


class NotInteger(SymkernelError):
    """A quantity that must be an integer failed the integrality check."""
