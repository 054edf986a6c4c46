"""Exception hierarchy shared across the package."""


class FsplitError(Exception):
    """Base class for all errors raised by this package."""


class SignatureMismatch(FsplitError, TypeError):
    """Operands live in different rings (or characteristics)."""


class ResourceLimitExceeded(FsplitError):
    """A Groebner computation exceeded its pair-count or degree cap."""


class NotWellDefined(FsplitError):
    """A premultiplier does not descend to the presented quotient."""


class NotExtendable(FsplitError):
    """The p^{-e}-linear map has no extension along the given finite extension."""


class BoundTooSmall(FsplitError):
    """A normalization is flagged but no extension exists within the degree bound."""


class NonUniqueExtension(FsplitError):
    """Several extensions inducing different maps were found."""


class VerificationError(FsplitError):
    """User-declared data (ring map, conductor, tree) failed verification."""


class IncompatibleIdeal(FsplitError):
    """The ideal is not compatible with the map."""


class UnresolvedSupport(FsplitError):
    """An element has factors outside the declared divisor support."""


class CoefficientError(FsplitError, ValueError):
    """A divisor coefficient would acquire p in its denominator."""
