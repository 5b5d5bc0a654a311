"""Exception hierarchy shared by every module of the package."""


class SharingError(Exception):
    """Base class for all errors raised by kernelsis."""


class ParameterError(SharingError, ValueError):
    """Scheme parameters (k, n, dimensions, mode) are out of range."""


class InvalidInputError(SharingError, ValueError):
    """Inputs are malformed: duplicate evaluation points, ragged shares, ..."""


class MetadataMismatchError(InvalidInputError):
    """Share bundles that should belong to one secret disagree on metadata."""


class InsufficientSharesError(SharingError):
    """Fewer than k shares were supplied to a reconstruction."""


class ReconstructionError(SharingError):
    """Shares interpolate to something that cannot be the original secret."""


class ForgedShareError(ReconstructionError):
    """The pooled kernel shares reconstruct an invalid kernel.

    At least one participant supplied a share that was not produced by the
    dealer, but the reconstruction cannot tell which.
    """


class FormatError(SharingError, ValueError):
    """A PGM, PBM or KSIS byte stream is malformed."""


class AttackUndefinedError(SharingError, ArithmeticError):
    """The geometric-sum estimator has no inverse at this evaluation point."""


class CorrelationUndefinedError(SharingError, ValueError):
    """Pearson correlation requested for a zero-variance sample."""
