"""Exception types raised by the library."""


class SpectralOptimError(Exception):
    """Base class for all library errors."""


class ShapeMismatch(SpectralOptimError):
    """Operands have incompatible shapes."""


class KernelTooLarge(SpectralOptimError):
    """Kernel does not fit inside the image, so no valid convolution exists."""


class EmptyValidRegion(SpectralOptimError):
    """The valid output region has non-positive size."""


class SingularMatrix(SpectralOptimError):
    """Dense system is numerically singular (condition estimate too large)."""


class ImaginaryResidualTooLarge(SpectralOptimError):
    """Inverse transform produced a significant imaginary part.

    This signals a spectrum that is not conjugate-symmetric, i.e. an
    upstream bug rather than rounding noise.
    """


class AllBinsSingular(SpectralOptimError):
    """Every frequency bin of the denominator falls below the cutoff."""


class ProxFailure(SpectralOptimError):
    """A proximal operator returned non-finite values or a wrong shape."""


class NonIncreasingBeta(SpectralOptimError):
    """The penalty schedule failed to strictly increase beta."""


class UnsupportedFormat(SpectralOptimError):
    """Image file format not handled by the reader/writer."""


class CorruptFile(SpectralOptimError):
    """Image file exists but could not be parsed."""
