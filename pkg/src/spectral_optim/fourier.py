"""The fast path: 2D DFT, circular convolution and deconvolution.

Transform convention: unnormalized forward DFT, 1/(p*q)-scaled inverse
(the numpy/scipy default).  All pointwise identities in the package
hold under this convention without extra scale factors.

Zero-bin policy: frequency bins whose denominator magnitude falls at or
below a cutoff eps (default 1e-12 times the largest magnitude) have
their output spectrum set to zero.  This is pseudo-inverse behavior; in
particular a zero-sum kernel has zero DC gain, and zeroing the DC bin
deterministically selects the zero-mean representative from the
constant-shift family of solutions.
"""

import numpy as np

from . import _fft
from .errors import AllBinsSingular, ImaginaryResidualTooLarge
from .kernels import as_image, check_fits, psf_to_otf

# Relative magnitude below which a frequency bin counts as singular.
ZERO_BIN_RTOL = 1e-12

# Imaginary-to-real ratio above which idft2 refuses to drop the
# imaginary part.
IMAG_RTOL = 1e-6

# Imaginary parts below NOISE_FLOOR_REL times a caller-supplied bound
# on the output magnitude count as rounding dust, not asymmetry.
NOISE_FLOOR_REL = 1e-9


def dft2(img):
    """Forward 2D DFT of a real image."""
    return _fft.fft2(as_image(img))


def idft2(spectrum, noise_floor=0.0):
    """Inverse 2D DFT, returning ``(image, max_imag_residual)``.

    The imaginary part is dropped, never silently: if its largest
    magnitude exceeds IMAG_RTOL times the largest real magnitude the
    spectrum was not conjugate-symmetric and ImaginaryResidualTooLarge
    is raised, since that indicates an upstream bug.

    ``noise_floor`` is an absolute magnitude below which imaginary
    parts are accepted regardless of the ratio.  Callers whose output
    is near-zero by cancellation (a gradient at an optimum, say) pass
    NOISE_FLOOR_REL times their operand scale here, which sits far
    above rounding dust and far below any genuine asymmetry.
    """
    spectrum = np.asarray(spectrum, dtype=complex)
    out = _fft.ifft2(spectrum)
    residual = float(np.max(np.abs(out.imag)))
    scale = float(np.max(np.abs(out.real)))
    if residual > IMAG_RTOL * scale and residual > noise_floor:
        raise ImaginaryResidualTooLarge(
            f"max imaginary residual {residual:.3e} vs max real {scale:.3e}"
        )
    return np.ascontiguousarray(out.real), residual


def default_eps(magnitude):
    """Default singular-bin cutoff for a grid of denominator magnitudes."""
    return ZERO_BIN_RTOL * float(np.max(magnitude))


def singular_bin_mask(magnitude, eps=None):
    """Boolean mask of frequency bins treated as singular under the policy."""
    magnitude = np.asarray(magnitude, dtype=float)
    if eps is None:
        eps = default_eps(magnitude)
    return magnitude <= eps


def convolve_circular(img, k):
    """Circular (nonvalid) convolution of ``img`` with kernel ``k``.

    Computed as idft2(OTF * dft2(img)).  The top-left
    (p-m+1)-by-(q-n+1) block equals the sliding-window valid
    convolution; the remaining rows and columns carry wraparound.
    Agrees with the dense matrix oracle on every entry.
    """
    img = as_image(img)
    otf = psf_to_otf(k, img.shape)
    floor = NOISE_FLOOR_REL * float(np.max(np.abs(otf))) * float(np.max(np.abs(img)))
    out, _ = idft2(otf * dft2(img), noise_floor=floor)
    return out


def deconvolve(r, k, eps=None):
    """Invert a circular convolution by pointwise spectral division.

    Bins where |OTF| <= eps are zeroed instead of divided (zero-bin
    policy); ``eps`` defaults to 1e-12 times the largest |OTF|.  When
    every bin is singular there is nothing to invert and
    AllBinsSingular is raised.  With all bins regular this is an exact
    inverse of :func:`convolve_circular`.
    """
    r = as_image(r)
    check_fits(np.asarray(k, dtype=float), r.shape)
    otf = psf_to_otf(k, r.shape)
    magnitude = np.abs(otf)
    if eps is not None and eps < 0:
        raise ValueError("eps must be nonnegative")
    mask = singular_bin_mask(magnitude, eps)
    if mask.all():
        raise AllBinsSingular("every transfer-grid bin is below the cutoff")
    spectrum = np.where(mask, 0.0, dft2(r) / np.where(mask, 1.0, otf))
    min_kept = float(np.min(magnitude[~mask]))
    floor = NOISE_FLOOR_REL * float(np.max(np.abs(r))) / min_kept
    out, _ = idft2(spectrum, noise_floor=floor)
    return out
