"""Convolution kernels and their frequency-domain transfer grids.

A kernel is a small real m-by-n array.  Applying it to a p-by-q image
under circular boundary conditions is, in the frequency domain, a
pointwise multiplication by a p-by-q complex grid called the transfer
grid (OTF).  This module builds kernels, flips them, embeds them into
image-sized vectors, and computes the transfer grid used by every
downstream solver.

Anchor convention: the flipped kernel is embedded with its first entry
at the top-left corner and no circular pre-shift is applied.  The
output of the corresponding circular operation therefore carries its
valid region in the top-left (p-m+1)-by-(q-n+1) block; outputs may be
translated relative to a center-anchored convention, which is
documented behavior, not corrected.
"""

import numpy as np

from . import _fft
from .errors import KernelTooLarge, ShapeMismatch


def as_kernel(k):
    """Validate and coerce ``k`` to a 2D float64 array with finite entries."""
    k = np.asarray(k, dtype=float)
    if k.ndim != 2:
        raise ShapeMismatch(f"kernel must be 2D, got ndim={k.ndim}")
    if k.shape[0] < 1 or k.shape[1] < 1:
        raise ShapeMismatch(f"kernel must be at least 1x1, got {k.shape}")
    if not np.all(np.isfinite(k)):
        raise ValueError("kernel entries must be finite")
    return k


def as_image(a):
    """Validate and coerce ``a`` to a 2D float64 array with finite entries."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ShapeMismatch(f"image must be 2D, got ndim={a.ndim}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ShapeMismatch(f"image must be at least 1x1, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("image entries must be finite")
    return a


def as_shape(shape):
    """Validate an image shape, returning a plain (p, q) tuple of ints."""
    try:
        p, q = shape
    except (TypeError, ValueError):
        raise ShapeMismatch(f"image shape must be a (rows, cols) pair, got {shape!r}")
    p, q = int(p), int(q)
    if p < 1 or q < 1:
        raise ShapeMismatch(f"image shape must be positive, got {(p, q)}")
    return p, q


def check_fits(kernel, shape):
    """Raise KernelTooLarge unless ``kernel`` fits inside ``shape``.

    A kernel wider or taller than the image admits no valid convolution
    output at all, so every operation rejects it up front.
    """
    m, n = kernel.shape
    p, q = as_shape(shape)
    if m > p or n > q:
        raise KernelTooLarge(
            f"kernel {m}x{n} does not fit in image {p}x{q}; "
            "the valid convolution output would be empty"
        )


def flip(k):
    """Doubly mirror a kernel: output[i, j] = k[m-1-i, n-1-j]."""
    k = as_kernel(k)
    return k[::-1, ::-1].copy()


def embed(k_f, shape):
    """Unroll a (flipped) kernel row by row into an image-length vector.

    Row r of ``k_f`` occupies positions r*q .. r*q+n-1 of the output
    (0-based); everything else is zero.  The result is the generating
    vector of the dense circulant formulation.

    Raises KernelTooLarge when the kernel does not fit.
    """
    k_f = as_kernel(k_f)
    p, q = as_shape(shape)
    check_fits(k_f, (p, q))
    m, n = k_f.shape
    grid = np.zeros((p, q))
    grid[:m, :n] = k_f
    return grid.ravel()


def psf_to_otf(k, shape):
    """Transfer grid (OTF) of ``k`` for images of the given shape.

    Computed as the complex conjugate of the 2D DFT of the p-by-q grid
    holding the flipped kernel in its top-left corner.  The conjugate
    picks the operator whose circular output keeps the valid
    convolution in the top-left block (the same grid without the
    conjugate would anchor the output at the bottom-right instead).

    The grid satisfies, for every image N of the given shape,

        dft2(convolve_circular(N, k)) = OTF * dft2(N)   (pointwise)

    and its (0, 0) entry is the DC gain, the plain sum of the kernel.
    """
    k = as_kernel(k)
    p, q = as_shape(shape)
    grid = embed(flip(k), (p, q)).reshape(p, q)
    otf = _fft.fft2(grid)
    return np.conjugate(otf, out=otf)


def identity_kernel():
    """The 1x1 kernel that leaves images unchanged."""
    return np.array([[1.0]])


def grad_x():
    """Horizontal gradient kernel [-1 1] (vertical edge detector)."""
    return np.array([[-1.0, 1.0]])


def grad_y():
    """Vertical gradient kernel, the transpose of grad_x."""
    return np.array([[-1.0], [1.0]])


def gaussian(size, sigma):
    """Normalized (sum 1) square Gaussian kernel of odd or even ``size``."""
    size = int(size)
    if size < 1:
        raise ValueError(f"gaussian size must be >= 1, got {size}")
    sigma = float(sigma)
    if sigma <= 0:
        raise ValueError(f"gaussian sigma must be > 0, got {sigma}")
    c = (size - 1) / 2.0
    idx = np.arange(size) - c
    g1 = np.exp(-(idx**2) / (2.0 * sigma**2))
    g = np.outer(g1, g1)
    return g / g.sum()
