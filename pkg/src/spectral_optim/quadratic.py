"""Closed-form minimizer of multi-term quadratic convolution losses.

The loss is a weighted sum of squared Frobenius norms,

    L(N) = sum_i w_i * || guide_i - k_i (*) N ||_F^2,

with (*) the circular convolution.  Every term is diagonal in the
frequency domain, so the global minimum has the closed form

    spectrum(N_opt) = sum_i w_i conj(OTF_i) * dft2(guide_i)
                      -----------------------------------------
                      sum_i w_i |OTF_i|^2

evaluated pointwise, with the zero-bin policy applied to the (real,
nonnegative) denominator.  The two-term guided-deblurring loss is a
special case; any finite number of terms works because differentiation
is linear in the terms.

No n-by-n matrix is ever materialized here; the dense normal-equation
route lives in :mod:`spectral_optim.oracle` for verification only.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import AllBinsSingular, ShapeMismatch
from .fourier import (
    NOISE_FLOOR_REL,
    convolve_circular,
    dft2,
    idft2,
    singular_bin_mask,
)
from .kernels import as_image, as_kernel, as_shape, check_fits, psf_to_otf


class LossTerm(NamedTuple):
    """One loss summand: pull ``kernel (*) N`` toward ``guide``, scaled by ``weight``."""

    kernel: np.ndarray
    guide: np.ndarray
    weight: float


def _coerce_term(term, shape):
    kernel, guide, weight = term
    kernel = as_kernel(kernel)
    guide = as_image(guide)
    weight = float(weight)
    if guide.shape != shape:
        raise ShapeMismatch(f"guide shape {guide.shape} != problem shape {shape}")
    check_fits(kernel, shape)
    if not math.isfinite(weight) or weight < 0:
        raise ValueError(f"term weight must be finite and >= 0, got {weight}")
    return LossTerm(kernel, guide, weight)


@dataclass
class QuadProblem:
    """A multi-term quadratic convolution loss over p-by-q images."""

    terms: list
    shape: tuple

    def __post_init__(self):
        self.shape = as_shape(self.shape)
        self.terms = [_coerce_term(t, self.shape) for t in self.terms]
        if not self.terms:
            raise ValueError("problem needs at least one term")
        if not any(t.weight > 0 for t in self.terms):
            raise ValueError("problem needs at least one term with positive weight")


@dataclass
class QuadSolution:
    """Solver output: the minimizing image plus bookkeeping."""

    image: np.ndarray
    zeroed_bins: int
    loss_value: float


def terms_loss(terms, n):
    """Loss of image ``n`` under an iterable of (kernel, guide, weight) triples."""
    n = as_image(n)
    total = 0.0
    for kernel, guide, weight in terms:
        if weight == 0:
            continue
        diff = np.asarray(guide, dtype=float) - convolve_circular(n, kernel)
        total += float(weight) * float(np.sum(diff * diff))
    return total


def evaluate_loss(problem, n):
    """Evaluate the problem loss at image ``n`` (nonnegative)."""
    n = as_image(n)
    if n.shape != problem.shape:
        raise ShapeMismatch(f"image shape {n.shape} != problem shape {problem.shape}")
    return terms_loss(problem.terms, n)


def solve(problem):
    """Global minimizer of the problem loss, in closed form.

    Accumulates the numerator and denominator spectra term by term,
    applies the zero-bin policy to the denominator, and inverts.  When
    bins are zeroed (every kernel silent at those frequencies) the
    returned image is the minimizer with zero content in those bins; in
    particular a zeroed DC bin yields the zero-mean representative of
    the constant-shift solution family.

    The reported loss is computed from the already-available spectra
    via Parseval, which matches :func:`evaluate_loss` to rounding.
    """
    p, q = problem.shape
    numerator = np.zeros((p, q), dtype=complex)
    denominator = np.zeros((p, q))
    spectra = []
    operand_bound = 0.0
    # The loop below runs in place on two scratch grids: at benchmark
    # sizes the solve is memory-bound, and temporary churn would
    # otherwise dominate the transforms.
    scratch = np.empty((p, q), dtype=complex)
    scratch_real = np.empty((p, q))
    for kernel, guide, weight in problem.terms:
        if weight == 0:
            continue
        otf = psf_to_otf(kernel, (p, q))
        guide_spec = dft2(guide)
        np.conjugate(otf, out=scratch)
        np.multiply(scratch, guide_spec, out=scratch)
        if weight != 1.0:
            np.multiply(scratch, weight, out=scratch)
        np.add(numerator, scratch, out=numerator)
        for part in (otf.real, otf.imag):
            np.multiply(part, part, out=scratch_real)
            if weight != 1.0:
                np.multiply(scratch_real, weight, out=scratch_real)
            np.add(denominator, scratch_real, out=denominator)
        spectra.append((weight, otf, guide_spec))
        operand_bound += weight * float(np.max(np.abs(otf))) * float(np.max(np.abs(guide)))
    mask = singular_bin_mask(denominator)
    if mask.all():
        raise AllBinsSingular("every denominator bin is below the cutoff")
    solution_spec = np.zeros((p, q), dtype=complex)
    np.divide(numerator, denominator, out=solution_spec, where=~mask)
    floor = NOISE_FLOOR_REL * operand_bound / float(np.min(denominator[~mask]))
    image, _ = idft2(solution_spec, noise_floor=floor)
    loss = 0.0
    for weight, otf, guide_spec in spectra:
        np.multiply(otf, solution_spec, out=scratch)
        np.subtract(guide_spec, scratch, out=scratch)
        loss += weight * float(np.vdot(scratch, scratch).real)
    loss /= p * q
    return QuadSolution(image=image, zeroed_bins=int(mask.sum()), loss_value=loss)


def gradient(problem, n):
    """Analytic gradient of the loss at ``n``.

    The adjoint of each convolution operator is the pointwise
    multiplication by the conjugate transfer grid, so the gradient is
    idft2( 2 * sum_i w_i conj(OTF_i) (OTF_i dft2(n) - dft2(guide_i)) ).
    """
    n = as_image(n)
    if n.shape != problem.shape:
        raise ShapeMismatch(f"image shape {n.shape} != problem shape {problem.shape}")
    n_spec = dft2(n)
    acc = np.zeros(problem.shape, dtype=complex)
    operand_bound = 0.0
    for kernel, guide, weight in problem.terms:
        if weight == 0:
            continue
        otf = psf_to_otf(kernel, problem.shape)
        acc += 2.0 * weight * np.conj(otf) * (otf * n_spec - dft2(guide))
        otf_max = float(np.max(np.abs(otf)))
        operand_bound += (
            2.0 * weight * otf_max
            * (otf_max * float(np.max(np.abs(n))) + float(np.max(np.abs(guide))))
        )
    # The gradient vanishes at optima, so the ratio test alone would
    # trip on rounding dust; the floor scales with the cancelled terms.
    grad, _ = idft2(acc, noise_floor=NOISE_FLOOR_REL * operand_bound)
    return grad


def gradient_check(problem, n, h=1e-5, num_pixels=10, seed=0):
    """Max discrepancy between analytic and central-difference gradients.

    Samples ``num_pixels`` pixels (seeded, reproducible) and compares
    the analytic gradient against the symmetric finite difference of
    :func:`evaluate_loss` with step ``h``.
    """
    if h <= 0:
        raise ValueError("finite-difference step h must be > 0")
    n = as_image(n).copy()
    analytic = gradient(problem, n)
    rng = np.random.default_rng(seed)
    p, q = n.shape
    total = p * q
    count = min(num_pixels, total)
    picks = rng.choice(total, size=count, replace=False)
    worst = 0.0
    for flat in picks:
        i, j = divmod(int(flat), q)
        orig = n[i, j]
        n[i, j] = orig + h
        loss_hi = evaluate_loss(problem, n)
        n[i, j] = orig - h
        loss_lo = evaluate_loss(problem, n)
        n[i, j] = orig
        fd = (loss_hi - loss_lo) / (2.0 * h)
        worst = max(worst, abs(analytic[i, j] - fd))
    return worst
