"""Fourier-domain image convolution, deconvolution and quadratic
optimization, with a half-quadratic splitting driver for the rest.

The fast path works entirely on p-by-q grids: kernels become complex
transfer grids (OTFs), circular convolution becomes a pointwise
product, and multi-term quadratic losses are minimized in closed form
by one pointwise division.  A dense matrix oracle mirrors every fast
operation on tiny instances for verification.
"""

from .errors import (
    AllBinsSingular,
    CorruptFile,
    EmptyValidRegion,
    ImaginaryResidualTooLarge,
    KernelTooLarge,
    NonIncreasingBeta,
    ProxFailure,
    ShapeMismatch,
    SingularMatrix,
    SpectralOptimError,
    UnsupportedFormat,
)
from .fourier import convolve_circular, deconvolve, dft2, idft2
from .hqs import (
    HqsIteration,
    HqsProblem,
    HqsTrace,
    identity_prox,
    l1_penalty,
    n_step,
    run,
    soft_threshold_prox,
)
from .kernels import (
    embed,
    flip,
    gaussian,
    grad_x,
    grad_y,
    identity_kernel,
    psf_to_otf,
)
from .quadratic import (
    LossTerm,
    QuadProblem,
    QuadSolution,
    evaluate_loss,
    gradient,
    gradient_check,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "AllBinsSingular",
    "CorruptFile",
    "EmptyValidRegion",
    "HqsIteration",
    "HqsProblem",
    "HqsTrace",
    "ImaginaryResidualTooLarge",
    "KernelTooLarge",
    "LossTerm",
    "NonIncreasingBeta",
    "ProxFailure",
    "QuadProblem",
    "QuadSolution",
    "ShapeMismatch",
    "SingularMatrix",
    "SpectralOptimError",
    "UnsupportedFormat",
    "convolve_circular",
    "deconvolve",
    "dft2",
    "embed",
    "evaluate_loss",
    "flip",
    "gaussian",
    "grad_x",
    "grad_y",
    "gradient",
    "gradient_check",
    "idft2",
    "identity_kernel",
    "identity_prox",
    "l1_penalty",
    "n_step",
    "psf_to_otf",
    "run",
    "soft_threshold_prox",
    "solve",
]
