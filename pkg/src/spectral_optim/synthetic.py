"""Synthetic demo inputs and simple quality metrics.

The demo assets are generated, not shipped: a 3x4 grid of the numbers
1..12 (the worked example used across the docs and tests) and a
sharp/blurred near-infrared style pair with a matching RGB guide.
"""

import numpy as np

from .fourier import convolve_circular
from .image_io import RgbImage
from .kernels import as_image


def numbers_grid():
    """The 3x4 demo grid holding 1..12 row by row."""
    return np.arange(1.0, 13.0).reshape(3, 4)


def sharp_scene(shape, seed=0):
    """Piecewise-constant scene with rectangles and a gradient ramp, in [0, 1].

    Strong edges make blur visibly destructive, which is what the
    deblurring demos need.
    """
    p, q = shape
    rng = np.random.default_rng(seed)
    img = np.tile(np.linspace(0.2, 0.5, q), (p, 1))
    for _ in range(max(4, (p * q) // 512)):
        top = rng.integers(0, max(1, p - 2))
        left = rng.integers(0, max(1, q - 2))
        height = int(rng.integers(2, max(3, p // 3)))
        width = int(rng.integers(2, max(3, q // 3)))
        level = rng.uniform(0.0, 1.0)
        img[top : top + height, left : left + width] = level
    return np.clip(img, 0.0, 1.0)


def blur_and_noise(sharp, kernel, noise_sigma=0.01, seed=1):
    """Circularly blur a scene and add Gaussian pixel noise."""
    sharp = as_image(sharp)
    rng = np.random.default_rng(seed)
    blurred = convolve_circular(sharp, kernel)
    if noise_sigma > 0:
        blurred = blurred + rng.normal(0.0, noise_sigma, size=sharp.shape)
    return blurred


def rgb_from_gray(gray):
    """RGB guide whose luminance equals the given gray image."""
    gray = as_image(gray)
    return RgbImage(gray.copy(), gray.copy(), gray.copy())


def psnr(img, reference, peak=1.0):
    """Peak signal-to-noise ratio in dB; inf for identical inputs."""
    img = as_image(img)
    reference = as_image(reference)
    mse = float(np.mean((img - reference) ** 2))
    if mse == 0:
        return float("inf")
    return 10.0 * np.log10(peak**2 / mse)
