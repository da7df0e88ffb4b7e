"""Shared FFT backend.

All transforms in the package go through these wrappers so the worker
cap (env var ``SPECTRAL_OPTIM_THREADS``) is honored in one place.  The
backend is pocketfft via scipy, which is O(n log n) for every size,
including primes, so transform shapes are unrestricted.
"""

import os

import scipy.fft


def workers():
    """Worker count for the FFT backend, or None for the default (1).

    Reads ``SPECTRAL_OPTIM_THREADS`` once per call; malformed or
    non-positive values fall back to the default.
    """
    raw = os.environ.get("SPECTRAL_OPTIM_THREADS")
    if not raw:
        return None
    try:
        count = int(raw)
    except ValueError:
        return None
    return count if count > 0 else None


def fft2(a):
    return scipy.fft.fft2(a, workers=workers())


def ifft2(a):
    return scipy.fft.ifft2(a, workers=workers())
