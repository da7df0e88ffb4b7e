"""Benchmark machinery: closed-form solve vs baselines, with CSV output.

Three methods are timed on the guided-deblurring loss built from
synthetic inputs:

* ``fourier-closed-form``: the production solver.
* ``gradient-descent``: fixed-step descent (step 1/L with
  L = 2 * sum_i w_i max|OTF_i|^2) run until its loss matches the
  closed form to 1e-6 relative.  The iteration is carried in the
  frequency domain, which follows the exact same trajectory as
  spatial descent but favors the baseline; the comparison is
  conservative.
* ``dense-oracle``: the n^3 normal-equation solve, offered only for
  p*q <= 64.

Peak memory is estimated with tracemalloc on a separate untimed call
so instrumentation does not pollute the wall time.
"""

import csv
import time
import tracemalloc
from dataclasses import dataclass

import numpy as np

from .fourier import convolve_circular, dft2, idft2
from .kernels import gaussian, grad_x, grad_y, psf_to_otf
from .oracle import dense_quad_solve
from .quadratic import QuadProblem, solve, terms_loss
from .synthetic import blur_and_noise, sharp_scene

METHOD_FOURIER = "fourier-closed-form"
METHOD_DENSE = "dense-oracle"
METHOD_GD = "gradient-descent"
ALL_METHODS = (METHOD_FOURIER, METHOD_GD, METHOD_DENSE)

DENSE_PIXEL_CAP = 64
GD_REL_TOL = 1e-6
GD_MAX_ITERS = 200_000

CSV_HEADER = ("size_p", "size_q", "method", "wall_time_s", "peak_mem_bytes", "loss", "status")


@dataclass
class BenchRecord:
    """One timed run of one method at one size."""

    size_p: int
    size_q: int
    method: str
    wall_time_s: float
    peak_mem_bytes: int
    loss_value: float


def bench_blur_kernel(shape):
    """Demo blur for a given size: 9x9 sigma-2 Gaussian, shrunk to fit."""
    size = min(9, shape[0], shape[1])
    return gaussian(size, 2.0 * size / 9.0)


def make_bench_problem(p, q, seed=0):
    """Guided-deblurring loss on synthetic inputs at the given size."""
    sharp = sharp_scene((p, q), seed=seed)
    blur = bench_blur_kernel((p, q))
    observed = blur_and_noise(sharp, blur, noise_sigma=0.01, seed=seed + 1)
    gx, gy = grad_x(), grad_y()
    terms = [(blur, observed, 1.0)]
    if q >= 2:
        terms.append((gx, convolve_circular(sharp, gx), 1.0))
    if p >= 2:
        terms.append((gy, convolve_circular(sharp, gy), 1.0))
    return QuadProblem(terms=terms, shape=(p, q))


def gradient_descent_solve(problem, target_loss, rel_tol=GD_REL_TOL, max_iters=GD_MAX_ITERS):
    """Fixed-step gradient descent run until its loss matches ``target_loss``.

    Returns ``(image, loss, iterations)``.  Descent starts from zero,
    whose spectrum has no content in singular bins, so the iterates
    stay in the same solution representative as the closed form.
    """
    p, q = problem.shape
    pairs = []
    lipschitz = 0.0
    for kernel, guide, weight in problem.terms:
        if weight == 0:
            continue
        otf = psf_to_otf(kernel, (p, q))
        pairs.append((weight, otf, dft2(guide)))
        lipschitz += 2.0 * weight * float(np.max(otf.real**2 + otf.imag**2))
    step = 1.0 / lipschitz
    n_pix = p * q
    x = np.zeros((p, q), dtype=complex)
    threshold = target_loss * (1.0 + rel_tol)
    loss = _spectral_loss(pairs, x, n_pix)
    iters = 0
    while loss > threshold and iters < max_iters:
        grad = np.zeros((p, q), dtype=complex)
        for weight, otf, guide_spec in pairs:
            grad += 2.0 * weight * np.conj(otf) * (otf * x - guide_spec)
        x -= step * grad
        loss = _spectral_loss(pairs, x, n_pix)
        iters += 1
    image, _ = idft2(x)
    return image, loss, iters


def _spectral_loss(pairs, x, n_pix):
    total = 0.0
    for weight, otf, guide_spec in pairs:
        diff = guide_spec - otf * x
        total += weight * float(np.sum(diff.real**2 + diff.imag**2))
    return total / n_pix


def _timed(fn, repeats):
    best = float("inf")
    result = None
    for _ in range(max(1, repeats)):
        start = time.perf_counter()
        result = fn()
        elapsed = time.perf_counter() - start
        best = min(best, elapsed)
    return result, best


def _peak_memory(fn):
    tracemalloc.start()
    try:
        fn()
        _, peak = tracemalloc.get_traced_memory()
    finally:
        tracemalloc.stop()
    return int(peak)


def run_bench(sizes, methods=ALL_METHODS, repeats=5, seed=0):
    """Benchmark the requested methods at the requested square sizes.

    Returns ``(records, skipped)`` where ``skipped`` is a list of
    (p, q, method, reason) for infeasible pairs (e.g. the dense oracle
    beyond its pixel cap).
    """
    records = []
    skipped = []
    for size in sizes:
        p = q = int(size)
        problem = make_bench_problem(p, q, seed=seed)
        reference = None
        for method in methods:
            if method == METHOD_FOURIER:
                solution, best = _timed(lambda: solve(problem), repeats)
                peak = _peak_memory(lambda: solve(problem))
                reference = solution
                records.append(BenchRecord(p, q, method, best, peak, solution.loss_value))
            elif method == METHOD_DENSE:
                if p * q > DENSE_PIXEL_CAP:
                    skipped.append((p, q, method, f"needs p*q <= {DENSE_PIXEL_CAP}"))
                    continue
                image, best = _timed(lambda: dense_quad_solve(problem.terms, (p, q)), repeats)
                peak = _peak_memory(lambda: dense_quad_solve(problem.terms, (p, q)))
                records.append(
                    BenchRecord(p, q, method, best, peak, terms_loss(problem.terms, image))
                )
            elif method == METHOD_GD:
                if reference is None:
                    reference = solve(problem)
                target = reference.loss_value
                (image, loss, _), best = _timed(
                    lambda: gradient_descent_solve(problem, target), repeats
                )
                peak = _peak_memory(lambda: gradient_descent_solve(problem, target))
                records.append(BenchRecord(p, q, method, best, peak, loss))
            else:
                skipped.append((p, q, method, "unknown method"))
    return records, skipped


def write_csv(fh, records, skipped=()):
    """Emit records (and warning rows for skipped pairs) as CSV."""
    writer = csv.writer(fh)
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(
            [r.size_p, r.size_q, r.method, f"{r.wall_time_s:.6f}", r.peak_mem_bytes,
             f"{r.loss_value:.9e}", "ok"]
        )
    for p, q, method, reason in skipped:
        writer.writerow([p, q, method, "", "", "", f"skipped: {reason}"])
