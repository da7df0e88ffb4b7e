"""Command-line surface: convolution/deconvolution demos, guided
deblurring, a sparsity demo for the splitting driver, and a benchmark.

Kernel specs accepted by the image commands:

    gaussian:<size>:<sigma>   normalized Gaussian blur
    gradx                     horizontal gradient [-1 1]
    grady                     vertical gradient [-1 1]^T
    file:<path>               whitespace-separated text grid

Every subcommand is deterministic for fixed inputs and flags
(benchmark timings aside).  Errors exit nonzero with a one-line
message on stderr.
"""

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .errors import ShapeMismatch, SpectralOptimError
from .fourier import convolve_circular, deconvolve, singular_bin_mask
from .hqs import HqsProblem, l1_penalty, run, soft_threshold_prox
from .image_io import RgbImage, load_info, luminance, save
from .kernels import (
    as_kernel,
    gaussian,
    grad_x,
    grad_y,
    identity_kernel,
    psf_to_otf,
)
from .oracle import matmul_conv, valid_region
from .quadratic import QuadProblem, gradient_check, solve
from .synthetic import blur_and_noise, numbers_grid, rgb_from_gray, sharp_scene

VERIFY_PIXEL_CAP = 4096


def parse_kernel_spec(spec):
    """Turn a kernel-spec string into a kernel array."""
    if spec == "gradx":
        return grad_x()
    if spec == "grady":
        return grad_y()
    if spec.startswith("gaussian:"):
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"bad gaussian spec {spec!r}, want gaussian:<size>:<sigma>")
        return gaussian(int(parts[1]), float(parts[2]))
    if spec.startswith("file:"):
        return as_kernel(np.loadtxt(spec[5:], ndmin=2))
    raise ValueError(f"unrecognized kernel spec {spec!r}")


def _load_gray(path):
    img, info = load_info(path)
    if isinstance(img, RgbImage):
        img = luminance(img)
    return img, info


def cmd_convolve(args):
    img, info = _load_gray(args.input)
    kernel = parse_kernel_spec(args.kernel)
    circular = convolve_circular(img, kernel)
    if args.verify:
        if img.size <= VERIFY_PIXEL_CAP:
            reference = matmul_conv(kernel, img)
            print(f"oracle max discrepancy: {np.max(np.abs(circular - reference)):.3e}")
        else:
            print(f"verify skipped: image has {img.size} pixels (cap {VERIFY_PIXEL_CAP})")
    if args.mode == "valid":
        result = valid_region(circular, kernel.shape)
        print(
            "note: the circular output carries wraparound in its trailing "
            "kernel-sized rows/columns; the valid block (kept here) is "
            "identical in both modes"
        )
    else:
        result = circular
    save(args.output, result, bits=info.bits)
    print(f"wrote {args.output} ({result.shape[0]}x{result.shape[1]})")
    return 0


def cmd_deconvolve(args):
    img, info = _load_gray(args.input)
    kernel = parse_kernel_spec(args.kernel)
    otf = psf_to_otf(kernel, img.shape)
    mask = singular_bin_mask(np.abs(otf), args.eps)
    zeroed = int(mask.sum())
    result = deconvolve(img, kernel, args.eps)
    if mask[0, 0]:
        print("warning: DC bin zeroed; output is the zero-mean representative")
    print(f"zeroed bins: {zeroed}")
    save(args.output, result, bits=info.bits)
    print(f"wrote {args.output}")
    return 0


def cmd_deblur_guided(args):
    observed, info = _load_gray(args.nir_blurry)
    guide, _ = load_info(args.rgb_guide)
    y = luminance(guide) if isinstance(guide, RgbImage) else guide
    if y.shape != observed.shape:
        raise ShapeMismatch(
            f"guide shape {y.shape} != blurry input shape {observed.shape}"
        )
    blur = parse_kernel_spec(args.blur)
    gx, gy = grad_x(), grad_y()
    terms = [
        (blur, observed, args.lam),
        (gx, convolve_circular(y, gx), 1.0),
        (gy, convolve_circular(y, gy), 1.0),
    ]
    problem = QuadProblem(terms=terms, shape=observed.shape)
    solution = solve(problem)
    residual = gradient_check(problem, solution.image)
    print(f"final loss: {solution.loss_value:.6e}")
    print(f"gradient-check residual: {residual:.3e}")
    print(f"zeroed bins: {solution.zeroed_bins}")
    save(args.output, solution.image, bits=info.bits)
    print(f"wrote {args.output}")
    return 0


def cmd_hqs_demo(args):
    img, info = _load_gray(args.input)
    problem = HqsProblem(
        f1_terms=[(identity_kernel(), img, args.lambda1)],
        prox_f2=soft_threshold_prox(args.mu),
        beta0=args.beta0,
        schedule=lambda b: args.growth * b,
        max_iters=args.iters,
        tol=args.tol,
        f2_value=l1_penalty(args.mu),
    )
    trace = run(problem, z_init=img)
    trace_path = args.trace or (str(args.output) + ".trace.csv")
    with open(trace_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "beta", "gap", "L3"])
        for idx, rec in enumerate(trace.iterations):
            writer.writerow([idx, f"{rec.beta:.6e}", f"{rec.gap:.6e}", f"{rec.l3:.6e}"])
    save(args.output, trace.n, bits=info.bits)
    status = "converged" if trace.converged else "max iterations reached"
    print(f"{status} after {len(trace.iterations)} iterations")
    print(f"final gap: {trace.iterations[-1].gap:.3e}")
    print(f"wrote {args.output} and {trace_path}")
    return 0


def cmd_bench(args):
    sizes = [int(s) for s in args.sizes.split(",") if s]
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in bench_mod.ALL_METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {bench_mod.ALL_METHODS}")
    records, skipped = bench_mod.run_bench(sizes, methods, repeats=args.repeats)
    for p, q, method, reason in skipped:
        print(f"warning: {method} at {p}x{q} skipped ({reason})", file=sys.stderr)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            bench_mod.write_csv(fh, records, skipped)
        print(f"wrote {args.out}")
    else:
        bench_mod.write_csv(sys.stdout, records, skipped)
    return 0


def cmd_demo_data(args):
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    save(outdir / "numbers_grid.pgm", numbers_grid() / 255.0, bits=8)
    sharp = sharp_scene((args.size, args.size), seed=7)
    blur = gaussian(9, 2.0)
    blurry = np.clip(blur_and_noise(sharp, blur, noise_sigma=0.01, seed=8), 0.0, 1.0)
    save(outdir / "nir_sharp.pgm", sharp, bits=16)
    save(outdir / "nir_blurry.pgm", blurry, bits=16)
    save(outdir / "guide_rgb.ppm", rgb_from_gray(sharp), bits=8)
    for name in ("numbers_grid.pgm", "nir_sharp.pgm", "nir_blurry.pgm", "guide_rgb.ppm"):
        print(f"wrote {outdir / name}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spectral-optim",
        description="Fourier-domain image convolution, deconvolution and optimization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convolve", help="circular or valid convolution of an image")
    p.add_argument("input")
    p.add_argument("kernel", help="kernel spec (gaussian:<s>:<sigma>, gradx, grady, file:<path>)")
    p.add_argument("output")
    p.add_argument("--mode", choices=["circular", "valid"], default="circular")
    p.add_argument("--verify", action="store_true",
                   help="cross-check against the dense matrix oracle (small images)")
    p.set_defaults(fn=cmd_convolve)

    p = sub.add_parser("deconvolve", help="invert a circular convolution")
    p.add_argument("input")
    p.add_argument("kernel")
    p.add_argument("output")
    p.add_argument("--eps", type=float, default=None,
                   help="singular-bin cutoff on |OTF| (default 1e-12 * max)")
    p.set_defaults(fn=cmd_deconvolve)

    p = sub.add_parser("deblur-guided", help="guided deblurring via the closed-form solver")
    p.add_argument("nir_blurry")
    p.add_argument("rgb_guide")
    p.add_argument("output")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="data-term weight (default 1)")
    p.add_argument("--blur", default="gaussian:9:2.0",
                   help="assumed blur kernel spec (default gaussian:9:2.0)")
    p.set_defaults(fn=cmd_deblur_guided)

    p = sub.add_parser("hqs-demo", help="sparsity demo of the splitting driver")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--lambda1", type=float, default=1.0, help="data-term weight")
    p.add_argument("--mu", type=float, default=0.1, help="L1 penalty weight")
    p.add_argument("--beta0", type=float, default=1e-2, help="initial coupling penalty")
    p.add_argument("--growth", type=float, default=2.0, help="penalty growth factor")
    p.add_argument("--iters", type=int, default=40, help="max iterations")
    p.add_argument("--tol", type=float, default=1e-4, help="relative gap tolerance")
    p.add_argument("--trace", default=None, help="trace CSV path (default <output>.trace.csv)")
    p.set_defaults(fn=cmd_hqs_demo)

    p = sub.add_parser("bench", help="time the solver against baselines")
    p.add_argument("--sizes", default="256,512,1024", help="comma-separated square sizes")
    p.add_argument("--methods", default=",".join(bench_mod.ALL_METHODS))
    p.add_argument("--repeats", type=int, default=5, help="best-of-k timing")
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("demo-data", help="write the bundled demo inputs to a directory")
    p.add_argument("outdir")
    p.add_argument("--size", type=int, default=128, help="synthetic pair side length")
    p.set_defaults(fn=cmd_demo_data)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (SpectralOptimError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
