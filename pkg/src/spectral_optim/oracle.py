"""Dense, slow, obviously-correct reference implementations.

Everything here materializes n-by-n matrices (n = p*q pixels) and is
meant only for tests and small-instance verification of the fast
Fourier path; the dense work is O(n^3) and instances are kept tiny
(n <= 64 in the test suite).

Two matrix families appear:

* ``circ(a)``: the plain circulant of a length-n vector, row i being
  ``a`` circularly right-shifted by i.  This is the object of the
  classic circulant theorems (transpose, product, sum, DFT
  diagonalization) and is exercised by the theorem property tests.

* ``conv_matrix(k, shape)``: the n-by-n matrix of the circular
  convolution operator applied to row-major vectorized images.  It is
  block-circulant with circulant blocks and is diagonalized exactly by
  the 2D DFT (the Kronecker product of the two 1D DFT matrices), with
  the transfer grid of the kernel on the diagonal.  This is the dense
  twin of the fast spectral path and backs the normal-equation checks
  of the closed-form solver.
"""

import numpy as np
import scipy.linalg

from .errors import EmptyValidRegion, ShapeMismatch, SingularMatrix
from .kernels import as_image, as_kernel, as_shape, check_fits, flip

# Condition-number ceiling beyond which dense solves are refused.
COND_LIMIT = 1e12

# Relative infinity-norm residual guaranteed by dense_solve.
RESIDUAL_LIMIT = 1e-8


def circ(a):
    """Circulant matrix generated by ``a``: row i is ``a`` shifted right by i.

    Entry (i, j) is a[(j - i) mod n].
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or a.size < 1:
        raise ShapeMismatch("circ expects a 1D vector of length >= 1")
    n = a.size
    j = np.arange(n)
    return a[(j[None, :] - j[:, None]) % n]


def dft_matrix(n):
    """Unnormalized n-by-n DFT matrix, entry (j, k) = exp(-2*pi*i*j*k/n)."""
    return scipy.linalg.dft(n)


def diagonalize_circulant(c):
    """Similarity-transform a circulant by the DFT pair and split the result.

    Returns ``(diag, max_offdiag)`` where ``diag`` is the diagonal of
    F^-1 C F and ``max_offdiag`` the largest off-diagonal magnitude.
    With the right-shift row convention used by :func:`circ`, this side
    of the similarity carries DFT(a) on the diagonal (the other side
    carries its conjugate).
    """
    c = np.asarray(c, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ShapeMismatch("expected a square matrix")
    n = c.shape[0]
    f = dft_matrix(n)
    f_inv = np.conj(f) / n
    d = f_inv @ c @ f
    off = d - np.diag(np.diag(d))
    return np.diag(d).copy(), float(np.max(np.abs(off))) if n > 1 else 0.0


def vectorize(img):
    """Flatten an image to a column vector in row-wise order."""
    return as_image(img).ravel().copy()


def unvectorize(v, shape):
    """Inverse of :func:`vectorize`; raises ShapeMismatch on length mismatch."""
    v = np.asarray(v, dtype=float)
    p, q = as_shape(shape)
    if v.ndim != 1 or v.size != p * q:
        raise ShapeMismatch(f"vector of length {v.size} does not reshape to {(p, q)}")
    return v.reshape(p, q).copy()


def conv_matrix(k, shape):
    """Dense matrix of circular convolution with ``k`` on vectorized images.

    Row t = i*q+j, column t' = i'*q+j' holds E[(i'-i) mod p, (j'-j) mod q]
    where E is the flipped kernel embedded at the top-left of a p-by-q
    zero grid.  Multiplying a vectorized image by this matrix equals the
    fast spectral path exactly, wraparound entries included, and the
    first row of the matrix is the embedded vector itself.
    """
    k = as_kernel(k)
    p, q = as_shape(shape)
    check_fits(k, (p, q))
    e = np.zeros((p, q))
    kf = flip(k)
    e[: kf.shape[0], : kf.shape[1]] = kf
    i = np.arange(p)
    j = np.arange(q)
    di = (i[None, :] - i[:, None]) % p  # (row block, col block)
    dj = (j[None, :] - j[:, None]) % q
    m4 = e[di[:, None, :, None], dj[None, :, None, :]]
    return m4.reshape(p * q, p * q)


def matmul_conv(k, img):
    """Circular convolution computed by dense matrix multiplication.

    Builds the full n-by-n operator and multiplies the vectorized
    image; the p-by-q result is the nonvalid (circular) convolution,
    whose top-left (p-m+1)-by-(q-n+1) block is the valid convolution.
    """
    img = as_image(img)
    mat = conv_matrix(k, img.shape)
    return unvectorize(mat @ vectorize(img), img.shape)


def valid_region(r_nv, kernel_shape):
    """Top-left p'-by-q' block of a circular convolution output.

    p' = p - (m - 1) and q' = q - (n - 1); raises EmptyValidRegion when
    either is non-positive.
    """
    r_nv = as_image(r_nv)
    m, n = kernel_shape
    p, q = r_nv.shape
    p_out = p - (int(m) - 1)
    q_out = q - (int(n) - 1)
    if p_out <= 0 or q_out <= 0:
        raise EmptyValidRegion(
            f"kernel {m}x{n} leaves no valid region in a {p}x{q} output"
        )
    return r_nv[:p_out, :q_out].copy()


def valid_convolve_naive(img, k):
    """Sliding-window valid convolution by explicit loops (test oracle)."""
    img = as_image(img)
    k = as_kernel(k)
    check_fits(k, img.shape)
    kf = flip(k)
    m, n = k.shape
    p, q = img.shape
    out = np.zeros((p - m + 1, q - n + 1))
    for i in range(out.shape[0]):
        for j in range(out.shape[1]):
            acc = 0.0
            for u in range(m):
                for v in range(n):
                    acc += kf[u, v] * img[i + u, j + v]
            out[i, j] = acc
    return out


def dense_solve(mat, rhs):
    """Solve ``mat @ x = rhs`` by LU factorization with partial pivoting.

    Refuses matrices whose condition estimate exceeds COND_LIMIT.  One
    step of iterative refinement keeps the infinity-norm residual below
    RESIDUAL_LIMIT * ||rhs||_inf; a SingularMatrix error is raised if
    even that fails.
    """
    mat = np.asarray(mat, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ShapeMismatch("dense_solve expects a square matrix")
    if rhs.ndim != 1 or rhs.size != mat.shape[0]:
        raise ShapeMismatch("right-hand side length does not match the matrix")
    cond = np.linalg.cond(mat)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularMatrix(f"condition estimate {cond:.3e} exceeds {COND_LIMIT:.0e}")
    x = np.linalg.solve(mat, rhs)
    x = x + np.linalg.solve(mat, rhs - mat @ x)
    scale = np.max(np.abs(rhs))
    residual = np.max(np.abs(mat @ x - rhs))
    if residual > RESIDUAL_LIMIT * scale and scale > 0:
        raise SingularMatrix(
            f"residual {residual:.3e} exceeds {RESIDUAL_LIMIT:.0e} * ||rhs||"
        )
    return x


def dense_quad_solve(terms, shape):
    """Minimize a multi-term quadratic convolution loss by normal equations.

    ``terms`` is an iterable of (kernel, guide, weight) triples.  Builds
    C = sum_i w_i K_i^T K_i and the matching right-hand side densely,
    then calls :func:`dense_solve`.  This is the reference the fast
    closed-form solver is checked against on tiny instances.
    """
    p, q = as_shape(shape)
    n = p * q
    c = np.zeros((n, n))
    rhs = np.zeros(n)
    count = 0
    for kernel, guide, weight in terms:
        weight = float(weight)
        if weight == 0.0:
            continue
        guide = as_image(guide)
        if guide.shape != (p, q):
            raise ShapeMismatch(f"guide shape {guide.shape} != problem shape {(p, q)}")
        mat = conv_matrix(kernel, (p, q))
        c += weight * (mat.T @ mat)
        rhs += weight * (mat.T @ vectorize(guide))
        count += 1
    if count == 0:
        raise ValueError("need at least one term with positive weight")
    return unvectorize(dense_solve(c, rhs), (p, q))
