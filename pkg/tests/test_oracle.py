import numpy as np
import pytest

from spectral_optim import oracle
from spectral_optim.errors import EmptyValidRegion, ShapeMismatch, SingularMatrix
from spectral_optim.fourier import convolve_circular
from spectral_optim.kernels import grad_x

from conftest import random_fitting_kernel


def test_circ_three_vector():
    c = oracle.circ([1.0, 2.0, 3.0])
    assert np.array_equal(c, [[1, 2, 3], [3, 1, 2], [2, 3, 1]])


def test_circ_single_entry():
    assert np.array_equal(oracle.circ([5.0]), [[5.0]])


def test_circ_banded_gradient_structure():
    # circ of [1, -1, 0, ..., 0] (length 12): ones on the diagonal, -1
    # on the superdiagonal, -1 in the bottom-left corner, zero elsewhere.
    a = np.zeros(12)
    a[0], a[1] = 1.0, -1.0
    c = oracle.circ(a)
    expected = np.eye(12) - np.eye(12, k=1)
    expected[11, 0] = -1.0
    assert np.array_equal(c, expected)


def test_circ_rows_are_right_shifts(rng):
    a = rng.normal(size=9)
    c = oracle.circ(a)
    for i in range(1, 9):
        assert np.array_equal(c[i], np.roll(c[i - 1], 1))


def test_vectorize_row_major():
    img = np.arange(12.0).reshape(3, 4)
    assert np.array_equal(oracle.vectorize(img), np.arange(12.0))


def test_vectorize_single_pixel():
    assert np.array_equal(oracle.vectorize([[3.5]]), [3.5])


def test_vectorize_roundtrip(rng):
    img = rng.normal(size=(4, 5))
    back = oracle.unvectorize(oracle.vectorize(img), (4, 5))
    assert np.array_equal(back, img)


def test_unvectorize_length_mismatch():
    with pytest.raises(ShapeMismatch):
        oracle.unvectorize(np.zeros(11), (3, 4))


def test_matmul_conv_identity_kernel(rng):
    img = rng.normal(size=(4, 6))
    assert np.allclose(oracle.matmul_conv([[1.0]], img), img, atol=1e-12)


def test_matmul_conv_worked_grid():
    # gradient kernel on the 1..12 grid: the valid 3x3 block is all -1
    # (each entry minus its right neighbor); wraparound entries combine
    # the row ends with the row starts.
    img = np.arange(1.0, 13.0).reshape(3, 4)
    out = oracle.matmul_conv(grad_x(), img)
    assert np.allclose(out[:, :3], -1.0, atol=1e-12)
    assert np.allclose(out[:, 3], 3.0, atol=1e-12)


def test_matmul_conv_matches_spectral(rng):
    img = rng.normal(size=(5, 5))
    k = np.array([[-1.0, -2.0], [-3.0, -4.0]])
    dense = oracle.matmul_conv(k, img)
    fast = convolve_circular(img, k)
    assert np.max(np.abs(dense - fast)) < 1e-10


def test_conv_matrix_first_row_is_embedded_kernel():
    from spectral_optim.kernels import embed, flip

    k = np.array([[2.0, -1.0], [0.5, 3.0]])
    mat = oracle.conv_matrix(k, (4, 5))
    assert np.allclose(mat[0], embed(flip(k), (4, 5)))


def test_valid_region_worked_example():
    img = np.arange(1.0, 13.0).reshape(3, 4)
    r_nv = oracle.matmul_conv(grad_x(), img)
    valid = oracle.valid_region(r_nv, (1, 2))
    assert valid.shape == (3, 3)
    assert np.allclose(valid, -1.0)


def test_valid_region_identity_kernel_keeps_everything(rng):
    img = rng.normal(size=(4, 4))
    assert np.array_equal(oracle.valid_region(img, (1, 1)), img)


def test_valid_region_empty():
    with pytest.raises(EmptyValidRegion):
        oracle.valid_region(np.zeros((3, 4)), (4, 2))


def test_valid_region_matches_naive_convolution(rng):
    img = rng.normal(size=(6, 6))
    k = rng.normal(size=(3, 3))
    block = oracle.valid_region(oracle.matmul_conv(k, img), k.shape)
    naive = oracle.valid_convolve_naive(img, k)
    assert np.max(np.abs(block - naive)) < 1e-12


def test_dense_solve_identity():
    c = oracle.circ([1.0, 0.0, 0.0])
    assert np.allclose(oracle.dense_solve(c, [1.0, 2.0, 3.0]), [1, 2, 3])


def test_dense_solve_scaled_identity():
    c = oracle.circ([2.0, 0.0, 0.0, 0.0])
    assert np.allclose(oracle.dense_solve(c, [4.0, 8.0, 2.0, 6.0]), [2, 4, 1, 3])


def test_dense_solve_residual(rng):
    # well-conditioned circulant: dominant diagonal
    a = rng.normal(size=12) * 0.1
    a[0] = 4.0
    c = oracle.circ(a)
    rhs = rng.normal(size=12)
    x = oracle.dense_solve(c, rhs)
    assert np.max(np.abs(c @ x - rhs)) <= 1e-8 * np.max(np.abs(rhs))


def test_dense_solve_rejects_singular():
    with pytest.raises(SingularMatrix):
        oracle.dense_solve(oracle.circ([1.0, 1.0]), [1.0, 2.0])


def test_dense_solve_shape_errors():
    with pytest.raises(ShapeMismatch):
        oracle.dense_solve(np.zeros((2, 3)), [1.0, 2.0])
    with pytest.raises(ShapeMismatch):
        oracle.dense_solve(np.eye(3), [1.0, 2.0])


def test_transpose_of_circulant_is_circulant(rng):
    # mirrored bottom row generates the transpose
    for _ in range(10):
        n = int(rng.integers(1, 17))
        a = rng.normal(size=n)
        c = oracle.circ(a)
        mirrored = c[-1][::-1]
        assert np.array_equal(c.T, oracle.circ(mirrored))


def test_product_of_circulants_is_circulant(rng):
    for _ in range(10):
        n = int(rng.integers(1, 17))
        prod = oracle.circ(rng.normal(size=n)) @ oracle.circ(rng.normal(size=n))
        for i in range(1, n):
            assert np.allclose(prod[i], np.roll(prod[i - 1], 1), atol=1e-10)


def test_circ_is_linear(rng):
    a, b = rng.normal(size=8), rng.normal(size=8)
    assert np.array_equal(oracle.circ(a) + oracle.circ(b), oracle.circ(a + b))
    assert np.array_equal(oracle.circ(2.5 * a), 2.5 * oracle.circ(a))


def test_dft_diagonalizes_circulant(rng):
    for _ in range(10):
        n = int(rng.integers(2, 17))
        a = rng.normal(size=n)
        diag, off = oracle.diagonalize_circulant(oracle.circ(a))
        assert off < 1e-9
        assert np.allclose(diag, np.fft.fft(a), atol=1e-9)


def test_dense_quad_solve_single_identity_term(rng):
    guide = rng.normal(size=(3, 4))
    out = oracle.dense_quad_solve([([[1.0]], guide, 2.0)], (3, 4))
    assert np.allclose(out, guide, atol=1e-10)
