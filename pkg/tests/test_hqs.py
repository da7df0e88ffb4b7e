import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from spectral_optim import hqs, quadratic
from spectral_optim.errors import NonIncreasingBeta, ProxFailure
from spectral_optim.kernels import gaussian, grad_x, identity_kernel
from spectral_optim.oracle import dense_quad_solve


def test_n_step_with_zero_weight_terms_returns_z(rng):
    z = rng.random((4, 4))
    f1 = [(identity_kernel(), rng.random((4, 4)), 0.0)]
    out = hqs.n_step(f1, z, beta=0.7)
    assert np.max(np.abs(out - z)) < 1e-12


def test_n_step_identity_term_closed_form(rng):
    guide = rng.random((5, 5))
    z = rng.random((5, 5))
    w, beta = 1.4, 0.6
    out = hqs.n_step([(identity_kernel(), guide, w)], z, beta)
    expected = (w * guide + beta * z) / (w + beta)
    assert np.allclose(out, expected, atol=1e-12)


def test_n_step_matches_dense_augmented_solve(rng):
    shape = (5, 5)
    f1 = [
        (gaussian(3, 1.0), rng.random(shape), 0.9),
        (grad_x(), rng.random(shape), 0.5),
    ]
    z = rng.random(shape)
    beta = 0.5
    out = hqs.n_step(f1, z, beta)
    dense = dense_quad_solve(f1 + [(identity_kernel(), z, beta)], shape)
    assert np.max(np.abs(out - dense)) < 1e-8


def test_n_step_output_is_stationary(rng):
    shape = (4, 6)
    f1 = [(gaussian(3, 0.9), rng.random(shape), 1.0)]
    z = rng.random(shape)
    beta = 0.3
    out = hqs.n_step(f1, z, beta)
    augmented = quadratic.QuadProblem(
        terms=f1 + [(identity_kernel(), z, beta)], shape=shape
    )
    assert quadratic.gradient_check(augmented, out) <= 1e-5


def test_n_step_rejects_nonpositive_beta(rng):
    with pytest.raises(ValueError):
        hqs.n_step([], rng.random((3, 3)), beta=0.0)


def test_run_quadratic_f2_matches_merged_solution(rng):
    # soft data term against a stiff quadratic f2: the merged problem
    # is solvable in closed form and the splitting must land on it
    shape = (8, 9)
    f1 = [(gaussian(3, 1.0), rng.random(shape), 0.01)]
    g2 = rng.random(shape)
    w2 = 1.0
    merged = quadratic.solve(
        quadratic.QuadProblem(terms=f1 + [(identity_kernel(), g2, w2)], shape=shape)
    )
    # the test only bites if the merged answer differs from g2 alone
    assert np.max(np.abs(merged.image - g2)) > 1e-3

    problem = hqs.HqsProblem(
        f1_terms=f1,
        prox_f2=lambda v, beta: (w2 * g2 + beta * v) / (w2 + beta),
        beta0=1e-2,
        max_iters=15,
        tol=1e-15,
        f2_value=lambda z: w2 * float(np.sum((g2 - z) ** 2)),
    )
    trace = hqs.run(problem, z_init=g2)
    assert len(trace.iterations) <= 15
    assert np.max(np.abs(trace.n - merged.image)) < 1e-4
    betas = [r.beta for r in trace.iterations]
    assert all(b2 > b1 for b1, b2 in zip(betas, betas[1:]))
    rel_gap = trace.iterations[-1].gap / np.linalg.norm(trace.n)
    assert rel_gap <= 1e-4


def test_run_identity_prox_returns_f1_minimizer(rng):
    # f2 == 0: with a tiny starting penalty the first step is already
    # the f1 minimizer and the gap closes immediately
    shape = (5, 5)
    f1 = [
        (gaussian(3, 1.0), rng.random(shape), 1.0),
        (identity_kernel(), rng.random(shape), 0.2),
    ]
    reference = quadratic.solve(quadratic.QuadProblem(terms=f1, shape=shape)).image
    problem = hqs.HqsProblem(
        f1_terms=f1, prox_f2=hqs.identity_prox, beta0=1e-9, max_iters=5, tol=1e-10,
        f2_value=lambda z: 0.0,
    )
    trace = hqs.run(problem, z_init=rng.random(shape))
    assert trace.converged
    assert np.max(np.abs(trace.n - reference)) < 1e-6


def test_run_l1_prox_matches_pixelwise_oracle(rng):
    # f1 = lam*||input - N||^2, f2 = mu*||Z||_1 decouples per pixel;
    # the oracle minimizes each scalar objective numerically
    shape = (4, 4)
    data = rng.normal(size=shape)
    lam, mu = 1.0, 0.4
    problem = hqs.HqsProblem(
        f1_terms=[(identity_kernel(), data, lam)],
        prox_f2=hqs.soft_threshold_prox(mu),
        beta0=1e-2,
        max_iters=40,
        tol=1e-10,
        f2_value=hqs.l1_penalty(mu),
    )
    trace = hqs.run(problem, z_init=data)

    def objective(img):
        return lam * np.sum((data - img) ** 2) + mu * np.sum(np.abs(img))

    oracle_img = np.zeros(shape)
    for i in range(shape[0]):
        for j in range(shape[1]):
            res = minimize_scalar(
                lambda t: lam * (data[i, j] - t) ** 2 + mu * abs(t),
                bounds=(-5.0, 5.0),
                method="bounded",
                options={"xatol": 1e-12},
            )
            oracle_img[i, j] = res.x
    assert objective(trace.z) <= objective(oracle_img) + 1e-3


def test_run_half_steps_do_not_increase_coupled_loss(rng):
    # manual alternation: for fixed beta, the Z update cannot increase
    # L3(N, .)
    shape = (4, 4)
    data = rng.normal(size=shape)
    lam, mu = 1.0, 0.3
    f1 = [(identity_kernel(), data, lam)]
    f2_value = hqs.l1_penalty(mu)
    prox = hqs.soft_threshold_prox(mu)
    z = rng.normal(size=shape)
    beta = 0.05
    for _ in range(8):
        n = hqs.n_step(f1, z, beta)
        l3_before = quadratic.terms_loss(f1, n) + f2_value(z) + beta * np.sum((n - z) ** 2)
        z = prox(n, beta)
        l3_after = quadratic.terms_loss(f1, n) + f2_value(z) + beta * np.sum((n - z) ** 2)
        assert l3_after <= l3_before + 1e-12
        beta *= 2.0


def test_run_gap_is_finite_every_iteration(rng):
    shape = (4, 4)
    problem = hqs.HqsProblem(
        f1_terms=[(identity_kernel(), rng.random(shape), 1.0)],
        prox_f2=hqs.soft_threshold_prox(0.2),
        beta0=1e-2,
        max_iters=20,
        tol=1e-12,
        f2_value=hqs.l1_penalty(0.2),
    )
    trace = hqs.run(problem, z_init=np.zeros(shape))
    assert all(np.isfinite(rec.gap) for rec in trace.iterations)
    assert all(np.isfinite(rec.l3) for rec in trace.iterations)


def test_run_rejects_non_increasing_schedule(rng):
    problem = hqs.HqsProblem(
        f1_terms=[(identity_kernel(), rng.random((3, 3)), 1.0)],
        prox_f2=hqs.identity_prox,
        beta0=1.0,
        schedule=lambda b: b,
        max_iters=5,
        tol=1e-30,
    )
    with pytest.raises(NonIncreasingBeta):
        hqs.run(problem, z_init=np.ones((3, 3)) * 5)


def test_run_rejects_bad_prox(rng):
    problem = hqs.HqsProblem(
        f1_terms=[(identity_kernel(), rng.random((3, 3)), 1.0)],
        prox_f2=lambda v, beta: v * np.nan,
        beta0=1.0,
        max_iters=5,
        tol=1e-8,
    )
    with pytest.raises(ProxFailure):
        hqs.run(problem, z_init=np.zeros((3, 3)))


def test_problem_validation():
    with pytest.raises(ValueError):
        hqs.HqsProblem(f1_terms=[], prox_f2=hqs.identity_prox, beta0=0.0)
    with pytest.raises(ValueError):
        hqs.HqsProblem(f1_terms=[], prox_f2=hqs.identity_prox, max_iters=0)
    with pytest.raises(ValueError):
        hqs.HqsProblem(f1_terms=[], prox_f2=hqs.identity_prox, tol=0.0)


def test_soft_threshold_prox_formula(rng):
    prox = hqs.soft_threshold_prox(0.8)
    v = np.array([[1.0, -0.1], [0.3, -2.0]])
    out = prox(v, beta=2.0)  # cut = 0.2
    assert np.allclose(out, [[0.8, 0.0], [0.1, -1.8]])
