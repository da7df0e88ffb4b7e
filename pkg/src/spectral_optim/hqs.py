"""Half-quadratic splitting driver for losses with a non-quadratic part.

The target loss f1(N) + f2(Z) with a quadratic f1 and an arbitrary f2
is handled by coupling the two variables,

    L3(N, Z) = f1(N) + f2(Z) + beta * ||N - Z||_F^2,

and alternating an exact closed-form N-step with a caller-supplied
proximal Z-step while growing beta.  As beta grows the coupling forces
N = Z and L3 approaches the original loss.

The coupling term is an ordinary identity-kernel loss term, so the
N-step reuses the closed-form solver without special cases.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import NonIncreasingBeta, ProxFailure
from .kernels import as_image, identity_kernel
from .quadratic import QuadProblem, solve, terms_loss

DEFAULT_BETA0 = 1e-2
DEFAULT_TOL = 1e-4
DEFAULT_MAX_ITERS = 50


def double_beta(beta):
    """Default penalty schedule: geometric growth with factor 2."""
    return 2.0 * beta


def identity_prox(v, beta):
    """Proximal operator of f2 = 0: returns ``v`` unchanged."""
    return v


def soft_threshold_prox(mu):
    """Proximal operator factory for f2(Z) = mu * ||Z||_1.

    argmin_Z mu*||Z||_1 + beta*||v - Z||_F^2 shrinks each entry toward
    zero by mu / (2*beta).
    """
    mu = float(mu)
    if mu < 0:
        raise ValueError("mu must be nonnegative")

    def prox(v, beta):
        cut = mu / (2.0 * beta)
        return np.sign(v) * np.maximum(np.abs(v) - cut, 0.0)

    return prox


def l1_penalty(mu):
    """Value function f2(Z) = mu * ||Z||_1, for trace bookkeeping."""
    mu = float(mu)

    def value(z):
        return mu * float(np.sum(np.abs(z)))

    return value


class HqsIteration(NamedTuple):
    """One iteration record: penalty, coupling gap, coupled-loss value."""

    beta: float
    gap: float
    l3: float


@dataclass
class HqsProblem:
    """Splitting problem: quadratic terms, a prox for the rest, a schedule.

    ``prox_f2(v, beta)`` must return argmin_Z f2(Z) + beta*||v - Z||_F^2.
    ``f2_value`` is optional; when absent the trace records NaN for the
    coupled loss (the prox alone does not determine f2's value).
    """

    f1_terms: list
    prox_f2: Callable
    beta0: float = DEFAULT_BETA0
    schedule: Callable = double_beta
    max_iters: int = DEFAULT_MAX_ITERS
    tol: float = DEFAULT_TOL
    f2_value: Optional[Callable] = None

    def __post_init__(self):
        if not (self.beta0 > 0 and math.isfinite(self.beta0)):
            raise ValueError(f"beta0 must be positive, got {self.beta0}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not (self.tol > 0):
            raise ValueError(f"tol must be positive, got {self.tol}")


@dataclass
class HqsTrace:
    """Full run record: per-iteration (beta, gap, L3) plus final images."""

    iterations: list = field(default_factory=list)
    n: Optional[np.ndarray] = None
    z: Optional[np.ndarray] = None
    converged: bool = False


def n_step(f1_terms, z, beta):
    """Exact minimizer over N of f1(N) + beta*||N - Z||_F^2.

    The coupling enters as one more loss term (identity kernel, guide
    Z, weight beta), so this is a single closed-form solve.
    """
    z = as_image(z)
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    terms = list(f1_terms) + [(identity_kernel(), z, float(beta))]
    problem = QuadProblem(terms=terms, shape=z.shape)
    return solve(problem).image


def run(problem, z_init):
    """Alternate N-step, Z-step and beta growth until the gap closes.

    Stops when the relative coupling gap ||N-Z||_F / ||N||_F drops to
    ``problem.tol`` (converged) or after ``problem.max_iters``
    iterations.  Beta strictly increases across iterations; a schedule
    that fails to increase it raises NonIncreasingBeta, and a prox that
    returns non-finite values or a wrong shape raises ProxFailure.
    """
    z = as_image(z_init).copy()
    beta = float(problem.beta0)
    trace = HqsTrace()
    n = None
    for _ in range(problem.max_iters):
        n = n_step(problem.f1_terms, z, beta)
        z = np.asarray(problem.prox_f2(n, beta), dtype=float)
        if z.shape != n.shape:
            raise ProxFailure(f"prox returned shape {z.shape}, expected {n.shape}")
        if not np.all(np.isfinite(z)):
            raise ProxFailure("prox returned non-finite values")
        gap = float(np.linalg.norm(n - z))
        if problem.f2_value is not None:
            l3 = terms_loss(problem.f1_terms, n) + float(problem.f2_value(z)) + beta * gap**2
        else:
            l3 = math.nan
        trace.iterations.append(HqsIteration(beta=beta, gap=gap, l3=l3))
        n_scale = float(np.linalg.norm(n))
        rel_gap = gap / n_scale if n_scale > 0 else gap
        if rel_gap <= problem.tol:
            trace.converged = True
            break
        new_beta = float(problem.schedule(beta))
        if not (new_beta > beta) or not math.isfinite(new_beta):
            raise NonIncreasingBeta(f"schedule mapped beta {beta} to {new_beta}")
        beta = new_beta
    trace.n = n
    trace.z = z
    return trace
