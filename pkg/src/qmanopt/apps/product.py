"""Joint optimization over a product of density-matrix and Choi-matrix manifolds.

Variables: one density matrix rho_1 (n1 x n1), a batch of two density matrices
rho_2 (n2 x n2 each) and one channel Phi given by its Choi parametrization.
The loss couples them:

    f = |rho_1 - tau|^2 + sum_j |Phi(rho_2j) - sigma_j|^2

with tau a fixed state and sigma_j the images of fixed states under a hidden
channel.  The density variables share one optimizer and the Choi variable has
its own, as two optimizers over different manifolds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..linalg import dagger, fro, herm
from ..manifolds import ChoiMatrix, DensityMatrix
from ..optimizers import RAdam
from .tomography import apply_channel, random_channel, random_pure_states


@dataclass(frozen=True)
class ProductConfig:
    n1: int = 3
    n2: int = 2
    rank: int = 2
    steps: int = 200
    lr: float = 0.01
    seed: int = 0


@dataclass
class ProductProblem:
    tau: np.ndarray
    inputs: np.ndarray
    sigma: np.ndarray


@dataclass
class ProductResult:
    rho_1: np.ndarray
    rho_2: np.ndarray
    choi: np.ndarray
    losses: list = field(default_factory=list)
    residuals: list = field(default_factory=list)


def make_problem(config: ProductConfig, rng) -> ProductProblem:
    tau = random_pure_states(1, config.n1, rng)[0]
    truth = random_channel(int(np.log2(config.n2)), config.rank, rng)
    inputs = random_pure_states(2, config.n2, rng)
    return ProductProblem(tau, inputs, apply_channel(truth.choi, inputs))


def loss_and_grads(a1, a2, ac, problem: ProductProblem):
    """Loss and Euclidean gradients with respect to the three parametrizations."""
    n2 = a2.shape[-2]
    p1 = a1 @ dagger(a1)
    d1 = p1 - problem.tau
    rho2 = a2 @ dagger(a2)
    choi = ac @ dagger(ac)
    r = apply_channel(choi, rho2) - problem.sigma
    loss = float(np.sum(fro(d1) ** 2) + np.sum(fro(r) ** 2))
    # d|P - T|^2 = Re <2 (P - T), dP> and Re <G, d(AA^dagger)> = Re <2 G A, dA> for Hermitian G
    g1 = 4.0 * d1 @ a1
    c4 = choi.reshape(n2, n2, n2, n2)
    g_rho = herm(np.einsum("abcd,jbd->jac", np.conj(c4), r))
    g2 = 4.0 * g_rho @ a2
    g_choi = sum(np.kron(rho2[j].T, r[j]) for j in range(len(r)))
    gc = 4.0 * g_choi @ ac
    return loss, g1, g2, gc


def run_product_example(config: ProductConfig = ProductConfig()) -> ProductResult:
    rng = np.random.default_rng(config.seed)
    problem = make_problem(config, rng)
    dens, choi_m = DensityMatrix(), ChoiMatrix()
    a1 = dens.random((config.n1, config.n1), rng)
    a2 = dens.random((2, config.n2, config.n2), rng)
    ac = choi_m.random((config.n2**2, config.rank), rng)
    opt_dens = RAdam(dens, config.lr)
    opt_choi = RAdam(choi_m, config.lr)
    result = ProductResult(a1, a2, ac)

    def record(loss):
        residual = max(
            max(dens.check_point(a1).values()),
            max(dens.check_point(a2).values()),
            max(choi_m.check_point(ac).values()),
        )
        result.losses.append(loss)
        result.residuals.append(residual)

    for _ in range(config.steps):
        loss, g1, g2, gc = loss_and_grads(a1, a2, ac, problem)
        record(loss)
        opt_dens.apply_gradients([(g1, a1), (g2, a2)])
        opt_choi.apply_gradients([(gc, ac)])
    record(loss_and_grads(a1, a2, ac, problem)[0])
    result.rho_1, result.rho_2, result.choi = a1 @ dagger(a1), a2 @ dagger(a2), ac @ dagger(ac)
    return result
