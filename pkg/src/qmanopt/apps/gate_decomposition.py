"""Two-qubit gate decomposition into single-qubit unitaries and three CNOTs.

D(u) = K3 C K2 C K1 C K0 with K_t = kron(u[t, 0], u[t, 1]) and C the CNOT
matrix; the loss is the squared Frobenius distance to the target.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..errors import ShapeError
from ..linalg import dagger, kron
from ..manifolds import Stiefel
from ..optimizers import RAdam

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)
VARS_SHAPE = (4, 2, 2, 2)


def kron_adjoint(g, a, b) -> tuple[np.ndarray, np.ndarray]:
    """Adjoint of the Kronecker product with respect to Re Tr(x^dagger y).

    Returns (g_a, g_b) such that Re Tr(g^dagger (da (x) b)) = Re Tr(g_a^dagger da)
    and likewise for b.
    """
    g = np.asarray(g, dtype=np.complex128)
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    p, q = a.shape[0], b.shape[0]
    if a.shape != (p, p) or b.shape != (q, q) or g.shape != (p * q, p * q):
        raise ShapeError(f"inconsistent shapes g={g.shape}, a={a.shape}, b={b.shape}")
    g4 = g.reshape(p, q, p, q)
    g_a = np.einsum("ikjl,kl->ij", g4, np.conj(b))
    g_b = np.einsum("ikjl,ij->kl", g4, np.conj(a))
    return g_a, g_b


def layers(u: np.ndarray) -> list[np.ndarray]:
    return [kron(u[t, 0], u[t, 1]) for t in range(4)]


def decompose(u: np.ndarray) -> np.ndarray:
    """Evaluate D(u) for u of shape (4, 2, 2, 2)."""
    if u.shape != VARS_SHAPE:
        raise ShapeError(f"expected variables of shape {VARS_SHAPE}, got {u.shape}")
    k = layers(u)
    d = k[0]
    for t in range(1, 4):
        d = k[t] @ CNOT @ d
    return d


def loss_and_grad(u: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    """Squared Frobenius distance and its Euclidean gradient w.r.t. u."""
    if u.shape != VARS_SHAPE:
        raise ShapeError(f"expected variables of shape {VARS_SHAPE}, got {u.shape}")
    k = layers(u)
    # prefixes[t] = product applied after K_t, suffixes[t] = product before K_t
    suffixes = [np.eye(4, dtype=np.complex128)]
    for t in range(1, 4):
        suffixes.append(CNOT @ k[t - 1] @ suffixes[-1])
    prefixes = [None] * 4
    prefixes[3] = np.eye(4, dtype=np.complex128)
    for t in range(2, -1, -1):
        prefixes[t] = prefixes[t + 1] @ k[t + 1] @ CNOT
    d = k[3] @ suffixes[3]
    diff = d - target
    loss = float(np.sum(np.abs(diff) ** 2))
    g_d = 2.0 * diff
    grad = np.empty_like(u, dtype=np.complex128)
    for t in range(4):
        g_k = dagger(prefixes[t]) @ g_d @ dagger(suffixes[t])
        grad[t, 0], grad[t, 1] = kron_adjoint(g_k, u[t, 0], u[t, 1])
    return loss, grad


@dataclass
class GateDecompResult:
    u: np.ndarray
    losses: list = field(default_factory=list)
    distances: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    wall_ms: list = field(default_factory=list)

    @property
    def final_distance(self) -> float:
        return self.distances[-1]


def run_gate_decomposition(
    target: np.ndarray,
    iters: int = 2000,
    lr: float = 0.2,
    seed: Optional[int] = 0,
    u0: Optional[np.ndarray] = None,
    callback: Optional[Callable] = None,
    amsgrad: bool = True,
) -> GateDecompResult:
    """Fit D(u) to ``target`` with Riemannian Adam; records one row per iteration.

    Row 0 is the initial point; row i is recorded after i optimizer steps.
    AMSGrad is on by default: with plain Adam the second moment decays once the
    loss reaches roundoff level and the growing effective step repeatedly
    ejects the iterate from the minimum.
    """
    manifold = Stiefel()
    rng = np.random.default_rng(seed)
    u = manifold.random(VARS_SHAPE, rng) if u0 is None else np.array(u0, dtype=np.complex128)
    opt = RAdam(manifold, lr, amsgrad=amsgrad)
    result = GateDecompResult(u)
    start = time.perf_counter()
    for it in range(iters + 1):
        loss, grad = loss_and_grad(u, target)
        result.losses.append(loss)
        result.distances.append(float(np.sqrt(loss)))
        result.residuals.append(manifold.check_point(u)["isometry"])
        result.wall_ms.append(1e3 * (time.perf_counter() - start))
        if callback is not None:
            callback(it, result)
        if it < iters:
            opt.apply_gradients([(grad, u)])
    return result
