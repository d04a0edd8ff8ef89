"""Quantum channel tomography by maximum likelihood over Choi matrices.

Choi convention: C = sum_kl |k><l| (x) Phi(|k><l|), so Phi(rho) is the trace
over the input factor of (rho^T (x) I) C, and trace preservation reads
``partial_trace_first(C, d) == I``.  A Choi parametrization A (d^2 x r) is
indexed as A[(input, output), kraus].
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..errors import (
    ConfigurationError,
    DegeneracyError,
    LikelihoodDegeneracyError,
    ShapeError,
)
from ..linalg import dagger, kron, qr_unique, trace_norm
from ..manifolds import ChoiMatrix, complex_normal
from ..optimizers import RAdam

PROB_SUM_TOL = 1e-10
PROB_FLOOR = 1e-300

SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=np.complex128,
)

TETRA_VECTORS = np.array(
    [
        [0.0, 0.0, 1.0],
        [2 * np.sqrt(2) / 3, 0.0, -1 / 3],
        [-np.sqrt(2) / 3, np.sqrt(2 / 3), -1 / 3],
        [-np.sqrt(2) / 3, -np.sqrt(2 / 3), -1 / 3],
    ]
)


def build_tetrahedral_povm(n_qubits: int) -> np.ndarray:
    """All 4^n tensor products of the single-qubit tetrahedral POVM elements.

    Element k = sum_q k_q 4^(n-1-q) is M_{k_0} (x) ... (x) M_{k_{n-1}}.
    """
    if n_qubits < 1:
        raise ConfigurationError("n_qubits must be >= 1")
    single = 0.25 * (np.eye(2) + np.einsum("ka,aij->kij", TETRA_VECTORS, SIGMA))
    povm = single
    for _ in range(n_qubits - 1):
        povm = np.stack([kron(a, b) for a in povm for b in single])
    return povm


@dataclass
class Channel:
    choi: np.ndarray
    kraus: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return int(round(np.sqrt(self.choi.shape[0])))


def choi_from_kraus(kraus: np.ndarray) -> np.ndarray:
    """Choi matrix sum_kl |k><l| (x) Phi(|k><l|) of Phi(rho) = sum_i K_i rho K_i^dagger."""
    a = choi_param_from_kraus(kraus)
    return a @ dagger(a)


def choi_param_from_kraus(kraus: np.ndarray) -> np.ndarray:
    """A with C = AA^dagger: A[(in, out), i] = K_i[out, in]."""
    r, d, _ = kraus.shape
    return np.transpose(kraus, (2, 1, 0)).reshape(d * d, r)


def random_channel(n_qubits: int, kraus_rank: int, seed=None) -> Channel:
    """Random channel from a Haar-like isometry split into Kraus operators."""
    d = 2**n_qubits
    if not 1 <= kraus_rank <= d * d:
        raise ConfigurationError(f"kraus_rank must lie in [1, {d * d}], got {kraus_rank}")
    rng = np.random.default_rng(seed)
    v, _ = qr_unique(complex_normal(rng, (d * kraus_rank, d)))
    kraus = v.reshape(kraus_rank, d, d)
    return Channel(choi_from_kraus(kraus), kraus)


def identity_channel_choi(d: int) -> np.ndarray:
    psi = np.eye(d).reshape(d * d)
    return np.outer(psi, psi).astype(np.complex128)


def apply_channel(choi: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Phi(rho) = Tr_in[(rho^T (x) I) C]; rho may carry leading batch axes."""
    choi = np.asarray(choi, dtype=np.complex128)
    rho = np.asarray(rho, dtype=np.complex128)
    d = rho.shape[-1]
    if choi.shape != (d * d, d * d) or rho.shape[-2] != d:
        raise ShapeError(f"choi {choi.shape} does not act on states of shape {rho.shape}")
    c4 = choi.reshape(d, d, d, d)
    return np.einsum("...ac,abcd->...bd", rho, c4)


def random_pure_states(n_states: int, d: int, rng: np.random.Generator) -> np.ndarray:
    psi = complex_normal(rng, (n_states, d))
    psi /= np.linalg.norm(psi, axis=-1, keepdims=True)
    return np.einsum("ni,nj->nij", psi, np.conj(psi))


def outcome_probabilities(choi: np.ndarray, rho: np.ndarray, povm: np.ndarray) -> np.ndarray:
    """p[i, k] = Tr(M_k Phi(rho_i)), shape (N, K)."""
    out = apply_channel(choi, rho)
    return np.einsum("kdb,nbd->nk", povm, out).real


@dataclass
class TomographyDataset:
    """Input states and observed POVM outcome indices.

    ``weights`` defaults to ones; non-uniform weights express the exact-probability
    (infinite data) limit, where each state is paired with every outcome weighted
    by its true probability.
    """

    rho_in: np.ndarray
    outcome_index: np.ndarray
    weights: Optional[np.ndarray] = None
    _groups: Optional[list] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.rho_in = np.asarray(self.rho_in, dtype=np.complex128)
        self.outcome_index = np.asarray(self.outcome_index, dtype=np.int64)
        if self.rho_in.ndim != 3 or len(self.rho_in) < 1:
            raise ShapeError("rho_in must have shape (N, d, d) with N >= 1")
        if self.outcome_index.shape != (len(self.rho_in),):
            raise ShapeError("outcome_index must have shape (N,)")
        if self.weights is None:
            self.weights = np.ones(len(self.rho_in))
        self.weights = np.asarray(self.weights, dtype=np.float64)

    def __len__(self) -> int:
        return len(self.rho_in)

    def groups(self) -> list:
        """(outcome k, flattened inputs with outcome k, their weights), computed once."""
        if self._groups is None:
            n, d = len(self), self.rho_in.shape[-1]
            flat = self.rho_in.reshape(n, d * d)
            order = np.argsort(self.outcome_index, kind="stable")
            keys, starts = np.unique(self.outcome_index[order], return_index=True)
            ends = list(starts[1:]) + [n]
            self._groups = [
                (int(k), np.ascontiguousarray(flat[order[lo:hi]]), self.weights[order[lo:hi]])
                for k, lo, hi in zip(keys, starts, ends)
            ]
        return self._groups


def _checked_probs(p: np.ndarray) -> np.ndarray:
    sums = p.sum(axis=-1)
    if np.any(np.abs(sums - 1.0) >= PROB_SUM_TOL):
        raise DegeneracyError(
            f"outcome probabilities do not sum to one (max deviation {np.max(np.abs(sums - 1)):.3e})"
        )
    p = np.clip(p, 0.0, None)
    return p / p.sum(axis=-1, keepdims=True)


def sample_dataset(channel: Channel, n_states: int, povm: np.ndarray, seed=None) -> TomographyDataset:
    """Random pure inputs, one categorical measurement outcome per input."""
    rng = np.random.default_rng(seed)
    d = povm.shape[-1]
    rho = random_pure_states(n_states, d, rng)
    p = _checked_probs(outcome_probabilities(channel.choi, rho, povm))
    cdf = np.cumsum(p, axis=-1)
    u = rng.random(n_states)[:, None]
    idx = np.minimum(np.sum(cdf < u, axis=-1), p.shape[-1] - 1)
    return TomographyDataset(rho, idx)


def exact_dataset(channel: Channel, n_states: int, povm: np.ndarray, seed=None) -> TomographyDataset:
    """Infinite-data limit: every (state, outcome) pair weighted by its probability."""
    rng = np.random.default_rng(seed)
    d = povm.shape[-1]
    k = len(povm)
    rho = random_pure_states(n_states, d, rng)
    p = _checked_probs(outcome_probabilities(channel.choi, rho, povm))
    return TomographyDataset(np.repeat(rho, k, axis=0), np.tile(np.arange(k), n_states), p.ravel())


def likelihood_loss_and_grad(a: np.ndarray, data: TomographyDataset, povm: np.ndarray):
    """Weighted negative log likelihood and its Euclidean gradient w.r.t. A.

    With X_i = rho_i^T (x) M_{k_i} and p_i = Tr(AA^dagger X_i):
    loss = -sum w_i log p_i / sum w_i and E = -(2 / sum w) sum w_i X_i A / p_i.
    """
    a = np.asarray(a, dtype=np.complex128)
    d = povm.shape[-1]
    r = a.shape[-1]
    if a.shape != (d * d, r):
        raise ShapeError(f"choi parameter shape {a.shape} incompatible with dimension {d}")
    n_out = len(povm)
    c4 = (a @ dagger(a)).reshape(d, d, d, d)
    # p_i = Tr(rho_i^T F_{k_i}) with F_k[a, c] = sum_{b,d} M_k[d, b] C[(a, b), (c, d)]
    f_flat = np.einsum("kdb,abcd->kac", povm, c4).reshape(n_out, d * d)
    # W_k = sum_{i: k_i = k} (w_i / p_i) rho_i, so sum_i (w_i / p_i) X_i = sum_k W_k^T (x) M_k
    weighted = np.zeros((n_out, d * d), dtype=np.complex128)
    loss = 0.0
    for k, rho_k, w_k in data.groups():
        p = (rho_k @ f_flat[k]).real
        active = w_k > 0
        if np.any(p[active] <= PROB_FLOOR):
            raise LikelihoodDegeneracyError("estimate assigns zero probability to an observed outcome")
        loss -= float(np.sum(w_k[active] * np.log(p[active])))
        weighted[k] = np.where(active, w_k / np.where(active, p, 1.0), 0.0) @ rho_k
    total = float(data.weights.sum())
    loss /= total
    weighted /= total
    weighted = weighted.reshape(n_out, d, d)
    x_sum = np.einsum("kca,kbd->abcd", weighted, povm).reshape(d * d, d * d)
    return loss, -2.0 * (x_sum @ a)


def jamiolkowski_distance(c1: np.ndarray, c2: np.ndarray, n_qubits: int) -> float:
    """(1 / 2^n) times the trace norm of C1 - C2 (ranges over [0, 2])."""
    c1 = np.asarray(c1, dtype=np.complex128)
    c2 = np.asarray(c2, dtype=np.complex128)
    if c1.shape != c2.shape:
        raise ShapeError(f"shape mismatch {c1.shape} vs {c2.shape}")
    return float(trace_norm(c1 - c2)) / 2**n_qubits


@dataclass
class TomographyResult:
    a: np.ndarray
    true_channel: Channel
    losses: list = field(default_factory=list)
    distances: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    wall_ms: list = field(default_factory=list)

    @property
    def choi(self) -> np.ndarray:
        return self.a @ dagger(self.a)

    @property
    def final_distance(self) -> float:
        return self.distances[-1]


def run_tomography(
    n_qubits: int = 1,
    rank: int = 2,
    samples: int = 100_000,
    exact_probs: bool = False,
    n_states: int = 100,
    lr: float = 0.07,
    iters: int = 1000,
    seed: Optional[int] = 0,
    callback: Optional[Callable] = None,
) -> TomographyResult:
    """Generate a random channel and data, then fit a rank-``rank`` Choi matrix by RAdam."""
    d = 2**n_qubits
    if not 1 <= rank <= d * d:
        raise ConfigurationError(f"rank must lie in [1, {d * d}], got {rank}")
    seeds = np.random.SeedSequence(seed).spawn(3)
    channel = random_channel(n_qubits, rank, seeds[0])
    povm = build_tetrahedral_povm(n_qubits)
    if exact_probs:
        data = exact_dataset(channel, n_states, povm, seeds[1])
    else:
        data = sample_dataset(channel, samples, povm, seeds[1])
    manifold = ChoiMatrix()
    a = manifold.random((d * d, rank), seeds[2])
    opt = RAdam(manifold, lr)
    result = TomographyResult(a, channel)
    start = time.perf_counter()
    for it in range(iters + 1):
        loss, grad = likelihood_loss_and_grad(a, data, povm)
        result.losses.append(loss)
        result.distances.append(jamiolkowski_distance(channel.choi, a @ dagger(a), n_qubits))
        result.residuals.append(manifold.check_point(a)["trace_preservation"])
        result.wall_ms.append(1e3 * (time.perf_counter() - start))
        if callback is not None:
            callback(it, result)
        if it < iters:
            opt.apply_gradients([(grad, a)])
    return result
