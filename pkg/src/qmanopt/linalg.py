"""Dense complex linear-algebra kernels.

Every function accepts stacks of matrices: the trailing two axes are the
matrix axes and any leading axes are batch axes.  All arithmetic is done in
complex128.
"""

from __future__ import annotations

from typing import Callable, Union

import numpy as np

from .errors import DegeneracyError, PreconditionError, ShapeError

HERMITIAN_TOL = 1e-10
RANK_TOL = 1e-12
EIG_GAP_TOL = 1e-12

ScalarFn = Union[str, "tuple[Callable, Callable]"]


def as_complex(x, name: str = "array") -> np.ndarray:
    """Convert to a complex128 array, rejecting NaN/Inf entries."""
    arr = np.asarray(x, dtype=np.complex128)
    if not np.all(np.isfinite(arr)):
        raise PreconditionError(f"{name} contains non-finite entries")
    return arr


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def herm(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + dagger(a))


def antiherm(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a - dagger(a))


def fro(a: np.ndarray) -> np.ndarray:
    """Frobenius norm over the trailing two axes."""
    return np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1)))


def real_inner(a: np.ndarray, b: np.ndarray, ndim: int = 2) -> np.ndarray:
    """Re Tr(a^dagger b), contracting the trailing ``ndim`` axes."""
    axes = tuple(range(-ndim, 0))
    return np.sum((np.conj(a) * b).real, axis=axes)


def _require_matrix(a: np.ndarray, name: str) -> None:
    if a.ndim < 2:
        raise ShapeError(f"{name} must be a matrix, got shape {a.shape}")


def _require_hermitian(h: np.ndarray, name: str = "input") -> None:
    _require_matrix(h, name)
    if h.shape[-1] != h.shape[-2]:
        raise ShapeError(f"{name} must be square, got shape {h.shape}")
    scale = np.maximum(fro(h), 1.0)
    if np.any(fro(h - dagger(h)) > HERMITIAN_TOL * scale):
        raise PreconditionError(f"{name} is not Hermitian")


def kron(a, b) -> np.ndarray:
    """Kronecker product of two matrices; block (i, j) equals a[i, j] * b."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError(f"kron expects two matrices, got {a.shape} and {b.shape}")
    p, q = a.shape
    r, s = b.shape
    return np.einsum("ij,kl->ikjl", a, b).reshape(p * r, q * s)


def partial_trace_first(c, n: int) -> np.ndarray:
    """Contract c (n^2 x n^2) as ``result[i1, i2] = sum_j c[i1, j, i2, j]``.

    With the Choi convention C = sum_kl |k><l| (x) Phi(|k><l|) this sums out
    the output factor, so trace preservation reads
    ``partial_trace_first(C, n) == I``.
    """
    c = np.asarray(c, dtype=np.complex128)
    _require_matrix(c, "c")
    if c.shape[-2:] != (n * n, n * n):
        raise ShapeError(f"expected trailing shape {(n * n, n * n)}, got {c.shape[-2:]}")
    resh = c.reshape(c.shape[:-2] + (n, n, n, n))
    return np.einsum("...ikjk->...ij", resh)


def _check_rank(s: np.ndarray, what: str) -> None:
    # s: singular values (descending) or |diag R|, batch-last layout
    smax = np.max(s, axis=-1)
    smin = np.min(s, axis=-1)
    if np.any(smin <= RANK_TOL * smax) or np.any(smax == 0):
        raise DegeneracyError(f"{what}: input is rank deficient")


def polar_isometry(m) -> np.ndarray:
    """Isometric factor U V^dagger of the thin SVD m = U S V^dagger."""
    m = np.asarray(m, dtype=np.complex128)
    _require_matrix(m, "m")
    if m.shape[-2] < m.shape[-1]:
        raise ShapeError(f"polar_isometry needs k >= n, got {m.shape[-2:]}")
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    _check_rank(s, "polar_isometry")
    return u @ vh


def qr_unique(m) -> tuple[np.ndarray, np.ndarray]:
    """QR factorization with real, strictly positive diag(R)."""
    m = np.asarray(m, dtype=np.complex128)
    _require_matrix(m, "m")
    if m.shape[-2] < m.shape[-1]:
        raise ShapeError(f"qr_unique needs k >= n, got {m.shape[-2:]}")
    q, r = np.linalg.qr(m, mode="reduced")
    d = np.diagonal(r, axis1=-2, axis2=-1)
    _check_rank(np.abs(d), "qr_unique")
    phase = d / np.abs(d)
    q = q * phase[..., None, :]
    r = np.conj(phase)[..., :, None] * r
    # diag(R) is real to rounding; make it exactly real
    idx = np.arange(r.shape[-1])
    r[..., idx, idx] = r[..., idx, idx].real
    return q, r


def eigh(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending."""
    h = np.asarray(h, dtype=np.complex128)
    _require_hermitian(h, "h")
    return np.linalg.eigh(herm(h))


def cholesky_lower(s) -> np.ndarray:
    """Lower Cholesky factor L with real positive diagonal, LL^dagger = s."""
    s = np.asarray(s, dtype=np.complex128)
    _require_hermitian(s, "s")
    try:
        return np.linalg.cholesky(herm(s))
    except np.linalg.LinAlgError as exc:
        raise DegeneracyError("cholesky_lower: matrix is not positive definite") from exc


def solve_sylvester_skew(p, rhs) -> np.ndarray:
    """Solve p @ X + X @ p = rhs for anti-Hermitian X, with p positive definite."""
    p = np.asarray(p, dtype=np.complex128)
    rhs = np.asarray(rhs, dtype=np.complex128)
    if p.shape[-2:] != rhs.shape[-2:]:
        raise ShapeError(f"shape mismatch {p.shape} vs {rhs.shape}")
    scale = np.maximum(fro(rhs), 1.0)
    if np.any(fro(rhs + dagger(rhs)) > HERMITIAN_TOL * scale):
        raise PreconditionError("rhs is not anti-Hermitian")
    lam, u = eigh(p)
    if np.any(lam[..., 0] <= 0):
        raise DegeneracyError("solve_sylvester_skew: p is not positive definite")
    t = dagger(u) @ rhs @ u
    t = t / (lam[..., :, None] + lam[..., None, :])
    return antiherm(u @ t @ dagger(u))


def _resolve(f: ScalarFn) -> tuple[Callable, Callable]:
    if isinstance(f, str):
        if f == "log":
            return np.log, lambda x: 1.0 / x
        if f == "exp":
            return np.exp, np.exp
        if f == "sqrt":
            return np.sqrt, lambda x: 0.5 / np.sqrt(x)
        raise ValueError(f"unknown scalar function {f!r}")
    return f


def _spectrum(h, f: ScalarFn):
    fn, dfn = _resolve(f)
    lam, u = eigh(h)
    if f == "log" and np.any(lam <= 0):
        raise DegeneracyError("matrix log of a matrix with non-positive eigenvalues")
    return lam, u, fn, dfn


def fun_herm(h, f: ScalarFn) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum.

    ``f`` is ``"log"``, ``"exp"``, ``"sqrt"`` or a ``(f, f_prime)`` pair.
    """
    lam, u, fn, _ = _spectrum(h, f)
    return herm((u * fn(lam)[..., None, :]) @ dagger(u))


def divided_differences(lam: np.ndarray, fn: Callable, dfn: Callable) -> np.ndarray:
    """First divided differences F_ij of fn on the eigenvalues ``lam``."""
    li = lam[..., :, None]
    lj = lam[..., None, :]
    gap = li - lj
    close = np.abs(gap) < EIG_GAP_TOL
    safe_gap = np.where(close, 1.0, gap)
    fi, fj = fn(li), fn(lj)
    return np.where(close, dfn(0.5 * (li + lj)), (fi - fj) / safe_gap)


def dfun_herm(h, f: ScalarFn, v) -> np.ndarray:
    """Frechet derivative of ``fun_herm(., f)`` at h in direction v (Daleckii-Krein)."""
    v = np.asarray(v, dtype=np.complex128)
    lam, u, fn, dfn = _spectrum(h, f)
    ff = divided_differences(lam, fn, dfn)
    return u @ (ff * (dagger(u) @ v @ u)) @ dagger(u)


def trace_norm(m) -> np.ndarray:
    """Sum of singular values."""
    m = np.asarray(m, dtype=np.complex128)
    return np.sum(np.linalg.svd(m, compute_uv=False), axis=-1)
