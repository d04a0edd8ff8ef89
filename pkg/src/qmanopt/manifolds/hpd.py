"""Hermitian positive-definite matrices with Log-Cholesky or Log-Euclidean metrics.

Both metrics make the manifold complete, so exact exponential maps and parallel
transports are used in place of retractions and projection transports.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigurationError, DegeneracyError, ShapeError
from ..linalg import (
    cholesky_lower,
    dagger,
    dfun_herm,
    fro,
    fun_herm,
    herm,
    real_inner,
)
from .base import Manifold, complex_normal, flag

METRICS = ("log_cholesky", "log_euclidean")


def _diag(x: np.ndarray) -> np.ndarray:
    return np.diagonal(x, axis1=-2, axis2=-1)


def _with_diag(strict_lower: np.ndarray, d: np.ndarray) -> np.ndarray:
    out = np.array(strict_lower, dtype=np.complex128)
    idx = np.arange(out.shape[-1])
    out[..., idx, idx] = d
    return out


def lift_cholesky(chol: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Cholesky-space tangent X (lower, real diagonal) with v = X L^dagger + L X^dagger."""
    v = herm(v)
    half = np.linalg.solve(chol, v)
    m = np.linalg.solve(chol, dagger(half))
    phi = _with_diag(np.tril(m, -1), 0.5 * _diag(m).real)
    return chol @ phi


def unlift_cholesky(chol: np.ndarray, x: np.ndarray) -> np.ndarray:
    y = x @ dagger(chol)
    return y + dagger(y)


def _cholesky_inner(chol, x, y):
    lx, ly = np.tril(x, -1), np.tril(y, -1)
    d = _diag(chol).real
    off = np.sum((np.conj(lx) * ly).real, axis=(-2, -1))
    return off + np.sum(_diag(x).real * _diag(y).real / d**2, axis=-1)


def _cholesky_exp(chol, x):
    d = _diag(chol).real
    return _with_diag(np.tril(chol, -1) + np.tril(x, -1), d * np.exp(_diag(x).real / d))


def _require_pd(s: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        ok = np.all(np.isfinite(s)) and np.all(np.linalg.eigvalsh(s)[..., 0] > 0)
    if not ok:
        raise DegeneracyError("exponential map lost positive definiteness numerically")
    return s


def _cholesky_transport(chol1, chol2, x):
    scale = _diag(chol2).real / _diag(chol1).real
    return _with_diag(np.tril(x, -1), _diag(x).real * scale)


class HermitianPositiveDefinite(Manifold):
    kind = "hpd"

    def __init__(self, metric: str = "log_cholesky", retraction=None):
        if metric not in METRICS:
            raise ConfigurationError(f"hpd metric must be one of {METRICS}, got {metric!r}")
        if retraction is not None:
            raise ConfigurationError("hpd uses the exponential map; no retraction option")
        self.metric = metric

    def validate_shape(self, shape):
        if len(shape) < 2 or shape[-1] != shape[-2]:
            raise ShapeError(f"hpd needs square trailing axes, got {shape}")

    def _random(self, shape, rng):
        g = complex_normal(rng, shape)
        return herm(g @ dagger(g)) + 1e-3 * np.eye(shape[-1])

    def proj(self, u, w):
        return herm(w)

    def inner(self, u, v, w):
        if self.metric == "log_cholesky":
            chol = cholesky_lower(u)
            return _cholesky_inner(chol, lift_cholesky(chol, v), lift_cholesky(chol, w))
        return real_inner(dfun_herm(u, "log", v), dfun_herm(u, "log", w))

    def egrad_to_rgrad(self, u, e):
        h = herm(e)
        if self.metric == "log_cholesky":
            chol = cholesky_lower(u)
            j = h @ chol
            d = _diag(chol).real
            g = 2.0 * _with_diag(np.tril(j, -1), d**2 * _diag(j).real)
            return unlift_cholesky(chol, g)
        log_u = fun_herm(u, "log")
        return dfun_herm(log_u, "exp", dfun_herm(log_u, "exp", h))

    def retraction(self, u, v):
        """Exponential map."""
        if self.metric == "log_cholesky":
            chol = cholesky_lower(u)
            with np.errstate(over="ignore"):
                new = _cholesky_exp(chol, lift_cholesky(chol, v))
                out = herm(new @ dagger(new))
        else:
            with np.errstate(over="ignore", invalid="ignore"):
                out = fun_herm(fun_herm(u, "log") + dfun_herm(u, "log", herm(v)), "exp")
        return _require_pd(out)

    exp = retraction

    def exp_log_spectrum(self, u, v) -> np.ndarray:
        """Log-domain certificate for positive definiteness of Exp_u(v).

        log_cholesky: log of the diagonal of the new Cholesky factor;
        log_euclidean: eigenvalues of log Exp_u(v).  Exp_u(v) is positive
        definite iff all entries are finite reals, independently of whether the
        dense matrix is representable in floating point.
        """
        if self.metric == "log_cholesky":
            chol = cholesky_lower(u)
            x = lift_cholesky(chol, v)
            d = _diag(chol).real
            return np.log(d) + _diag(x).real / d
        return np.linalg.eigvalsh(fun_herm(u, "log") + dfun_herm(u, "log", herm(v)))

    def parallel_transport(self, u1, u2, v):
        """Transport tangent v at u1 to u2 along the connecting geodesic."""
        if self.metric == "log_cholesky":
            c1, c2 = cholesky_lower(u1), cholesky_lower(u2)
            y = _cholesky_transport(c1, c2, lift_cholesky(c1, v))
            return unlift_cholesky(c2, y)
        return herm(dfun_herm(fun_herm(u2, "log"), "exp", dfun_herm(u1, "log", herm(v))))

    def vector_transport(self, u, v, w):
        return self.parallel_transport(u, self.retraction(u, w), v)

    def retraction_transport(self, u, v, w):
        x = self.retraction(u, w)
        return x, self.parallel_transport(u, x, v)

    def _point_residuals(self, u):
        lam = np.linalg.eigvalsh(herm(u))
        return {
            "hermiticity": fro(u - dagger(u)),
            "positivity": flag(lam[..., 0] <= 0),
        }

    def _tangent_residuals(self, u, v):
        return {"hermiticity": fro(v - dagger(v))}
