"""Complex Stiefel manifold of isometric n x p matrices (unitaries when n == p)."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigurationError, ShapeError
from ..linalg import dagger, fro, herm, polar_isometry, qr_unique, real_inner
from .base import Manifold, complex_normal

METRICS = ("euclidean", "canonical")
RETRACTIONS = ("svd", "qr", "cayley")


def stiefel_proj(u: np.ndarray, w: np.ndarray) -> np.ndarray:
    return w - u @ herm(dagger(u) @ w)


class Stiefel(Manifold):
    kind = "stiefel"

    def __init__(self, metric: str = "euclidean", retraction: str = "svd"):
        if metric not in METRICS:
            raise ConfigurationError(f"stiefel metric must be one of {METRICS}, got {metric!r}")
        if retraction not in RETRACTIONS:
            raise ConfigurationError(
                f"stiefel retraction must be one of {RETRACTIONS}, got {retraction!r}"
            )
        self.metric = metric
        self.retraction_method = retraction

    def validate_shape(self, shape):
        if len(shape) < 2 or shape[-2] < shape[-1] or shape[-1] < 1:
            raise ShapeError(f"stiefel needs trailing (n, p) with n >= p >= 1, got {shape}")

    def _random(self, shape, rng):
        q, _ = qr_unique(complex_normal(rng, shape))
        return q

    def proj(self, u, w):
        return stiefel_proj(u, w)

    def inner(self, u, v, w):
        if self.metric == "euclidean":
            return real_inner(v, w)
        return real_inner(v, w - 0.5 * u @ (dagger(u) @ w))

    def egrad_to_rgrad(self, u, e):
        if self.metric == "euclidean":
            return stiefel_proj(u, e)
        return e - u @ dagger(e) @ u

    def retraction(self, u, v):
        if self.retraction_method == "svd":
            return polar_isometry(u + v)
        if self.retraction_method == "qr":
            q, _ = qr_unique(u + v)
            return q
        return self._cayley(u, v)

    @staticmethod
    def _cayley(u, v):
        n = u.shape[-2]
        eye = np.eye(n, dtype=np.complex128)
        # P_u v u^dagger with P_u = I - uu^dagger/2; W is anti-Hermitian and Wu = v
        pv = v - 0.5 * u @ (dagger(u) @ v)
        x = pv @ dagger(u)
        w = x - dagger(x)
        return np.linalg.solve(eye - 0.5 * w, u + 0.5 * (w @ u))

    def _point_residuals(self, u):
        p = u.shape[-1]
        return {"isometry": fro(dagger(u) @ u - np.eye(p))}

    def _tangent_residuals(self, u, v):
        return {"tangency": fro(herm(dagger(u) @ v))}
