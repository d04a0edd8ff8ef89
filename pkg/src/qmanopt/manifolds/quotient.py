"""Quotient manifolds of density matrices, Choi matrices and POVMs.

Each is represented through a total manifold of full-rank parametrizations
(rho = AA^dagger, C = AA^dagger, E_i = A_i A_i^dagger) modulo the right unitary
gauge A -> AQ.  Tangent vectors are horizontal lifts stored in the same
coordinates as A.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ShapeError
from ..linalg import (
    dagger,
    fro,
    partial_trace_first,
    polar_isometry,
    real_inner,
    solve_sylvester_skew,
)
from .base import Manifold, complex_normal, flag
from .stiefel import stiefel_proj

RANK_TOL = 1e-10


def vertical_part(a: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Orthogonal projection of a tangent vector onto the gauge directions {A Omega}."""
    x = dagger(a) @ v
    omega = solve_sylvester_skew(dagger(a) @ a, x - dagger(x))
    return a @ omega


def horizontality(a: np.ndarray, v: np.ndarray) -> np.ndarray:
    # zero iff the Sylvester solution (vertical part) vanishes
    x = dagger(a) @ v
    return fro(x - dagger(x))


def rank_deficit(a: np.ndarray) -> np.ndarray:
    s = np.linalg.svd(a, compute_uv=False)
    return flag(s[..., -1] <= RANK_TOL * np.maximum(s[..., 0], 1e-300))


class DensityMatrix(Manifold):
    """rho = AA^dagger with A (n x r) on the unit Frobenius sphere."""

    kind = "density"

    def validate_shape(self, shape):
        if len(shape) < 2 or not 1 <= shape[-1] <= shape[-2]:
            raise ShapeError(f"density needs trailing (n, r) with 1 <= r <= n, got {shape}")

    def _random(self, shape, rng):
        a = complex_normal(rng, shape)
        return a / self._expand(fro(a))

    def _sphere_proj(self, a, w):
        return w - self._expand(real_inner(a, w)) * a

    def proj(self, a, w):
        t = self._sphere_proj(a, w)
        return t - vertical_part(a, t)

    def retraction(self, a, v):
        b = a + v
        return b / self._expand(fro(b))

    def _point_residuals(self, a):
        return {"unit_norm": np.abs(fro(a) - 1.0), "rank": rank_deficit(a)}

    def _tangent_residuals(self, a, v):
        return {
            "tangency": np.abs(real_inner(a, v)),
            "horizontality": horizontality(a, v),
        }


def _choi_dims(shape) -> tuple[int, int]:
    n = math.isqrt(shape[-2])
    return n, shape[-1]


class ChoiMatrix(Manifold):
    """C = AA^dagger with A (n^2 x r) a reshaped isometry, so that Tr_out C = I."""

    kind = "choi"

    def validate_shape(self, shape):
        if len(shape) < 2:
            raise ShapeError(f"choi needs trailing (n^2, r), got {shape}")
        n2, r = shape[-2], shape[-1]
        n = math.isqrt(n2)
        if n < 1 or n * n != n2 or not 1 <= r <= n2:
            raise ShapeError(f"choi needs trailing (n^2, r) with 1 <= r <= n^2, got {shape}")

    @staticmethod
    def to_isometry(a: np.ndarray) -> np.ndarray:
        """(n^2, r) -> (n*r, n): row index (output, rank), column index input."""
        n, r = _choi_dims(a.shape)
        batch = a.shape[:-2]
        t = a.reshape(batch + (n, n, r))
        t = np.moveaxis(t, -3, -1)
        return t.reshape(batch + (n * r, n))

    @staticmethod
    def from_isometry(b: np.ndarray, n: int, r: int) -> np.ndarray:
        batch = b.shape[:-2]
        t = b.reshape(batch + (n, r, n))
        t = np.moveaxis(t, -1, -3)
        return t.reshape(batch + (n * n, r))

    def _random(self, shape, rng):
        n, r = _choi_dims(shape)
        b = polar_isometry(complex_normal(rng, shape[:-2] + (n * r, n)))
        return self.from_isometry(b, n, r)

    def _tangent_proj(self, a, w):
        n, r = _choi_dims(a.shape)
        b = self.to_isometry(a)
        return self.from_isometry(stiefel_proj(b, self.to_isometry(w)), n, r)

    def proj(self, a, w):
        t = self._tangent_proj(a, w)
        return t - vertical_part(a, t)

    def retraction(self, a, v):
        n, r = _choi_dims(a.shape)
        b = polar_isometry(self.to_isometry(a + v))
        return self.from_isometry(b, n, r)

    def choi(self, a: np.ndarray) -> np.ndarray:
        return a @ dagger(a)

    def _point_residuals(self, a):
        n, _ = _choi_dims(a.shape)
        tp = partial_trace_first(a @ dagger(a), n)
        return {"trace_preservation": fro(tp - np.eye(n)), "rank": rank_deficit(a)}

    def _tangent_residuals(self, a, v):
        b, vb = self.to_isometry(a), self.to_isometry(v)
        x = dagger(b) @ vb
        return {
            "tangency": fro(0.5 * (x + dagger(x))),
            "horizontality": horizontality(a, v),
        }


class POVM(Manifold):
    """POVM elements E_i = A_i A_i^dagger with sum_i E_i = I; A has shape (m, n, n)."""

    kind = "povm"
    element_ndim = 3

    def validate_shape(self, shape):
        if len(shape) < 3 or shape[-1] != shape[-2] or shape[-3] < 1:
            raise ShapeError(f"povm needs trailing (m, n, n), got {shape}")

    @staticmethod
    def to_isometry(a: np.ndarray) -> np.ndarray:
        """Stack the blocks A_i^dagger vertically into an (m*n, n) isometry."""
        m, n = a.shape[-3], a.shape[-1]
        return dagger(a).reshape(a.shape[:-3] + (m * n, n))

    @staticmethod
    def from_isometry(b: np.ndarray, m: int) -> np.ndarray:
        n = b.shape[-1]
        return dagger(b.reshape(b.shape[:-2] + (m, n, n)))

    def _random(self, shape, rng):
        m, n = shape[-3], shape[-1]
        b = polar_isometry(complex_normal(rng, shape[:-3] + (m * n, n)))
        return self.from_isometry(b, m)

    def proj(self, a, w):
        m = a.shape[-3]
        b = self.to_isometry(a)
        t = self.from_isometry(stiefel_proj(b, self.to_isometry(w)), m)
        return t - vertical_part(a, t)

    def retraction(self, a, v):
        b = polar_isometry(self.to_isometry(a + v))
        return self.from_isometry(b, a.shape[-3])

    def elements(self, a: np.ndarray) -> np.ndarray:
        return a @ dagger(a)

    def _point_residuals(self, a):
        n = a.shape[-1]
        total = np.sum(a @ dagger(a), axis=-3)
        return {
            "completeness": fro(total - np.eye(n)),
            "rank": np.max(rank_deficit(a), axis=-1),
        }

    def _tangent_residuals(self, a, v):
        b, vb = self.to_isometry(a), self.to_isometry(v)
        x = dagger(b) @ vb
        return {
            "tangency": fro(0.5 * (x + dagger(x))),
            "horizontality": np.sqrt(np.sum(horizontality(a, v) ** 2, axis=-1)),
        }
