"""Hermitian matrices: a flat linear subspace of C^{n x n}."""

from __future__ import annotations

from ..errors import ShapeError
from ..linalg import dagger, fro, herm
from .base import Manifold, complex_normal


class Hermitian(Manifold):
    kind = "hermitian"

    def validate_shape(self, shape):
        if len(shape) < 2 or shape[-1] != shape[-2]:
            raise ShapeError(f"hermitian needs square trailing axes, got {shape}")

    def _random(self, shape, rng):
        return herm(complex_normal(rng, shape))

    def proj(self, u, w):
        return herm(w)

    def egrad_to_rgrad(self, u, e):
        return herm(e)

    def retraction(self, u, v):
        return u + v

    def vector_transport(self, u, v, w):
        return v

    def retraction_transport(self, u, v, w):
        return u + w, v

    def _point_residuals(self, u):
        return {"hermiticity": fro(u - dagger(u))}

    def _tangent_residuals(self, u, v):
        return {"hermiticity": fro(v - dagger(v))}
