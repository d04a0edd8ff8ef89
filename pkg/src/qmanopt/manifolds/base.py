"""Uniform manifold interface.

Points, tangent vectors and Euclidean gradients are complex arrays whose
trailing ``element_ndim`` axes hold one manifold element; leading axes
enumerate copies in a direct product and every primitive acts on each copy
independently.

Euclidean gradient convention: the gradient E of a real function f at X is
the array with ``f(X + d) = f(X) + Re sum(conj(E) * d) + O(|d|^2)``.  All
``egrad_to_rgrad`` implementations assume it.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import PreconditionError, ShapeError
from ..linalg import real_inner

PASS_TOL = 1e-8

Report = dict


@dataclass(frozen=True)
class ManifoldDescriptor:
    kind: str
    metric: Optional[str] = None
    retraction: Optional[str] = None


def passes(report: Report, tol: float = PASS_TOL) -> bool:
    """A residual report passes when every residual is below ``tol``."""
    return all(value < tol for value in report.values())


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    shape = tuple(shape)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _max(x) -> float:
    return float(np.max(x)) if np.size(x) else 0.0


class Manifold(abc.ABC):
    """Base class; subclasses implement the closed-form primitives."""

    kind: str = ""
    element_ndim: int = 2
    metric: Optional[str] = None
    retraction_method: Optional[str] = None

    @property
    def descriptor(self) -> ManifoldDescriptor:
        return ManifoldDescriptor(self.kind, self.metric, self.retraction_method)

    def __repr__(self) -> str:
        opts = [f"metric={self.metric!r}"] if self.metric else []
        if self.retraction_method:
            opts.append(f"retraction={self.retraction_method!r}")
        return f"{type(self).__name__}({', '.join(opts)})"

    # shape handling

    @abc.abstractmethod
    def validate_shape(self, shape: tuple) -> None:
        """Raise ShapeError unless ``shape[-element_ndim:]`` is admissible."""

    def batch_shape(self, x: np.ndarray) -> tuple:
        return x.shape[: x.ndim - self.element_ndim]

    def _expand(self, scalars: np.ndarray) -> np.ndarray:
        """Broadcast per-copy scalars against element axes."""
        return np.asarray(scalars)[(...,) + (None,) * self.element_ndim]

    # primitives

    def random(self, shape, rng=None) -> np.ndarray:
        shape = tuple(int(s) for s in shape)
        if len(shape) < self.element_ndim:
            raise ShapeError(f"{self.kind}: shape {shape} has too few axes")
        self.validate_shape(shape)
        return self._random(shape, np.random.default_rng(rng))

    @abc.abstractmethod
    def _random(self, shape: tuple, rng: np.random.Generator) -> np.ndarray: ...

    def random_tangent(self, u: np.ndarray, rng=None) -> np.ndarray:
        u = np.asarray(u, dtype=np.complex128)
        report = self.check_point(u)
        if not passes(report):
            raise PreconditionError(f"{self.kind}: point is off the manifold: {report}")
        rng = np.random.default_rng(rng)
        return self.proj(u, complex_normal(rng, u.shape))

    @abc.abstractmethod
    def proj(self, u: np.ndarray, w: np.ndarray) -> np.ndarray: ...

    def inner(self, u: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
        return real_inner(v, w, self.element_ndim)

    def egrad_to_rgrad(self, u: np.ndarray, e: np.ndarray) -> np.ndarray:
        return self.proj(u, e)

    @abc.abstractmethod
    def retraction(self, u: np.ndarray, v: np.ndarray) -> np.ndarray: ...

    def vector_transport(self, u: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
        return self.proj(self.retraction(u, w), v)

    def retraction_transport(self, u, v, w):
        """Retract u along w and transport v there; returns (new point, transported v)."""
        x = self.retraction(u, w)
        return x, self.proj(x, v)

    # residual reports

    @abc.abstractmethod
    def _point_residuals(self, u: np.ndarray) -> dict: ...

    @abc.abstractmethod
    def _tangent_residuals(self, u: np.ndarray, v: np.ndarray) -> dict: ...

    def check_point(self, u) -> Report:
        u = np.asarray(u, dtype=np.complex128)
        return {k: _max(val) for k, val in self._point_residuals(u).items()}

    def check_tangent(self, u, v) -> Report:
        u = np.asarray(u, dtype=np.complex128)
        v = np.asarray(v, dtype=np.complex128)
        scale = np.maximum(np.sqrt(real_inner(v, v, self.element_ndim)), 1.0)
        return {k: _max(val / scale) for k, val in self._tangent_residuals(u, v).items()}


def flag(condition) -> np.ndarray:
    """Map a boolean failure condition to a residual of 1.0 (fail) or 0.0."""
    return np.where(condition, 1.0, 0.0)
