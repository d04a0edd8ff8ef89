"""Riemannian optimization on matrix manifolds of quantum mechanics."""

from . import linalg
from .errors import (
    ConfigurationError,
    DegeneracyError,
    LikelihoodDegeneracyError,
    PreconditionError,
    QManOptError,
    ShapeError,
)
from .manifolds import ManifoldDescriptor, make_manifold

__version__ = "0.1.0"
