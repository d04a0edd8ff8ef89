from ..errors import ConfigurationError
from .base import PASS_TOL, Manifold, ManifoldDescriptor, complex_normal, passes
from .hermitian import Hermitian
from .hpd import HermitianPositiveDefinite
from .quotient import POVM, ChoiMatrix, DensityMatrix
from .stiefel import Stiefel

KINDS = {
    "stiefel": Stiefel,
    "hermitian": Hermitian,
    "hpd": HermitianPositiveDefinite,
    "density": DensityMatrix,
    "choi": ChoiMatrix,
    "povm": POVM,
}


def make_manifold(kind, metric=None, retraction=None) -> Manifold:
    """Build a manifold from a kind name or a ManifoldDescriptor."""
    if isinstance(kind, ManifoldDescriptor):
        kind, metric, retraction = kind.kind, kind.metric, kind.retraction
    if kind not in KINDS:
        raise ConfigurationError(f"unknown manifold kind {kind!r}; expected one of {sorted(KINDS)}")
    cls = KINDS[kind]
    if kind == "stiefel":
        return cls(metric or "euclidean", retraction or "svd")
    if kind == "hpd":
        return cls(metric or "log_cholesky", retraction)
    if metric is not None or retraction is not None:
        raise ConfigurationError(f"{kind} takes no metric/retraction options")
    return cls()


def all_descriptors() -> list:
    """Every kind paired with every metric/retraction option."""
    out = [
        ManifoldDescriptor("stiefel", m, r)
        for m in ("euclidean", "canonical")
        for r in ("svd", "qr", "cayley")
    ]
    out.append(ManifoldDescriptor("hermitian"))
    out += [ManifoldDescriptor("hpd", m) for m in ("log_cholesky", "log_euclidean")]
    out += [ManifoldDescriptor(k) for k in ("density", "choi", "povm")]
    return out


__all__ = [
    "KINDS",
    "PASS_TOL",
    "POVM",
    "ChoiMatrix",
    "DensityMatrix",
    "Hermitian",
    "HermitianPositiveDefinite",
    "Manifold",
    "ManifoldDescriptor",
    "Stiefel",
    "all_descriptors",
    "complex_normal",
    "make_manifold",
    "passes",
]
