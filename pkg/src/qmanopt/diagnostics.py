"""Finite-difference and residual checks for manifold primitives and gradients.

Every check draws from its own seeded generator and returns a
:class:`CheckReport` holding one measured value per trial.  Tangent vectors
are normalized to unit length in the manifold metric before any step is
taken, so step sizes mean the same thing on every kind.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .linalg import dagger, fro, herm, qr_unique, real_inner
from .manifolds import (
    PASS_TOL,
    HermitianPositiveDefinite,
    Manifold,
    ManifoldDescriptor,
    all_descriptors,
    complex_normal,
    make_manifold,
)
from .optimizers import RadamConfig, RsgdConfig, init_state, radam_step, rsgd_step

FD_STEP = 1e-5
ORDER_STEPS = (1e-1, 1e-2, 1e-3, 1e-4)
ORDER_SLOPE = (1.9, 2.3)
GRADIENT_TOL = 1e-5
GAUGE_TOL = 1e-9
TRANSPORT_TOL = 1e-9
GEODESIC_TOL = 1e-6
CONSTRAINT_STEPS = (0.01, 0.1, 1.0)
QUOTIENT_KINDS = ("density", "choi", "povm")

LossFn = Callable[[np.ndarray], tuple]


@dataclass
class CheckReport:
    name: str
    descriptor: ManifoldDescriptor
    shape: tuple
    values: list
    threshold: float
    passed: bool
    note: str = ""

    @property
    def worst(self) -> float:
        finite = [v for v in self.values if np.isfinite(v)]
        return max(finite) if finite else float("nan")

    def to_record(self) -> dict:
        return {
            "check": self.name,
            "kind": self.descriptor.kind,
            "metric": self.descriptor.metric,
            "retraction": self.descriptor.retraction,
            "shape": list(self.shape),
            "trials": len(self.values),
            "worst": _json_float(self.worst),
            "threshold": self.threshold,
            "passed": bool(self.passed),
            "note": self.note,
        }


def _json_float(x: float):
    return float(x) if np.isfinite(x) else None


def _resolve(manifold) -> Manifold:
    if isinstance(manifold, Manifold):
        return manifold
    return make_manifold(manifold)


def default_shape(kind: str, n: int = 4, p: int = 2, r: int = 2, m: int = 3) -> tuple:
    """Element shape used by the suite for each kind."""
    return {
        "stiefel": (n, p),
        "hermitian": (n, n),
        "hpd": (n, n),
        "density": (n, r),
        "choi": (n * n, r),
        "povm": (m, n, n),
    }[kind]


def unit_tangent(manifold: Manifold, x: np.ndarray, rng) -> np.ndarray:
    """Random tangent with unit norm in the manifold metric, per copy."""
    v = manifold.random_tangent(x, rng)
    norm = np.sqrt(manifold.inner(x, v, v))
    return v / manifold._expand(np.maximum(norm, 1e-300))


def _total(x) -> float:
    return float(np.sum(x))


# test losses


def linear_loss(g: np.ndarray) -> LossFn:
    """f(X) = Re <G, X>."""

    def fn(x):
        return _total(real_inner(g, x, x.ndim)), g

    return fn


def quadratic_loss(h: np.ndarray, y: np.ndarray) -> LossFn:
    """f(X) = Re <X - Y, H (X - Y)> with H Hermitian acting on the left."""
    h = herm(h)

    def fn(x):
        d = x - y
        hd = h @ d
        return _total(real_inner(d, hd, d.ndim)), 2.0 * hd

    return fn


def invariant_loss(h: np.ndarray, t: np.ndarray) -> LossFn:
    """Gauge-invariant loss of P = A A^dagger: Re Tr(H P) + |P - T|^2 / 2."""
    h, t = herm(h), herm(t)

    def fn(a):
        p = a @ dagger(a)
        gp = h + p - t
        value = np.sum(real_inner(h, p)) + 0.5 * np.sum(fro(p - t) ** 2)
        return float(value), 2.0 * gp @ a

    return fn


def _test_losses(x: np.ndarray, rng) -> dict:
    n = x.shape[-2]
    return {
        "linear": linear_loss(complex_normal(rng, x.shape)),
        "quadratic": quadratic_loss(
            complex_normal(rng, x.shape[:-2] + (n, n)), complex_normal(rng, x.shape)
        ),
    }


# checks


def gradient_check(
    manifold,
    loss: LossFn,
    x: np.ndarray,
    trials: int = 10,
    seed=0,
    step: float = FD_STEP,
    threshold: float = GRADIENT_TOL,
    name: str = "gradient",
) -> CheckReport:
    """Compare inner(x, rgrad, v) with central differences along retraction curves.

    The reported value is |inner - fd| / |fd| per random tangent v.
    """
    manifold = _resolve(manifold)
    rng = np.random.default_rng(seed)
    _, egrad = loss(x)
    rgrad = manifold.egrad_to_rgrad(x, egrad)
    values = []
    for _ in range(trials):
        v = unit_tangent(manifold, x, rng)
        predicted = _total(manifold.inner(x, rgrad, v))
        f_plus = loss(manifold.retraction(x, step * v))[0]
        f_minus = loss(manifold.retraction(x, -step * v))[0]
        fd = (f_plus - f_minus) / (2 * step)
        values.append(abs(predicted - fd) / max(abs(fd), 1e-300))
    return CheckReport(
        name, manifold.descriptor, x.shape, values, threshold, max(values) < threshold
    )


def constraint_check(manifold, shape: tuple, trials: int = 100, seed=0) -> CheckReport:
    """check_point / check_tangent after random, proj, retraction and vector_transport."""
    manifold = _resolve(manifold)
    rng = np.random.default_rng(seed)
    values = []
    for _ in range(trials):
        x = manifold.random(shape, rng)
        worst = max(manifold.check_point(x).values())
        v = unit_tangent(manifold, x, rng)
        w = unit_tangent(manifold, x, rng)
        worst = max(worst, *manifold.check_tangent(x, v).values())
        p = manifold.proj(x, complex_normal(rng, shape))
        worst = max(worst, *manifold.check_tangent(x, p).values())
        worst = max(worst, float(np.max(fro(manifold.proj(x, p) - p))))
        for t in CONSTRAINT_STEPS:
            y = manifold.retraction(x, t * v)
            worst = max(worst, *manifold.check_point(y).values())
            tw = manifold.vector_transport(x, w, t * v)
            worst = max(worst, *manifold.check_tangent(y, tw).values())
        values.append(worst)
    return CheckReport(
        "constraints", manifold.descriptor, shape, values, PASS_TOL, max(values) < PASS_TOL
    )


def _slope(ts, rs) -> float:
    return float(np.polyfit(np.log(ts), np.log(rs), 1)[0])


def retraction_order_check(manifold, shape: tuple, trials: int = 10, seed=0) -> CheckReport:
    """Log-log slope of |R(x, tv) - (x + tv)| against t; first order means slope 2.

    Retractions that are exactly x + tv (residual at roundoff for every t) are
    flagged as exact and pass without a slope.
    """
    manifold = _resolve(manifold)
    rng = np.random.default_rng(seed)
    ts = np.array(ORDER_STEPS)
    values, exact = [], 0
    for _ in range(trials):
        x = manifold.random(shape, rng)
        v = unit_tangent(manifold, x, rng)
        rs = np.array([float(np.sqrt(np.sum(fro(manifold.retraction(x, t * v) - x - t * v) ** 2)))
                       for t in ts])
        scale = float(np.sqrt(np.sum(fro(x) ** 2)))
        if np.all(rs <= 1e-14 * max(scale, 1.0)):
            exact += 1
            values.append(float("nan"))
        else:
            values.append(_slope(ts, rs))
    slopes = [s for s in values if np.isfinite(s)]
    lo, hi = ORDER_SLOPE
    passed = all(lo <= s <= hi for s in slopes)
    note = f"exact in {exact}/{trials} trials" if exact else ""
    return CheckReport("retraction_order", manifold.descriptor, shape, values, lo, passed, note)


def geodesic_check(manifold, shape: tuple, trials: int = 10, seed=0, step: float = 1e-4) -> CheckReport:
    """Exponential-map initial conditions: Exp(0) = x and d/dt Exp(tv) at 0 equals v."""
    manifold = _resolve(manifold)
    rng = np.random.default_rng(seed)
    values = []
    for _ in range(trials):
        x = manifold.random(shape, rng)
        v = unit_tangent(manifold, x, rng)
        velocity = (manifold.retraction(x, step * v) - manifold.retraction(x, -step * v)) / (2 * step)
        start = manifold.retraction(x, 0 * v)
        err = max(float(np.max(fro(velocity - v) / fro(v))), float(np.max(fro(start - x) / fro(x))))
        values.append(err)
    return CheckReport(
        "geodesic", manifold.descriptor, shape, values, GEODESIC_TOL, max(values) < GEODESIC_TOL
    )


def transport_checks(manifold, shape: tuple, trials: int = 10, seed=0) -> CheckReport:
    """Tangency at the destination, linearity, transport along zero, and isometry.

    Isometry is only required where transport is parallel (hpd, hermitian).
    """
    manifold = _resolve(manifold)
    rng = np.random.default_rng(seed)
    isometric = manifold.kind in ("hpd", "hermitian")
    values = []
    for _ in range(trials):
        x = manifold.random(shape, rng)
        v1, v2, w = (unit_tangent(manifold, x, rng) for _ in range(3))
        alpha = float(rng.standard_normal())
        y = manifold.retraction(x, 0.5 * w)
        t1 = manifold.vector_transport(x, v1, 0.5 * w)
        t2 = manifold.vector_transport(x, v2, 0.5 * w)
        combo = manifold.vector_transport(x, alpha * v1 + v2, 0.5 * w)
        errs = [max(manifold.check_tangent(y, t1).values())]
        errs.append(float(np.max(fro(combo - alpha * t1 - t2))))
        errs.append(float(np.max(fro(manifold.vector_transport(x, v1, 0 * w) - v1))))
        if isometric:
            before = manifold.inner(x, v1, v2)
            after = manifold.inner(y, t1, t2)
            errs.append(float(np.max(np.abs(after - before))))
        values.append(max(errs))
    return CheckReport(
        "transport", manifold.descriptor, shape, values, TRANSPORT_TOL, max(values) < TRANSPORT_TOL
    )


def random_gauge(manifold: Manifold, x: np.ndarray, rng) -> np.ndarray:
    """Right unitary gauge: r x r for density/choi, one n x n block per POVM element."""
    k = x.shape[-1]
    q, _ = qr_unique(complex_normal(rng, x.shape[:-2] + (k, k)))
    return q


def downstream(manifold: Manifold, a: np.ndarray) -> np.ndarray:
    return a @ dagger(a)


def gauge_invariance_check(
    manifold,
    shape: tuple,
    trials: int = 10,
    seed=0,
    loss_factory: Optional[Callable] = None,
    steps: int = 3,
    lr: float = 0.05,
) -> CheckReport:
    """Run rsgd and radam from A and from AQ; compare the downstream objects.

    ``loss_factory(rng, a)`` builds the loss; the default is a random
    gauge-invariant quadratic in A A^dagger.  A gauge-dependent loss serves as
    a negative control.
    """
    manifold = _resolve(manifold)
    rng = np.random.default_rng(seed)
    values = []
    for _ in range(trials):
        a = manifold.random(shape, rng)
        q = random_gauge(manifold, a, rng)
        if loss_factory is None:
            n = shape[-2]
            batch = a.shape[:-2]
            loss = invariant_loss(complex_normal(rng, batch + (n, n)), complex_normal(rng, batch + (n, n)))
        else:
            loss = loss_factory(rng, a)
        worst = 0.0
        for step_fn, config in ((rsgd_step, RsgdConfig(lr)), (radam_step, RadamConfig(lr))):
            adam = step_fn is radam_step
            xs = [a.copy(), a @ q]
            states = [init_state(manifold, xs[0], adam), init_state(manifold, xs[1], adam)]
            for _ in range(steps):
                for i in range(2):
                    xs[i], states[i] = step_fn(manifold, config, states[i], xs[i], loss(xs[i])[1])
                dev = float(np.max(fro(downstream(manifold, xs[0]) - downstream(manifold, xs[1]))))
                worst = max(worst, dev)
        values.append(worst)
    return CheckReport(
        "gauge_invariance", manifold.descriptor, shape, values, GAUGE_TOL, max(values) < GAUGE_TOL
    )


def hpd_completeness_check(
    manifold, n: int = 4, norms=(1.0, 10.0, 100.0, 1000.0), trials: int = 20, seed=0
) -> CheckReport:
    """Exp_x(v) stays positive definite for large unit-metric steps, via the log-domain spectrum."""
    manifold = _resolve(manifold)
    if not isinstance(manifold, HermitianPositiveDefinite):
        raise TypeError("completeness check applies to the hpd kind only")
    rng = np.random.default_rng(seed)
    values = []
    for _ in range(trials):
        x = manifold.random((n, n), rng)
        v = unit_tangent(manifold, x, rng)
        ok = all(np.all(np.isfinite(manifold.exp_log_spectrum(x, s * v))) for s in norms)
        values.append(0.0 if ok else 1.0)
    return CheckReport(
        "completeness", manifold.descriptor, (n, n), values, 0.5, max(values) < 0.5
    )


def run_suite(
    descriptors=None,
    n: int = 4,
    p: int = 2,
    r: int = 2,
    m: int = 3,
    trials: int = 100,
    seed=0,
    batch: tuple = (),
) -> list:
    """Full diagnostics for each descriptor; each check gets its own seeded stream."""
    descriptors = all_descriptors() if descriptors is None else descriptors
    seeds = iter(np.random.SeedSequence(seed).spawn(64 * max(len(descriptors), 1)))
    small = max(1, trials // 10)
    reports = []
    for desc in descriptors:
        manifold = make_manifold(desc)
        shape = tuple(batch) + default_shape(manifold.kind, n, p, r, m)
        manifold.validate_shape(shape)
        reports.append(constraint_check(manifold, shape, trials, next(seeds)))
        x = manifold.random(shape, next(seeds))
        for name, loss in _test_losses(x, np.random.default_rng(next(seeds))).items():
            reports.append(gradient_check(manifold, loss, x, small, next(seeds), name=f"gradient_{name}"))
        reports.append(retraction_order_check(manifold, shape, small, next(seeds)))
        reports.append(transport_checks(manifold, shape, small, next(seeds)))
        if manifold.kind == "hpd":
            reports.append(geodesic_check(manifold, shape, small, next(seeds)))
            reports.append(hpd_completeness_check(manifold, n, trials=small, seed=next(seeds)))
        if manifold.kind in QUOTIENT_KINDS:
            reports.append(gauge_invariance_check(manifold, shape, small, next(seeds)))
    return reports


__all__ = [
    "CheckReport",
    "constraint_check",
    "default_shape",
    "gauge_invariance_check",
    "geodesic_check",
    "gradient_check",
    "hpd_completeness_check",
    "invariant_loss",
    "linear_loss",
    "quadratic_loss",
    "retraction_order_check",
    "run_suite",
    "transport_checks",
    "unit_tangent",
]
