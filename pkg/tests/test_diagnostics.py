import numpy as np
import pytest

from conftest import cnormal
from qmanopt.diagnostics import (
    ORDER_SLOPE,
    CheckReport,
    constraint_check,
    default_shape,
    gauge_invariance_check,
    geodesic_check,
    gradient_check,
    hpd_completeness_check,
    invariant_loss,
    linear_loss,
    quadratic_loss,
    retraction_order_check,
    run_suite,
    transport_checks,
)
from qmanopt.manifolds import all_descriptors, make_manifold


def scaled(loss, factor):
    def fn(x):
        value, grad = loss(x)
        return value, factor * grad

    return fn


def test_linear_loss_on_hermitian_is_exact(rng):
    m = make_manifold("hermitian")
    x = m.random((4, 4), rng)
    report = gradient_check(m, linear_loss(cnormal(rng, (4, 4))), x, trials=20)
    assert report.passed and report.worst < 1e-9


@pytest.mark.parametrize("desc", all_descriptors(), ids=str)
def test_quadratic_gradient_on_every_kind(desc, rng):
    m = make_manifold(desc)
    shape = default_shape(m.kind)
    x = m.random(shape, rng)
    loss = quadratic_loss(cnormal(rng, (shape[-2], shape[-2])), cnormal(rng, shape))
    assert gradient_check(m, loss, x, trials=10).worst < 1e-5


def test_misscaled_gradient_is_detected(rng):
    m = make_manifold("stiefel")
    x = m.random((4, 2), rng)
    loss = quadratic_loss(cnormal(rng, (4, 4)), cnormal(rng, (4, 2)))
    report = gradient_check(m, scaled(loss, 2.0), x, trials=10)
    assert not report.passed
    assert np.allclose(report.values, 1.0, atol=1e-4)


def test_hermitian_retraction_is_flagged_exact():
    report = retraction_order_check("hermitian", (3, 3), trials=3)
    assert report.passed and "exact" in report.note


@pytest.mark.parametrize("desc", ["stiefel", "density"])
def test_retraction_order_slope(desc):
    m = make_manifold(desc)
    report = retraction_order_check(m, default_shape(m.kind), trials=5)
    assert report.passed
    assert all(ORDER_SLOPE[0] <= v <= ORDER_SLOPE[1] for v in report.values)


@pytest.mark.parametrize("metric", ["log_cholesky", "log_euclidean"])
def test_hpd_transport_geodesic_and_completeness(metric):
    m = make_manifold("hpd", metric)
    assert transport_checks(m, (3, 3), trials=5).passed
    assert geodesic_check(m, (3, 3), trials=5).passed
    assert hpd_completeness_check(m, n=3, trials=5).passed


def test_completeness_check_rejects_other_kinds():
    with pytest.raises(TypeError):
        hpd_completeness_check("stiefel")


@pytest.mark.parametrize("kind", ["density", "choi", "povm"])
def test_constraints_hold(kind):
    assert constraint_check(kind, default_shape(kind, n=3), trials=10).passed


def test_zero_gradient_gauge_invariance_is_exact():
    def zero(rng, a):
        return lambda x: (0.0, np.zeros_like(x))

    report = gauge_invariance_check("density", (3, 2), trials=5, loss_factory=zero)
    assert report.worst < 1e-13


def test_invariant_loss_on_choi_with_full_rank():
    report = gauge_invariance_check("choi", (4, 4), trials=5)
    assert report.passed and report.worst < 1e-9


def test_invariant_loss_gradient(rng):
    m = make_manifold("density")
    x = m.random((3, 2), rng)
    loss = invariant_loss(cnormal(rng, (3, 3)), cnormal(rng, (3, 3)))
    assert gradient_check(m, loss, x, trials=10).passed


def test_gauge_dependent_loss_is_flagged():
    def dependent(rng, a):
        return linear_loss(cnormal(rng, a.shape))

    report = gauge_invariance_check("povm", (2, 2, 2), trials=5, loss_factory=dependent)
    assert not report.passed and report.worst > 1e-4


def test_report_record_fields():
    report = CheckReport("x", make_manifold("stiefel").descriptor, (4, 2), [1e-12, float("nan")], 1e-9, True)
    record = report.to_record()
    assert record["worst"] == 1e-12 and record["trials"] == 2
    assert record["kind"] == "stiefel" and record["shape"] == [4, 2]


def test_suite_passes_and_is_deterministic():
    descriptors = [make_manifold(k).descriptor for k in ("stiefel", "hpd", "povm")]
    first = [r.to_record() for r in run_suite(descriptors, n=3, trials=10, seed=5)]
    second = [r.to_record() for r in run_suite(descriptors, n=3, trials=10, seed=5)]
    assert first == second
    assert all(r["passed"] for r in first)


def test_suite_supports_batches():
    reports = run_suite([make_manifold("choi").descriptor], n=2, trials=10, batch=(2,))
    assert all(r.passed for r in reports)
    assert all(r.shape == (2, 4, 2) for r in reports)
