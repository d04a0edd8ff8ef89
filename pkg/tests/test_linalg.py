import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given

from conftest import cnormal, seeds
from qmanopt import linalg as la
from qmanopt.errors import DegeneracyError, PreconditionError, ShapeError


def random_hpd(rng, n):
    g = cnormal(rng, (n, n))
    return g @ g.conj().T + 0.5 * np.eye(n)


def test_kron_examples():
    assert np.allclose(la.kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.allclose(la.kron(np.diag([1, 2]), np.eye(2)), np.diag([1, 1, 2, 2]))
    assert la.kron(np.ones((2, 2)), np.ones((3, 3))).shape == (6, 6)


@given(seeds)
def test_kron_matches_numpy(seed):
    rng = np.random.default_rng(seed)
    a, b = cnormal(rng, (2, 3)), cnormal(rng, (3, 2))
    assert np.allclose(la.kron(a, b), np.kron(a, b), atol=1e-14)


def test_kron_rejects_non_matrix():
    with pytest.raises(ShapeError):
        la.kron(np.ones(3), np.eye(2))


def test_partial_trace_examples():
    assert np.allclose(la.partial_trace_first(np.eye(4), 2), 2 * np.eye(2))
    ident = sum(
        np.kron(np.outer(np.eye(2)[k], np.eye(2)[l]), np.outer(np.eye(2)[k], np.eye(2)[l]))
        for k in range(2)
        for l in range(2)
    )
    assert np.allclose(la.partial_trace_first(ident, 2), np.eye(2), atol=1e-15)
    with pytest.raises(ShapeError):
        la.partial_trace_first(np.eye(5), 2)


@given(seeds)
def test_partial_trace_preserves_trace(seed):
    c = cnormal(np.random.default_rng(seed), (9, 9))
    assert abs(np.trace(la.partial_trace_first(c, 3)) - np.trace(c)) < 1e-12


def test_polar_examples(rng):
    q, _ = np.linalg.qr(cnormal(rng, (5, 3)))
    assert np.allclose(la.polar_isometry(q), q, atol=1e-12)
    assert np.allclose(la.polar_isometry(np.diag([2.0, 3.0])), np.eye(2))
    with pytest.raises(DegeneracyError):
        la.polar_isometry(np.zeros((3, 2)))


@given(seeds)
def test_polar_is_isometric_and_closest(seed):
    rng = np.random.default_rng(seed)
    m = cnormal(rng, (6, 3))
    u = la.polar_isometry(m)
    assert np.linalg.norm(u.conj().T @ u - np.eye(3)) < 1e-10
    # m = U P with P positive semidefinite Hermitian
    p = u.conj().T @ m
    assert np.linalg.norm(p - p.conj().T) < 1e-10
    assert np.linalg.eigvalsh(la.herm(p))[0] > 0


def test_qr_examples(rng):
    q0, _ = np.linalg.qr(cnormal(rng, (4, 2)))
    q0 = la.qr_unique(q0)[0]
    q, r = la.qr_unique(q0)
    assert np.allclose(q, q0, atol=1e-12) and np.allclose(r, np.eye(2), atol=1e-12)
    q, r = la.qr_unique(np.array([[-2.0]]))
    assert np.allclose(q, [[-1.0]]) and np.allclose(r, [[2.0]])


@given(seeds)
def test_qr_unique_properties(seed):
    m = cnormal(np.random.default_rng(seed), (4, 2))
    q, r = la.qr_unique(m)
    assert np.linalg.norm(q.conj().T @ q - np.eye(2)) < 1e-10
    assert np.linalg.norm(q @ r - m) < 1e-10 * np.linalg.norm(m)
    assert np.all(np.diag(r).imag == 0) and np.all(np.diag(r).real > 0)
    assert np.allclose(np.tril(r, -1), 0)


def test_eigh_examples():
    assert np.allclose(la.eigh(np.eye(3))[0], 1)
    assert np.allclose(la.eigh(np.array([[0, 1], [1, 0]]))[0], [-1, 1])
    assert np.allclose(la.eigh(np.diag([3.0, 1.0, 2.0]))[0], [1, 2, 3])
    with pytest.raises(PreconditionError):
        la.eigh(np.array([[0, 1], [0, 0]]))


@given(seeds)
def test_eigh_reconstructs(seed):
    h = la.herm(cnormal(np.random.default_rng(seed), (5, 5)))
    lam, u = la.eigh(h)
    assert np.linalg.norm(u @ np.diag(lam) @ u.conj().T - h) < 1e-10 * np.linalg.norm(h)
    assert np.linalg.norm(u.conj().T @ u - np.eye(5)) < 1e-10
    assert np.all(np.diff(lam) >= 0)


def test_cholesky_examples():
    assert np.allclose(la.cholesky_lower(np.eye(3)), np.eye(3))
    assert np.allclose(la.cholesky_lower(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    l = la.cholesky_lower(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert np.isclose(l[0, 0], np.sqrt(2))
    with pytest.raises(DegeneracyError):
        la.cholesky_lower(np.diag([1.0, -1.0]))


def test_sylvester_examples():
    rhs = np.array([[0, 2j], [2j, 0]])
    assert np.allclose(la.solve_sylvester_skew(np.eye(2), rhs), rhs / 2)
    omega = la.solve_sylvester_skew(np.diag([1.0, 3.0]), rhs)
    assert np.allclose(omega, [[0, 0.5j], [0.5j, 0]])


@given(seeds)
def test_sylvester_against_scipy(seed):
    rng = np.random.default_rng(seed)
    p = random_hpd(rng, 4)
    rhs = la.antiherm(cnormal(rng, (4, 4)))
    omega = la.solve_sylvester_skew(p, rhs)
    assert np.linalg.norm(p @ omega + omega @ p - rhs) < 1e-10
    assert np.linalg.norm(omega + omega.conj().T) < 1e-12
    assert np.allclose(omega, sla.solve_sylvester(p, p, rhs), atol=1e-10)


def test_sylvester_rejects_indefinite():
    with pytest.raises(DegeneracyError):
        la.solve_sylvester_skew(np.diag([1.0, -1.0]), np.zeros((2, 2)))


def test_fun_herm_examples():
    assert np.allclose(la.fun_herm(np.diag([1, np.e]), "log"), np.diag([0, 1]))
    v = la.herm(cnormal(np.random.default_rng(0), (3, 3)))
    assert np.allclose(la.dfun_herm(np.eye(3), "log", v), v, atol=1e-14)
    with pytest.raises(DegeneracyError):
        la.fun_herm(np.diag([1.0, 0.0]), "log")


@given(seeds)
def test_fun_herm_against_scipy(seed):
    rng = np.random.default_rng(seed)
    s = random_hpd(rng, 4)
    assert np.allclose(la.fun_herm(s, "log"), sla.logm(s), atol=1e-10)
    h = la.herm(cnormal(rng, (4, 4)))
    assert np.allclose(la.fun_herm(h, "exp"), sla.expm(h), atol=1e-10)


@given(seeds)
def test_dfun_exp_against_scipy_frechet(seed):
    rng = np.random.default_rng(seed)
    h = la.herm(cnormal(rng, (4, 4)))
    v = la.herm(cnormal(rng, (4, 4)))
    expected = sla.expm_frechet(h, v, compute_expm=False)
    assert np.allclose(la.dfun_herm(h, "exp", v), expected, atol=1e-9)


@given(seeds)
def test_dexp_inverts_dlog(seed):
    rng = np.random.default_rng(seed)
    s = random_hpd(rng, 4)
    v = la.herm(cnormal(rng, (4, 4)))
    back = la.dfun_herm(la.fun_herm(s, "log"), "exp", la.dfun_herm(s, "log", v))
    assert np.linalg.norm(back - v) < 1e-9 * max(np.linalg.norm(v), 1)


@given(seeds)
def test_dfun_linear_in_direction(seed):
    rng = np.random.default_rng(seed)
    s = random_hpd(rng, 3)
    v, w = la.herm(cnormal(rng, (3, 3))), la.herm(cnormal(rng, (3, 3)))
    alpha = rng.standard_normal()
    lhs = la.dfun_herm(s, "log", alpha * v + w)
    rhs = alpha * la.dfun_herm(s, "log", v) + la.dfun_herm(s, "log", w)
    assert np.linalg.norm(lhs - rhs) < 1e-12 * max(1, np.linalg.norm(lhs))


def test_dfun_degenerate_spectrum_uses_derivative():
    # repeated eigenvalue 2: the limit of the divided difference is f'(2)
    v = la.herm(cnormal(np.random.default_rng(3), (2, 2)))
    assert np.allclose(la.dfun_herm(2 * np.eye(2), "log", v), v / 2)


def test_trace_norm_examples():
    assert la.trace_norm(np.zeros((3, 3))) == 0
    assert np.isclose(la.trace_norm(np.diag([3.0, -4.0])), 7)
    q, _ = np.linalg.qr(cnormal(np.random.default_rng(0), (4, 4)))
    assert np.isclose(la.trace_norm(q), 4)


def test_batched_kernels_match_loops(rng):
    m = cnormal(rng, (3, 5, 2))
    batched = la.polar_isometry(m)
    for i in range(3):
        assert np.allclose(batched[i], la.polar_isometry(m[i]), atol=1e-14)
