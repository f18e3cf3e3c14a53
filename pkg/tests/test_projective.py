import numpy as np
import pytest
from hypothesis import given, strategies as st

from hkmoment import fd
from hkmoment import projective as pj
from hkmoment.matkit import GeometryError, random_hermitian, random_su

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
seeds = st.integers(0, 2**32 - 1)


def test_point_from_vector():
    A0 = pj.point_from_vector([1, 0, 0])
    assert np.allclose(A0, np.diag([1, 0, 0]))
    z = np.array([1 + 2j, -0.5, 3j])
    assert np.allclose(pj.point_from_vector(z), pj.point_from_vector((2 - 1j) * z), atol=1e-15)
    assert np.allclose(pj.point_from_vector(np.array([1, 1]) / np.sqrt(2)), 0.5 * np.ones((2, 2)))
    with pytest.raises(GeometryError):
        pj.point_from_vector([0, 0])


def test_tangent_project_examples():
    A0 = pj.base_point(1)
    assert np.allclose(pj.tangent_project(A0, SX), SX)
    assert np.allclose(pj.tangent_project(A0, A0), 0)


@given(seeds, st.integers(1, 3))
def test_tangent_project_is_orthogonal_projection(seed, n):
    A = pj.random_point(n, seed)
    H1, H2 = random_hermitian(n + 1, seed + 1), random_hermitian(n + 1, seed + 2)
    X = pj.tangent_project(A, H1)
    assert pj.tangent_residual(A, X) <= 1e-12
    assert np.abs(pj.tangent_project(A, X) - X).max() <= 1e-12
    lhs = 2 * np.trace(X @ H2).real
    rhs = 2 * np.trace(H1 @ pj.tangent_project(A, H2)).real
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_fs_metric_and_j_examples():
    A0 = pj.base_point(1)
    assert pj.fs_metric(SX, SX) == pytest.approx(4.0)
    assert pj.fs_metric(SX, SY) == 0.0
    assert pj.fs_metric(2 * SX, SY + SX) == pytest.approx(2 * pj.fs_metric(SX, SY + SX))
    assert np.allclose(pj.jmul(A0, SX), SY)


@given(seeds, st.integers(1, 3))
def test_j_properties(seed, n):
    A = pj.random_point(n, seed)
    X, Y = pj.random_tangent(A, seed + 1), pj.random_tangent(A, seed + 2)
    assert np.abs(pj.jmul(A, pj.jmul(A, X)) + X).max() <= 1e-12
    assert abs(pj.fs_metric(pj.jmul(A, X), pj.jmul(A, Y)) - pj.fs_metric(X, Y)) <= 1e-12
    assert pj.tangent_residual(A, pj.jmul(A, X)) <= 1e-12


def test_identities_pauli():
    A0 = pj.base_point(1)
    r = pj.check_identities(A0, SX, SY)
    assert max(r.values()) <= 1e-15
    assert np.allclose(SX @ SX + SX @ SX, 2 * np.eye(2))
    r = pj.check_identities(A0, SX, SX)
    assert r["anticommutator"] <= 1e-15


@given(seeds, st.integers(1, 4))
def test_identities_random(seed, n):
    A = pj.random_point(n, seed)
    X, Y = pj.random_tangent(A, seed + 1), pj.random_tangent(A, seed + 2)
    r = pj.check_identities(A, X, Y)
    assert (r["anticommutator"] is None) == (n > 1)
    assert max(v for v in r.values() if v is not None) <= 1e-12


def test_cubic_identity_needs_orthogonality_to_jx():
    # for Y = JX the unprojected cubic expression does not vanish
    A = pj.random_point(2, 3)
    X = pj.random_tangent(A, 4)
    Y = pj.jmul(A, X)
    cubic = 2 * (X @ X @ Y + Y @ X @ X + 2 * X @ Y @ X) - np.trace(X @ X) * Y
    assert np.abs(cubic).max() > 1e-3
    assert pj.check_identities(A, X, Y)["cubic"] <= 1e-12


def test_nabla_zero_field_and_step_bounds():
    A = pj.random_point(2, 0)
    X = pj.random_tangent(A, 1)
    assert np.abs(pj.nabla(A, X, lambda B: np.zeros_like(B))).max() == 0
    with pytest.raises(GeometryError):
        pj.nabla(A, X, lambda B: B, step=0.1)


def test_nabla_second_order():
    A = pj.random_point(2, 5)
    X = pj.random_tangent(A, 6)
    u = random_su(3, 7)
    exact = pj.killing_cov_deriv(u, A, X)
    errs = [np.abs(pj.nabla(A, X, lambda B: pj.killing_field(u, B), h) - exact).max() for h in (1e-2, 5e-3)]
    assert np.log2(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.1)


@given(seeds, st.integers(1, 3))
def test_curvature_closed_form(seed, n):
    A = pj.random_point(n, seed)
    X, Z = pj.random_tangent(A, seed + 1), pj.random_tangent(A, seed + 2)
    assert np.abs(pj.curvature(A, X, X, Z)).max() <= 1e-12
    Xu = X / pj.fs_norm(X)
    JX = pj.jmul(A, Xu)
    assert pj.fs_metric(pj.curvature(A, Xu, JX, JX), Xu) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2])
def test_curvature_matches_fd(n):
    A = pj.random_point(n, 11)
    X, Y, Z = (pj.random_tangent(A, 12 + k) for k in range(3))
    R = pj.curvature(A, X, Y, Z)
    Rfd = fd.richardson(pj.curvature_fd(A, X, Y, Z, 2e-3), pj.curvature_fd(A, X, Y, Z, 1e-3))
    assert np.abs(R - Rfd).max() / np.abs(Rfd).max() <= 1e-6
    # the opposite sign is far off
    assert np.abs(pj.curvature(A, X, Y, Z, sign=-1.0) - Rfd).max() / np.abs(Rfd).max() > 1.0


def test_killing_fixed_point_and_tangency():
    u = np.diag([0.5j, -0.5j, 0])
    A0 = pj.base_point(2)
    assert np.abs(pj.killing_field(u, A0)).max() == 0
    A = pj.random_point(2, 1)
    assert pj.tangent_residual(A, pj.killing_field(random_su(3, 2), A)) <= 1e-12


@given(seeds)
def test_killing_antisymmetry(seed):
    A = pj.random_point(2, seed)
    X, Y = pj.random_tangent(A, seed + 1), pj.random_tangent(A, seed + 2)
    u = random_su(3, seed + 3)
    s = pj.fs_metric(pj.killing_cov_deriv(u, A, X), Y) + pj.fs_metric(pj.killing_cov_deriv(u, A, Y), X)
    assert abs(s) <= 1e-12


def test_killing_cov_deriv_commuting():
    A = pj.base_point(1)
    X = SX.copy()
    u = 1j * SX
    assert np.abs(pj.killing_cov_deriv(u, A, X)).max() == 0


def test_linear_hamiltonian():
    u = np.diag([0.5j, -0.5j])
    assert pj.linear_hamiltonian(u, pj.base_point(1)) == pytest.approx(-1.0)
    A = pj.random_point(2, 3)
    u = random_su(3, 4)
    vals = [pj.linear_hamiltonian(u, pj.flow(u, t, A)) for t in np.linspace(0, 3, 7)]
    assert np.ptp(vals) <= 1e-8
    Y = pj.random_tangent(A, 5)
    h = 1e-4
    d = (pj.linear_hamiltonian(u, pj.curve(A, Y, h)) - pj.linear_hamiltonian(u, pj.curve(A, Y, -h))) / (2 * h)
    assert abs(d - pj.omega(A, pj.killing_field(u, A), Y)) <= 1e-6


def test_scalar_curvature_and_eigenvalue():
    # constant holomorphic curvature 1 gives s = n(n+1)
    for n in (1, 2, 3):
        assert pj.scalar_curvature(pj.random_point(n, n)) == pytest.approx(n * (n + 1), rel=1e-12)
