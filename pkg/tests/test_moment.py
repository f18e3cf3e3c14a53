import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hkmoment import calabi as cb
from hkmoment import moment as mm
from hkmoment import projective as pj
from hkmoment.matkit import GeometryError, matrix_to_json, random_su, su_basis

U_Z = np.diag([0.5j, -0.5j])


def zero_section(n):
    A = pj.base_point(n)
    return cb.TBPoint(A, np.zeros_like(A))


def test_moment_map_at_base_point():
    assert mm.moment_map(U_Z, zero_section(1)) == pytest.approx((0.0, -1.0, 0.0), abs=1e-15)


def test_gamma_lift_vanishes_at_fixed_point():
    u = np.diag([0.5j, -0.25j, -0.25j])
    assert mm.gamma_lift(u, zero_section(2)).max_abs() == 0


def test_gradient_of_constant():
    P = cb.random_tb_point(2, 1)
    g = mm.gradient(P, lambda Q: 3.0)
    assert g.max_abs() == 0


def test_gradient_f3_at_zero_section():
    # X = 0: grad f3 = (J gamma)^v = K* Gamma
    P = cb.TBPoint(pj.random_point(2, 3), np.zeros((3, 3), dtype=complex))
    u = random_su(3, 4)
    Gam = mm.gamma_lift(u, P)
    g3 = mm.gradient(P, lambda Q: mm.moment_map(u, Q).f3)
    assert (g3 - cb.Kstar(Gam)).max_abs() <= 1e-8 * Gam.max_abs()
    assert (cb.Kstar(Gam) - cb.lift_v(P, pj.jmul(P.A, Gam.hor))).max_abs() <= 1e-15


@pytest.mark.parametrize("n", [1, 2])
def test_hamiltonian_identity(n):
    rng = np.random.default_rng(n)
    for P in mm.sample_points(n, 4, rng):
        r = mm.check_hamiltonian(random_su(n + 1, rng), P)
        assert r.passed, r.line()
        assert r.extra["order"] >= 1.9


def test_hamiltonian_residual_order():
    P = mm.sample_points(1, 1, 5)[0]
    u = random_su(2, 6)
    r1 = np.linalg.norm(mm.hamiltonian_residuals(u, P, 1e-3))
    r2 = np.linalg.norm(mm.hamiltonian_residuals(u, P, 5e-4))
    assert np.log2(r1 / r2) == pytest.approx(2.0, abs=0.1)


def test_laplacian_of_constant():
    P = mm.sample_points(1, 1, 0)[0]
    assert abs(mm.laplace_beltrami(P, lambda Q: 1.0)) == 0


def test_harmonic_morphism_n1():
    reps = mm.check_harmonic_morphism(random_su(2, 0), samples=4, seed=3)
    assert all(r.passed for r in reps), [r.line() for r in reps]


def test_critical_point_gradients_vanish():
    u = U_Z
    r = mm.harmonic_morphism_at(u, zero_section(1))
    assert r["lambda2"] <= 1e-10
    assert np.abs(r["gram"]).max() <= 1e-10


def test_pulled_back_hamiltonian_not_harmonic():
    P = mm.sample_points(1, 1, 8, xmin=1.0)[0]
    u = random_su(2, 9)
    L = mm.laplace_beltrami(P, lambda Q: pj.linear_hamiltonian(u, Q.A))
    assert abs(L) > 1e-2


def test_lifted_flow_is_triholomorphic_isometry():
    P = mm.sample_points(2, 1, 2)[0]
    r = mm.lifted_flow_residuals(random_su(3, 3), P)
    assert max(r.values()) <= 1e-6


def test_cauchy_riemann():
    P = mm.sample_points(2, 1, 4)[0]
    assert mm.cauchy_riemann_residual(random_su(3, 5), P) <= 1e-8


@pytest.mark.parametrize("n", [1, 2])
def test_eigenfunction(n):
    reps = mm.eigenfunction_check(random_su(n + 1, 7), samples=10)
    assert all(r.passed for r in reps), [r.line() for r in reps]
    lam = reps[0].extra["lambda"]
    assert lam == pytest.approx(n + 1, rel=1e-3)


def test_fibre_rotation_j_passes_i_fails():
    reps = {r.name: r for r in mm.fibre_rotation_check(1, samples=2)}
    assert reps["moment.fibre_rotation_J_hamiltonian"].passed
    assert reps["moment.fibre_rotation_J_laplacian"].passed
    assert reps["moment.fibre_rotation_I_not_closed"].passed
    assert reps["moment.fibre_rotation_I_not_closed"].extra["min_curl"] > 1e-2


def test_s2_north_pole():
    p, e, b = np.array([0, 0, 1.0]), np.zeros(3), np.array([0, 0, 1.0])
    P = mm.s2_convert(p, e)
    assert np.allclose(P.A, pj.base_point(1))
    assert mm.s2_moment(b, p, e) == pytest.approx((0.0, 1.0, 0.0))
    assert mm.moment_array(mm.u_of_axis(b), P) == pytest.approx([0.0, 1.0, 0.0], abs=1e-15)


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_s2_formulas_agree(seed):
    rng = np.random.default_rng(seed)
    b = rng.standard_normal(3)
    p, e = mm.random_s2_point(rng)
    P = mm.s2_convert(p, e)
    assert np.abs(np.array(mm.s2_moment(b, p, e)) - mm.moment_array(mm.u_of_axis(b), P)).max() <= 1e-10
    p2, e2 = mm.s2_unconvert(P)
    assert np.allclose(p2, p, atol=1e-14) and np.allclose(e2, e, atol=1e-14)
    assert abs(np.linalg.norm(p2) - 1) <= 1e-14 and abs(p2 @ e2) <= 1e-14


def test_s2_convert_rejects_bad_points():
    with pytest.raises(GeometryError):
        mm.s2_convert([0, 0, 2.0], [0, 0, 0])
    with pytest.raises(GeometryError):
        mm.s2_convert([0, 0, 1.0], [0, 0, 1.0])


def test_order_report_floor():
    r = mm.order_report("x", -3.0, errors=(1e-13, 2e-13))
    assert r.passed and r.extra["at_floor"]
    assert not mm.order_report("x", 1.5, errors=(1e-3, 3e-4)).passed
    assert mm.order_report("x", 2.01).passed


def test_parse_killing_spec():
    u = random_su(3, 0)
    n, v = mm.parse_killing_spec({"n": 2, "u": matrix_to_json(u)})
    assert n == 2 and np.array_equal(u, v)
    n, v = mm.parse_killing_spec(json.loads(json.dumps({"n": 1, "basis_coeffs": [0, 0, 1]})))
    assert np.array_equal(v, su_basis(2)[2])


@pytest.mark.parametrize("obj,field", [
    ({"u": [[[0, 1], [0, 0]], [[0, 0], [0, -1]]]}, "'n'"),
    ({"n": 1, "u": [[[0, 1], [0, 0]], [[0, 0], [0, 1]]]}, "'u'"),
    ({"n": 1, "u": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]}, "'u'"),
    ({"n": 1, "basis_coeffs": [1, 2]}, "'basis_coeffs'"),
    ({"n": 1, "basis_coeffs": ["x", 0, 0]}, "'basis_coeffs'"),
    ({"n": 1}, "'u'"),
    ({"n": 0, "u": []}, "'n'"),
])
def test_parse_killing_spec_errors(obj, field):
    with pytest.raises(GeometryError, match=field):
        mm.parse_killing_spec(obj)
