import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hkmoment import gibbons as gh
from hkmoment.matkit import GeometryError

points = st.lists(st.floats(-2, 2), min_size=4, max_size=4).map(np.array)


def test_metric_at_origin():
    assert np.array_equal(gh.metric_ga(1.5, np.zeros(4)), np.eye(4))


def test_metric_rejects_nonpositive_a():
    with pytest.raises(GeometryError):
        gh.metric_ga(0.0, np.ones(4))


@given(points, st.sampled_from([0.5, 1.0, 2.0]))
def test_metric_spectrum_and_determinant(x, a):
    g = gh.metric_ga(a, x)
    s = a * (x @ x) + 1
    w = np.linalg.eigvalsh(g)
    assert np.allclose(np.sort(w), np.sort([s, s, s, 1 / s]), rtol=1e-10)
    assert np.linalg.det(g) == pytest.approx(s**2, rel=1e-10)


def test_phi_examples():
    assert np.array_equal(gh.phi([1, 0, 0, 0]), [1, 0, 0])
    assert np.array_equal(gh.phi([0, 0, 1, 0]), [-1, 0, 0])
    assert np.array_equal(gh.phi([1, 0, 1, 0]), [0, 2, 0])


@given(points, st.floats(0, 2 * math.pi))
def test_phi_circle_invariant(x, th):
    assert np.abs(gh.phi(gh.circle_act(th, x)) - gh.phi(x)).max() <= 1e-12 * max(1, x @ x)
    assert np.array_equal(gh.circle_act(0.0, x), x)


def test_lb_of_constant():
    assert gh.lb_r4(1.0, lambda y: 2.0, np.array([0.3, -0.2, 0.5, 1.0])) == 0


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_harmonic_morphism(a):
    reps = gh.check_gh_harmonic_morphism(a, samples=8)
    assert all(r.passed for r in reps), [r.line() for r in reps]


def test_coordinate_function_is_not_harmonic():
    # negative control: x1 has a nonzero g_a Laplacian for a = 1
    x = np.array([0.4, 0.7, -0.3, 0.5])
    assert abs(gh.lb_r4(1.0, lambda y: y[0], x)) > 1e-2


def test_flat_control():
    reps = gh.check_flat_control(samples=10)
    assert all(r.passed for r in reps)
    assert all(r.tolerance == 1e-8 for r in reps)


def test_small_a_limit():
    assert gh.check_small_a(samples=5).passed


def test_scheme_order_is_two():
    pts = gh.sample_ball(3, 0)
    r = gh.scheme_order(gh.gh_setup(1.0), pts)
    assert r.passed and r.extra["order"] == pytest.approx(2.0, abs=0.05)


def test_product_dimensions():
    s = gh.product_moment([gh.gh_setup(1.0), gh.gh_setup(2.0)])
    assert s.dim == 8 and s.k == 6
    x = gh.sample_ball(2, 1).ravel()
    assert np.array_equal(s.fn(x), np.concatenate([gh.phi(x[:4]), gh.phi(x[4:])]))
    G = s.metric(x)
    assert np.array_equal(G[:4, 4:], np.zeros((4, 4)))


def test_product_needs_two_factors():
    with pytest.raises(ValueError):
        gh.product_moment([])
    with pytest.raises(ValueError):
        gh.product_moment([gh.flat_setup()])


def test_product_harmonic():
    reps = gh.check_product(samples=3)
    assert all(r.passed for r in reps), [r.line() for r in reps]
    assert any(r.name.endswith("gram_block_diagonal") for r in reps)


def test_sample_ball_radii():
    x = gh.sample_ball(200, 3)
    r = np.linalg.norm(x, axis=1)
    assert r.min() >= 0.1 and r.max() <= 2.0


def test_circle_is_isometry():
    reps = gh.circle_invariance(1.0, samples=5)
    assert all(r.passed for r in reps)
