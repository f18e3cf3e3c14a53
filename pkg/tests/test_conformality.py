import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hkmoment import conformality as cf
from hkmoment import projective as pj
from hkmoment.matkit import GeometryError, matrix_to_json, random_su

T2 = cf.standard_torus(2)


def test_standard_torus_generators():
    u1, u2 = T2.generators
    assert np.array_equal(u1, np.diag([0.5j, -0.5j, 0]))
    assert np.array_equal(u2, np.diag([0, 0.5j, -0.5j]))


def test_spec_json_roundtrip():
    back = cf.ActionSpec.from_json(json.dumps(T2.to_json()))
    assert back.n == 2 and all(np.array_equal(a, b) for a, b in zip(back.generators, T2.generators))


def test_spec_validation():
    with pytest.raises(GeometryError, match="do not commute"):
        cf.ActionSpec(2, (random_su(3, 0), random_su(3, 1)))
    with pytest.raises(GeometryError, match=r"generators\[0\]"):
        cf.ActionSpec(1, (np.eye(2),))
    with pytest.raises(GeometryError, match="shape"):
        cf.ActionSpec(1, (np.zeros((3, 3)),))
    with pytest.raises(GeometryError, match="n"):
        cf.ActionSpec(0, (np.zeros((1, 1)),))
    with pytest.raises(GeometryError, match="generators: missing"):
        cf.ActionSpec.from_json({"n": 1})
    with pytest.raises(GeometryError, match=r"generators\[0\]"):
        cf.ActionSpec.from_json({"n": 1, "generators": [[[1, 2]]]})


def test_gram_single_generator_and_fixed_point():
    spec = cf.circle(2)
    G = cf.gram_matrix(spec, pj.random_point(2, 0)).gram
    assert G.shape == (1, 1) and G[0, 0] >= 0
    assert np.abs(cf.gram_matrix(T2, pj.base_point(2)).gram).max() == 0


@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 2, 3]))
def test_single_generator_always_proportional(seed, n):
    w = np.random.default_rng(seed).standard_normal(n + 1)
    spec = cf.circle(n, w)
    assert cf.proportionality_test(cf.sample_grams(spec, 10, seed)).verdict is True


def test_identical_grams():
    G = np.array([[2.0, 1.0], [1.0, 3.0]])
    s = [cf.GramSample(np.eye(3), G) for _ in range(4)]
    r = cf.proportionality_test(s)
    assert r.verdict is True and r.scales == pytest.approx([np.linalg.norm(G)] * 4)
    assert np.allclose(r.h * np.linalg.norm(G), G)


def test_all_zero_is_indeterminate():
    s = [cf.GramSample(np.eye(2), np.zeros((2, 2))) for _ in range(3)]
    assert cf.proportionality_test(s).verdict is None


def test_torus_not_proportional_with_witness():
    r = cf.proportionality_test(cf.sample_grams(T2, 10, 42))
    assert r.verdict is False
    i, j, Pi, Pj = r.witness
    assert i != j and r.distance > 1e-8
    Gi, Gj = cf.gram_matrix(T2, Pi).gram, cf.gram_matrix(T2, Pj).gram
    assert np.linalg.norm(Gi / np.linalg.norm(Gi) - Gj / np.linalg.norm(Gj)) > 1e-8


def test_verdict_scale_and_basis_invariant():
    samples = cf.sample_grams(T2, 10, 1)
    scaled = [cf.GramSample(s.point, 7.5 * s.gram) for s in samples]
    assert cf.proportionality_test(scaled).verdict is False
    # a change of generator basis keeps the verdict
    u1, u2 = T2.generators
    T2b = cf.ActionSpec(2, (u1 + u2, u1 - 2 * u2))
    assert cf.proportionality_test(cf.sample_grams(T2b, 10, 1)).verdict is False


def test_torus_fails_on_most_seeds():
    falses = sum(cf.proportionality_test(cf.sample_grams(T2, 10, s)).verdict is False for s in range(10))
    assert falses >= 9


def test_isotropy():
    reps = cf.isotropy_check(T2, samples=20)
    assert all(r.passed for r in reps)
    assert reps[0].max_error <= 1e-12


def test_moment_differential():
    assert cf.check_moment_differential(T2, samples=10).passed
    assert cf.check_moment_differential(cf.circle(1), samples=5).passed


def test_fixed_point_gradient_vanishes():
    A = pj.base_point(2)
    X = pj.random_tangent(A, 3)
    d = (cf.moment_map_cpn(T2, pj.curve(A, X, 1e-4)) - cf.moment_map_cpn(T2, pj.curve(A, X, -1e-4))) / 2e-4
    assert np.abs(d).max() <= 1e-8


def test_gram_psd():
    assert cf.gram_psd_check(T2, samples=30).passed


def test_proportionality_report():
    assert cf.proportionality_report(T2, expect=False).passed
    assert not cf.proportionality_report(T2, expect=True).passed
    r = cf.proportionality_report(T2)
    assert r.extra["verdict"] is False and len(r.extra["witness"]) == 2
