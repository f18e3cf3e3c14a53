import pytest

from hkmoment import calabi as cb
from hkmoment import calibration as cal
from hkmoment import moment as mm
from hkmoment import projective as pj


@pytest.fixture(scope="module")
def result():
    return cal.run_calibration()


def test_unique_assignment_is_frozen(result):
    assert result.constants() == cal.frozen()
    assert sum(row["ok"] for row in result.table) == 1
    assert len(result.table) == len(cal.NU_CANDIDATES) * 4


def test_wrong_norm_constants_break_hamiltonian(result):
    for row in result.table:
        if row["norm_constant"] != cb.NORM_CONSTANT and row["omega_sign"] == pj.OMEGA_SIGN:
            assert row["tcpn_hamiltonian"] > 1e-3


def test_curvature_sign_separates():
    assert cal.curvature_residual(1.0) <= 1e-6
    assert cal.curvature_residual(-1.0) > 1.0


def test_s2_kappa_fit():
    kappa, worst = cal.fit_s2_kappa()
    assert kappa == 1.0 and worst <= 1e-10


def test_override_restores():
    before = cal.frozen()
    with cal.override(norm_constant=2.0, omega_sign=-1.0, s2_kappa=3.0, curvature_sign=-1.0):
        assert cb.NORM_CONSTANT == 2.0 and pj.OMEGA_SIGN == -1.0 and mm.S2_KAPPA == 3.0
    assert cal.frozen() == before
    with pytest.raises(RuntimeError):
        with cal.override(norm_constant=1.0):
            raise RuntimeError
    assert cal.frozen() == before
