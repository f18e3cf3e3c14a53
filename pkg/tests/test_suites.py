import json

import pytest

from hkmoment import report
from hkmoment.matkit import GeometryError
from hkmoment.suites import SuiteConfig, build_report, check_seed, conformality_suite, run


@pytest.mark.parametrize("kw", [
    {"n": 0}, {"samples": 0}, {"step": 0.0}, {"step": 0.2}, {"tol": -1e-3},
    {"gh_a": 0.0}, {"suites": ("nosuch",)},
])
def test_config_rejects(kw):
    with pytest.raises(GeometryError):
        SuiteConfig(**kw)


def test_config_defaults():
    cfg = SuiteConfig(suites=("moment", "projective"))
    assert cfg.suites == ("projective", "moment")
    assert cfg.fd_tol(1e-4) == 1e-4 and SuiteConfig(tol=0.0).fd_tol(1e-4) == 0.0
    assert cfg.d1_step() == 1e-4 and SuiteConfig(step=1e-3).d1_step() == 1e-3


def test_check_seeds_independent():
    assert check_seed(42, "a") == check_seed(42, "a")
    assert check_seed(42, "a") != check_seed(42, "b")
    assert check_seed(42, "a") != check_seed(43, "a")


def test_threaded_run_matches_serial(monkeypatch):
    cfg = SuiteConfig(n=2, samples=5, suites=("conformality",))
    serial = [r.to_dict() for r in run(cfg)]
    monkeypatch.setenv("HKM_THREADS", "3")
    assert [r.to_dict() for r in run(cfg)] == serial


def test_zero_tolerance_fails_difference_checks():
    reps = conformality_suite(SuiteConfig(n=2, samples=5, tol=0.0))
    fd = [r for r in reps if r.name == "conformality.moment_differential"]
    assert fd and not fd[0].passed


def test_report_serializes():
    cfg = SuiteConfig(n=1, samples=3, suites=("conformality",))
    doc = build_report(cfg, run(cfg), "t")
    text = json.dumps(doc, sort_keys=True)
    assert json.loads(text)["config"]["n"] == 1
    assert [c["name"] for c in doc["checks"]] == sorted(c["name"] for c in doc["checks"])


def test_jsonable():
    import numpy as np

    out = report.jsonable({"a": np.float64(1.5), "b": np.array([1, 2]), "c": float("nan"), "d": 1 + 2j})
    assert out == {"a": 1.5, "b": [1, 2], "c": "nan", "d": [1.0, 2.0]}
