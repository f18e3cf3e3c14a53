import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from hkmoment import cli
from hkmoment.matkit import matrix_to_json


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def test_verify_passes(capsys):
    code, out, _ = run(["verify", "projective", "--samples", "5"], capsys)
    assert code == 0
    assert out.count("[PASS]") == len(out.strip().splitlines())


def test_zero_tolerance_fails(capsys):
    code, _, err = run(["verify", "projective", "--samples", "5", "--tol", "0"], capsys)
    assert code == 1 and "failed" in err


@pytest.mark.parametrize("argv", [
    ["verify", "nosuch"],
    ["verify", "projective", "--step", "0.5"],
    ["verify", "projective", "--step", "-1"],
    ["verify", "projective", "--tol", "-1"],
    ["verify", "projective", "--samples", "0"],
    [],
])
def test_usage_errors(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_spec_errors(tmp_path, capsys):
    bad_trace = {"n": 1, "u": [[[0, 1], [0, 0]], [[0, 0], [0, 1]]]}
    code, _, err = run(["verify", "moment", "--spec", write(tmp_path, "a.json", bad_trace)], capsys)
    assert code == 2 and "'u'" in err and "traceless" in err

    rng = np.random.default_rng(0)
    gens = []
    for _ in range(2):
        M = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        u = M - M.conj().T
        gens.append(matrix_to_json(u - np.trace(u) / 3 * np.eye(3)))
    code, _, err = run(["gram", "--spec", write(tmp_path, "b.json", {"n": 2, "generators": gens})], capsys)
    assert code == 2 and "do not commute" in err

    code, _, err = run(["verify", "moment", "--spec", write(tmp_path, "c.json", "{not json")], capsys)
    assert code == 2 and "invalid JSON" in err
    code, _, _ = run(["verify", "moment", "--spec", str(tmp_path / "missing.json")], capsys)
    assert code == 2


def test_valid_spec_echoed(tmp_path, capsys):
    spec = {"n": 1, "u": matrix_to_json(np.diag([0.5j, -0.5j]))}
    out = tmp_path / "r.json"
    code, _, _ = run(["report", "--suites", "projective", "--samples", "3",
                      "--spec", write(tmp_path, "s.json", spec), "--out", str(out)], capsys)
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["config"]["killing_spec"] == spec
    assert set(doc) == {"calibration", "checks", "config", "timestamp"}
    assert doc["calibration"] == {"norm_constant": 0.5, "curvature_sign": 1.0,
                                  "omega_sign": 1.0, "s2_kappa": 1.0}


def test_report_deterministic(tmp_path, capsys):
    docs = []
    for k in range(2):
        p = tmp_path / f"r{k}.json"
        assert run(["report", "--suites", "projective,conformality", "--samples", "5",
                    "--out", str(p)], capsys)[0] == 0
        doc = json.loads(p.read_text())
        doc.pop("timestamp")
        docs.append(json.dumps(doc, sort_keys=True))
    assert docs[0] == docs[1]


def test_gram(capsys, tmp_path):
    code, out, err = run(["gram", "--n", "2", "--samples", "10"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] is False and len(doc["witness"]["indices"]) == 2
    code, out, _ = run(["gram", "--n", "2", "--spec",
                        write(tmp_path, "c.json", {"n": 2, "generators": [matrix_to_json(np.diag([1j, 0, -1j]))]})],
                       capsys)
    assert code == 0 and json.loads(out)["verdict"] is True


def slope(path):
    rows = list(csv.DictReader(open(path)))
    x = np.array([float(r["log10_step"]) for r in rows])
    ycol = "log10_residual" if "log10_residual" in rows[0] else "log10_error"
    y = np.array([float(r[ycol]) for r in rows])
    return np.polyfit(x, y, 1)[0]


def test_plot(tmp_path, capsys):
    code, out, _ = run(["plot", "--suites", "moment,gibbons", "--out", str(tmp_path)], capsys)
    assert code == 0
    assert slope(tmp_path / "hamiltonian_convergence.csv") == pytest.approx(2.0, abs=0.1)
    assert slope(tmp_path / "laplacian_convergence.csv") == pytest.approx(2.0, abs=0.2)
    assert slope(tmp_path / "gibbons_laplacian_convergence.csv") == pytest.approx(2.0, abs=0.1)
    lam = [float(r["lambda2"]) for r in csv.DictReader(open(tmp_path / "lambda2_slice.csv"))]
    assert min(lam) > 0


def test_plot_empty_selection(tmp_path, capsys):
    code, out, _ = run(["plot", "--suites", "", "--out", str(tmp_path / "none")], capsys)
    assert code == 0 and out == "" and not (tmp_path / "none").exists()


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "hkmoment", "verify", "conformality", "--samples", "3",
                        "--quiet"], capture_output=True, text=True)
    assert r.returncode == 0
