"""Joint determination of the convention constants.

Four constants are not fixed by the formulas alone: the multiple ``nu`` of
``tr X^2`` under the square root in ``a``, the sign of the curvature tensor,
the sign in ``df = omega(V, .)`` and the scale ``kappa`` identifying TS^2 with
TCP^1.  Each candidate assignment is scored against independent numerical
oracles; calibration succeeds only if exactly one assignment passes all of
them, and that assignment must be the frozen one.
"""

from __future__ import annotations

import itertools
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import calabi as cb
from . import fd
from . import moment as mm
from . import projective as pj
from .matkit import random_su

NU_CANDIDATES = (2.0, 1.0, 0.5)
SIGNS = (1.0, -1.0)


class CalibrationError(RuntimeError):
    pass


def frozen() -> dict:
    return {
        "norm_constant": cb.NORM_CONSTANT,
        "curvature_sign": pj.CURVATURE_SIGN,
        "omega_sign": pj.OMEGA_SIGN,
        "s2_kappa": mm.S2_KAPPA,
    }


@contextmanager
def override(norm_constant=None, curvature_sign=None, omega_sign=None, s2_kappa=None):
    """Temporarily replace convention constants (restored on exit)."""
    saved = frozen()
    try:
        if norm_constant is not None:
            cb.NORM_CONSTANT = float(norm_constant)
        if curvature_sign is not None:
            pj.CURVATURE_SIGN = float(curvature_sign)
        if omega_sign is not None:
            pj.OMEGA_SIGN = float(omega_sign)
        if s2_kappa is not None:
            mm.S2_KAPPA = float(s2_kappa)
        yield
    finally:
        cb.NORM_CONSTANT = saved["norm_constant"]
        pj.CURVATURE_SIGN = saved["curvature_sign"]
        pj.OMEGA_SIGN = saved["omega_sign"]
        mm.S2_KAPPA = saved["s2_kappa"]


def curvature_residual(sign: float, n: int = 2, samples: int = 3, seed=0) -> float:
    """Relative gap between the closed-form curvature and its finite-difference oracle."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        A = pj.random_point(n, rng)
        X, Y, Z = (pj.random_tangent(A, rng) for _ in range(3))
        R = pj.curvature(A, X, Y, Z, sign)
        Rfd = fd.richardson(pj.curvature_fd(A, X, Y, Z, 2e-3), pj.curvature_fd(A, X, Y, Z, 1e-3))
        worst = max(worst, float(np.abs(R - Rfd).max() / np.abs(Rfd).max()))
    return worst


def cpn_hamiltonian_residual(n: int = 2, samples: int = 3, seed=0, step: float = 1e-4) -> float:
    """``d f_u(Y) = omega(gamma_u, Y)`` on CP^n under the current omega sign."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        A = pj.random_point(n, rng)
        u = random_su(n + 1, rng)
        Y = pj.random_tangent(A, rng)
        f = lambda B: pj.linear_hamiltonian(u, B)
        d = (f(pj.curve(A, Y, step)) - f(pj.curve(A, Y, -step))) / (2 * step)
        om = pj.omega(A, pj.killing_field(u, A), Y)
        worst = max(worst, abs(d - om) / (abs(om) + pj.fs_norm(Y)))
    return worst


def tcpn_hamiltonian_residual(ns=(1, 2), samples: int = 2, seed=0) -> float:
    """Worst Richardson residual of the moment-map gradient identity."""
    worst = 0.0
    for n in ns:
        rng = np.random.default_rng([seed, n])
        for P in mm.sample_points(n, samples, rng):
            u = random_su(n + 1, rng)
            worst = max(worst, mm.check_hamiltonian(u, P).max_error)
    return worst


def _s2_mismatch(kappa: float, data) -> float:
    tot = 0.0
    for b, p, e in data:
        diff = np.array(mm.s2_moment(b, p, e)) - mm.moment_array(mm.u_of_axis(b), mm.s2_convert(p, e, kappa))
        tot += float(diff @ diff)
    return tot


def s2_data(samples: int = 20, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(samples):
        b = rng.standard_normal(3)
        p, e = mm.random_s2_point(rng)
        out.append((b, p, e))
    return out


def fit_s2_kappa(samples: int = 20, seed=0) -> tuple[float, float]:
    """Least-squares ``kappa`` and the worst componentwise mismatch at the fitted value."""
    data = s2_data(samples, seed)
    res = minimize_scalar(_s2_mismatch, bounds=(0.1, 4.0), args=(data,), method="bounded",
                          options={"xatol": 1e-12})
    kappa = float(res.x)
    # snap to a simple value when it is indistinguishable from the fit
    snapped = float(np.round(kappa, 6))
    worst = max(
        float(np.abs(np.array(mm.s2_moment(b, p, e))
                     - mm.moment_array(mm.u_of_axis(b), mm.s2_convert(p, e, snapped))).max())
        for b, p, e in data
    )
    return snapped, worst


@dataclass
class Calibration:
    norm_constant: float
    curvature_sign: float
    omega_sign: float
    s2_kappa: float
    table: list = field(default_factory=list)

    def constants(self) -> dict:
        return {
            "norm_constant": self.norm_constant,
            "curvature_sign": self.curvature_sign,
            "omega_sign": self.omega_sign,
            "s2_kappa": self.s2_kappa,
        }


def run_calibration(seed=0, tol: float = 1e-5, s2_tol: float = 1e-10) -> Calibration:
    """Score every candidate assignment; exactly one must pass.

    Scores: curvature against its FD oracle (``tol``-relative, cheap to split
    from the rest), the CP^n and TCP^n Hamiltonian identities, and the S^2
    formulas with ``kappa`` fitted by least squares for each ``nu``.
    """
    curv = {s: curvature_residual(s, seed=seed) for s in SIGNS}
    table, passing = [], []
    for nu, so in itertools.product(NU_CANDIDATES, SIGNS):
        with override(norm_constant=nu, omega_sign=so):
            cp = cpn_hamiltonian_residual(seed=seed)
            tc = tcpn_hamiltonian_residual(seed=seed)
            kappa, s2 = fit_s2_kappa(seed=seed)
        for sr in SIGNS:
            row = {
                "norm_constant": nu, "curvature_sign": sr, "omega_sign": so, "s2_kappa": kappa,
                "curvature": curv[sr], "cpn_hamiltonian": cp, "tcpn_hamiltonian": tc, "s2": s2,
            }
            row["ok"] = bool(curv[sr] <= 1e-4 and cp <= tol and tc <= tol and s2 <= s2_tol)
            table.append(row)
            if row["ok"]:
                passing.append(row)
    if len(passing) != 1:
        raise CalibrationError(f"{len(passing)} assignments pass; expected exactly one")
    p = passing[0]
    return Calibration(p["norm_constant"], p["curvature_sign"], p["omega_sign"], p["s2_kappa"], table)


def verify_frozen(seed=0) -> Calibration:
    """Run the calibration and insist it reproduces the module constants."""
    cal = run_calibration(seed)
    if cal.constants() != frozen():
        raise CalibrationError(f"calibration selected {cal.constants()}, frozen {frozen()}")
    return cal
