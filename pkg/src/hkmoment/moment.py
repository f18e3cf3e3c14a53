"""Lifted Killing fields and the hyper-Kaehler moment map on TCP^n.

For ``u`` in su(n+1) the Killing field ``gamma_u(A) = [u, A]`` on CP^n lifts to
``Gamma = gamma^h + (nabla_X gamma)^v``, and

    f1(A, X) = g(iu, JX)
    f2(A, X) = a g(A, iu) - 2/(a+1) g(X^2, iu)
    f3(A, X) = g(iu, X)

are its Hamiltonians for the Kaehler forms of ``I*``, ``J*`` and ``K*``.  The
checks below verify this with finite differences, together with the harmonic
morphism property of ``(f1, f2, f3)``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

from . import calabi as cb
from . import fd
from . import projective as pj
from .matkit import GeometryError, ambient_inner, is_su, matrix_from_json, su_basis
from .report import INDETERMINATE, CheckReport

#: Scale of the identification ``e -> kappa (e . sigma)/2`` of TS^2 with TCP^1.
#: Fixed by ``calibration.fit_s2_kappa``.
S2_KAPPA = 1.0

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class MomentValue(NamedTuple):
    f1: float
    f2: float
    f3: float


def gamma_lift(u, P: cb.TBPoint) -> cb.TTVec:
    """``Gamma(A, X) = gamma_u(A)^h + (nabla_X gamma_u)^v``."""
    return cb.TTVec(P, pj.killing_field(u, P.A), pj.killing_cov_deriv(u, P.A, P.X))


def moment_map(u, P: cb.TBPoint) -> MomentValue:
    iu = 1j * np.asarray(u)
    A, X = P.A, P.X
    a = cb.coefs(P).a
    f1 = ambient_inner(iu, pj.jmul(A, X))
    f2 = a * ambient_inner(A, iu) - 2.0 / (a + 1.0) * ambient_inner(X @ X, iu)
    f3 = ambient_inner(iu, X)
    return MomentValue(f1, f2, f3)


def moment_array(u, P: cb.TBPoint) -> np.ndarray:
    return np.array(moment_map(u, P))


def sample_points(n: int, count: int, seed, xmin: float = 0.2, xmax: float = 1.5) -> list:
    """Random points of TCP^n with ``|X|`` uniform in ``[xmin, xmax]``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        s = int(rng.integers(0, 2**63))
        out.append(cb.random_tb_point(n, s, scale=rng.uniform(xmin, xmax)))
    return out


def frame_derivatives(P: cb.TBPoint, f, step: float = 1e-4, chart=None) -> np.ndarray:
    """Derivatives of ``f`` along the chart axes (the lifted frame) at ``P``."""
    ch = chart or cb.Chart(P)
    D = fd.coord_gradient(lambda t: f(ch(t)), np.zeros(ch.dim), step)
    if not np.all(np.isfinite(D)):
        raise GeometryError("function returned a non-finite value")
    return D


def frame_norms(P: cb.TBPoint) -> np.ndarray:
    """Squared ``G``-norms of the adapted lifted frame ``E_i^h, E_i^v``.

    ``a`` on the horizontal lifts of ``X/|X|, JX/|X|``, ``(a+1)/2`` on the other
    horizontals, and the reciprocals on the verticals.
    """
    a = cb.coefs(P).a
    m = 2 * P.n
    hor = np.array([a, a] + [(a + 1.0) / 2.0] * (m - 2))
    return np.concatenate([hor, 1.0 / hor])


def _assemble(ch: cb.Chart, D: np.ndarray):
    if ch.adapted():
        C = D / frame_norms(ch.P)[:, None]
    else:
        C = np.linalg.solve(ch.frame_gram(), D)
    H = np.array(ch.E)
    m = len(ch.E)
    out = []
    for j in range(D.shape[1]):
        U = np.tensordot(C[:m, j], H, axes=1)
        W = np.tensordot(C[m:, j], H, axes=1)
        out.append(cb.TTVec(ch.P, U, W))
    return out


def gradient(P: cb.TBPoint, f, step: float = 1e-4, richardson: bool = True):
    """Gradient of ``f`` for the Calabi metric.

    Frame derivatives by central differences along the chart; the adapted
    frame is G-orthogonal with the norms of :func:`frame_norms`.  At the zero
    section the frame is not adapted and the frame Gram matrix is inverted.
    Vector-valued ``f`` gives a list of gradients.
    """
    ch = cb.Chart(P)
    D = frame_derivatives(P, f, step, ch)
    if richardson:
        D = fd.richardson(D, frame_derivatives(P, f, step / 2.0, ch))
    scalar = D.ndim == 1
    grads = _assemble(ch, D.reshape(ch.dim, -1))
    return grads[0] if scalar else grads


def g_norm(xi: cb.TTVec) -> float:
    return math.sqrt(max(cb.metric_G(xi, xi), 0.0))


def order_report(name: str, order: float, min_order: float = 1.9, errors=None,
                 floor: float = 1e-10, **kw) -> CheckReport:
    """Pass when the observed convergence order is at least ``min_order``.

    ``errors`` are the underlying residuals; when the finer one is already
    below ``floor`` the scheme sits at roundoff and no order is asserted.
    """
    extra = {"order": order}
    if errors is not None and min(errors) <= floor:
        extra["at_floor"] = True
        return CheckReport(name=name, max_error=0.0, tolerance=2.0 - min_order, extra=extra,
                           notes="residual at roundoff floor", **kw)
    deficit = 2.0 - order if math.isfinite(order) else (0.0 if order > 0 else math.inf)
    return CheckReport(name=name, max_error=max(0.0, deficit), tolerance=2.0 - min_order,
                       extra=extra, **kw)


def hamiltonian_residuals(u, P: cb.TBPoint, step: float) -> np.ndarray:
    """Relative ``G``-norm residuals of ``grad f_j - Q_j Gamma``, raw central differences."""
    Gam = gamma_lift(u, P)
    scale = g_norm(Gam) or 1.0
    grads = gradient(P, lambda Q: moment_array(u, Q), step, richardson=False)
    return _residuals(grads, Gam, scale)


def _residuals(grads, Gam, scale):
    sign = pj.OMEGA_SIGN
    return np.array(
        [g_norm(gr - sign * cb.STRUCTURES[q](Gam)) / scale for gr, q in zip(grads, "IJK")]
    )


def check_hamiltonian(u, P: cb.TBPoint, step: float = 1e-4, tol: float = 1e-5) -> CheckReport:
    """``grad f1 = I*Gamma``, ``grad f2 = J*Gamma``, ``grad f3 = K*Gamma`` at ``P``.

    ``max_error`` is the Richardson-extrapolated relative residual; the raw
    residuals at ``step`` and ``step/2`` and the observed order go in ``extra``.
    """
    Gam = gamma_lift(u, P)
    scale = g_norm(Gam)
    grads = gradient(P, lambda Q: moment_array(u, Q), step, richardson=True)
    res = _residuals(grads, Gam, scale or 1.0)
    r1 = hamiltonian_residuals(u, P, step)
    r2 = hamiltonian_residuals(u, P, step / 2.0)
    # f3 is linear along the fibres, so its own residual sits at roundoff;
    # the order is read off the combined residual
    order = fd.observed_order(float(np.linalg.norm(r1)), float(np.linalg.norm(r2)))
    return CheckReport(
        name="hamiltonian",
        max_error=float(res.max()),
        tolerance=tol,
        extra={
            "residuals": res.tolist(),
            "raw": r1.tolist(),
            "raw_half": r2.tolist(),
            "order": order,
            "gamma_norm": scale,
        },
    )


def laplace_beltrami(P: cb.TBPoint, f, step: float = 1e-2, inner: float = 1e-5,
                     richardson: bool = True):
    """Laplacian of ``f`` for the Calabi metric in the chart at ``P``."""
    ch = cb.Chart(P)

    def lap(h):
        return fd.laplacian(lambda t: ch.metric(t, inner), lambda t: f(ch(t)), ch.dim, h, inner)

    L = lap(step)
    if richardson:
        L = fd.richardson(L, lap(step / 2.0))
    if np.ndim(L) == 0 and not math.isfinite(float(L)):
        raise GeometryError("singular pulled-back metric")
    return L


def laplacian_sequence(P: cb.TBPoint, f, step: float = 1e-2, inner: float = 1e-5, levels: int = 3):
    """Raw Laplacians at ``step, step/2, ...`` (for order estimates)."""
    ch = cb.Chart(P)
    return [
        fd.laplacian(lambda t: ch.metric(t, inner), lambda t: f(ch(t)), ch.dim, step / 2**k, inner)
        for k in range(levels)
    ]


def harmonic_morphism_at(u, P: cb.TBPoint, step: float = 1e-2, grad_step: float = 1e-4) -> dict:
    """Laplacians, gradient Gram matrix and dilation of ``(f1, f2, f3)`` at ``P``."""
    f = lambda Q: moment_array(u, Q)
    L1, L2, L4 = laplacian_sequence(P, f, step)
    L = fd.richardson(L1, L2)
    ch = cb.Chart(P)
    D = fd.richardson(frame_derivatives(P, f, grad_step, ch), frame_derivatives(P, f, grad_step / 2, ch))
    Q = D.T @ np.linalg.solve(ch.frame_gram(), D)
    lam2 = float(np.trace(Q)) / 3.0
    gnorm = np.sqrt(np.maximum(np.diag(Q), 0.0))
    return {
        "laplacian": L,
        "laplacian_raw": [L1, L2, L4],
        "order": fd.observed_order3(L1, L2, L4),
        "gram": Q,
        "lambda2": lam2,
        "grad_norms": gnorm,
    }


def check_harmonic_morphism(u, n: int | None = None, samples: int = 20, step: float = 1e-2,
                            tol: float = 1e-4, seed=42, points=None,
                            critical_tol: float = 1e-10) -> list[CheckReport]:
    """Harmonicity and horizontal weak conformality of ``(f1, f2, f3)``.

    Returns three reports: normalized Laplacian ``|Lap f_j| / |grad f_j|``,
    conformality ``|Q - lambda^2 I| / lambda^2`` of the gradient Gram matrix,
    and the observed order of the Laplacian.  At critical points
    (``lambda^2 <= critical_tol``) only the vanishing of all gradients is asserted.
    """
    u = np.asarray(u)
    n = u.shape[0] - 1 if n is None else n
    pts = points if points is not None else sample_points(n, samples, seed)
    harm, conf, orders, lams = [], [], [], []
    for P in pts:
        r = harmonic_morphism_at(u, P, step)
        lam2 = r["lambda2"]
        lams.append(lam2)
        if lam2 <= critical_tol:
            conf.append(float(np.abs(r["gram"]).max()))
            harm.append(float(np.abs(r["laplacian"]).max()))
            continue
        harm.append(float(np.max(np.abs(r["laplacian"]) / r["grad_norms"])))
        conf.append(float(np.linalg.norm(r["gram"] - lam2 * np.eye(3)) / lam2))
        orders.append(r["order"])
    common = dict(samples=len(pts), seed=seed if isinstance(seed, int) else None)
    worst_order = min(orders) if orders else math.nan
    return [
        CheckReport("moment.harmonicity", max(harm), tol, extra={"per_point": harm}, **common),
        CheckReport("moment.conformality", max(conf), tol,
                    extra={"per_point": conf, "lambda2": lams}, **common),
        order_report("moment.harmonicity_order", worst_order, **common),
    ]


def flow_point(u, t: float, P: cb.TBPoint) -> cb.TBPoint:
    return cb.TBPoint(pj.flow(u, t, P.A), pj.flow(u, t, P.X))


def pushforward(u, t: float, xi: cb.TTVec) -> cb.TTVec:
    """Differential of the lifted flow ``(A, X) -> (e^{tu} A e^{-tu}, e^{tu} X e^{-tu})``."""
    Uop = expm(t * np.asarray(u))
    Adot, Xdot = cb.realize(xi)
    Q = flow_point(u, t, xi.base)
    return cb.decompose(Q, Uop @ Adot @ Uop.conj().T, Uop @ Xdot @ Uop.conj().T)


def lifted_flow_residuals(u, P: cb.TBPoint, t: float = 1e-4, seed=0) -> dict:
    """Lie derivatives of ``G``, ``I*``, ``J*``, ``K*`` along ``Gamma`` (central differences).

    Also checks that the flow velocity at ``t = 0`` is ``Gamma``.
    """
    xi = cb.random_ttvec(P, seed)
    eta = cb.random_ttvec(P, seed + 1)

    def Gt(s):
        return cb.metric_G(pushforward(u, s, xi), pushforward(u, s, eta))

    out = {"G": abs(Gt(t) - Gt(-t)) / (2 * t)}
    for q, Q in cb.STRUCTURES.items():
        def pulled(s):
            # pull back Q along the flow: phi_{-s*} Q phi_{s*} xi
            return pushforward(u, -s, Q(pushforward(u, s, xi)))
        d = pulled(t) - pulled(-t)
        out[q] = d.max_abs() / (2 * t)
    vel = cb.velocity(lambda s: flow_point(u, s, P), t)
    out["velocity"] = cb.decompose(P, *vel).__sub__(gamma_lift(u, P)).max_abs()
    return out


def fibre_rotation(P: cb.TBPoint) -> cb.TTVec:
    """The Killing field ``(A, X) -> (JX)^v``."""
    return cb.lift_v(P, pj.jmul(P.A, P.X))


def one_form_curl(P: cb.TBPoint, alpha, step: float = 1e-3, inner: float = 1e-5) -> float:
    """Largest chart component of ``d alpha`` for a 1-form ``alpha(Q, xi)``."""
    ch = cb.Chart(P)

    def comps(t):
        Q = ch(t)
        return np.array([alpha(Q, v) for v in ch.tangents(t, inner)])

    dA = fd.coord_gradient(comps, np.zeros(ch.dim), step)
    return float(np.abs(dA - dA.T).max())


def eigenfunction_check(u, n: int | None = None, samples: int = 20, step: float = 1e-2,
                        tol: float = 1e-3, seed=42) -> list[CheckReport]:
    """Linear Hamiltonians on CP^n are Laplace eigenfunctions with eigenvalue ``s/n``.

    ``lambda`` is fitted by least squares over the samples; the reports give
    the relative deviation from ``Lap f = -lambda f`` and the relative gap
    between ``lambda`` and the traced scalar curvature over ``n``.
    """
    u = np.asarray(u)
    n = u.shape[0] - 1 if n is None else n
    rng = np.random.default_rng(seed)
    vals, laps = [], []
    for _ in range(samples):
        A = pj.random_point(n, int(rng.integers(0, 2**63)))
        f = lambda B: pj.linear_hamiltonian(u, B)
        L = fd.richardson(pj.laplacian(A, f, step), pj.laplacian(A, f, step / 2))
        vals.append(f(A))
        laps.append(L)
    vals, laps = np.array(vals), np.array(laps)
    lam = -float(vals @ laps / (vals @ vals))
    const = float(np.abs(laps + lam * vals).max() / np.abs(vals).max())
    s = pj.scalar_curvature(pj.random_point(n, int(rng.integers(0, 2**63))))
    rel = abs(lam - s / n) / (s / n)
    common = dict(samples=samples, seed=seed if isinstance(seed, int) else None)
    return [
        CheckReport("moment.eigen_ratio_constancy", const, tol, extra={"lambda": lam}, **common),
        CheckReport("moment.eigen_vs_curvature", rel, tol,
                    extra={"lambda": lam, "scalar_curvature": s, "s_over_n": s / n}, **common),
    ]


def fibre_rotation_check(n: int, samples: int = 5, seed=42, tol: float = 1e-4) -> list[CheckReport]:
    """The Killing field ``(JX)^v`` against the Hamiltonian property.

    For ``J*``, ``omega_J((JX)^v, .) = da``: closed, with Hamiltonian ``a``, whose
    Laplacian is the constant ``2n`` (checked as well).  For ``I*`` the 1-form ``omega_I((JX)^v, .)`` is not closed, so
    no Hamiltonian exists.  The ``I*`` report passes when the curl exceeds
    ``tol`` at every sample (the expected failure of the property).
    """
    pts = sample_points(n, samples, seed)
    sign = pj.OMEGA_SIGN
    alpha = {
        q: (lambda Q, xi, q=q: sign * cb.metric_G(cb.STRUCTURES[q](fibre_rotation(Q)), xi))
        for q in "IJ"
    }
    curl_J, curl_I, exact, lap = [], [], [], []
    afun = lambda Q: cb.coefs(Q).a
    for k, P in enumerate(pts):
        curl_J.append(one_form_curl(P, alpha["J"]))
        curl_I.append(one_form_curl(P, alpha["I"]))
        xi = cb.random_ttvec(P, k)
        exact.append(abs(cb.directional(P, xi, afun, 1e-4) - alpha["J"](P, xi)))
        lap.append(float(laplace_beltrami(P, afun)))
    common = dict(samples=samples, seed=seed if isinstance(seed, int) else None)
    min_curl_I = min(curl_I)
    return [
        CheckReport("moment.fibre_rotation_J_hamiltonian", max(curl_J + exact), tol, **common),
        CheckReport("moment.fibre_rotation_J_laplacian", max(abs(x - 2 * n) for x in lap), tol,
                    extra={"laplacian": lap, "expected": 2 * n},
                    notes="the Hamiltonian a has constant Laplacian 2n", **common),
        CheckReport("moment.fibre_rotation_I_not_closed",
                    tol / min_curl_I if min_curl_I > 0 else math.inf, 1.0,
                    extra={"min_curl": min_curl_I}, notes="passes when curl > tol everywhere",
                    **common),
    ]


def cauchy_riemann_residual(u, P: cb.TBPoint, step: float = 1e-4, seed=0) -> float:
    """``|d f2(I* xi) + d f3(xi)|``: ``f2 + i f3`` is ``I*``-holomorphic."""
    xi = cb.random_ttvec(P, seed)
    f2 = lambda Q: moment_map(u, Q).f2
    f3 = lambda Q: moment_map(u, Q).f3
    d = lambda v, f: fd.richardson(cb.directional(P, v, f, step), cb.directional(P, v, f, step / 2))
    return abs(d(cb.Istar(xi), f2) + d(xi, f3))


# --- the 2-sphere picture -------------------------------------------------


def u_of_axis(b) -> np.ndarray:
    """Element of su(2) generating the rotation ``p -> b x p`` of S^2."""
    b = np.asarray(b, dtype=float)
    return -0.5j * sum(bi * s for bi, s in zip(b, PAULI))


def s2_convert(p, e, kappa: float | None = None) -> cb.TBPoint:
    """``(p, e) in TS^2 -> (A, X)`` with ``A = (I + p.sigma)/2``, ``X = kappa (e.sigma)/2``."""
    kappa = S2_KAPPA if kappa is None else kappa
    p = np.asarray(p, dtype=float)
    e = np.asarray(e, dtype=float)
    if abs(np.linalg.norm(p) - 1.0) > 1e-12 or abs(p @ e) > 1e-12:
        raise GeometryError("need |p| = 1 and p . e = 0")
    A = 0.5 * (np.eye(2) + sum(pi * s for pi, s in zip(p, PAULI)))
    X = 0.5 * kappa * sum(ei * s for ei, s in zip(e, PAULI))
    return cb.TBPoint(A, X)


def s2_unconvert(P: cb.TBPoint, kappa: float | None = None):
    kappa = S2_KAPPA if kappa is None else kappa
    p = np.array([np.real(np.trace(P.A @ s)) for s in PAULI])
    e = np.array([np.real(np.trace(P.X @ s)) for s in PAULI]) / kappa
    return p, e


def s2_moment(b, p, e) -> MomentValue:
    """The moment map written on TS^2: ``(b.Je, sqrt(1+|e|^2) b.p, b.e)``, ``Je = p x e``."""
    b, p, e = (np.asarray(v, dtype=float) for v in (b, p, e))
    return MomentValue(
        float(b @ np.cross(p, e)),
        float(np.sqrt(1.0 + e @ e) * (b @ p)),
        float(b @ e),
    )


def random_s2_point(rng):
    p = rng.standard_normal(3)
    p /= np.linalg.norm(p)
    e = rng.standard_normal(3)
    e -= (e @ p) * p
    return p, e * rng.uniform(0.0, 2.0) / max(np.linalg.norm(e), 1e-300)


# --- KillingSpec ---------------------------------------------------------


def parse_killing_spec(obj) -> tuple[int, np.ndarray]:
    """Validate ``{"n": int, "u": matrix}`` or ``{"n": int, "basis_coeffs": [...]}``."""
    if not isinstance(obj, dict) or "n" not in obj:
        raise GeometryError("killing spec: missing field 'n'")
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise GeometryError("killing spec: field 'n' must be an integer >= 1")
    if "u" in obj:
        u = matrix_from_json(obj["u"])
        if u.shape != (n + 1, n + 1):
            raise GeometryError(f"killing spec: field 'u' must be {n + 1}x{n + 1}")
        if np.abs(u + u.conj().T).max() > 1e-12:
            raise GeometryError("killing spec: field 'u' is not anti-Hermitian")
        if abs(np.trace(u)) > 1e-12:
            raise GeometryError("killing spec: field 'u' is not traceless")
        return n, u
    if "basis_coeffs" in obj:
        c = obj["basis_coeffs"]
        basis = su_basis(n + 1)
        if not isinstance(c, list) or len(c) != len(basis):
            raise GeometryError(
                f"killing spec: field 'basis_coeffs' must hold {len(basis)} reals"
            )
        try:
            u = sum(float(ci) * B for ci, B in zip(c, basis))
        except (TypeError, ValueError):
            raise GeometryError("killing spec: field 'basis_coeffs' must hold reals") from None
        assert is_su(u)
        return n, u
    raise GeometryError("killing spec: need field 'u' or 'basis_coeffs'")
