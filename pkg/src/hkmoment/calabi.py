"""Calabi hyper-Kaehler structure on the tangent bundle of CP^n.

A point of TCP^n is a pair ``(A, X)``; a tangent vector to TCP^n is stored by its
horizontal and vertical components ``(U, W)``, both in ``T_A CP^n``, and is
realized in HM(n+1) x HM(n+1) as ``(U, W + i[X, JU])``.

Coefficients that carry ``|X|^2`` in a denominator are evaluated through
``a^2 - 1 = 4 nu tr(X^2)``, so every formula is regular at the zero section.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import projective as pj
from .matkit import GeometryError, hermitian, rank1_project

#: ``nu`` in ``a = sqrt(1 + 4 nu tr(X^2))``.  With 0.5 this is ``a^2 = 1 + g(X, X)``,
#: the only value for which ``omega_J`` is closed and the moment map is
#: Hamiltonian (see ``calibration.run_calibration``).
NORM_CONSTANT = 0.5


@dataclass(frozen=True, eq=False)
class TBPoint:
    """Point ``(A, X)`` of TCP^n."""

    A: np.ndarray
    X: np.ndarray

    @property
    def n(self) -> int:
        return self.A.shape[0] - 1


@dataclass(frozen=True, eq=False)
class TTVec:
    """Tangent vector ``U^h + W^v`` at ``base``."""

    base: TBPoint
    hor: np.ndarray
    ver: np.ndarray

    def __add__(self, other: "TTVec") -> "TTVec":
        return TTVec(self.base, self.hor + other.hor, self.ver + other.ver)

    def __sub__(self, other: "TTVec") -> "TTVec":
        return TTVec(self.base, self.hor - other.hor, self.ver - other.ver)

    def __mul__(self, c) -> "TTVec":
        return TTVec(self.base, c * self.hor, c * self.ver)

    __rmul__ = __mul__

    def __neg__(self) -> "TTVec":
        return TTVec(self.base, -self.hor, -self.ver)

    def max_abs(self) -> float:
        return float(max(np.abs(self.hor).max(), np.abs(self.ver).max()))


@dataclass(frozen=True)
class CalabiCoefs:
    a: float
    ta: float  # (a - 1) / (a |X|^2)
    k: float  # (a - 1) / |X|^2


def coefs(P: TBPoint, nu: float | None = None) -> CalabiCoefs:
    nu = NORM_CONSTANT if nu is None else nu
    trX2 = float(np.real(np.trace(P.X @ P.X)))
    a = float(np.sqrt(1.0 + 4.0 * nu * trX2))
    # |X|^2 in the denominators is g(X, X) = 2 tr X^2 = (a^2 - 1) / (2 nu)
    k = 2.0 * nu / (a + 1.0)
    return CalabiCoefs(a=a, ta=k / a, k=k)


def make_point(A, X) -> TBPoint:
    A = hermitian(A)
    X = pj.tangent_project(A, X)
    return TBPoint(A, X)


def random_tb_point(n: int, seed, scale: float = 1.0) -> TBPoint:
    rng = np.random.default_rng(seed)
    s1, s2 = rng.integers(0, 2**63, size=2)
    A = pj.random_point(n, s1)
    X = pj.random_tangent(A, s2)
    X = scale * X / max(pj.fs_norm(X), 1e-300)
    return TBPoint(A, X)


def random_ttvec(P: TBPoint, seed) -> TTVec:
    rng = np.random.default_rng(seed)
    s1, s2 = rng.integers(0, 2**63, size=2)
    return TTVec(P, pj.random_tangent(P.A, s1), pj.random_tangent(P.A, s2))


def zero(P: TBPoint) -> TTVec:
    Z = np.zeros_like(P.A)
    return TTVec(P, Z, Z.copy())


def lift_h(P: TBPoint, Y) -> TTVec:
    return TTVec(P, np.asarray(Y, dtype=complex), np.zeros_like(P.A))


def lift_v(P: TBPoint, Y) -> TTVec:
    return TTVec(P, np.zeros_like(P.A), np.asarray(Y, dtype=complex))


def realize(xi: TTVec) -> tuple[np.ndarray, np.ndarray]:
    """Ambient velocity ``(A_dot, X_dot)`` of ``xi``."""
    P = xi.base
    JU = pj.jmul(P.A, xi.hor)
    corr = hermitian(1j * (P.X @ JU - JU @ P.X))
    return xi.hor, xi.ver + corr


def decompose(P: TBPoint, Adot, Xdot) -> TTVec:
    """Split an ambient velocity at ``P`` into horizontal and vertical parts."""
    hor = pj.tangent_project(P.A, Adot)
    JU = pj.jmul(P.A, hor)
    corr = 1j * (P.X @ JU - JU @ P.X)
    ver = pj.tangent_project(P.A, Xdot - corr)
    return TTVec(P, hor, ver)


def _g(X, Y):
    # 2 Re tr(XY) for Hermitian X, Y
    return 2.0 * float(np.real(np.vdot(Y, X)))


def _span_terms(P: TBPoint, U):
    """``g(U, X)`` and ``g(U, JX)``."""
    JX = pj.jmul(P.A, P.X)
    return _g(U, P.X), _g(U, JX), JX


def metric_h(P: TBPoint, U, V, c: CalabiCoefs | None = None) -> float:
    c = c or coefs(P)
    ux, ujx, _ = _span_terms(P, U)
    vx, vjx, _ = _span_terms(P, V)
    return 0.5 * (c.a + 1.0) * _g(U, V) + 0.5 * c.k * (ux * vx + ujx * vjx)


def metric_v(P: TBPoint, U, V, c: CalabiCoefs | None = None) -> float:
    c = c or coefs(P)
    ux, ujx, _ = _span_terms(P, U)
    vx, vjx, _ = _span_terms(P, V)
    return 2.0 / (c.a + 1.0) * _g(U, V) - c.k / (c.a * (c.a + 1.0)) * (ux * vx + ujx * vjx)


def metric_G(xi: TTVec, eta: TTVec) -> float:
    """Calabi metric; horizontal and vertical lifts are orthogonal."""
    P = xi.base
    if eta.base is not P and not (
        np.array_equal(eta.base.A, P.A) and np.array_equal(eta.base.X, P.X)
    ):
        raise GeometryError("tangent vectors live at different points")
    c = coefs(P)
    return metric_h(P, xi.hor, eta.hor, c) + metric_v(P, xi.ver, eta.ver, c)


def metric_G_cp1(xi: TTVec, eta: TTVec) -> float:
    """The n = 1 form ``a g(U,V)`` on horizontals, ``g(U,V)/a`` on verticals."""
    if xi.base.n != 1:
        raise GeometryError("the simplified formula holds on CP^1 only")
    a = coefs(xi.base).a
    return a * _g(xi.hor, eta.hor) + _g(xi.ver, eta.ver) / a


def gram_G(vecs: list[TTVec]) -> np.ndarray:
    """Gram matrix of ``metric_G`` over vectors sharing a base point."""
    P = vecs[0].base
    c = coefs(P)
    JX = pj.jmul(P.A, P.X)
    H = np.array([v.hor.ravel() for v in vecs])
    W = np.array([v.ver.ravel() for v in vecs])
    gh = 2.0 * np.real(H @ H.conj().T)
    gw = 2.0 * np.real(W @ W.conj().T)
    hx = 2.0 * np.real(H @ P.X.ravel().conj())
    hj = 2.0 * np.real(H @ JX.ravel().conj())
    wx = 2.0 * np.real(W @ P.X.ravel().conj())
    wj = 2.0 * np.real(W @ JX.ravel().conj())
    Gh = 0.5 * (c.a + 1.0) * gh + 0.5 * c.k * (np.outer(hx, hx) + np.outer(hj, hj))
    Gv = 2.0 / (c.a + 1.0) * gw - c.k / (c.a * (c.a + 1.0)) * (
        np.outer(wx, wx) + np.outer(wj, wj)
    )
    return Gh + Gv


def Jstar(xi: TTVec) -> TTVec:
    """Canonical complex structure: ``(JU)^h`` and ``-(JW)^v``."""
    A = xi.base.A
    return TTVec(xi.base, pj.jmul(A, xi.hor), -pj.jmul(A, xi.ver))


def Istar(xi: TTVec) -> TTVec:
    P = xi.base
    c = coefs(P)
    U, W = xi.hor, xi.ver
    ux, ujx, JX = _span_terms(P, U)
    wx, wjx, _ = _span_terms(P, W)
    ver = 0.5 * (c.a + 1.0) * U + 0.5 * c.k * (ux * P.X + ujx * JX)
    hor = -2.0 / (c.a + 1.0) * W + c.k / (c.a * (c.a + 1.0)) * (wx * P.X + wjx * JX)
    return TTVec(P, hor, ver)


def Kstar(xi: TTVec) -> TTVec:
    P = xi.base
    c = coefs(P)
    A = P.A
    U, W = xi.hor, xi.ver
    ux, ujx, JX = _span_terms(P, U)
    wx, wjx, _ = _span_terms(P, W)
    ver = 0.5 * (c.a + 1.0) * pj.jmul(A, U) + 0.5 * c.k * (ux * JX - ujx * P.X)
    hor = 2.0 / (c.a + 1.0) * pj.jmul(A, W) - c.k / (c.a * (c.a + 1.0)) * (
        wx * JX - wjx * P.X
    )
    return TTVec(P, hor, ver)


STRUCTURES = {"I": Istar, "J": Jstar, "K": Kstar}


def kahler_form(name: str, xi: TTVec, eta: TTVec) -> float:
    """``omega_Q(xi, eta) = G(Q xi, eta)``."""
    return metric_G(STRUCTURES[name](xi), eta)


def tensor_A(P: TBPoint, U, V) -> np.ndarray:
    c = coefs(P)
    ta = c.ta
    A, X = P.A, P.X
    ux, ujx, JX = _span_terms(P, U)
    vx, vjx, _ = _span_terms(P, V)
    out = ta * (ux * V - ujx * pj.jmul(A, V))
    out = out + ta * (_g(U, V) - ta * (ux * vx + ujx * vjx)) * X
    out = out + ta * (_g(pj.jmul(A, U), V) - ta * (ux * vjx - ujx * vx)) * JX
    return out


def tensor_B(P: TBPoint, U, V) -> np.ndarray:
    c = coefs(P)
    ta = c.ta
    A, X = P.A, P.X
    ux, ujx, JX = _span_terms(P, U)
    vx, vjx, _ = _span_terms(P, V)
    out = -0.5 * ta * (vx * U + ux * V + vjx * pj.jmul(A, U) + ujx * pj.jmul(A, V))
    out = out + 0.5 * ta**2 * (ux * vx - ujx * vjx) * X
    out = out + 0.5 * ta**2 * (ux * vjx + ujx * vx) * JX
    return out


def nabla_bar_tensor(xi: TTVec, eta: TTVec) -> TTVec:
    """Pointwise part of the Levi-Civita connection of ``G``.

    For fields ``eta = H^h + W^v`` the full derivative is
    ``(D_xi H)^h + (D_xi W)^v + nabla_bar_tensor(xi, eta)`` where ``D`` is the
    pulled-back Fubini-Study connection (see :func:`nabla_bar`).
    """
    P = xi.base
    A, X = P.A, P.X
    U1, W1 = xi.hor, xi.ver
    U2, W2 = eta.hor, eta.ver
    JX = pj.jmul(A, X)
    curv = pj.curvature(A, U1, U2, X) + pj.curvature(A, U1, pj.jmul(A, U2), JX)
    ver = -0.5 * curv + tensor_B(P, W1, W2)
    hor = 0.5 * tensor_A(P, W1, U2) + 0.5 * tensor_A(P, W2, U1)
    return TTVec(P, hor, ver)


def nabla_bar_lifts(P: TBPoint, kind_a: str, U, kind_b: str, V) -> TTVec:
    """Tensorial part of ``nabla_bar`` on a pair of lifts (``'h'`` or ``'v'``)."""
    lift = {"h": lift_h, "v": lift_v}
    return nabla_bar_tensor(lift[kind_a](P, U), lift[kind_b](P, V))


def tt_retract(P: TBPoint, xi: TTVec, s: float = 1.0) -> TBPoint:
    Adot, Xdot = realize(xi)
    A2 = rank1_project(P.A + s * Adot)
    X2 = pj.tangent_project(A2, P.X + s * Xdot)
    return TBPoint(A2, X2)


def velocity(curve, step: float) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference ambient velocity of ``s -> curve(s)`` at ``s = 0``."""
    Pp, Pm = curve(step), curve(-step)
    return (Pp.A - Pm.A) / (2.0 * step), (Pp.X - Pm.X) / (2.0 * step)


def directional(P: TBPoint, xi: TTVec, f, step: float = 1e-4) -> float:
    """Central difference of a scalar ``f`` along the retraction curve of ``xi``."""
    return (f(tt_retract(P, xi, step)) - f(tt_retract(P, xi, -step))) / (2.0 * step)


def nabla_bar(xi: TTVec, field, step: float = 1e-4) -> TTVec:
    """Levi-Civita derivative of the field ``field: TBPoint -> TTVec`` along ``xi``."""
    P = xi.base
    Fp = field(tt_retract(P, xi, step))
    Fm = field(tt_retract(P, xi, -step))
    dH = pj.tangent_project(P.A, (Fp.hor - Fm.hor) / (2.0 * step))
    dW = pj.tangent_project(P.A, (Fp.ver - Fm.ver) / (2.0 * step))
    return TTVec(P, dH, dW) + nabla_bar_tensor(xi, field(P))


def bracket(P: TBPoint, xi_field, eta_field, step: float = 1e-4) -> TTVec:
    """Lie bracket of two vector fields via ambient realizations."""
    xi, eta = xi_field(P), eta_field(P)
    d_eta = velocity(lambda s: _realized(eta_field, tt_retract(P, xi, s)), step)
    d_xi = velocity(lambda s: _realized(xi_field, tt_retract(P, eta, s)), step)
    return decompose(P, d_eta[0] - d_xi[0], d_eta[1] - d_xi[1])


def _realized(field, Q: TBPoint) -> TBPoint:
    Adot, Xdot = realize(field(Q))
    # TBPoint used as a plain pair container here
    return TBPoint(Adot, Xdot)


class Chart:
    """Local coordinates ``t in R^{4n} -> tt_retract(P, sum_a t_a F_a)``.

    ``F`` is the lifted frame: horizontal lifts of the J-adapted orthonormal
    frame ``E`` of ``T_A`` followed by the vertical lifts.  When ``X != 0`` the
    frame starts with ``X/|X|, JX/|X|``.
    """

    def __init__(self, P: TBPoint):
        self.P = P
        self.n = P.n
        self.E = pj.frame(P.A, P.X if pj.fs_norm(P.X) > 1e-12 else None)
        self.F = [lift_h(P, e) for e in self.E] + [lift_v(P, e) for e in self.E]
        self.dim = len(self.F)
        self._H = np.array(self.E)

    def adapted(self) -> bool:
        return pj.fs_norm(self.P.X) > 1e-12

    def vector(self, t) -> TTVec:
        t = np.asarray(t, dtype=float)
        m = 2 * self.n
        U = np.tensordot(t[:m], self._H, axes=1)
        W = np.tensordot(t[m:], self._H, axes=1)
        return TTVec(self.P, U, W)

    def __call__(self, t) -> TBPoint:
        return tt_retract(self.P, self.vector(t), 1.0)

    def tangent(self, t, a: int, step: float = 1e-5, center: TBPoint | None = None) -> TTVec:
        """Coordinate vector ``d/dt_a`` at ``chart(t)``."""
        t = np.asarray(t, dtype=float)
        e = np.zeros(self.dim)
        e[a] = step
        Pp, Pm = self(t + e), self(t - e)
        P0 = self(t) if center is None else center
        return decompose(P0, (Pp.A - Pm.A) / (2 * step), (Pp.X - Pm.X) / (2 * step))

    def tangents(self, t, step: float = 1e-5) -> list[TTVec]:
        P0 = self(t)
        return [self.tangent(t, a, step, P0) for a in range(self.dim)]

    def metric(self, t, step: float = 1e-5) -> np.ndarray:
        """Pulled-back metric matrix ``G_ab(t)``."""
        return gram_G(self.tangents(t, step))

    def frame_gram(self) -> np.ndarray:
        return gram_G(self.F)


# --- verification ---------------------------------------------------------

_GAUSS2 = np.array([-1.0, 1.0]) / np.sqrt(3.0)


def projected_field(H1, H2, c: float = 0.0):
    """Vector field ``Q -> (P_A H1)^h + (P_A H2 + c X)^v`` on TCP^n."""
    H1, H2 = hermitian(H1), hermitian(H2)
    return lambda Q: TTVec(
        Q, pj.tangent_project(Q.A, H1), pj.tangent_project(Q.A, H2) + c * Q.X
    )


def random_field(n: int, seed):
    from .matkit import random_hermitian

    rng = np.random.default_rng(seed)
    s = rng.integers(0, 2**63, size=2)
    return projected_field(
        random_hermitian(n + 1, s[0]), random_hermitian(n + 1, s[1]), rng.uniform(-1, 1)
    )


def quaternion_residual(xi: TTVec) -> float:
    I, J, K = Istar, Jstar, Kstar
    scale = max(xi.max_abs(), 1e-300)
    res = [
        I(I(xi)) + xi,
        J(J(xi)) + xi,
        K(K(xi)) + xi,
        I(J(xi)) - K(xi),
        J(K(xi)) - I(xi),
        K(I(xi)) - J(xi),
    ]
    return max(r.max_abs() for r in res) / scale


def hermitian_residual(xi: TTVec, eta: TTVec) -> float:
    base = metric_G(xi, eta)
    scale = max(abs(metric_G(xi, xi)), abs(metric_G(eta, eta)), 1e-300)
    return max(abs(metric_G(Q(xi), Q(eta)) - base) for Q in STRUCTURES.values()) / scale


def kahler_components(ch: Chart, t, step: float, axes=None) -> dict:
    """Chart components ``omega_Q(d_b, d_c)`` for Q in I, J, K.

    ``axes`` restricts the coordinate vectors that are built (default: all).
    """
    axes = range(ch.dim) if axes is None else axes
    P0 = ch(t)
    T = [ch.tangent(t, a, step, P0) for a in axes]
    m = len(T)
    out = {}
    for q, Q in STRUCTURES.items():
        out[q] = gram_G([Q(v) for v in T] + T)[:m, m:]
    return out


def stokes_domega(P: TBPoint, h: float = 1e-2, triples=None) -> dict:
    """Flux of each Kaehler form through the boundary of chart cubes, per unit volume.

    For every coordinate triple ``(a, b, c)`` the flux of ``omega`` through the
    boundary of ``[-h, h]^3`` (2x2 Gauss rule per face; chart tangents by
    central differences with the same step ``h``) is divided by the cube
    volume.  This tends to ``d omega(d_a, d_b, d_c)`` as ``h -> 0``, with
    ``O(h^2)`` error.  Returns the worst triple per structure.
    """
    import itertools

    ch = Chart(P)
    d = ch.dim
    if triples is None:
        triples = list(itertools.combinations(range(d), 3))
    worst = {q: 0.0 for q in STRUCTURES}
    vol = (2.0 * h) ** 3
    w = h * h  # 2x2 Gauss weights on a face of side 2h
    for abc in triples:
        flux = {q: 0.0 for q in STRUCTURES}
        for a, b, c in (abc, abc[1:] + abc[:1], abc[2:] + abc[:2]):
            for sgn in (1.0, -1.0):
                for gb in _GAUSS2:
                    for gc in _GAUSS2:
                        t = np.zeros(d)
                        t[a], t[b], t[c] = sgn * h, gb * h, gc * h
                        om = kahler_components(ch, t, h, (b, c))
                        for q in STRUCTURES:
                            flux[q] += sgn * w * om[q][0, 1]
        for q in STRUCTURES:
            worst[q] = max(worst[q], abs(flux[q]) / vol)
    return worst


def parallel_residual(P: TBPoint, field, h: float = 1e-3) -> dict:
    """``(nabla_bar_xi Q) eta = nabla_bar_xi (Q eta) - Q nabla_bar_xi eta`` for each Q."""
    eta = field
    xi = random_ttvec(P, 7)
    base = nabla_bar(xi, eta, h)
    scale = max(eta(P).max_abs(), 1.0) * max(xi.max_abs(), 1.0)
    out = {}
    for q, Q in STRUCTURES.items():
        lhs = nabla_bar(xi, lambda R: Q(eta(R)), h)
        out[q] = (lhs - Q(base)).max_abs() / scale
    return out


def compatibility_residual(P: TBPoint, f1, f2, f3, h: float = 1e-3) -> float:
    """``xi G(eta, zeta) - G(nabla_xi eta, zeta) - G(eta, nabla_xi zeta)`` for fields."""
    xi = f1(P)
    lhs = directional(P, xi, lambda Q: metric_G(f2(Q), f3(Q)), h)
    rhs = metric_G(nabla_bar(xi, f2, h), f3(P)) + metric_G(f2(P), nabla_bar(xi, f3, h))
    return abs(lhs - rhs)


def torsion_residual(P: TBPoint, f1, f2, h: float = 1e-3) -> float:
    T = nabla_bar(f1(P), f2, h) - nabla_bar(f2(P), f1, h) - bracket(P, f1, f2, h)
    return T.max_abs()


def verify_hyperkahler_axioms(P: TBPoint, step: float = 1e-3, tol: float = 1e-4,
                              stokes_step: float = 1e-2, seed=0, exact_tol: float = 1e-12,
                              min_order: float = 1.9) -> list:
    """Pointwise and finite-difference checks that ``(G, I*, J*, K*)`` is hyper-Kaehler.

    Exact algebra (quaternion relations, G-Hermiticity) at ``exact_tol``;
    closedness of the Kaehler forms by the Stokes flux at ``stokes_step`` and
    ``stokes_step/2``; parallelism of I*, J*, K*, metric compatibility and
    torsion of ``nabla_bar`` at ``step`` and ``step/2``.  Each finite-difference
    quantity also gets an order report.
    """
    from .moment import order_report  # local: moment imports this module
    from .report import CheckReport
    from .fd import observed_order

    rng = np.random.default_rng(seed)
    s = [int(x) for x in rng.integers(0, 2**63, size=8)]
    xi, eta = random_ttvec(P, s[0]), random_ttvec(P, s[1])
    n = P.n
    F = [random_field(n, s[2 + k]) for k in range(3)]
    reports = [
        CheckReport("calabi.quaternion", quaternion_residual(xi), exact_tol),
        CheckReport("calabi.hermitian", hermitian_residual(xi, eta), exact_tol),
    ]

    st1 = stokes_domega(P, stokes_step)
    st2 = stokes_domega(P, stokes_step / 2)
    e1, e2 = max(st1.values()), max(st2.values())
    reports.append(CheckReport("calabi.stokes_domega", e2, tol, extra={"h": st1, "h/2": st2}))
    reports.append(order_report("calabi.stokes_domega_order", observed_order(e1, e2), min_order,
                                errors=(e1, e2)))

    def fd_pair(name, fn):
        r1, r2 = fn(step), fn(step / 2)
        reports.append(CheckReport(name, r2, tol, extra={"h": r1, "h/2": r2}))
        reports.append(order_report(name + "_order", observed_order(r1, r2), min_order,
                                    errors=(r1, r2)))

    fd_pair("calabi.parallel", lambda h: max(parallel_residual(P, F[0], h).values()))
    fd_pair("calabi.metric_compat", lambda h: compatibility_residual(P, F[0], F[1], F[2], h))
    fd_pair("calabi.torsion", lambda h: torsion_residual(P, F[0], F[1], h))
    return reports
