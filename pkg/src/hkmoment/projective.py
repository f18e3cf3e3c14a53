"""CP^n as the adjoint orbit of rank-one projectors in HM(n+1).

A point is a Hermitian matrix ``A`` with ``A @ A = A`` and ``tr A = 1``; a tangent
vector at ``A`` is a Hermitian ``X`` with ``XA + AX = X`` (hence ``tr X = 0``).
The metric is the restriction of ``2 tr(XY)``, which makes CP^1 the unit
sphere and gives holomorphic sectional curvature 1 in general.

Functions take the base point explicitly; tangent vectors are bare arrays.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .matkit import (
    GeometryError,
    ambient_inner,
    hermitian,
    rank1_project,
    random_hermitian,
    su_basis,
)

#: Sign in front of the closed-form curvature tensor, for the convention
#: R(X,Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y].  Fixed by
#: ``calibration.run_calibration``.
CURVATURE_SIGN = 1.0
#: Holomorphic sectional curvature of the induced metric.
HOLOMORPHIC_CURVATURE = 1.0
#: omega(X, Y) = OMEGA_SIGN * g(JX, Y); fixed by ``calibration.run_calibration``.
OMEGA_SIGN = 1.0

POINT_TOL = 1e-12


def dim_of(A) -> int:
    """Complex dimension n of the CP^n containing ``A``."""
    return np.asarray(A).shape[0] - 1


def point_from_vector(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex).ravel()
    nrm = np.linalg.norm(z)
    if nrm == 0.0:
        raise GeometryError("zero vector does not define a point of CP^n")
    z = z / nrm
    return np.outer(z, z.conj())


def base_point(n: int) -> np.ndarray:
    """The projector ``diag(1, 0, ..., 0)``."""
    A0 = np.zeros((n + 1, n + 1), dtype=complex)
    A0[0, 0] = 1.0
    return A0


def point_residual(A) -> float:
    A = np.asarray(A)
    return max(
        float(np.abs(A @ A - A).max()),
        abs(np.trace(A) - 1.0),
        float(np.abs(A - A.conj().T).max()),
    )


def tangent_residual(A, X) -> float:
    X = np.asarray(X)
    return max(
        float(np.abs(X @ A + A @ X - X).max()),
        abs(np.trace(X)),
        float(np.abs(X - X.conj().T).max()),
    )


def tangent_project(A, H) -> np.ndarray:
    """Orthogonal projection of a Hermitian ``H`` onto ``T_A CP^n``: ``AH + HA - 2AHA``."""
    A = np.asarray(A)
    H = hermitian(H)
    if A.shape != H.shape:
        raise GeometryError(f"dimension mismatch: {A.shape} vs {H.shape}")
    AH = A @ H
    return hermitian(AH + H @ A - 2.0 * AH @ A)


def fs_metric(X, Y) -> float:
    """Fubini-Study metric ``g(X, Y) = 2 tr(XY)``."""
    return ambient_inner(X, Y)


def fs_norm(X) -> float:
    return float(np.sqrt(max(fs_metric(X, X), 0.0)))


def jmul(A, X) -> np.ndarray:
    """Complex structure ``JX = i(I - 2A)X``."""
    A = np.asarray(A)
    I = np.eye(A.shape[0])
    return hermitian(1j * (I - 2.0 * A) @ X)


def omega(A, X, Y) -> float:
    """Kaehler form of CP^n."""
    return OMEGA_SIGN * fs_metric(jmul(A, X), Y)


def random_point(n: int, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
    return point_from_vector(z)


def random_tangent(A, seed, scale: float = 1.0) -> np.ndarray:
    X = tangent_project(A, random_hermitian(A.shape[0], seed))
    return scale * X


def unit_tangent(A, seed) -> np.ndarray:
    """Random tangent of unit Fubini-Study length (a well-scaled difference direction)."""
    X = random_tangent(A, seed)
    return X / fs_norm(X)


def frame(A, X=None) -> list[np.ndarray]:
    """A g-orthonormal J-adapted frame ``[E1, JE1, E3, JE3, ...]`` of ``T_A``.

    If ``X`` is given and nonzero, ``E1 = X/|X|`` and ``E2 = JX/|X|``.  The rest
    is completed by Gram-Schmidt over tangent projections of the Hermitian
    matrices ``i u``, ``u`` running through :func:`su_basis` in order.
    """
    A = np.asarray(A)
    n = dim_of(A)
    out: list[np.ndarray] = []

    def push(V):
        for E in out:
            V = V - fs_metric(V, E) * E
        nrm = fs_norm(V)
        if nrm < 1e-8:
            return False
        V = V / nrm
        out.append(V)
        out.append(jmul(A, V))
        return True

    if X is not None and fs_norm(X) > 0.0:
        push(np.asarray(X, dtype=complex))
    for u in su_basis(n + 1):
        if len(out) == 2 * n:
            break
        push(tangent_project(A, 1j * u))
    if len(out) != 2 * n:
        raise GeometryError("frame completion failed")
    return out


def check_identities(A, X, Y) -> dict:
    """Residuals of the three matrix identities of the projector model.

    Returns a dict with keys ``anticommutator`` (n = 1 only, else ``None``),
    ``projected_anticommutator`` and ``cubic``.  The cubic identity needs ``Y``
    orthogonal to both ``X`` and ``JX`` (it fails for ``Y = JX``), so ``Y`` is
    orthogonalized against that complex line first.
    """
    A = np.asarray(A)
    n = dim_of(A)
    I = np.eye(n + 1)
    XY = X @ Y + Y @ X
    trXY = np.trace(X @ Y)
    res = {"anticommutator": None}
    if n == 1:
        res["anticommutator"] = float(np.abs(XY - trXY * I).max())
    res["projected_anticommutator"] = float(np.abs(XY @ A - trXY * A).max())
    nx = fs_metric(X, X)
    Yp = np.asarray(Y, dtype=complex)
    if nx > 0:
        JX = jmul(A, X)
        Yp = Yp - (fs_metric(X, Yp) / nx) * X - (fs_metric(JX, Yp) / nx) * JX
    cubic = 2.0 * (X @ X @ Yp + Yp @ X @ X + 2.0 * X @ Yp @ X) - np.trace(X @ X) * Yp
    res["cubic"] = float(np.abs(cubic).max())
    return res


def curve(A, X, t) -> np.ndarray:
    """Retraction curve ``t -> rank1_project(A + t X)``."""
    return rank1_project(A + t * np.asarray(X))


def nabla(A, X, field, step: float = 1e-4) -> np.ndarray:
    """Levi-Civita derivative ``nabla_X V`` of a tangent field ``V = field(A)``.

    Tangent projection of the ambient central difference of ``field`` along the
    retraction curve through ``A`` with velocity ``X``.
    """
    if not 0.0 < step <= 1e-2:
        raise GeometryError("step must lie in (0, 1e-2]")
    Vp = field(curve(A, X, step))
    Vm = field(curve(A, X, -step))
    return tangent_project(A, (Vp - Vm) / (2.0 * step))


def curvature(A, X, Y, Z, sign: float | None = None) -> np.ndarray:
    """Curvature tensor ``R(X,Y)Z`` of constant holomorphic sectional curvature 1."""
    s = CURVATURE_SIGN if sign is None else sign
    c = HOLOMORPHIC_CURVATURE
    JX, JY, JZ = jmul(A, X), jmul(A, Y), jmul(A, Z)
    g = fs_metric
    R = (
        g(Y, Z) * X
        - g(X, Z) * Y
        + g(JY, Z) * JX
        - g(JX, Z) * JY
        + 2.0 * g(X, JY) * JZ
    )
    return s * 0.25 * c * R


def curvature_fd(A, X, Y, Z, step: float = 1e-3) -> np.ndarray:
    """Finite-difference curvature ``[nabla_X, nabla_Y] Z - nabla_[X,Y] Z``.

    ``X``, ``Y``, ``Z`` are extended to the fields ``B -> tangent_project(B, .)``
    of the given matrices; their bracket is ``nabla_X Y - nabla_Y X``.
    """
    fX = lambda B: tangent_project(B, X)
    fY = lambda B: tangent_project(B, Y)
    fZ = lambda B: tangent_project(B, Z)
    inner = 1e-5
    nYZ = lambda B: nabla(B, fY(B), fZ, inner)
    nXZ = lambda B: nabla(B, fX(B), fZ, inner)
    XX, YY = fX(A), fY(A)
    bracket = nabla(A, XX, fY, step) - nabla(A, YY, fX, step)
    return nabla(A, XX, nYZ, step) - nabla(A, YY, nXZ, step) - nabla(A, bracket, fZ, step)


def killing_field(u, A) -> np.ndarray:
    """Fundamental field of ``u`` in su(n+1): ``gamma_u(A) = uA - Au``."""
    u = np.asarray(u)
    return hermitian(u @ A - A @ u)


def killing_cov_deriv(u, A, X) -> np.ndarray:
    """``nabla_X gamma_u`` = tangent part of ``[u, X]``."""
    return tangent_project(A, u @ X - X @ u)


def linear_hamiltonian(u, A) -> float:
    """Hamiltonian ``g(A, iu) = 2 tr(A iu)`` of ``gamma_u``."""
    return ambient_inner(A, 1j * np.asarray(u))


def flow(u, t: float, M) -> np.ndarray:
    """Adjoint action ``e^{tu} M e^{-tu}``."""
    U = expm(t * np.asarray(u))
    return U @ M @ U.conj().T


def scalar_curvature(A) -> float:
    """Scalar curvature by tracing :func:`curvature` over an orthonormal frame."""
    E = frame(A)
    return sum(
        fs_metric(curvature(A, Ei, Ej, Ej), Ei) for Ei in E for Ej in E
    )


class BaseChart:
    """Coordinates ``s in R^{2n} -> rank1_project(A + sum_k s_k E_k)`` around ``A``."""

    def __init__(self, A):
        self.A = np.asarray(A)
        self.E = frame(self.A)
        self.dim = len(self.E)
        self._H = np.array(self.E)

    def __call__(self, s) -> np.ndarray:
        return rank1_project(self.A + np.tensordot(np.asarray(s, dtype=float), self._H, axes=1))

    def metric(self, s, step: float = 1e-5) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        T = []
        for k in range(self.dim):
            e = np.zeros(self.dim)
            e[k] = step
            T.append(((self(s + e) - self(s - e)) / (2.0 * step)).ravel())
        T = np.array(T)
        return 2.0 * np.real(T @ T.conj().T)


def laplacian(A, f, step: float = 1e-2, inner: float = 1e-5):
    """Laplace-Beltrami operator of the Fubini-Study metric applied to ``f`` at ``A``."""
    from .fd import laplacian as _lap

    ch = BaseChart(A)
    return _lap(lambda s: ch.metric(s, inner), lambda s: f(ch(s)), ch.dim, step, inner)
