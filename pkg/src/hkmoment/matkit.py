"""Complex-matrix kernel.

Hermitian and anti-Hermitian helpers, the real inner product ``2 tr(AB)`` on
Hermitian matrices, a basis of su(n+1), the rank-one retraction onto
projectors, and seeded random sampling.  Matrices are plain ``numpy``
complex arrays.
"""

from __future__ import annotations

import json

import numpy as np

#: Relative tolerance for the discarded imaginary part of a real-valued trace.
IMAG_TOL = 1e-12
#: Smallest accepted gap between the two largest eigenvalues in ``rank1_project``.
EIGEN_GAP = 1e-10


class GeometryError(ValueError):
    """Raised when an input violates a geometric precondition."""


class RetractionError(GeometryError):
    """The dominant eigenvalue is (numerically) degenerate."""


def hermitian(M):
    """Return the Hermitian part ``(M + M^H) / 2``."""
    M = np.asarray(M, dtype=complex)
    return 0.5 * (M + M.conj().T)


def anti_hermitian(M):
    M = np.asarray(M, dtype=complex)
    return 0.5 * (M - M.conj().T)


def _check_square(M, name="matrix"):
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise GeometryError(f"{name} must be square, got shape {M.shape}")
    if M.shape[0] < 2:
        raise GeometryError(f"{name} must have dimension >= 2")


def ambient_inner(A, B) -> float:
    """Real inner product ``2 tr(AB)`` of two Hermitian matrices.

    Also used for the pairing of a Hermitian matrix with ``i u``, ``u`` in
    su(n+1), which is Hermitian as well.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise GeometryError(f"dimension mismatch: {A.shape} vs {B.shape}")
    # tr(AB) = sum_jk A_jk B_kj
    val = 2.0 * np.einsum("jk,kj->", A, B)
    scale = max(1.0, float(np.abs(A).max(initial=0.0) * np.abs(B).max(initial=0.0)) * A.shape[0])
    if abs(val.imag) > IMAG_TOL * scale:
        raise GeometryError(
            f"inner product has imaginary residue {val.imag:.3e}; inputs are not Hermitian"
        )
    return float(val.real)


def su_basis(n_plus_1: int) -> list[np.ndarray]:
    """Basis of su(n+1): anti-Hermitian generalized Gell-Mann generators.

    Ordering: for each pair ``j < k`` the symmetric generator ``i(E_jk + E_kj)``
    followed by the antisymmetric one ``E_jk - E_kj``; then the ``n`` traceless
    diagonal generators ``i diag(1, .., 1, -l, 0, ..)`` scaled so that every
    element has squared Frobenius norm 2, like the off-diagonal ones.
    """
    d = int(n_plus_1)
    if d < 2:
        raise GeometryError("su(n+1) needs n+1 >= 2")
    basis = []
    for j in range(d):
        for k in range(j + 1, d):
            S = np.zeros((d, d), dtype=complex)
            S[j, k] = S[k, j] = 1j
            basis.append(S)
            T = np.zeros((d, d), dtype=complex)
            T[j, k] = 1.0
            T[k, j] = -1.0
            basis.append(T)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -float(l)
        diag /= np.sqrt(l * (l + 1) / 2.0)
        basis.append(np.diag(1j * diag))
    return basis


def rank1_project(H, gap: float = EIGEN_GAP) -> np.ndarray:
    """Nearest rank-one orthogonal projector ``v v^H`` to a Hermitian matrix.

    ``v`` is a unit eigenvector for the largest eigenvalue.  The result does not
    depend on the phase of ``v``.
    """
    H = hermitian(H)
    _check_square(H)
    w, V = np.linalg.eigh(H)
    if w[-1] - w[-2] <= gap:
        raise RetractionError(
            f"top eigenvalue is not dominant (gap {w[-1] - w[-2]:.3e} <= {gap:.1e})"
        )
    v = V[:, -1]
    return np.outer(v, v.conj())


def random_hermitian(dim: int, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return hermitian(M)


def random_su(dim: int, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    u = anti_hermitian(M)
    u -= np.trace(u) / dim * np.eye(dim)
    # the diagonal is purely imaginary after the antisymmetrization
    u[np.diag_indices(dim)] = 1j * u.diagonal().imag
    return u


def is_su(u, tol: float = 1e-12) -> bool:
    u = np.asarray(u, dtype=complex)
    return bool(
        np.abs(u + u.conj().T).max() <= tol and abs(np.trace(u)) <= tol * u.shape[0]
    )


def matrix_to_json(M) -> list:
    """Row-major list of ``[re, im]`` pairs."""
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def matrix_from_json(data) -> np.ndarray:
    try:
        M = np.array([[complex(re, im) for re, im in row] for row in data], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise GeometryError(f"malformed matrix: {exc}") from None
    _check_square(M)
    return M


def dumps_matrix(M) -> str:
    return json.dumps(matrix_to_json(M))
