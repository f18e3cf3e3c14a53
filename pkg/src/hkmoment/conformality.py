"""Torus actions on CP^n: Gram matrices of the fundamental fields, the
proportionality criterion for horizontal weak conformality of the moment map,
and isotropy of orbits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import projective as pj
from .matkit import GeometryError, is_su, matrix_from_json, matrix_to_json
from .report import INDETERMINATE, CheckReport

COMMUTE_TOL = 1e-12


@dataclass(frozen=True)
class ActionSpec:
    """Commuting elements ``u_1..u_k`` of su(n+1) generating a torus action on CP^n."""

    n: int
    generators: tuple

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise GeometryError(f"n: expected an integer >= 1, got {self.n!r}")
        gens = tuple(np.asarray(u, dtype=complex) for u in self.generators)
        if not gens:
            raise GeometryError("generators: empty list")
        for i, u in enumerate(gens):
            if u.shape != (self.n + 1, self.n + 1):
                raise GeometryError(f"generators[{i}]: expected shape {(self.n + 1,) * 2}, got {u.shape}")
            if not is_su(u):
                raise GeometryError(f"generators[{i}]: not anti-Hermitian and traceless")
        for i, j in combinations(range(len(gens)), 2):
            c = float(np.abs(gens[i] @ gens[j] - gens[j] @ gens[i]).max())
            if c > COMMUTE_TOL:
                raise GeometryError(f"generators[{i}], generators[{j}]: do not commute (|[u_i,u_j]| = {c:.2e})")
        object.__setattr__(self, "generators", gens)

    @property
    def k(self) -> int:
        return len(self.generators)

    def to_json(self) -> dict:
        return {"n": int(self.n), "generators": [matrix_to_json(u) for u in self.generators]}

    @classmethod
    def from_json(cls, obj) -> "ActionSpec":
        if isinstance(obj, (str, bytes)):
            obj = json.loads(obj)
        if not isinstance(obj, dict):
            raise GeometryError("action spec: expected a JSON object")
        for key in ("n", "generators"):
            if key not in obj:
                raise GeometryError(f"{key}: missing field")
        if not isinstance(obj["generators"], list):
            raise GeometryError("generators: expected a list of matrices")
        gens = []
        for i, m in enumerate(obj["generators"]):
            try:
                gens.append(matrix_from_json(m))
            except (ValueError, TypeError) as exc:
                raise GeometryError(f"generators[{i}]: {exc}") from exc
        return cls(obj["n"], tuple(gens))


def standard_torus(n: int) -> ActionSpec:
    """Maximal torus: ``diag(.., i, -i, ..)/2`` on consecutive slots."""
    gens = []
    for j in range(n):
        d = np.zeros(n + 1, dtype=complex)
        d[j], d[j + 1] = 0.5j, -0.5j
        gens.append(np.diag(d))
    return ActionSpec(n, tuple(gens))


def circle(n: int, weights=None) -> ActionSpec:
    """Single generator ``i diag(w)`` with traceless real weights."""
    w = np.arange(n + 1, dtype=float) if weights is None else np.asarray(weights, dtype=float)
    w = w - w.mean()
    return ActionSpec(n, (np.diag(1j * w),))


@dataclass
class GramSample:
    point: np.ndarray
    gram: np.ndarray


def fundamental_fields(spec: ActionSpec, A) -> list[np.ndarray]:
    return [pj.killing_field(u, A) for u in spec.generators]


def gram_matrix(spec: ActionSpec, A) -> GramSample:
    V = fundamental_fields(spec, A)
    k = len(V)
    G = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            G[i, j] = G[j, i] = pj.fs_metric(V[i], V[j])
    return GramSample(np.asarray(A), G)


def sample_grams(spec: ActionSpec, count: int, seed) -> list[GramSample]:
    rng = np.random.default_rng(seed)
    return [gram_matrix(spec, pj.random_point(spec.n, rng)) for _ in range(count)]


@dataclass
class ProportionalityResult:
    """``verdict`` is None when undecidable (every sampled Gram vanishes)."""

    verdict: bool | None
    h: np.ndarray | None = None
    witness: tuple | None = None
    distance: float = 0.0
    scales: list = field(default_factory=list)


def proportionality_test(samples: list[GramSample], tol: float = 1e-8,
                         zero_tol: float = 1e-12) -> ProportionalityResult:
    """Are all nonzero Gram matrices multiples of one fixed matrix ``h``?

    Each Gram is normalized to unit Frobenius norm (Gram matrices are PSD, so
    no sign ambiguity remains) and pairs are compared in sample order; the
    first pair further apart than ``tol`` is returned as the witness.
    """
    live = [(i, s) for i, s in enumerate(samples) if np.linalg.norm(s.gram) > zero_tol]
    if not live:
        return ProportionalityResult(None)
    normed = [(i, s, s.gram / np.linalg.norm(s.gram)) for i, s in live]
    worst = 0.0
    for (i, si, ni), (j, sj, nj) in combinations(normed, 2):
        d = float(np.linalg.norm(ni - nj))
        worst = max(worst, d)
        if d > tol:
            return ProportionalityResult(False, witness=(i, j, si.point, sj.point), distance=d)
    h = normed[0][2]
    scales = [float(np.linalg.norm(s.gram)) for _, s, _ in normed]
    return ProportionalityResult(True, h=h, distance=worst, scales=scales)


def moment_map_cpn(spec: ActionSpec, A) -> np.ndarray:
    return np.array([pj.linear_hamiltonian(u, A) for u in spec.generators])


def moment_differential_residual(spec: ActionSpec, A, X, step: float = 1e-4) -> float:
    """``max_i |d phi_i(X) - omega(V_i, X)|`` with ``d phi`` by central differences along a retraction."""
    d = (moment_map_cpn(spec, pj.curve(A, X, step)) - moment_map_cpn(spec, pj.curve(A, X, -step))) / (2 * step)
    om = np.array([pj.omega(A, V, X) for V in fundamental_fields(spec, A)])
    return float(np.abs(d - om).max())


def check_moment_differential(spec: ActionSpec, samples: int = 20, step: float = 1e-4,
                              tol: float = 1e-6, seed=42) -> CheckReport:
    rng = np.random.default_rng(seed)
    errs = []
    for _ in range(samples):
        A = pj.random_point(spec.n, rng)
        X = pj.unit_tangent(A, rng)
        errs.append(moment_differential_residual(spec, A, X, step))
    return CheckReport("conformality.moment_differential", max(errs), tol, samples=samples, seed=seed)


def isotropy_check(spec: ActionSpec, samples: int = 50, tol: float = 1e-12, seed=42,
                   step: float = 1e-4, fd_tol: float = 1e-6) -> list[CheckReport]:
    """``omega(V_i, V_j) = 0`` exactly, and ``d phi_k(V_j) = 0`` by differences along the orbit."""
    rng = np.random.default_rng(seed)
    pair, orbit = [], []
    for _ in range(samples):
        A = pj.random_point(spec.n, rng)
        V = fundamental_fields(spec, A)
        scale = max(pj.fs_norm(v) for v in V) ** 2 or 1.0
        pair.append(max((abs(pj.omega(A, V[i], V[j])) / scale
                         for i in range(spec.k) for j in range(spec.k)), default=0.0))
        for u in spec.generators:
            d = (moment_map_cpn(spec, pj.flow(u, step, A)) - moment_map_cpn(spec, pj.flow(u, -step, A))) / (2 * step)
            orbit.append(float(np.abs(d).max()))
    common = dict(samples=samples, seed=seed)
    return [
        CheckReport("conformality.isotropy", max(pair), tol, **common),
        CheckReport("conformality.orbit_in_kernel", max(orbit), fd_tol, **common),
    ]


def gram_psd_check(spec: ActionSpec, samples: int = 100, seed=42) -> CheckReport:
    worst = 0.0
    for s in sample_grams(spec, samples, seed):
        G = s.gram
        scale = float(np.abs(G).max()) or 1.0
        worst = max(worst, float(np.abs(G - G.T).max()), max(0.0, -float(np.linalg.eigvalsh(G)[0])) / scale)
    return CheckReport("conformality.gram_psd", worst, 1e-10, samples=samples, seed=seed)


def proportionality_report(spec: ActionSpec, samples: int = 20, seed=42, tol: float = 1e-8,
                           expect: bool | None = None, name: str = "conformality.proportionality") -> CheckReport:
    """Report for :func:`proportionality_test`; with ``expect`` set, passes iff the verdict matches."""
    res = proportionality_test(sample_grams(spec, samples, seed), tol)
    extra = {"verdict": res.verdict, "distance": res.distance}
    if res.witness is not None:
        i, j, Pi, Pj = res.witness
        extra["witness"] = [i, j]
        extra["witness_points"] = [matrix_to_json(Pi), matrix_to_json(Pj)]
    if res.verdict is None:
        return CheckReport(name, float("nan"), 0.0, samples=samples, seed=seed, extra=extra,
                           status=INDETERMINATE, notes="all sampled Gram matrices vanish")
    target = res.verdict if expect is None else expect
    return CheckReport(name, 0.0 if res.verdict == target else 1.0, 0.0, samples=samples,
                       seed=seed, extra=extra)
