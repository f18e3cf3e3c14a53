"""A Gibbons-Hawking metric on R^4 with its circle-invariant quadratic map to R^3.

``g_a = (a|x|^2 + 1) g_0 - a(a|x|^2 + 2)/(a|x|^2 + 1) eta (x) eta`` with
``eta = -x2 dx1 + x1 dx2 - x4 dx3 + x3 dx4``, and
``phi(z1, z2) = (|z1|^2 - |z2|^2, Re 2 z1 conj(z2), Im 2 z1 conj(z2))``
where ``z1 = x1 + i x2``, ``z2 = x3 + i x4``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import fd
from .matkit import GeometryError
from .report import CheckReport


def eta(x) -> np.ndarray:
    """Generator of ``(z1, z2) -> (zeta z1, zeta z2)``, also the 1-form coefficients."""
    x1, x2, x3, x4 = np.asarray(x, dtype=float)
    return np.array([-x2, x1, -x4, x3])


def metric_ga(a: float, x) -> np.ndarray:
    if not a > 0:
        raise GeometryError(f"a must be positive, got {a}")
    x = np.asarray(x, dtype=float)
    r2 = float(x @ x)
    s = a * r2 + 1.0
    e = eta(x)
    g = s * np.eye(4) - (a * (a * r2 + 2.0) / s) * np.outer(e, e)
    # eigenvalues are s (three times) and 1/s along eta
    if np.linalg.eigvalsh(g)[0] <= 0.0:
        raise RuntimeError(f"metric_ga lost positivity at x={x.tolist()}")
    return g


def metric_flat(x) -> np.ndarray:
    return np.eye(4)


def phi(x) -> np.ndarray:
    x1, x2, x3, x4 = np.asarray(x, dtype=float)
    z1, z2 = complex(x1, x2), complex(x3, x4)
    w = 2.0 * z1 * z2.conjugate()
    return np.array([abs(z1) ** 2 - abs(z2) ** 2, w.real, w.imag])


def circle_act(theta: float, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    zeta = complex(math.cos(theta), math.sin(theta))
    z1, z2 = zeta * complex(x[0], x[1]), zeta * complex(x[2], x[3])
    return np.array([z1.real, z1.imag, z2.real, z2.imag])


@dataclass(frozen=True)
class MapSetup:
    """A metric on R^dim (standard coordinates) and a map into R^k."""

    dim: int
    metric: Callable
    fn: Callable
    blocks: tuple = ()

    @property
    def k(self) -> int:
        return int(np.size(self.fn(np.zeros(self.dim))))


def gh_setup(a: float) -> MapSetup:
    return MapSetup(4, lambda x: metric_ga(a, x), phi, ((4, 3),))


def flat_setup() -> MapSetup:
    return MapSetup(4, metric_flat, phi, ((4, 3),))


def product_moment(setups: list[MapSetup]) -> MapSetup:
    """Riemannian product with the concatenated map."""
    if not setups:
        raise ValueError("product_moment needs at least one factor")
    if len(setups) < 2:
        raise ValueError("product_moment needs at least two factors")
    dims = [s.dim for s in setups]
    cuts = np.cumsum([0] + dims)

    def metric(x):
        x = np.asarray(x, dtype=float)
        G = np.zeros((cuts[-1], cuts[-1]))
        for s, lo, hi in zip(setups, cuts[:-1], cuts[1:]):
            G[lo:hi, lo:hi] = s.metric(x[lo:hi])
        return G

    def fn(x):
        x = np.asarray(x, dtype=float)
        return np.concatenate([np.atleast_1d(s.fn(x[lo:hi])) for s, lo, hi in zip(setups, cuts[:-1], cuts[1:])])

    blocks = tuple(b for s in setups for b in s.blocks)
    return MapSetup(int(cuts[-1]), metric, fn, blocks)


def laplacian_at(setup: MapSetup, f, x, step: float = 1e-3, inner: float = 1e-4,
                 richardson: bool = True):
    x = np.asarray(x, dtype=float)

    def lap(h):
        return fd.laplacian(lambda t: setup.metric(x + t), lambda t: f(x + t), setup.dim, h, inner)

    L = lap(step)
    return fd.richardson(L, lap(step / 2.0)) if richardson else L


def lb_r4(a: float, f, x, step: float = 1e-3, inner: float = 1e-4):
    """Laplace-Beltrami operator of ``g_a`` applied to ``f`` at ``x`` (Richardson over h, h/2)."""
    return laplacian_at(gh_setup(a), f, x, step, inner)


def gradient_gram(setup: MapSetup, x, step: float = 1e-5) -> np.ndarray:
    """``g(d phi_j, d phi_k)`` with indices raised by the inverse metric."""
    x = np.asarray(x, dtype=float)
    D = fd.coord_gradient(setup.fn, x, step)
    return D.T @ np.linalg.solve(setup.metric(x), D)


def sample_ball(count: int, seed, rmin: float = 0.1, rmax: float = 2.0, dim: int = 4) -> np.ndarray:
    """Points with uniform direction and radius uniform in ``[rmin, rmax]``."""
    rng = np.random.default_rng(seed)
    d = rng.standard_normal((count, dim))
    d /= np.linalg.norm(d, axis=1)[:, None]
    return d * rng.uniform(rmin, rmax, size=(count, 1))


def _block_conformality(Q: np.ndarray, blocks) -> tuple[float, float]:
    """Worst per-block conformality and the largest off-block entry, both relative."""
    conf, off = 0.0, 0.0
    lo = 0
    scale = float(np.abs(np.diag(Q)).max()) or 1.0
    mask = np.ones_like(Q, dtype=bool)
    for _, k in blocks:
        B = Q[lo:lo + k, lo:lo + k]
        lam2 = float(np.trace(B)) / k
        conf = max(conf, float(np.linalg.norm(B - lam2 * np.eye(k)) / lam2))
        mask[lo:lo + k, lo:lo + k] = False
        lo += k
    if mask.any():
        off = float(np.abs(Q[mask]).max()) / scale
    return conf, off


def probe(x) -> float:
    """A test function with nonzero Laplacian and no symmetry."""
    return x[0] * x[2] + x[1] ** 3


def scheme_order(setup: MapSetup, points, step: float = 2e-2, min_order: float = 1.9,
                 name: str = "gibbons", seed=None) -> CheckReport:
    """Observed order of the Laplacian on :func:`probe` from steps ``h, h/2, h/4``."""
    from .moment import order_report

    orders = []
    for x in points:
        Ls = [laplacian_at(setup, lambda y: probe(y[:4]), x, step / 2**j, richardson=False)
              for j in range(3)]
        orders.append(fd.observed_order3(*Ls))
    return order_report(f"{name}.laplacian_order", min(orders), min_order,
                        samples=len(points), seed=seed)


def check_setup(setup: MapSetup, points, step: float = 1e-3, tol: float = 1e-4,
                name: str = "gibbons", seed=None, floor: float = 1e-7) -> list[CheckReport]:
    """Harmonicity, per-block conformality and convergence order for ``setup.fn`` at ``points``.

    The Laplacian of each component is divided by that component's gradient
    norm.  The order is read off raw Laplacians at ``step, step/2, step/4``;
    when even the raw values stay below ``floor`` there is no truncation error
    to measure (the flux of an invariant quadratic map is linear) and the
    scheme order is taken from :func:`scheme_order` instead.
    """
    from .moment import order_report

    harm, conf, offb, orders, raws = [], [], [], [], []
    for x in points:
        L1, L2, L4 = (laplacian_at(setup, setup.fn, x, step / 2**j, richardson=False) for j in range(3))
        L = fd.richardson(L1, L2)
        Q = gradient_gram(setup, x)
        gn = np.sqrt(np.diag(Q))
        harm.append(float(np.max(np.abs(L) / gn)))
        raws.append(float(max(np.max(np.abs(Lj) / gn) for Lj in (L1, L2, L4))))
        c, o = _block_conformality(Q, setup.blocks)
        conf.append(c)
        offb.append(o)
        orders.append(fd.observed_order3(L1, L2, L4))
    common = dict(samples=len(points), seed=seed)
    out = [
        CheckReport(f"{name}.harmonicity", max(harm), tol, extra={"per_point": harm}, **common),
        CheckReport(f"{name}.conformality", max(conf), tol, extra={"per_point": conf}, **common),
        order_report(f"{name}.harmonicity_order", min(orders), errors=(max(raws),), floor=floor,
                     **common),
        scheme_order(setup, points[:5], name=name, seed=seed),
    ]
    if len(setup.blocks) > 1:
        out.append(CheckReport(f"{name}.gram_block_diagonal", max(offb), 1e-8, **common))
    return out


def check_gh_harmonic_morphism(a: float, samples: int = 50, step: float = 1e-3, tol: float = 1e-4,
                               seed=42) -> list[CheckReport]:
    pts = sample_ball(samples, seed)
    return check_setup(gh_setup(a), pts, step, tol, name=f"gibbons.a={a:g}", seed=seed)


def check_flat_control(samples: int = 50, step: float = 1e-3, tol: float = 1e-8, seed=42) -> list[CheckReport]:
    """phi for the Euclidean metric; quadratic, so differences are exact up to roundoff."""
    pts = sample_ball(samples, seed)
    reps = check_setup(flat_setup(), pts, step, tol, name="gibbons.flat", seed=seed)
    return reps[:2]


def check_product(a_values=(1.0, 2.0), flat: bool = False, samples: int = 10, step: float = 1e-3,
                  tol: float = 1e-4, seed=42) -> list[CheckReport]:
    """Harmonic morphism checks on a product of Gibbons-Hawking (and flat) factors."""
    factors = [gh_setup(a) for a in a_values] + ([flat_setup()] if flat else [])
    setup = product_moment(factors)
    rng = np.random.default_rng(seed)
    pts = np.hstack([sample_ball(samples, rng) for _ in factors])
    tag = "x".join([f"{a:g}" for a in a_values] + (["flat"] if flat else []))
    return check_setup(setup, pts, step, tol, name=f"gibbons.product[{tag}]", seed=seed)


def check_small_a(a: float = 1e-8, samples: int = 20, step: float = 1e-3, tol: float = 1e-6,
                  seed=42) -> CheckReport:
    """``Lap_{g_a} x1`` tends to the flat value 0 as ``a -> 0``."""
    pts = sample_ball(samples, seed)
    err = max(abs(lb_r4(a, lambda y: y[0], x, step)) for x in pts)
    return CheckReport("gibbons.small_a_limit", float(err), tol, samples=samples, seed=seed,
                       extra={"a": a})


def killing_residual(a: float, x, step: float = 1e-4) -> float:
    """``|L_eta g_a|`` at ``x``: central difference of ``g_a`` along ``eta`` plus the linear part."""
    x = np.asarray(x, dtype=float)
    K = eta(x)
    M = fd.coord_gradient(eta, x, step).T  # M[k, i] = d_i eta^k
    dg = (metric_ga(a, x + step * K) - metric_ga(a, x - step * K)) / (2.0 * step)
    g = metric_ga(a, x)
    return float(np.abs(dg + M.T @ g + g @ M).max())


def circle_invariance(a: float, samples: int = 20, step: float = 1e-4, tol: float = 1e-5,
                      seed=42, exact_tol: float = 1e-12) -> list[CheckReport]:
    rng = np.random.default_rng(seed)
    pts = sample_ball(samples, rng)
    inv = []
    for x in pts:
        th = rng.uniform(0.0, 2.0 * math.pi)
        inv.append(float(np.abs(phi(circle_act(th, x)) - phi(x)).max()))
    kil = [killing_residual(a, x, step) for x in pts]
    common = dict(samples=samples, seed=seed)
    return [
        CheckReport("gibbons.phi_invariance", max(inv), exact_tol, **common),
        CheckReport(f"gibbons.a={a:g}.killing", max(kil), tol, **common),
    ]
