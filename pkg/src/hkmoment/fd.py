"""Finite-difference machinery in local coordinates."""

from __future__ import annotations

import math

import numpy as np


def central_diff(fn, t, a: int, h: float):
    """``d fn / d t_a`` at ``t``, second order."""
    t = np.asarray(t, dtype=float)
    e = np.zeros_like(t)
    e[a] = h
    return (np.asarray(fn(t + e)) - np.asarray(fn(t - e))) / (2.0 * h)


def coord_gradient(fn, t, h: float) -> np.ndarray:
    """All coordinate partials, stacked on the first axis."""
    t = np.asarray(t, dtype=float)
    return np.array([central_diff(fn, t, a, h) for a in range(t.size)])


def laplacian(metric_fn, fn, dim: int, h: float, inner: float = 1e-5):
    """Laplace-Beltrami operator at the coordinate origin, divergence form.

    ``(1/sqrt|G|) d_a (sqrt|G| G^{ab} d_b f)``: the outer derivative uses step
    ``h``, the partials of ``f`` inside the flux use step ``inner``.  ``fn`` may
    be vector valued; the operator acts componentwise.
    """

    def flux(t):
        G = np.asarray(metric_fn(t))
        df = coord_gradient(fn, t, inner)
        return math.sqrt(np.linalg.det(G)) * np.linalg.solve(G, df.reshape(dim, -1))

    t0 = np.zeros(dim)
    G0 = np.asarray(metric_fn(t0))
    total = 0.0
    for a in range(dim):
        e = np.zeros(dim)
        e[a] = h
        total = total + (flux(t0 + e)[a] - flux(t0 - e)[a]) / (2.0 * h)
    out = total / math.sqrt(np.linalg.det(G0))
    return out if np.ndim(fn(t0)) else float(out[0])


def richardson(v_h, v_h2, order: int = 2):
    """Cancel the leading ``h**order`` error term from values at ``h`` and ``h/2``."""
    k = 2.0**order
    return (k * np.asarray(v_h2) - np.asarray(v_h)) / (k - 1.0)


def observed_order(e_h: float, e_h2: float) -> float:
    """``log2(e_h / e_h2)`` for errors measured against a known limit."""
    if e_h2 <= 0.0 or e_h <= 0.0:
        return math.inf if e_h2 <= 0.0 < e_h else math.nan
    return math.log2(e_h / e_h2)


def observed_order3(v_h, v_h2, v_h4) -> float:
    """Order from three step sizes, without knowing the limit."""
    d1 = float(np.linalg.norm(np.asarray(v_h) - np.asarray(v_h2)))
    d2 = float(np.linalg.norm(np.asarray(v_h2) - np.asarray(v_h4)))
    return observed_order(d1, d2)
