# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # CP^n as rank-one projectors
#
# Points are Hermitian projectors of rank one, tangent vectors are Hermitian
# matrices with `XA + AX = X`, and the metric is `2 tr(XY)`.

# %%
import numpy as np

from hkmoment import fd
from hkmoment import projective as pj
from hkmoment.matkit import random_su

A = pj.random_point(2, seed=0)
X, Y, Z = (pj.random_tangent(A, s) for s in (1, 2, 3))
print("A^2 - A:", np.abs(A @ A - A).max(), " tr A:", np.trace(A).real)
print("tangency of X:", pj.tangent_residual(A, X))
print("J^2 X + X:", np.abs(pj.jmul(A, pj.jmul(A, X)) + X).max())

# %% [markdown]
# ## Curvature
#
# The closed form is compared with a curvature computed from finite
# differences of the connection, Richardson-extrapolated.

# %%
R = pj.curvature(A, X, Y, Z)
for h in (4e-3, 2e-3, 1e-3):
    Rfd = fd.richardson(pj.curvature_fd(A, X, Y, Z, 2 * h), pj.curvature_fd(A, X, Y, Z, h))
    print(f"h={h:.0e}  relative gap {np.abs(R - Rfd).max() / np.abs(R).max():.2e}")

Xu = X / pj.fs_norm(X)
JX = pj.jmul(A, Xu)
print("holomorphic sectional curvature:", pj.fs_metric(pj.curvature(A, Xu, JX, JX), Xu))
print("scalar curvature for n = 1..4:", [round(pj.scalar_curvature(pj.random_point(n, n)), 12) for n in range(1, 5)])

# %% [markdown]
# ## Killing fields and their Hamiltonians

# %%
u = random_su(3, seed=4)
f = lambda B: pj.linear_hamiltonian(u, B)
h = 1e-4
d = (f(pj.curve(A, Y, h)) - f(pj.curve(A, Y, -h))) / (2 * h)
print("df(Y) vs omega(gamma, Y):", d, pj.omega(A, pj.killing_field(u, A), Y))
print("f along the flow:", [round(f(pj.flow(u, t, A)), 12) for t in (0.0, 0.5, 1.0, 2.0)])
