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
# # The moment map and its harmonic morphism property
#
# For `u` in su(n+1) the three functions `f1, f2, f3` are Hamiltonians of the
# lifted Killing field for the three Kaehler forms.  Their gradients are then
# `I*Gamma, J*Gamma, K*Gamma`, which are G-orthogonal with equal length, so the
# map is horizontally weakly conformal.

# %%
import numpy as np

from hkmoment import calabi as cb
from hkmoment import moment as mm
from hkmoment import projective as pj
from hkmoment.matkit import random_su

u = random_su(3, seed=0)
P = mm.sample_points(2, 1, seed=1)[0]
print("moment map:", mm.moment_map(u, P))
r = mm.check_hamiltonian(u, P)
print(r.line(), " order", round(r.extra["order"], 3))

# %% [markdown]
# ## Laplacian and dilation

# %%
res = mm.harmonic_morphism_at(u, P)
print("Laplacians:", res["laplacian"])
print("gradient Gram / lambda^2:")
print(res["gram"] / res["lambda2"])
for L in res["laplacian_raw"]:
    print("raw", L)

# %% [markdown]
# A function pulled back from the base is not harmonic upstairs.

# %%
print(mm.laplace_beltrami(P, lambda Q: pj.linear_hamiltonian(u, Q.A)))

# %% [markdown]
# ## Dilation along a fibre

# %%
X0 = P.X / pj.fs_norm(P.X)
for s in np.linspace(0, 2, 5):
    Q = cb.make_point(P.A, s * X0)
    print(f"|X| = {s:.1f}  lambda^2 = {mm.harmonic_morphism_at(u, Q)['lambda2']:.6f}")

# %% [markdown]
# ## Eigenfunctions on the base and the fibre rotation

# %%
for rep in mm.eigenfunction_check(u, samples=10):
    print(rep.line(), rep.extra["lambda"])
for rep in mm.fibre_rotation_check(1, samples=2):
    print(rep.line())

# %% [markdown]
# ## The same map on TS^2

# %%
rng = np.random.default_rng(3)
b = rng.standard_normal(3)
p, e = mm.random_s2_point(rng)
print(mm.s2_moment(b, p, e))
print(mm.moment_map(mm.u_of_axis(b), mm.s2_convert(p, e)))
