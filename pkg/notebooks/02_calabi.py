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
# # The Calabi hyper-Kaehler structure on TCP^n
#
# A tangent vector at `(A, X)` is a pair of horizontal and vertical parts.  The
# quaternionic relations and the Hermitian property are pointwise algebra, so
# they hold to roundoff.  Closedness of the Kaehler forms and parallelism need
# derivatives and are checked with finite differences.

# %%
import numpy as np

from hkmoment import calabi as cb

P = cb.random_tb_point(2, seed=1, scale=0.9)
xi, eta = cb.random_ttvec(P, 2), cb.random_ttvec(P, 3)
c = cb.coefs(P)
print(f"a = {c.a:.6f}, k = {c.k:.6f}, ta = {c.ta:.6f}")
print("quaternion relations:", cb.quaternion_residual(xi))
print("G-Hermitian:", cb.hermitian_residual(xi, eta))

# %% [markdown]
# The frame Gram matrix at the base point: lifts are orthogonal, and the
# directions transverse to `X, JX` have norms `(a+1)/2` and `2/(a+1)`.

# %%
G = cb.Chart(P).frame_gram()
np.set_printoptions(precision=4, suppress=True)
print(np.diag(G))
print("(a+1)/2 =", (c.a + 1) / 2, " 2/(a+1) =", 2 / (c.a + 1))

# %% [markdown]
# ## Closedness by Stokes
#
# The flux of each Kaehler form through the boundary of a small coordinate
# cube, divided by its volume, goes to zero like `h^2`.

# %%
P1 = cb.random_tb_point(1, seed=7, scale=1.0)
prev = None
for h in (4e-2, 2e-2, 1e-2, 5e-3):
    e = max(cb.stokes_domega(P1, h).values())
    rate = "" if prev is None else f"  ratio {prev / e:.2f}"
    print(f"h={h:.0e}  flux/volume {e:.3e}{rate}")
    prev = e

# %% [markdown]
# ## The full axiom check

# %%
for r in cb.verify_hyperkahler_axioms(P1):
    print(r.line())
