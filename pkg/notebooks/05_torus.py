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
# # Torus actions on CP^n
#
# The moment map of a torus action is horizontally weakly conformal exactly
# when the Gram matrices of the fundamental fields are all multiples of one
# matrix.  For a circle this is automatic.  For the standard 2-torus on CP^2
# it fails.

# %%
import numpy as np

from hkmoment import conformality as cf

T2 = cf.standard_torus(2)
samples = cf.sample_grams(T2, 10, seed=42)
for s in samples[:3]:
    print(np.round(s.gram / np.linalg.norm(s.gram), 4))
res = cf.proportionality_test(samples)
print("verdict:", res.verdict, " witness pair:", res.witness[:2], f" distance {res.distance:.3f}")

# %%
print("false at seeds 0..9:", [cf.proportionality_test(cf.sample_grams(T2, 10, s)).verdict is False for s in range(10)])
print("circle:", cf.proportionality_test(cf.sample_grams(cf.circle(2, [1.0, 0.2, -1.2]), 10, 0)).verdict)

# %% [markdown]
# Orbits are isotropic, and the orbit directions lie in the kernel of the
# differential of the moment map.

# %%
for r in cf.isotropy_check(T2, samples=20):
    print(r.line())
