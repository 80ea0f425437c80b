# %% [markdown]
# Reconstructing W(0, 0) of 0.8|1><1| + 0.2|0><0| from simulated homodyne data
#
# The exact value is `-0.6/pi`.  Both estimators are unbiased up to their
# regularisation; their reported standard errors differ.

# %%
import math

import numpy as np

from wigtomo import BUNDLED_STATES, FbpConfig, GridSpec, PseConfig, StateSpec, make_state, sample_dataset
from wigtomo.fbp import fbp_grid, fbp_point
from wigtomo.pse import estimate_coefficients, pse_grid, pse_origin, pse_origin_sigma, select_truncation

mixture = make_state(BUNDLED_STATES["mixture"])
data = sample_dataset(mixture, 320_000, seed=7)
print("target", -0.6 / math.pi)

# %%
est = fbp_point(data, FbpConfig(8.0), 0.0, 0.0)
print(f"FBP k_c=8     W(0,0) = {est.value:+.4f} +- {est.sigma:.4f}")

table = estimate_coefficients(data, PseConfig(N=8, M=30))
print(f"PSE N=8 M=30  W(0,0) = {pse_origin(table):+.4f} +- {pse_origin_sigma(table):.4f}  (L = {table.L:.3f})")

# %% [markdown]
# The radial cutoff can be chosen from the data: the first `M` whose last
# `n = 0` coefficient is smaller than the origin error.

# %%
vacuum = make_state(StateSpec.parse("vacuum"))
choice = select_truncation(sample_dataset(vacuum, 100_000, seed=21), PseConfig(N=0, M=40))
print("vacuum truncation:", choice.M, "converged" if choice.converged else "not converged")

# %% [markdown]
# A coarse grid through both reconstructions; PSE is zero outside the disk.

# %%
spec = GridSpec.parse("-3:3:7")
g_fbp = fbp_grid(data, FbpConfig(8.0), spec, with_sigma=False)
g_pse = pse_grid(table, spec)
np.set_printoptions(precision=3, suppress=True)
print(g_fbp.w)
print(g_pse.w)
