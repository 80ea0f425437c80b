# %% [markdown]
# States, marginals and the identities behind the series expansion
#
# Quadratures are `x = (a + a^dagger)/sqrt(2)`, so the vacuum has variance
# 1/2 and `W_vac(0, 0) = 1/pi`.

# %%
import math

import numpy as np

from wigtomo import BUNDLED_STATES, make_state, marginal_of_state, wigner_of_state
from wigtomo.identities import run_identity_suite
from wigtomo.states import mean_photon_number, radon_numeric, wigner_origin_parity

states = {name: make_state(spec) for name, spec in BUNDLED_STATES.items()}
for name, s in states.items():
    print(f"{name:18s} dim={s.dim:3d}  <n>={mean_photon_number(s):.4f}  W(0,0)={wigner_of_state(s, 0.0, 0.0):+.5f}")

# %% [markdown]
# The value at the origin is the parity expectation divided by pi; the cat
# state is the most negative possible value, `-1/pi`.

# %%
for name, s in states.items():
    print(name, wigner_origin_parity(s), wigner_origin_parity(s) * math.pi)

# %% [markdown]
# Each homodyne marginal is a projection of W.  Compare the closed form
# against a direct line integral of the Wigner function.

# %%
sq = states["squeezed"]
for theta in (0.0, math.pi / 4, math.pi / 2):
    x = np.array([-1.0, 0.0, 0.5])
    print(theta, marginal_of_state(sq, x, theta), [radon_numeric(sq, xi, theta) for xi in x])

# %% [markdown]
# Orthogonality and transform identities, each checked with quadrature
# rules that do not share code with the recurrences.

# %%
for r in run_identity_suite():
    print(r.summary())
