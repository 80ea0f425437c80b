# %% [markdown]
# Error estimates and distances to the target state
#
# Three ways to get a standard error at the origin: the estimator's own
# sample variance, the spread over independent synthetic datasets, and the
# spread over bootstrap resamples of one dataset.

# %%
from wigtomo import BUNDLED_STATES, FbpConfig, PseConfig, make_state, sample_dataset
from wigtomo.analysis import bootstrap_study, distance_study, mc_study

mixture = make_state(BUNDLED_STATES["mixture"])
data = sample_dataset(mixture, 100_000, seed=5)

for cfg in (FbpConfig(7.0), PseConfig(N=0, M=30)):
    mc = mc_study(mixture, 100_000, 20, cfg, master_seed=1)
    boot = bootstrap_study(data, 20, cfg, master_seed=2)
    print(type(cfg).__name__, f"direct {mc.mean_reported_sigma:.4f}  mc {mc.mc_sigma:.4f}  bootstrap {boot.mc_sigma:.4f}")

# %% [markdown]
# Mean L2 and Frobenius distances shrink with the number of samples.  This
# is a small version of the acceptance study (which uses 100 replicas).

# %%
curves = distance_study(BUNDLED_STATES["thermal"], [PseConfig(8, 30), FbpConfig(8.0)], [5_000, 20_000], 5)
for c in curves:
    for row in c.rows:
        print(f"{c.label:24s} J={row.J:6d}  d_L2={row.mean_d_L2:.4f}  d_F={row.mean_d_F:.4f}")
print("extraction floor (exact target):", curves[0].truncation_error)
