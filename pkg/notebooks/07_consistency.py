# %% [markdown]
# # Consistency
#
# The RMSE of the linearly-rising combination falls like one over the
# square root of the sample size.

# %%
from elemental.simulation import consistency_study, log_rmse_slope

# %%
rows = consistency_study("linearly-rising", [0.0], [20, 50, 100, 200], 1000, 5, baselines=True)
for r in rows:
    print(f"N={r.n:4d}  axis={r.axis:.3f}  {r.estimator:16s} rmse={r.rmse:.4f}")

# %%
lr = [r for r in rows if r.estimator == "linearly-rising"]
print("log-log slope", log_rmse_slope(lr))
