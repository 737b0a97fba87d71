# %% [markdown]
# # Optimal weights and relative efficiency
#
# Fitting variance-minimising weights on one block of samples and scoring
# them on a second block brackets the smallest attainable variance.  Each
# named scheme is compared against that bracket.

# %%
from elemental.simulation import min_variance_bounds, relative_efficiency

# %%
b = min_variance_bounds(20, 0.0, 4000, 3)
print("lower", b.lower, "upper", b.upper, "multiplier", b.optimal.multiplier)

# %%
schemes = ["equal-weight", "top-row", "quadratic-gap", "linearly-rising", ("D1", b.optimal.weights)]
rows = relative_efficiency(schemes, 20, [-2.0, 0.0, 1.0, 3.0], 4000, 4)
for r in rows:
    print(f"xi={r.xi:+.0f}  {r.estimator:16s} efficiency={r.efficiency:.3f}")
