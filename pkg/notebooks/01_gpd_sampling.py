# %% [markdown]
# # Sampling the generalized Pareto family
#
# `quantile` maps an exceedance probability G to a data value.  Feeding it
# uniforms gives exact draws; `sample` sorts them largest first.

# %%
import numpy as np

from elemental import GpdParams, RandomStream, cdf, quantile, sample

# %%
for xi in (-0.5, 0.0, 1.0):
    p = GpdParams(mu=0.0, sigma=1.0, xi=xi)
    print(f"xi={xi:+.1f}  upper endpoint={p.upper_endpoint}  median={quantile(p, 0.5):.4f}")

# %%
# round trip through the distribution function
p = GpdParams(2.0, 3.0, 0.4)
x = quantile(p, np.array([0.9, 0.5, 0.1]))
print(x, 1 - cdf(p, x))

# %%
s = sample(GpdParams(0, 1, 0), 100_000, RandomStream(11))
print("exponential mean", s.values.mean(), "max", s.x(1))

# %%
# bounded support when xi < 0
s = sample(GpdParams(0, 1, -1), 100_000, RandomStream(12))
print("range", s.values.min(), s.values.max())
