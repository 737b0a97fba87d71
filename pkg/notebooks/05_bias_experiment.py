# %% [markdown]
# # Bias of every elemental at N = 7
#
# Each of the 15 elementals is averaged over many samples for tail
# parameters from -10 to 10.  The z-scores stay within sampling noise.

# %%
from elemental.simulation import ExperimentConfig, bias_sweep

# %%
xis = [-10, -5, -2, -1, 0, 1, 2, 5, 10]
rows = bias_sweep(ExperimentConfig([7], xis, replications=20_000, seed=1))

# %%
for xi in xis:
    sel = [r for r in rows if r.xi == xi]
    z = max(abs(r.bias) / r.stderr for r in sel)
    print(f"xi={xi:+4d}  mean of means={sum(r.mean for r in sel) / len(sel):+.4f}  max|z|={z:.2f}")

# %%
# the single elemental at N = 3 is unbiased too
for r in bias_sweep(ExperimentConfig([3], [-3, 0, 3], replications=20_000, seed=2)):
    print(r.xi, round(r.mean, 4), round(r.stderr, 4))
