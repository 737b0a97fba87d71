# %% [markdown]
# # Elemental estimators
#
# Each elemental uses three log-spacings of the order statistics and is
# unbiased for the tail parameter at any sample size from 3 up.

# %%
import math

from elemental import OrderedSample, all_elementals, elemental_estimate, log_spacing_matrix
from elemental.baselines import hill, pickands

# %%
x = OrderedSample([5.0, 3.0, 2.0, 1.0])
print(log_spacing_matrix(x).round(4))

# %%
for idx, value in all_elementals(x).items():
    print(idx, round(value, 6))

# %%
print(elemental_estimate(x, (1, 3)), math.log(4 / 3))

# %%
# location and scale drop out
print(elemental_estimate(x.shift(1000.0).scale(1e-3), (1, 4)), elemental_estimate(x, (1, 4)))

# %%
# the classical references for comparison
y = OrderedSample([7.0, 3.0, 2.0, 1.0])
print("pickands", pickands(y, 1), "hill", hill(y, 1))
