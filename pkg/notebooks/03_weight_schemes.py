# %% [markdown]
# # From elemental weights to spacing weights
#
# A unit-sum weighting R of the elementals expands into a zero-sum weighting
# A of the log-spacings.  The estimate is then the entrywise product of A
# with the log-spacing matrix, summed.

# %%
import numpy as np

from elemental import expand, linearly_rising, linearly_rising_spacing_closed_form, named_scheme
from elemental.weights import single_elemental

np.set_printoptions(linewidth=120)

# %%
print((linearly_rising(7).matrix * 35).round(10))
print((expand(linearly_rising(7)).matrix * 35).round(10))

# %%
# each elemental lands on three adjacent cells
print(expand(single_elemental(5, 2, 5)).matrix)

# %%
n = 12
gap = np.abs(expand(linearly_rising(n)).matrix - linearly_rising_spacing_closed_form(n).matrix).max()
print("closed form vs expansion:", gap)

# %%
for name in ("equal-weight", "top-row", "quadratic-gap"):
    print(name, named_scheme(name, 4).vector())
