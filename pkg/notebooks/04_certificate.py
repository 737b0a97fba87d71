# %% [markdown]
# # Certifying unbiasedness without sampling
#
# A spacing-weight matrix belongs to the unbiased invariant class when it
# sums to zero, its digamma sums equal -1, and its N-1 polynomial
# coefficients all vanish.

# %%
from elemental import expand, linearly_rising
from elemental.baselines import pickands_weights
from elemental.certificate import certify, elemental_basis_rank, membership_decompose

# %%
rep = certify(expand(linearly_rising(7)))
print(rep.passed, rep.psi_i_sum, rep.psi_j_sum, max(map(abs, rep.b)))

# %%
# a single non-zero weight per column is not in the class
print(certify(pickands_weights(12, 3)).passed)
print(membership_decompose(pickands_weights(12, 3)))

# %%
# the elementals span every matrix satisfying the constraints
for n in (4, 7, 12):
    print(n, elemental_basis_rank(n))

# %%
d = membership_decompose(expand(linearly_rising(6)))
print(d.weight_sum, d.residual)
