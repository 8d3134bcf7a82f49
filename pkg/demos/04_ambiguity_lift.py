# %% [markdown]
# # The ambiguity space and lifting
#
# Symmetric S with Psi S Psi^T = 0 are spanned, per exponent beta, by
# stencils along a spanning tree of single-variable moves.

# %%
from pencilsos import (AmbiguityLiftError, DegreeBounds, ambiguity_space_basis, build_basis,
                       homogenize_basis, liftable_ambiguity, lift_ambiguity)
from pencilsos.polarize import pencil_times_basis

basis = build_basis(DegreeBounds(2, (2, 2)))
hb = homogenize_basis(basis)
for el in ambiguity_space_basis(hb):
    print(el.beta, el.kind, [hb[i] for i in el.support])

# %% [markdown]
# A last coefficient S_d can often be completed to a pencil with
# S(z) Psi(z)^T = 0.

# %%
dirs = liftable_ambiguity(basis)
pen = lift_ambiguity(dirs[0], basis)
print(len(dirs), "liftable directions; annihilates:",
      all(v.is_zero() for v in pencil_times_basis(pen)))

# %% [markdown]
# Not always.  With Psi = (1, z, z^2, z^3) the stencil 2 e_z e_z^T - (e_1 e_{z^2}^T + T)
# meets both preconditions, yet no constant S_0 completes it.

# %%
basis = build_basis(DegreeBounds(3, (3,)))
el = ambiguity_space_basis(homogenize_basis(basis))[0]
print(el.matrix)
try:
    lift_ambiguity(el.matrix, basis)
except AmbiguityLiftError as exc:
    print("no lift:", exc)
