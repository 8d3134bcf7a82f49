# %% [markdown]
# # Functions with nonnegative imaginary part
#
# For such f = p/q every partial Wronskian is a sum of squares.  The
# pipeline samples the upper poly-half-plane, then certifies each W_j.

# %%
from fractions import Fraction

from pencilsos import (RationalFunction, inverse_resolvent_form, inverse_resolvent_value,
                       main_theorem_pipeline, nevanlinna_sample_check, parse_poly,
                       upper_halfplane_zero)

f = RationalFunction(parse_poly("z1*z2", 2), parse_poly("z1 + z2", 2))
rep = main_theorem_pipeline(f, samples=300)
print("gate violation:", rep.gate.violation)
for j, w, res in rep.results:
    print(f"W_{j} = {w}: {res.status}")

# %% [markdown]
# -z fails the gate at the first sample.

# %%
g = RationalFunction(parse_poly("-z1", 1), parse_poly("1", 1))
print(nevanlinna_sample_check(g, 10, 0))

# %% [markdown]
# The last pencil coefficient can be replaced by a PSD Gram matrix of W_d.
# The result still represents f as [pi A(z)^{-1} pi^T]^{-1}.

# %%
A = inverse_resolvent_form(f)
z = [Fraction(1), Fraction(4)]
print("last coefficient:\n", A.coeffs[-1])
print("value:", inverse_resolvent_value(A, z), "direct:", f(z))

# %% [markdown]
# z1^2 + z2^2 vanishes at a point with both coordinates in the upper half-plane.

# %%
hit = upper_halfplane_zero(parse_poly("z1^2 + z2^2", 2))
print(hit.point, hit.residual)
