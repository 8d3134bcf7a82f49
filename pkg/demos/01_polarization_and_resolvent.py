# %% [markdown]
# # Product pencils and long resolvents
#
# A pair of polynomials (q, p) gets a symmetric linear pencil B(z) with
# q(zeta) p(z) = Psi(zeta) B(z) Psi(z)^T, where Psi lists the monomials
# allowed by the degree bounds of the pair.  Everything is exact.

# %%
from fractions import Fraction

from pencilsos import (RationalFunction, eval_resolvent, long_resolvent, parse_poly,
                       product_pencil, quad_form, verify_polarization, wronskian)

q = parse_poly("z1 + z2", 2)
p = parse_poly("z1*z2", 2)
B = product_pencil(q, p)
print("basis:", B.basis.monomials)
print("identity holds:", verify_polarization(q, p, B))

# %% [markdown]
# The coefficient of z_k is a Gram matrix of the partial Wronskian
# W_k[q, p] = q dp/dz_k - p dq/dz_k.

# %%
for k in (1, 2):
    print(f"W_{k} =", wronskian(q, p, k), "| Psi B_k Psi^T =", quad_form(B.basis, B.coeffs[k]))

# %% [markdown]
# A congruence moves q to the first row; a Schur complement over a
# nonsingular block then gives back f = p/q exactly.

# %%
f = RationalFunction(p, q)
rep = long_resolvent(f)
z = [Fraction(2), Fraction(3)]
print("block size:", rep.size, "value at (2, 3):", eval_resolvent(rep, z), "direct:", f(z))
