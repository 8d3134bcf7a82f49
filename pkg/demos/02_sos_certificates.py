# %% [markdown]
# # Exact sum-of-squares certificates
#
# The search is numeric (alternating projections plus a log-det barrier),
# the answer is exact: a rational Gram matrix checked by an exact LDL^T.

# %%
from pencilsos import (FactoredPoly, exact_psd_check, minimal_denominator_strip, parse_poly,
                       sos_oracle, verify_certificate)

f = parse_poly("z1^4 - 2*z1^2*z2 + z2^2 + z1^2 + 1", 2)
res = sos_oracle(f)
print(res.status)
for c, h in res.certificate.factors:
    print(f"  {c} * ({h})^2")
print("re-verified:", verify_certificate(res.certificate))

# %% [markdown]
# The Motzkin polynomial is nonnegative but not a sum of squares.  Its four
# real zeros (+-1, +-1) already force every PSD Gram matrix to vanish.

# %%
motzkin = parse_poly("z1^4*z2^2 + z1^2*z2^4 - 3*z1^2*z2^2 + 1", 2)
res = sos_oracle(motzkin)
print(res.status, "-", res.message)

# %% [markdown]
# Multiplying by (z1^2 + z2^2)^2 fixes that.  Starting from the denominator
# z1 (z1^2 + z2^2), the strip drops the sign-changing factor z1 and keeps the
# rest because no further removal stays certified.

# %%
s = FactoredPoly.of(parse_poly("z1", 2), parse_poly("z1^2 + z2^2", 2))
strip = minimal_denominator_strip(motzkin, s)
print(strip.status, [str(g) for g, _ in strip.factors.factors])
for g, action, status in strip.steps:
    print(f"  {g}: {action} ({status})")

# %% [markdown]
# The PSD test also returns a witness when it fails.

# %%
from pencilsos.exact import as_exact

r = exact_psd_check(as_exact([[1, 2], [2, 1]]))
print(r.is_psd, r.witness, r.value)
