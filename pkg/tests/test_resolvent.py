import random
from fractions import Fraction

import pytest
import sympy as sp

from pencilsos import (RationalFunction, SingularBlockError, eval_resolvent, exact_psd_check,
                       inverse_resolvent_form, inverse_resolvent_value, long_resolvent,
                       parse_poly)
from pencilsos.polycore import evaluate

from helpers import SYMS, random_nonzero_poly, random_poly, rational_point, to_sympy


def rf(num, den, d):
    return RationalFunction(parse_poly(num, d), parse_poly(den, d))


CATALOG = [rf("z1", "1", 1), rf("-1", "z1", 1), rf("z1*z2", "z1 + z2", 2),
           rf("1/2*z1 + 1/2*z2", "1", 2)]


def check_values(f, rep, rng, count=20):
    hits = 0
    for _ in range(200):
        z = rational_point(rng, f.nvars)
        if evaluate(f.den, z) == 0:
            continue
        try:
            got = eval_resolvent(rep, z)
        except SingularBlockError:
            continue
        # sympy evaluates the quotient independently
        subs = {s: sp.Rational(x.numerator, x.denominator) for s, x in zip(SYMS, z)}
        want = (to_sympy(f.num) / to_sympy(f.den)).subs(subs)
        assert sp.Rational(got.numerator, got.denominator) == want
        hits += 1
        if hits == count:
            break
    return hits


def test_named_examples():
    f = rf("z1*z2", "z1 + z2", 2)
    rep = long_resolvent(f)
    assert eval_resolvent(rep, [Fraction(2), Fraction(3)]) == Fraction(6, 5)
    g = rf("1", "z1", 1)
    assert eval_resolvent(long_resolvent(g), [Fraction(4)]) == Fraction(1, 4)
    h = rf("-1", "z1", 1)
    assert eval_resolvent(long_resolvent(h), [Fraction(2)]) == Fraction(-1, 2)


def test_random_resolvents_exact():
    rng = random.Random(29)
    for _ in range(15):
        d = rng.randint(1, 3)
        f = RationalFunction(random_poly(rng, d, 3), random_nonzero_poly(rng, d, 3))
        rep = long_resolvent(f)
        assert check_values(f, rep, rng, count=5) == 5


def test_block_structure():
    rep = long_resolvent(rf("z1*z2", "z1 + z2", 2))
    assert rep.scalar_index not in rep.block_indices
    assert rep.size == 1 + len(rep.block_indices)
    red = rep.reduced()
    assert red.N == rep.size


@pytest.mark.parametrize("f", CATALOG, ids=["z", "-1/z", "parallel", "mean"])
def test_inverse_resolvent_form(f):
    pen = inverse_resolvent_form(f)
    assert exact_psd_check(pen.coeffs[-1]).is_psd
    rng = random.Random(1)
    hits = 0
    for _ in range(50):
        z = rational_point(rng, f.nvars)
        if evaluate(f.den, z) == 0:
            continue
        try:
            got = inverse_resolvent_value(pen, z)
        except (SingularBlockError, ZeroDivisionError):
            continue
        assert got == f(z)
        hits += 1
    assert hits >= 10
