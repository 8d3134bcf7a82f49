import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from pencilsos import (GaussianRational, Poly, PolySyntaxError, RationalFunction, evaluate,
                       format_poly, parse_poly, partial_derivative, wronskian)

from helpers import SYMS, from_sympy, random_poly, rational_point, to_sympy


def test_round_trip_randomized():
    rng = random.Random(11)
    for _ in range(200):
        d = rng.randint(1, 4)
        p = random_poly(rng, d, rng.randint(0, 5), terms=6)
        assert parse_poly(format_poly(p), d) == p


def test_arithmetic_matches_sympy():
    rng = random.Random(3)
    for _ in range(60):
        d = rng.randint(1, 3)
        a, b = random_poly(rng, d, 3), random_poly(rng, d, 3)
        sa, sb = to_sympy(a), to_sympy(b)
        assert a + b == from_sympy(sa + sb, d)
        assert a - b == from_sympy(sa - sb, d)
        assert a * b == from_sympy(sa * sb, d)
        assert a ** 2 == from_sympy(sa ** 2, d)


def test_derivative_and_wronskian_match_sympy():
    rng = random.Random(5)
    for _ in range(60):
        d = rng.randint(1, 3)
        q, p = random_poly(rng, d, 3), random_poly(rng, d, 3)
        sq, sp_ = to_sympy(q), to_sympy(p)
        for j in range(1, d + 1):
            x = SYMS[j - 1]
            assert partial_derivative(p, j) == from_sympy(sp.diff(sp_, x), d)
            w = sq * sp.diff(sp_, x) - sp_ * sp.diff(sq, x)
            assert wronskian(q, p, j) == from_sympy(w, d)


def test_evaluate_matches_sympy():
    rng = random.Random(8)
    for _ in range(60):
        d = rng.randint(1, 3)
        p = random_poly(rng, d, 4)
        z = rational_point(rng, d)
        want = to_sympy(p).subs(dict(zip(SYMS, [sp.Rational(x.numerator, x.denominator) for x in z])))
        assert evaluate(p, z) == Fraction(int(sp.numer(want)), int(sp.denom(want)))


def test_evaluate_gaussian():
    p = parse_poly("z1^2 + 1", 1)
    assert evaluate(p, [GaussianRational(0, 1)]) == 0
    q = parse_poly("z1*z2", 2)
    assert evaluate(q, [GaussianRational(1, 1), GaussianRational(1, -1)]) == 2


def test_known_text():
    p = parse_poly("z1*z2 + 1/2*z1^2 - 3", 2)
    assert p.coeff((1, 1)) == 1
    assert p.coeff((2, 0)) == Fraction(1, 2)
    assert p.coeff((0, 0)) == -3
    assert wronskian(parse_poly("z1 + z2", 2), parse_poly("z1*z2", 2), 1) == parse_poly("z2^2", 2)


@pytest.mark.parametrize("src", ["z0", "z1^0", "1/0", "z1+", "(z1+1)^2", "z1 ** 2"])
def test_parser_rejects(src):
    with pytest.raises(PolySyntaxError):
        parse_poly(src, 2)


def test_variable_out_of_range():
    with pytest.raises(ValueError):
        parse_poly("z3", 2)


def test_syntax_error_position():
    with pytest.raises(PolySyntaxError) as exc:
        parse_poly("z1 + 1/0", 1)
    assert exc.value.pos == 7


def test_rational_function_rejects_mismatch():
    with pytest.raises(ValueError):
        RationalFunction(parse_poly("z1", 1), parse_poly("z1*z2", 2))


def test_homogenize_round_trip():
    p = parse_poly("z1^2 + z2 + 1", 2)
    h = p.homogenize()
    assert h.nvars == 3
    assert all(sum(e) == 2 for e in h.terms)
    assert h.dehomogenize() == p


small = st.builds(Fraction, st.integers(-99, 99), st.integers(1, 20))
gauss = st.builds(GaussianRational, small, small)


@settings(max_examples=200, deadline=None)
@given(gauss, gauss, gauss)
def test_gaussian_field_laws(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert (a * b).abs2() == a.abs2() * b.abs2()
    if b:
        assert (a / b) * b == a
    assert complex(a * b) == pytest.approx(complex(a) * complex(b))
