"""Shared generators and independent oracles (sympy, brute force)."""
import random
from fractions import Fraction

import sympy as sp

from pencilsos.polycore import Poly

SYMS = sp.symbols("z1:10")


def random_poly(rng: random.Random, d: int, deg: int, terms: int = 4, coeff: int = 5) -> Poly:
    out = {}
    for _ in range(rng.randint(1, terms)):
        e = [0] * d
        for _ in range(rng.randint(0, deg)):
            e[rng.randrange(d)] += 1
        c = Fraction(rng.randint(-coeff, coeff), rng.choice([1, 1, 2, 3]))
        out[tuple(e)] = out.get(tuple(e), 0) + c
    return Poly(d, out)


def random_nonzero_poly(rng, d, deg, **kw) -> Poly:
    while True:
        p = random_poly(rng, d, deg, **kw)
        if not p.is_zero():
            return p


def to_sympy(p: Poly, syms=None):
    syms = syms or SYMS[: p.nvars]
    expr = sp.Integer(0)
    for e, c in p.terms.items():
        term = sp.Rational(c.numerator, c.denominator)
        for s, k in zip(syms, e):
            term *= s ** k
        expr += term
    return sp.expand(expr)


def from_sympy(expr, nvars: int) -> Poly:
    poly = sp.Poly(sp.expand(expr), *SYMS[:nvars])
    return Poly(nvars, {tuple(m): Fraction(int(c.p), int(c.q)) for m, c in poly.terms()})


def rational_point(rng, d, lo=-30, hi=30, den=7):
    return [Fraction(rng.randint(lo, hi), rng.randint(1, den)) for _ in range(d)]
