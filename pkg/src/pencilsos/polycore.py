"""Exact multivariate polynomials over the rationals.

Variables are named ``z1 .. zd`` and addressed by 1-based index everywhere in
the public API.  Exponent vectors are plain tuples of non-negative ints.  In
homogenized contexts the extra variable ``z0`` sits at tuple position 0.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

MultiIndex = tuple  # tuple[int, ...]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def grlex_key(exps: MultiIndex):
    """Ascending graded-lex key with z1 > z2 > ... (used for basis order)."""
    return (sum(exps), tuple(-e for e in exps))


def print_key(exps: MultiIndex):
    """Descending graded-lex key used when printing."""
    return (-sum(exps), tuple(-e for e in exps))


class GaussianRational:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    @staticmethod
    def _lift(x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Rational)):
            return GaussianRational(x, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero")
        return GaussianRational((self.re * o.re + self.im * o.im) / n,
                                (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        out = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


I = GaussianRational(0, 1)


class Poly:
    """Multivariate polynomial with exact rational coefficients.

    Instances are immutable; arithmetic returns new objects.  The zero
    polynomial is an empty term map with an explicit variable count.
    """

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[MultiIndex, object] | Iterable = ()):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict = {}
        for exps, c in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise ValueError(f"exponent {exps} has length != nvars={nvars}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = _frac(c)
            if c:
                clean[exps] = clean.get(exps, 0) + c
        self.nvars = nvars
        self._terms = {k: v for k, v in clean.items() if v}
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def _raw(cls, nvars, terms):
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, c, nvars: int) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, j: int, nvars: int) -> "Poly":
        """The variable z_j (1-based)."""
        _check_var(j, nvars)
        e = [0] * nvars
        e[j - 1] = 1
        return cls._raw(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, exps: MultiIndex, coeff=1) -> "Poly":
        return cls(len(exps), {tuple(exps): coeff})

    # -- accessors ----------------------------------------------------------
    @property
    def terms(self) -> Mapping[MultiIndex, Fraction]:
        return MappingProxyType(self._terms)

    def coeff(self, exps: MultiIndex) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self._terms)

    def degree(self) -> int:
        """Total degree; -1 stands for -infinity on the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def degree_in(self, j: int) -> int:
        _check_var(j, self.nvars)
        return max((e[j - 1] for e in self._terms), default=-1)

    def sorted_terms(self, key=grlex_key):
        return sorted(self._terms.items(), key=lambda kv: key(kv[0]))

    def __len__(self):
        return len(self._terms)

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError(f"variable-count mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, (int, Rational)):
            return Poly.constant(other, self.nvars)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        out = dict(self._terms)
        for k, v in o._terms.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.nvars, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            c = _frac(other)
            if not c:
                return Poly.zero(self.nvars)
            return Poly._raw(self.nvars, {k: v * c for k, v in self._terms.items()})
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        out: dict = {}
        for ka, va in self._terms.items():
            for kb, vb in o._terms.items():
                k = tuple(x + y for x, y in zip(ka, kb))
                out[k] = out.get(k, 0) + va * vb
        return Poly._raw(self.nvars, {k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        out = Poly.constant(1, self.nvars)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Rational)):
            return self._terms == Poly.constant(other, self.nvars)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # -- calculus / evaluation ------------------------------------------------
    def diff(self, j: int, order: int = 1) -> "Poly":
        _check_var(j, self.nvars)
        out = {}
        for exps, c in self._terms.items():
            e = exps[j - 1]
            if e < order:
                continue
            f = 1
            for t in range(order):
                f *= e - t
            k = list(exps)
            k[j - 1] = e - order
            out[tuple(k)] = c * f
        return Poly._raw(self.nvars, out)

    def __call__(self, point: Sequence):
        return evaluate(self, point)

    def homogenize(self, degree: int | None = None) -> "Poly":
        """Prepend z0 so every term has total ``degree`` (default: own degree)."""
        n = self.degree() if degree is None else degree
        out = {}
        for exps, c in self._terms.items():
            t = sum(exps)
            if t > n:
                raise ValueError("term degree exceeds homogenizing degree")
            out[(n - t,) + exps] = c
        return Poly._raw(self.nvars + 1, out)

    def dehomogenize(self) -> "Poly":
        """Set z0 := 1 (drop tuple position 0)."""
        return Poly(self.nvars - 1, ((e[1:], c) for e, c in self._terms.items()))

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({self.nvars}, {format_poly(self)!r})"


def _check_var(j, nvars):
    if not isinstance(j, int) or not 1 <= j <= nvars:
        raise IndexError(f"variable index {j} out of range 1..{nvars}")


@dataclass(frozen=True)
class RationalFunction:
    num: Poly
    den: Poly

    def __post_init__(self):
        if self.den.is_zero():
            raise ZeroDivisionError("denominator is the zero polynomial")
        if self.num.nvars != self.den.nvars:
            raise ValueError("numerator and denominator differ in variable count")

    @property
    def nvars(self) -> int:
        return self.num.nvars

    def __call__(self, point):
        q = evaluate(self.den, point)
        if q == 0:
            raise ZeroDivisionError("evaluation at a pole")
        return evaluate(self.num, point) / q

    def __str__(self):
        return f"({self.num})/({self.den})"


# -- convenience operations ----------------------------------------------------

def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    if a.nvars != b.nvars:
        raise ValueError(f"variable-count mismatch: {a.nvars} vs {b.nvars}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def partial_derivative(p: Poly, j: int) -> Poly:
    return p.diff(j)


def wronskian(q: Poly, p: Poly, j: int) -> Poly:
    """Partial Wronskian ``q * dp/dz_j - p * dq/dz_j``."""
    if q.nvars != p.nvars:
        raise ValueError(f"variable-count mismatch: {q.nvars} vs {p.nvars}")
    return q * p.diff(j) - p * q.diff(j)


def evaluate(p: Poly, point: Sequence):
    """Exact value of ``p`` at ``point``.

    Coordinates may be ints, Fractions or GaussianRationals (floats and
    complex also work but lose exactness).  Real rational input gives a
    Fraction back.
    """
    if len(point) != p.nvars:
        raise ValueError(f"point has {len(point)} coordinates, polynomial has {p.nvars}")
    pts = [_frac(x) if isinstance(x, (int, Rational)) else x for x in point]
    cache: list[dict] = [{0: 1} for _ in pts]
    total = Fraction(0)
    for exps, c in p._terms.items():
        v = c
        for k, e in enumerate(exps):
            if e:
                ck = cache[k]
                if e not in ck:
                    ck[e] = pts[k] ** e
                v = v * ck[e]
        total = total + v
    return total


# -- text format ------------------------------------------------------------------

class PolySyntaxError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(\d+)|(z)|([+\-*/^]))")


def _tokenize(src: str):
    pos = 0
    out = []
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if not m:
            raise PolySyntaxError(f"unexpected character {src[pos:].lstrip()[:1]!r}", pos)
        start = m.start(m.lastindex)
        out.append((m.group(m.lastindex), start))
        pos = m.end()
    out.append(("", len(src)))
    return out


def parse_poly(src: str, nvars: int | None = None) -> Poly:
    """Parse the textual grammar, e.g. ``"-3/2*z1^2*z2 + z1*z2 + 1"``.

    ``z0`` is rejected (reserved for homogenization).  ``nvars`` defaults to
    the highest variable index that occurs.
    """
    toks = _tokenize(src)
    i = 0

    def peek():
        return toks[i][0]

    def take():
        nonlocal i
        t = toks[i]
        i += 1
        return t

    def integer():
        t, p = take()
        if not t.isdigit():
            raise PolySyntaxError(f"expected integer, got {t or 'end of input'!r}", p)
        return int(t), p

    terms = []
    sign = 1
    if peek() in "+-" and peek():
        sign = -1 if take()[0] == "-" else 1
    while True:
        coeff = Fraction(1)
        powers = {}
        first = True
        while True:
            tok, p = toks[i]
            if tok.isdigit():
                if not first:
                    raise PolySyntaxError("coefficient must lead the term", p)
                num, _ = integer()
                den = 1
                if peek() == "/":
                    take()
                    den, dp = integer()
                    if den == 0:
                        raise PolySyntaxError("zero denominator", dp)
                coeff = Fraction(num, den)
            elif tok == "z":
                take()
                k, kp = integer()
                if k == 0:
                    raise PolySyntaxError("z0 is reserved for homogenization", kp - 1)
                e = 1
                if peek() == "^":
                    take()
                    e, ep = integer()
                    if e < 1:
                        raise PolySyntaxError("exponent must be >= 1", ep)
                powers[k] = powers.get(k, 0) + e
            else:
                raise PolySyntaxError(f"expected term, got {tok or 'end of input'!r}", p)
            first = False
            if peek() == "*":
                take()
                continue
            break
        terms.append((sign * coeff, powers))
        tok, p = toks[i]
        if tok == "":
            break
        if tok in ("+", "-"):
            take()
            sign = -1 if tok == "-" else 1
            continue
        raise PolySyntaxError(f"unexpected {tok!r}", p)

    top = max((k for _, pw in terms for k in pw), default=0)
    if nvars is None:
        nvars = top
    elif top > nvars:
        raise ValueError(f"variable z{top} exceeds nvars={nvars}")
    out = []
    for c, pw in terms:
        e = [0] * nvars
        for k, v in pw.items():
            e[k - 1] = v
        out.append((tuple(e), c))
    return Poly(nvars, out)


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: Poly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for n, (exps, c) in enumerate(p.sorted_terms(print_key)):
        mono = "*".join(f"z{k + 1}" if e == 1 else f"z{k + 1}^{e}"
                        for k, e in enumerate(exps) if e)
        a = abs(c)
        if not mono:
            body = _fmt_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_fmt_coeff(a)}*{mono}"
        if n == 0:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)


def format_rational(c) -> str:
    return _fmt_coeff(_frac(c))
