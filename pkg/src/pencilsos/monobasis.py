"""Constrained monomial row vectors and their homogenization.

A basis holds every monomial whose total degree is at most ``n0`` and whose
degree in ``z_k`` is at most ``n_k``.  Order is ascending graded-lex with
z1 > z2 > ..., so ``1`` comes first.  Positions are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .polycore import MultiIndex, Poly, grlex_key

DEFAULT_CAP = 5000


class BasisTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class DegreeBounds:
    n0: int
    nk: tuple

    def __post_init__(self):
        object.__setattr__(self, "nk", tuple(int(x) for x in self.nk))
        if self.n0 < 0 or any(x < 0 for x in self.nk):
            raise ValueError("degree bounds must be non-negative")

    @property
    def d(self) -> int:
        return len(self.nk)

    @classmethod
    def from_pair(cls, q: Poly, p: Poly) -> "DegreeBounds":
        """Bounds ``n0 = max deg``, ``n_k = max deg_{z_k}`` over the pair."""
        if q.nvars != p.nvars:
            raise ValueError("variable-count mismatch")
        n0 = max(q.degree(), p.degree(), 0)
        nk = tuple(max(q.degree_in(k), p.degree_in(k), 0) for k in range(1, q.nvars + 1))
        return cls(n0, nk)

    @classmethod
    def for_gram(cls, f: Poly) -> "DegreeBounds":
        """Half-degree bounds, the natural Gram basis for an SOS test of ``f``."""
        n0 = max(f.degree(), 0) // 2
        nk = tuple(max(f.degree_in(k), 0) // 2 for k in range(1, f.nvars + 1))
        return cls(n0, nk)

    def admits(self, exps: MultiIndex) -> bool:
        return (len(exps) == self.d and sum(exps) <= self.n0
                and all(0 <= e <= b for e, b in zip(exps, self.nk)))


@dataclass(frozen=True)
class MonomialBasis:
    bounds: DegreeBounds
    monomials: tuple
    homogenized: bool = False
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        mons = tuple(tuple(m) for m in self.monomials)
        object.__setattr__(self, "monomials", mons)
        idx = {m: i for i, m in enumerate(mons)}
        if len(idx) != len(mons):
            raise ValueError("basis monomials must be pairwise distinct")
        object.__setattr__(self, "_index", idx)

    @property
    def N(self) -> int:
        return len(self.monomials)

    @property
    def nvars(self) -> int:
        return self.bounds.d + (1 if self.homogenized else 0)

    def __len__(self):
        return len(self.monomials)

    def __iter__(self):
        return iter(self.monomials)

    def __getitem__(self, i):
        return self.monomials[i]

    def index(self, m: MultiIndex):
        """Position of ``m`` or None when absent."""
        return self._index.get(tuple(m))

    def __contains__(self, m) -> bool:
        return tuple(m) in self._index

    def polys(self) -> list[Poly]:
        return [Poly.monomial(m) for m in self.monomials]


def _compositions(nk, n0):
    d = len(nk)
    out = []
    cur = [0] * d

    def rec(k, left):
        if k == d:
            out.append(tuple(cur))
            return
        for e in range(min(nk[k], left) + 1):
            cur[k] = e
            rec(k + 1, left - e)
        cur[k] = 0

    rec(0, n0)
    return out


def build_basis(bounds: DegreeBounds, cap: int = DEFAULT_CAP) -> MonomialBasis:
    mons = _compositions(bounds.nk, bounds.n0)
    if len(mons) > cap:
        raise BasisTooLargeError(f"basis has {len(mons)} monomials, cap is {cap}")
    mons.sort(key=grlex_key)
    return MonomialBasis(bounds, tuple(mons))


def basis_for_pair(q: Poly, p: Poly, cap: int = DEFAULT_CAP) -> MonomialBasis:
    return build_basis(DegreeBounds.from_pair(q, p), cap)


def homogenize_basis(b: MonomialBasis) -> MonomialBasis:
    if b.homogenized:
        raise ValueError("basis is already homogenized")
    n0 = b.bounds.n0
    mons = tuple((n0 - sum(m),) + m for m in b.monomials)
    return MonomialBasis(b.bounds, mons, homogenized=True)


def dehomogenize_basis(b: MonomialBasis) -> MonomialBasis:
    if not b.homogenized:
        raise ValueError("basis is not homogenized")
    return MonomialBasis(b.bounds, tuple(m[1:] for m in b.monomials))


def basis_index(b: MonomialBasis, m: MultiIndex):
    return b.index(m)


def basis_derivative(b: MonomialBasis, k: int, order: int) -> list[Poly]:
    """Entrywise ``d^order Psi / dz_k^order`` (k is 1-based, z0 not allowed)."""
    var = k + 1 if b.homogenized else k
    out = [Poly.monomial(m).diff(var, order) for m in b.monomials]
    return out


def quad_form(b: MonomialBasis, m: np.ndarray) -> Poly:
    """``Psi(z) M Psi(z)^T`` as a polynomial."""
    out: dict = {}
    n = b.N
    mons = b.monomials
    for i in range(n):
        row = m[i]
        for j in range(n):
            v = row[j]
            if v:
                key = tuple(x + y for x, y in zip(mons[i], mons[j]))
                out[key] = out.get(key, 0) + v
    return Poly(b.nvars, out)


def matrix_times_basis(b: MonomialBasis, m: np.ndarray, column: list[Poly] | None = None) -> list[Poly]:
    """``M Psi^T`` (or ``M column``) as a list of polynomials."""
    if column is None:
        mons = b.monomials
        out = []
        for i in range(m.shape[0]):
            acc: dict = {}
            for j in range(m.shape[1]):
                v = m[i, j]
                if v:
                    acc[mons[j]] = acc.get(mons[j], 0) + v
            out.append(Poly(b.nvars, acc))
        return out
    nv = b.nvars
    out = []
    for i in range(m.shape[0]):
        acc = Poly.zero(nv)
        for j in range(m.shape[1]):
            v = m[i, j]
            if v and not column[j].is_zero():
                acc = acc + column[j] * v
        out.append(acc)
    return out

