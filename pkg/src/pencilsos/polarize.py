"""Symmetric linear pencils realizing ``q(zeta) p(z) = Psi(zeta) B(z) Psi(z)^T``.

Construction is bottom-up: a fixed chain pencil moves ``zeta2 zeta4 ...`` to
``zeta1 zeta3 ...``; substituting variables turns it into a pencil that moves
one monomial onto another (the transfer pencil); summing transfer pencils
weighted by the coefficients of ``q`` and ``p`` gives the product pencil.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact import is_symmetric, zeros
from .monobasis import (DEFAULT_CAP, DegreeBounds, MonomialBasis, basis_derivative,
                        build_basis, matrix_times_basis, quad_form)
from .polycore import MultiIndex, Poly, evaluate

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class MatrixPencil:
    """``A0 + z1 A1 + ... + zd Ad`` with exact symmetric coefficients.

    ``basis`` is the monomial row vector the pencil acts on; it is None for
    pencils whose row vector is not a list of monomials (resolvent forms).
    """

    basis: MonomialBasis | None
    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(np.asarray(c, dtype=object) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if not coeffs:
            raise ValueError("pencil needs at least the constant coefficient")
        n = coeffs[0].shape[0]
        for c in coeffs:
            if c.shape != (n, n):
                raise ValueError("pencil coefficients must share one square shape")
            if not is_symmetric(c):
                raise ValueError("pencil coefficients must be symmetric")
        if self.basis is not None and self.basis.N != n:
            raise ValueError(f"basis has {self.basis.N} monomials, matrices are {n}x{n}")

    @property
    def d(self) -> int:
        return len(self.coeffs) - 1

    @property
    def N(self) -> int:
        return self.coeffs[0].shape[0]

    def at(self, point: Sequence) -> np.ndarray:
        if len(point) != self.d:
            raise ValueError(f"point has {len(point)} coordinates, pencil has d={self.d}")
        out = self.coeffs[0].copy()
        for z, c in zip(point, self.coeffs[1:]):
            out = out + c * z
        return out

    def principal(self, idx: Sequence[int]) -> "MatrixPencil":
        ix = np.ix_(list(idx), list(idx))
        return MatrixPencil(None, tuple(c[ix] for c in self.coeffs))

    def __add__(self, other: "MatrixPencil") -> "MatrixPencil":
        if other.d != self.d or other.N != self.N:
            raise ValueError("pencil shapes differ")
        return MatrixPencil(self.basis, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __eq__(self, other):
        if not isinstance(other, MatrixPencil):
            return NotImplemented
        return (self.d == other.d and self.N == other.N
                and all(np.all(a == b) for a, b in zip(self.coeffs, other.coeffs)))

    __hash__ = None


def zero_pencil(basis: MonomialBasis, d: int) -> MatrixPencil:
    return MatrixPencil(basis, tuple(zeros(basis.N) for _ in range(d + 1)))


# -- chain pencils ---------------------------------------------------------------

def _chain_entries(k: int):
    """Nonzero entries ``(i, j, s, value)`` of the (2k+1)-chain pencil, 0-based i, j.

    ``s`` is the 1-based zeta index whose coefficient matrix holds the entry.
    """
    if k == 0:
        return [(0, 0, 1, Fraction(1))]
    n = 2 * k + 1
    out = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            gap = abs(i - j)
            if gap == 1:
                out.append((i - 1, j - 1, min(i, j), Fraction((-1) ** max(i, j)) * HALF))
            elif gap == 2 * k:
                out.append((i - 1, j - 1, max(i, j), HALF))
    return out


def _chain_mus(k: int) -> list[MultiIndex]:
    n = 2 * k + 1
    if k == 0:
        return [(0,)]
    mu1 = [0] * n
    for s in range(2, n, 2):
        mu1[s - 1] = 1
    mu2 = [0] * n
    for s in range(3, n + 1, 2):
        mu2[s - 1] = 1
    mus = [mu1, mu2]
    for j in range(3, n + 1):
        m = list(mus[j - 3])
        m[j - 3] += 1  # times zeta_{j-2}
        m[j - 2] -= 1  # divided by zeta_{j-1}
        if m[j - 2] < 0:
            raise AssertionError("chain monomial is not a monomial")
        mus.append(m)
    return [tuple(m) for m in mus]


def chain_pencil(k: int):
    """Matrices ``C_1..C_{2k+1}`` and monomials ``zeta^{mu_1..mu_{2k+1}}``.

    ``(sum_s zeta_s C_s) (zeta^mu)^T = (zeta1 zeta3 ... zeta_{2k+1}, 0, ..., 0)^T``.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    n = 2 * k + 1
    mats = [zeros(n) for _ in range(n)]
    for i, j, s, v in _chain_entries(k):
        mats[s - 1][i, j] += v
    return mats, _chain_mus(k)


# -- transfer pencils ------------------------------------------------------------

def _transfer_entries(alpha: MultiIndex, beta: MultiIndex):
    """Row monomials and nonzero entries of the transfer pencil.

    Returns ``(rows, entries)``: ``rows[0] == alpha``; entries are
    ``(i, j, var, value)`` with ``var`` 0 for the constant term and k for z_k.
    """
    d = len(alpha)
    da, db = sum(alpha), sum(beta)
    n = max(da, db - 1)
    a = (n - da,) + tuple(alpha)
    b = (n + 1 - db,) + tuple(beta)
    gamma = tuple(min(x, y) for x, y in zip(a, b))
    a1 = [x - g for x, g in zip(a, gamma)]
    b1 = [y - g for y, g in zip(b, gamma)]
    k = sum(a1)
    order = list(range(1, d + 1)) + [0]
    evens = [v for v in order for _ in range(a1[v])]
    odds = [v for v in order for _ in range(b1[v])]
    zvar = [None] * (2 * k + 1)  # zvar[s-1] = homogenized variable for zeta_s
    for t, v in enumerate(evens):
        zvar[2 * t + 1] = v
    for t, v in enumerate(odds):
        zvar[2 * t] = v
    rows = []
    for mu in _chain_mus(k):
        e = list(gamma)
        for s, m in enumerate(mu):
            if m:
                e[zvar[s]] += m
        rows.append(tuple(e[1:]))
    entries = [(i, j, zvar[s - 1], v) for i, j, s, v in _chain_entries(k)]
    return rows, entries


def _add_transfer(basis: MonomialBasis, acc: list, alpha, beta, scale) -> None:
    rows, entries = _transfer_entries(alpha, beta)
    idx = []
    for r in rows:
        t = basis.index(r)
        if t is None:
            raise ValueError(f"monomial {r} needed by the transfer pencil is outside the basis")
        idx.append(t)
    for i, j, var, v in entries:
        acc[var][idx[i], idx[j]] += scale * v


def monomial_transfer_pencil(alpha1: MultiIndex, beta: MultiIndex,
                             bounds: DegreeBounds, cap: int = DEFAULT_CAP) -> MatrixPencil:
    """Pencil D with ``D(z) Psi(z)^T = z^beta e_{alpha1}`` over the basis of ``bounds``."""
    alpha1, beta = tuple(alpha1), tuple(beta)
    for m, name in ((alpha1, "alpha1"), (beta, "beta")):
        if not bounds.admits(m):
            raise ValueError(f"{name}={m} violates the degree bounds")
    basis = build_basis(bounds, cap)
    acc = [zeros(basis.N) for _ in range(bounds.d + 1)]
    _add_transfer(basis, acc, alpha1, beta, Fraction(1))
    return MatrixPencil(basis, tuple(acc))


def product_pencil(q: Poly, p: Poly, cap: int = DEFAULT_CAP) -> MatrixPencil:
    """Symmetric pencil B with ``q(zeta) p(z) = Psi(zeta) B(z) Psi(z)^T``.

    Row ``j`` of ``B(z) Psi(z)^T`` equals ``a_j p(z)`` where ``a_j`` is the
    coefficient of q on the j-th basis monomial.
    """
    if q.nvars != p.nvars:
        raise ValueError("variable-count mismatch")
    if q.is_zero():
        raise ValueError("q must be a nonzero polynomial")
    bounds = DegreeBounds.from_pair(q, p)
    basis = build_basis(bounds, cap)
    acc = [zeros(basis.N) for _ in range(bounds.d + 1)]
    for alpha, a in q.sorted_terms():
        for beta, b in p.sorted_terms():
            _add_transfer(basis, acc, alpha, beta, a * b)
    return MatrixPencil(basis, tuple(acc))


# -- checks ---------------------------------------------------------------------------

def pencil_times_basis(pencil: MatrixPencil) -> list[Poly]:
    """``(A0 + z1 A1 + ... + zd Ad) Psi(z)^T`` as a list of polynomials."""
    basis = pencil.basis
    nv = basis.nvars
    shift = 1 if basis.homogenized else 0
    out = [dict() for _ in range(pencil.N)]
    for k, c in enumerate(pencil.coeffs):
        for i, j in zip(*np.nonzero(c != 0)):
            e = list(basis[j])
            if k:
                e[k - 1 + shift] += 1
            e = tuple(e)
            out[i][e] = out[i].get(e, 0) + c[i, j]
    return [Poly(nv, t) for t in out]


def verify_polarization(q: Poly, p: Poly, pencil: MatrixPencil) -> bool:
    """Exact check of ``q(zeta) p(z) == Psi(zeta) B(z) Psi(z)^T`` in 2d variables."""
    if q.nvars != p.nvars:
        raise ValueError("variable-count mismatch")
    d = q.nvars
    if pencil.d != d or pencil.basis is None or pencil.basis.nvars != d:
        raise ValueError(f"pencil dimension d={pencil.d} does not match {d} variables")
    if pencil.basis.N != pencil.N:
        raise ValueError("pencil size does not match basis")
    if not all(is_symmetric(c) for c in pencil.coeffs):
        return False
    want: dict = {}
    for a_e, a in q.terms.items():
        for b_e, b in p.terms.items():
            key = a_e + b_e
            want[key] = want.get(key, 0) + a * b
    got: dict = {}
    mons = pencil.basis.monomials
    for k, c in enumerate(pencil.coeffs):
        for i, j in zip(*np.nonzero(c != 0)):
            right = list(mons[j])
            if k:
                right[k - 1] += 1
            key = mons[i] + tuple(right)
            got[key] = got.get(key, 0) + c[i, j]
    clean = lambda t: {k: v for k, v in t.items() if v}
    return clean(want) == clean(got)


def wronskian_identity_holds(q: Poly, p: Poly, pencil: MatrixPencil, k: int) -> bool:
    """``Psi B_k Psi^T == W_k[q, p]``."""
    from .polycore import wronskian
    return quad_form(pencil.basis, pencil.coeffs[k]) == wronskian(q, p, k)


def annihilates_top_derivative(pencil: MatrixPencil, k: int) -> bool:
    """``B_k d^{n_k} Psi^T / dz_k^{n_k} == 0``."""
    basis = pencil.basis
    nk = basis.bounds.nk[k - 1]
    col = basis_derivative(basis, k, nk)
    return all(v.is_zero() for v in matrix_times_basis(basis, pencil.coeffs[k], col))


def evaluate_bilinear(pencil: MatrixPencil, zeta, z):
    """``Psi(zeta) B(z) Psi(z)^T`` at numeric points (used by spot checks)."""
    left = [evaluate(m, zeta) for m in pencil.basis.polys()]
    right = [evaluate(m, z) for m in pencil.basis.polys()]
    bz = pencil.at(z)
    total = Fraction(0)
    for i, li in enumerate(left):
        for j, rj in enumerate(right):
            if bz[i, j]:
                total = total + li * bz[i, j] * rj
    return total
