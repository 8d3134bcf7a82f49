"""Long-resolvent (Schur complement) representations of ``f = p/q``.

A product pencil B for (q, p) is normalized by the congruence
``Q^{-T} B Q^{-1}`` so that its first row vector entry becomes ``q(z)``; a
nonsingular principal block ``A22`` then gives
``f = A11 - A12 A22^{-1} A21``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact import SingularMatrixError, det, identity, row_basis, solve_square
from .monobasis import DEFAULT_CAP, MonomialBasis, basis_for_pair
from .polarize import MatrixPencil, product_pencil
from .polycore import Poly, RationalFunction, wronskian


class SingularBlockError(ZeroDivisionError):
    """A22(z) is singular at the requested point."""


class CertificateMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class ResolventRep:
    """Transformed pencil plus the retained block structure.

    ``pencil`` is the full congruence-transformed pencil (row vector
    ``(q, psi_2, ..., psi_N)``); ``block_indices`` index the retained
    nonsingular A22 block inside it.
    """

    pencil: MatrixPencil
    scalar_index: int
    block_indices: tuple
    Q: np.ndarray
    permutation: tuple
    basis: MonomialBasis

    def __post_init__(self):
        if self.scalar_index in self.block_indices:
            raise ValueError("scalar index must not be part of the A22 block")

    @property
    def size(self) -> int:
        return 1 + len(self.block_indices)

    def reduced(self) -> MatrixPencil:
        return self.pencil.principal((self.scalar_index,) + tuple(self.block_indices))


def _probe_points(d: int, seed: int, count: int = 4):
    rng = random.Random(seed)
    return [[Fraction(rng.randint(-10**4, 10**4), rng.randint(1, 997)) for _ in range(d)]
            for _ in range(count)]


def reduce_pencil(pencil: MatrixPencil, q: Poly, seed: int = 0) -> ResolventRep:
    """Resolvent reduction of a pencil satisfying ``B(z) Psi^T = (a_j p(z))_j``."""
    basis = pencil.basis
    n = pencil.N
    a = [q.coeff(m) for m in basis.monomials]
    lead = next((i for i, x in enumerate(a) if x != 0), None)
    if lead is None:
        raise ValueError("q has no coefficient on the basis (zero q?)")
    perm = (lead,) + tuple(i for i in range(n) if i != lead)
    ix = np.ix_(perm, perm)
    ap = [a[i] for i in perm]
    qmat = identity(n)
    qinv = identity(n)
    for j in range(n):
        qmat[0, j] = ap[j]
    qinv[0, 0] = 1 / ap[0]
    for j in range(1, n):
        qinv[0, j] = -ap[j] / ap[0]
    coeffs = tuple(qinv.T.dot(c[ix]).dot(qinv) for c in pencil.coeffs)
    tilde = MatrixPencil(None, coeffs)

    block: tuple = ()
    if n > 1:
        best_rank, best = -1, None
        for z in _probe_points(pencil.d, seed):
            m22 = tilde.at(z)[1:, 1:]
            rows = row_basis(m22)
            if len(rows) > best_rank:
                best_rank, best = len(rows), (z, rows)
        z, rows = best
        block = tuple(1 + r for r in rows)
        # nonzero determinant at a rational point proves det A22(z) is not the zero polynomial
        if block and det(tilde.at(z)[np.ix_(block, block)]) == 0:
            raise AssertionError("selected A22 block is singular at its probe point")
    return ResolventRep(tilde, 0, block, qmat, perm, basis)


def long_resolvent(f: RationalFunction, cap: int = DEFAULT_CAP, seed: int = 0) -> ResolventRep:
    q, p = f.den, f.num
    if q.is_zero():
        raise ValueError("q must be nonzero")
    return reduce_pencil(product_pencil(q, p, cap), q, seed)


def eval_resolvent(rep: ResolventRep, z: Sequence):
    """Exact ``A11 - A12 A22^{-1} A21`` at ``z``."""
    m = rep.reduced().at(z)
    if m.shape[0] == 1:
        return m[0, 0]
    try:
        x = solve_square(m[1:, 1:], list(m[1:, 0]))
    except SingularMatrixError as exc:
        raise SingularBlockError(f"A22 is singular at {list(map(str, z))}") from exc
    out = m[0, 0]
    for j, xj in enumerate(x):
        if m[0, 1 + j]:
            out = out - m[0, 1 + j] * xj
    return out


def inverse_resolvent_value(pencil: MatrixPencil, z: Sequence):
    """``[pi A(z)^{-1} pi^T]^{-1}`` with ``pi = (1, 0, ..., 0)``."""
    m = pencil.at(z)
    e1 = [Fraction(1)] + [Fraction(0)] * (m.shape[0] - 1)
    try:
        x = solve_square(m, e1)
    except SingularMatrixError as exc:
        raise SingularBlockError("A(z) is singular") from exc
    if x[0] == 0:
        raise ZeroDivisionError("pi A(z)^{-1} pi^T vanishes (f has a pole here)")
    return 1 / x[0]


def inverse_resolvent_form(f: RationalFunction, s: Poly | None = None, cert=None,
                           cap: int = DEFAULT_CAP, seed: int = 0) -> MatrixPencil:
    """Pencil with PSD last coefficient and ``f = [pi A^{-1} pi^T]^{-1}``.

    ``cert`` must be an exact Gram certificate of ``s^2 W_d[q, p]`` over the
    basis of the pair ``(q s, p s)``.  Without one, a repairable certificate
    is searched for and CertificateMismatchError is raised if none is found.
    """
    from .ambiguity import psd_repair
    from .soscheck import exact_psd_check, repairable_gram, verify_certificate

    q, p = f.den, f.num
    d = q.nvars
    s = Poly.constant(1, d) if s is None else s
    qs, ps = q * s, p * s
    target = wronskian(qs, ps, d)
    if cert is None:
        found = repairable_gram(product_pencil(qs, ps, cap), qs, ps, seed=seed)
        if not found.certified:
            raise CertificateMismatchError(f"no repairable PSD Gram matrix found ({found.status})")
        cert = found.certificate
    if cert.target != target:
        raise CertificateMismatchError("certificate target is not s^2 * W_d[q, p]")
    basis = basis_for_pair(qs, ps, cap)
    if cert.basis.monomials != basis.monomials:
        raise CertificateMismatchError("certificate basis differs from the basis of (q s, p s)")
    if not verify_certificate(cert):
        raise CertificateMismatchError("certificate fails exact re-verification")
    pencil = psd_repair(product_pencil(qs, ps, cap), qs, ps, cert.gram)
    rep = reduce_pencil(pencil, qs, seed)
    out = rep.reduced()
    if not exact_psd_check(out.coeffs[d]).is_psd:
        raise AssertionError("reduced last coefficient lost positive semidefiniteness")
    return out
