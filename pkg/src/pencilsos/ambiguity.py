"""Ambiguity space of polarization pencils.

Symmetric S with ``Psi~ S Psi~^T = 0`` split into blocks by the exponent
``beta = alpha_i + alpha_j`` they touch.  Inside one block the unordered
pairs with sum ``beta`` form a connected graph under elementary moves
(multiply one member by z_k/z_l and the other by z_l/z_k); every edge of a
spanning tree gives one basis matrix.  Lifting turns a last-coefficient
ambiguity into a whole pencil that annihilates Psi.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exact import is_symmetric, is_zero, nullspace, row_basis, solve, zeros
from .monobasis import (DegreeBounds, MonomialBasis, basis_derivative, homogenize_basis,
                        matrix_times_basis, quad_form)
from .polarize import MatrixPencil, pencil_times_basis, verify_polarization
from .polycore import MultiIndex, Poly, grlex_key, wronskian


class AmbiguityPreconditionError(ValueError):
    pass


class AmbiguityLiftError(AmbiguityPreconditionError):
    """S_d meets both preconditions but no lower coefficients complete it.

    Happens when a stencil moves z_d itself, e.g. d=1, Psi=(1,z,z^2,z^3)
    and S_1 = 2 e_z e_z^T - (e_1 e_{z^2}^T + e_{z^2} e_1^T).
    """


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _unit(n, k, v=1):
    e = [0] * n
    e[k] = v
    return tuple(e)


@dataclass(frozen=True)
class PairSet:
    beta: tuple
    pairs: tuple  # (i, j) with i <= j, sorted

    @property
    def m(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class AmbiguityBasisElement:
    """One stencil matrix.

    ``roles`` names the variables and common factors: ``r, l, gamma`` for a
    triple, ``mu, nu, gamma1, gamma2`` for a quad (variable positions refer
    to the basis exponent tuples, so 0 is z0 in a homogenized basis).
    """

    beta: tuple
    kind: str
    support: tuple
    matrix: np.ndarray = field(repr=False, compare=False)
    roles: dict = field(default_factory=dict, compare=False)


def pairs_for_beta(basis: MonomialBasis, beta: MultiIndex) -> PairSet:
    beta = tuple(beta)
    if basis.homogenized and sum(beta) != 2 * basis.bounds.n0:
        raise ValueError("|beta| must equal 2 n0 for a homogenized basis")
    out = []
    for i, a in enumerate(basis.monomials):
        rest = _sub(beta, a)
        if min(rest, default=0) < 0:
            continue
        j = basis.index(rest)
        if j is not None and i <= j:
            out.append((i, j))
    return PairSet(beta, tuple(sorted(out)))


def all_pair_sets(basis: MonomialBasis) -> list[PairSet]:
    groups: dict = {}
    mons = basis.monomials
    for i in range(basis.N):
        for j in range(i, basis.N):
            groups.setdefault(_add(mons[i], mons[j]), []).append((i, j))
    return [PairSet(b, tuple(sorted(groups[b]))) for b in sorted(groups, key=grlex_key)]


def _moves(basis: MonomialBasis, pair):
    """All elementary transformations of ``pair`` as ((i, j), (member, k, l))."""
    mons = basis.monomials
    nv = len(mons[0])
    i, j = pair
    members = [(i, j)] if i == j else [(i, j), (j, i)]
    for x, y in members:
        for k in range(nv):
            for l in range(nv):
                if k == l:
                    continue
                step = _sub(_unit(nv, k), _unit(nv, l))
                x2, y2 = _add(mons[x], step), _sub(mons[y], step)
                if min(x2) < 0 or min(y2) < 0:
                    continue
                a, b = basis.index(x2), basis.index(y2)
                if a is None or b is None:
                    continue
                yield (min(a, b), max(a, b)), (x, k, l)


def elementary_transform_tree(basis: MonomialBasis, ps: PairSet) -> list[tuple]:
    """Breadth-first spanning tree of the elementary-move graph on ``ps``.

    Edges are ``(a, b, (member, k, l))``: pair ``ps.pairs[b]`` is obtained
    from ``ps.pairs[a]`` by multiplying basis monomial ``member`` by z_k/z_l.
    """
    if not ps.pairs:
        raise ValueError("empty pair set")
    where = {p: t for t, p in enumerate(ps.pairs)}
    seen = {0}
    edges = []
    todo = deque([0])
    while todo:
        a = todo.popleft()
        for nxt, move in _moves(basis, ps.pairs[a]):
            b = where.get(nxt)
            if b is None or b in seen:
                continue
            seen.add(b)
            edges.append((a, b, move))
            todo.append(b)
    if len(seen) != ps.m:
        raise AssertionError(f"elementary-move graph for beta={ps.beta} is disconnected")
    return edges


def _element(basis: MonomialBasis, ps: PairSet, edge) -> AmbiguityBasisElement:
    mons = basis.monomials
    nv = len(mons[0])
    a, b, (x, k, l) = edge
    pa = ps.pairs[a]
    y = pa[1] if pa[0] == x else pa[0]
    step = _sub(_unit(nv, k), _unit(nv, l))
    x2 = basis.index(_add(mons[x], step))
    y2 = basis.index(_sub(mons[y], step))
    m = zeros(basis.N)
    if x == y or x2 == y2:
        # triple: the degenerate pair sits in the middle
        if x == y:
            mid, c1, c2, r, lv = x, x2, y2, k, l
        else:
            mid, c1, c2, r, lv = x2, x, y, l, k
        m[mid, mid] = Fraction(2)
        m[c1, c2] = m[c2, c1] = Fraction(-1)
        gamma = _sub(mons[c1], _unit(nv, r, 2))
        return AmbiguityBasisElement(ps.beta, "triple", (c1, mid, c2), m,
                                     {"r": r, "l": lv, "gamma": gamma})
    # quad: (z_mu g1, z_nu g1, z_nu g2, z_mu g2) with mu = k, nu = l
    m[x2, y2] = m[y2, x2] = Fraction(1)
    m[x, y] = m[y, x] = Fraction(-1)
    g1 = _sub(mons[x], _unit(nv, l))
    g2 = _sub(mons[y], _unit(nv, k))
    return AmbiguityBasisElement(ps.beta, "quad", (x2, x, y2, y), m,
                                 {"mu": k, "nu": l, "gamma1": g1, "gamma2": g2})


def ambiguity_space_basis(basis: MonomialBasis) -> list[AmbiguityBasisElement]:
    """Stencil basis of ``{S symmetric : Psi~ S Psi~^T = 0}``, grouped by beta."""
    out = []
    for ps in all_pair_sets(basis):
        if ps.m < 2:
            continue
        for edge in elementary_transform_tree(basis, ps):
            out.append(_element(basis, ps, edge))
    return out


# -- lifting --------------------------------------------------------------------------

def _display_entries(hb: MonomialBasis, el: AmbiguityBasisElement, d: int):
    """Block solution written out for a triple or quad; None if it does not apply.

    The closed forms need the moving variables to differ from z_d, otherwise
    the z_d coefficient would pick up extra terms.
    """
    nv = d + 1
    e = lambda k: _unit(nv, k)
    ro = el.roles
    if el.kind == "triple":
        r, l, g = ro["r"], ro["l"], ro["gamma"]
        if d in (r, l):
            return None
        names = {
            "X": _add(g, _add(e(d), e(r))), "Y": _add(g, _add(e(d), e(l))),
            "A": _add(g, _unit(nv, r, 2)), "M": _add(g, _add(e(r), e(l))),
            "C": _add(g, _unit(nv, l, 2)),
        }
        stencil = [("X", "M", l, -1), ("X", "C", r, 1), ("Y", "A", l, 1),
                ("Y", "M", r, -1), ("A", "C", d, -1), ("M", "M", d, 1)]
    else:
        mu, nu, g1, g2 = ro["mu"], ro["nu"], ro["gamma1"], ro["gamma2"]
        if d in (mu, nu):
            return None
        names = {
            "P": _add(g2, e(d)), "R": _add(g1, e(d)),
            "U": _add(g1, e(mu)), "V": _add(g1, e(nu)),
            "W": _add(g2, e(nu)), "Z": _add(g2, e(mu)),
        }
        stencil = [("P", "U", nu, -1), ("P", "V", mu, 1), ("R", "W", mu, -1),
                ("R", "Z", nu, 1), ("U", "W", d, 1), ("V", "Z", d, -1)]
    idx = {k: hb.index(v) for k, v in names.items()}
    if any(v is None for v in idx.values()):
        return None
    # each stencil entry stands for a symmetric pair of cells; coinciding rows
    # (e.g. z_d g1 == z_nu g2) land on the diagonal twice
    out = []
    for a, b, var, v in stencil:
        i, j = idx[a], idx[b]
        out.append((i, j, var, Fraction(v)))
        out.append((j, i, var, Fraction(v)))
    return out


def block_solution(hb: MonomialBasis, el: AmbiguityBasisElement, d: int):
    """The closed-form lift of one stencil as (row monomials, per-variable matrices).

    Rows are ordered as in the worked solutions: ``(z_d z_r g, z_d z_l g | A, M, C)``
    for a triple and ``(z_d g2, z_d g1 | U, V, W, Z)`` for a quad.
    """
    entries = _display_entries(hb, el, d)
    if entries is None:
        raise ValueError("closed-form lift does not apply to this element")
    nv = d + 1
    ro = el.roles
    e = lambda k: _unit(nv, k)
    if el.kind == "triple":
        g, r, l = ro["gamma"], ro["r"], ro["l"]
        rows = [_add(g, _add(e(d), e(r))), _add(g, _add(e(d), e(l))),
                _add(g, _unit(nv, r, 2)), _add(g, _add(e(r), e(l))), _add(g, _unit(nv, l, 2))]
    else:
        g1, g2, mu, nu = ro["gamma1"], ro["gamma2"], ro["mu"], ro["nu"]
        rows = [_add(g2, e(d)), _add(g1, e(d)), _add(g1, e(mu)), _add(g1, e(nu)),
                _add(g2, e(nu)), _add(g2, e(mu))]
    pos = {hb.index(m): t for t, m in enumerate(rows)}
    mats = {}
    for i, j, var, v in entries:
        mats.setdefault(var, zeros(len(rows)))[pos[i], pos[j]] += v
    return rows, mats


def _solve_entries(hb: MonomialBasis, s: np.ndarray, beta, d: int):
    """Lift of an S_d block supported on one beta by direct exact linear solve."""
    mons = hb.monomials
    nv = d + 1
    target = _add(beta, _unit(nv, d))
    unknowns = []
    for k in range(d):
        need = _sub(target, _unit(nv, k))
        if min(need) < 0:
            continue
        for i, a in enumerate(mons):
            rest = _sub(need, a)
            if min(rest) < 0:
                continue
            j = hb.index(rest)
            if j is not None and i <= j:
                unknowns.append((k, i, j))
    eqs: dict = {}

    def put(row, mono, u, v):
        eqs.setdefault((row, mono), {})
        eqs[(row, mono)][u] = eqs[(row, mono)].get(u, 0) + v

    for u, (k, i, j) in enumerate(unknowns):
        put(i, _add(mons[j], _unit(nv, k)), u, 1)
        if i != j:
            put(j, _add(mons[i], _unit(nv, k)), u, 1)
    rhs: dict = {}
    for i, j in zip(*np.nonzero(s != 0)):
        key = (i, _add(mons[j], _unit(nv, d)))
        rhs[key] = rhs.get(key, 0) - s[i, j]
        eqs.setdefault(key, {})
    keys = sorted(eqs)
    a = [[Fraction(eqs[key].get(u, 0)) for u in range(len(unknowns))] for key in keys]
    b = [Fraction(rhs.get(key, 0)) for key in keys]
    x = solve(a, b) if unknowns else (None if any(b) else [])
    if x is None:
        raise AmbiguityLiftError(f"no lift exists for the block at beta={beta}")
    out = []
    for (k, i, j), v in zip(unknowns, x):
        if v:
            out.append((i, j, k, v))
            if i != j:
                out.append((j, i, k, v))
    return out


def _decompose(elements, s: np.ndarray):
    """Coefficients expressing ``s`` in the given stencil elements, per beta."""
    by_beta: dict = {}
    for t, el in enumerate(elements):
        by_beta.setdefault(el.beta, []).append(t)
    coeffs = [Fraction(0)] * len(elements)
    for beta, ids in by_beta.items():
        cells = sorted({(min(i, j), max(i, j)) for t in ids
                        for i, j in zip(*np.nonzero(elements[t].matrix != 0))})
        a = [[elements[t].matrix[i, j] for t in ids] for i, j in cells]
        b = [s[i, j] for i, j in cells]
        x = solve(a, b)
        if x is None:
            raise AmbiguityPreconditionError(f"S_d is not in the ambiguity span at beta={beta}")
        for t, v in zip(ids, x):
            coeffs[t] = v
    return coeffs


def lift_ambiguity(s_d: np.ndarray, basis: MonomialBasis,
                   bounds: DegreeBounds | None = None) -> MatrixPencil:
    """Complete ``S_d`` to a pencil ``S`` with ``S(z) Psi(z)^T = 0``.

    Requires ``Psi S_d Psi^T = 0`` and ``S_d d^{n_d} Psi^T / dz_d^{n_d} = 0``.
    """
    bounds = basis.bounds if bounds is None else bounds
    if basis.homogenized:
        raise ValueError("pass the affine basis; homogenization happens internally")
    s_d = np.asarray(s_d, dtype=object)
    d = bounds.d
    nd = bounds.nk[d - 1]
    n = basis.N
    if s_d.shape != (n, n) or not is_symmetric(s_d):
        raise AmbiguityPreconditionError("S_d must be symmetric and match the basis size")
    if not quad_form(basis, s_d).is_zero():
        raise AmbiguityPreconditionError("Psi S_d Psi^T is not identically zero")
    col = basis_derivative(basis, d, nd)
    if not all(v.is_zero() for v in matrix_times_basis(basis, s_d, col)):
        raise AmbiguityPreconditionError("S_d does not annihilate the top z_d derivative of Psi")

    hb = homogenize_basis(basis)
    coeffs = [zeros(n) for _ in range(d + 1)]
    coeffs[d] = s_d.copy()
    if not is_zero(s_d):
        sub = [i for i, m in enumerate(hb.monomials) if m[d] <= nd - 1]
        sub_bounds = DegreeBounds(bounds.n0, bounds.nk[:-1] + (max(nd - 1, 0),))
        sb = MonomialBasis(sub_bounds, tuple(hb[i] for i in sub), homogenized=True)
        local = ambiguity_space_basis(sb)
        elements = []
        for el in local:
            m = zeros(n)
            m[np.ix_(sub, sub)] = el.matrix
            elements.append(AmbiguityBasisElement(el.beta, el.kind,
                                                  tuple(sub[t] for t in el.support), m, el.roles))
        weights = _decompose(elements, s_d)
        recon = zeros(n)
        for el, w in zip(elements, weights):
            recon = recon + el.matrix * w
        if not np.all(recon == s_d):
            raise AmbiguityPreconditionError("S_d has entries outside the ambiguity span")
        by_beta: dict = {}
        for el, w in zip(elements, weights):
            if w:
                by_beta.setdefault(el.beta, []).append((el, w))
        for beta, items in by_beta.items():
            closed = [_display_entries(hb, el, d) for el, _ in items]
            if all(e is not None for e in closed):
                entries = [(i, j, var, w * v) for (el, w), es in zip(items, closed)
                           for i, j, var, v in es if var != d]
            else:
                block = zeros(n)
                for el, w in items:
                    block = block + el.matrix * w
                entries = _solve_entries(hb, block, beta, d)
            for i, j, var, v in entries:
                coeffs[var][i, j] += v
    pencil = MatrixPencil(basis, tuple(coeffs))
    if not all(v.is_zero() for v in pencil_times_basis(pencil)):
        raise AssertionError("lifted pencil does not annihilate Psi")
    return pencil


def liftable_ambiguity(basis: MonomialBasis) -> list[np.ndarray]:
    """Basis of the S_d meeting both lift preconditions that actually lift.

    Computed exactly and per beta: the unknowns are the S_d cells with sum
    beta (rows of z_d-degree below n_d) and the lower-coefficient cells that
    land on beta + e_d; the S_d part of the joint nullspace is the answer.
    """
    if basis.homogenized:
        raise ValueError("pass the affine basis")
    d = basis.bounds.d
    nd = basis.bounds.nk[d - 1]
    hb = homogenize_basis(basis)
    mons = hb.monomials
    nv = d + 1
    sub = [i for i, m in enumerate(mons) if m[d] <= nd - 1]
    groups: dict = {}
    for a, i in enumerate(sub):
        for j in sub[a:]:
            groups.setdefault(_add(mons[i], mons[j]), []).append((i, j))
    out = []
    for beta in sorted(groups, key=grlex_key):
        cells = groups[beta]
        if len(cells) < 2:
            continue
        target = _add(beta, _unit(nv, d))
        lower = []
        for k in range(d):
            need = _sub(target, _unit(nv, k))
            if min(need) < 0:
                continue
            for i, a in enumerate(mons):
                rest = _sub(need, a)
                if min(rest) < 0:
                    continue
                j = hb.index(rest)
                if j is not None and i <= j:
                    lower.append((k, i, j))
        unknowns = [(d, i, j) for i, j in cells] + lower
        eqs: dict = {}
        for u, (k, i, j) in enumerate(unknowns):
            for r, c in ((i, j), (j, i)) if i != j else ((i, j),):
                key = (r, _add(mons[c], _unit(nv, k)))
                eqs.setdefault(key, {})
                eqs[key][u] = eqs[key].get(u, 0) + 1
        rows = [[Fraction(e.get(u, 0)) for u in range(len(unknowns))] for e in eqs.values()]
        rows.append([Fraction(2 if i != j else 1) for i, j in cells] + [Fraction(0)] * len(lower))
        null = nullspace(rows, len(unknowns))
        proj = [v[:len(cells)] for v in null]
        for t in row_basis(proj) if proj else []:
            m = zeros(basis.N)
            for (i, j), x in zip(cells, proj[t]):
                m[i, j] = m[j, i] = x
            out.append(m)
    return out


def psd_repair(b: MatrixPencil, q: Poly, p: Poly, a_d: np.ndarray) -> MatrixPencil:
    """Replace the last coefficient of a polarization pencil by the Gram matrix ``a_d``."""
    from .soscheck import exact_psd_check

    a_d = np.asarray(a_d, dtype=object)
    d = b.d
    basis = b.basis
    if not verify_polarization(q, p, b):
        raise AmbiguityPreconditionError("input pencil does not polarize (q, p)")
    if a_d.shape != (basis.N, basis.N) or not is_symmetric(a_d):
        raise AmbiguityPreconditionError("A_d must be symmetric and match the basis")
    if quad_form(basis, a_d) != wronskian(q, p, d):
        raise AmbiguityPreconditionError("A_d is not a Gram matrix of W_d[q, p]")
    nd = basis.bounds.nk[d - 1]
    col = basis_derivative(basis, d, nd)
    if not all(v.is_zero() for v in matrix_times_basis(basis, a_d, col)):
        raise AmbiguityPreconditionError("A_d does not annihilate the top z_d derivative of Psi")
    if not exact_psd_check(a_d).is_psd:
        raise AmbiguityPreconditionError("A_d is not positive semidefinite")
    s = lift_ambiguity(a_d - b.coeffs[d], basis)
    out = b + s
    if not verify_polarization(q, p, out) or not np.all(out.coeffs[d] == a_d):
        raise AssertionError("repaired pencil broke the polarization identity")
    return out
