"""Sum-of-squares certificates.

The numeric search (Dykstra alternating projections between the affine Gram
slice and the PSD cone) is only a proposal mechanism: every certificate that
leaves this module has been rounded to rationals, projected back onto the
slice exactly and re-checked for PSD-ness with exact LDL^T.  Infeasibility is
reported as numeric evidence, never as proof.
"""
from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog, minimize

from .exact import is_symmetric, nullspace, row_basis, solve, solve_square, zeros
from .monobasis import (DEFAULT_CAP, DegreeBounds, MonomialBasis, basis_for_pair,
                        build_basis, quad_form)
from .polycore import GaussianRational, Poly, RationalFunction, evaluate, wronskian

log = logging.getLogger(__name__)

CERTIFIED = "certified"
INFEASIBLE = "infeasible-evidence"
INCONCLUSIVE = "inconclusive"


class BasisInsufficientError(ValueError):
    pass


# -- exact PSD -------------------------------------------------------------------------

@dataclass
class PSDResult:
    """Outcome of the exact LDL^T test.

    When ``is_psd`` the matrix equals ``sum_t d_t l_t l_t^T`` over ``pivots``
    (each ``(d_t, l_t)`` with ``d_t > 0``).  Otherwise ``witness`` is an exact
    vector with ``witness^T M witness == value < 0``.
    """

    is_psd: bool
    pivots: list = field(default_factory=list)
    witness: list | None = None
    value: Fraction | None = None


def exact_psd_check(m) -> PSDResult:
    m = np.asarray(m, dtype=object)
    n = m.shape[0]
    if not is_symmetric(m):
        raise ValueError("matrix is not symmetric")
    a = [[Fraction(m[i, j]) for j in range(n)] for i in range(n)]
    remaining = list(range(n))
    pivots = []
    reduced_witness = None
    while remaining:
        p = max(remaining, key=lambda i: a[i][i])
        dp = a[p][p]
        if dp < 0:
            reduced_witness = {p: Fraction(1)}
            break
        if dp == 0:
            neg = next((i for i in remaining if a[i][i] < 0), None)
            if neg is not None:
                reduced_witness = {neg: Fraction(1)}
                break
            hit = next(((i, j) for i in remaining for j in remaining
                        if i < j and a[i][j] != 0), None)
            if hit is None:
                break
            i, j = hit
            reduced_witness = {i: Fraction(1), j: Fraction(-1 if a[i][j] > 0 else 1)}
            break
        rest = [i for i in remaining if i != p]
        l = [Fraction(0)] * n
        l[p] = Fraction(1)
        for i in rest:
            l[i] = a[i][p] / dp
        for i in rest:
            li = l[i]
            if li:
                row = a[i]
                for j in rest:
                    if l[j]:
                        row[j] -= li * l[j] * dp
        pivots.append((dp, l))
        remaining = rest
    if reduced_witness is None:
        return PSDResult(True, pivots)
    # lift the reduced witness back through the eliminated pivots
    elim = [i for i in range(n) if i not in remaining]
    x = [Fraction(0)] * n
    for i, v in reduced_witness.items():
        x[i] = v
    if elim:
        rhs = [-sum(m[e, r] * x[r] for r in remaining) for e in elim]
        xe = solve_square([[m[e, f] for f in elim] for e in elim], rhs)
        for e, v in zip(elim, xe):
            x[e] = v
    value = sum(x[i] * m[i, j] * x[j] for i in range(n) for j in range(n) if m[i, j])
    if value >= 0:
        raise AssertionError("negative witness lost its sign when lifted")
    return PSDResult(False, pivots, x, value)


# -- certificates --------------------------------------------------------------------------

@dataclass
class GramCertificate:
    basis: MonomialBasis
    gram: np.ndarray
    target: Poly
    factors: list = field(default_factory=list)  # [(weight, Poly)]


def extract_sos(cert: GramCertificate) -> list:
    """Weighted squares ``[(c_i, h_i)]`` with ``sum c_i h_i^2 == target`` exactly."""
    res = exact_psd_check(cert.gram)
    if not res.is_psd:
        raise ValueError("certificate Gram matrix is not positive semidefinite")
    nv = cert.basis.nvars
    mons = cert.basis.monomials
    out = []
    for dt, l in res.pivots:
        h = Poly(nv, {mons[i]: v for i, v in enumerate(l) if v})
        out.append((dt, h))
    total = Poly.zero(nv)
    for c, h in out:
        total = total + h * h * c
    if total != cert.target:
        raise AssertionError("weighted squares do not re-expand to the target")
    return out


def verify_certificate(cert: GramCertificate) -> bool:
    """Exact re-verification: Gram identity, PSD-ness, and factors if present."""
    g = np.asarray(cert.gram, dtype=object)
    if g.shape != (cert.basis.N, cert.basis.N) or not is_symmetric(g):
        return False
    if quad_form(cert.basis, g) != cert.target:
        return False
    if not exact_psd_check(g).is_psd:
        return False
    if cert.factors:
        total = Poly.zero(cert.target.nvars)
        for c, h in cert.factors:
            if c <= 0:
                return False
            total = total + h * h * c
        if total != cert.target:
            return False
    return True


@dataclass
class SOSResult:
    status: str
    certificate: GramCertificate | None = None
    residual: float | None = None
    margin: float | None = None
    message: str = ""

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED


# -- numeric Gram search ------------------------------------------------------------------

def _newton_active(f: Poly, basis: MonomialBasis) -> list[int]:
    """Basis positions inside half the Newton polytope of ``f``."""
    pts = np.array([e for e in f.terms], dtype=float) / 2.0
    if len(pts) == 1:
        return [i for i, m in enumerate(basis.monomials) if np.allclose(m, pts[0])]
    k = len(pts)
    out = []
    a_eq = np.vstack([pts.T, np.ones((1, k))])
    for i, m in enumerate(basis.monomials):
        b_eq = np.append(np.array(m, dtype=float), 1.0)
        res = linprog(np.zeros(k), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * k, method="highs")
        if res.status == 0:
            out.append(i)
    return out


def _active_set(f: Poly, basis: MonomialBasis) -> list[int]:
    active = _newton_active(f, basis)
    mons = basis.monomials
    while True:
        groups: dict = {}
        for a in active:
            for b in active:
                groups.setdefault(tuple(x + y for x, y in zip(mons[a], mons[b])), []).append((a, b))
        drop = set()
        for a in active:
            key = tuple(2 * x for x in mons[a])
            if f.coeff(key) == 0 and all(x == y for x, y in groups[key]):
                drop.add(a)
        if not drop:
            return active
        active = [a for a in active if a not in drop]


class _Slice:
    """Affine Gram slice restricted to active positions (numeric and exact)."""

    def __init__(self, f: Poly, basis: MonomialBasis, active: list[int]):
        mons = basis.monomials
        self.active = active
        n = len(active)
        keys: dict = {}
        gid = np.zeros((n, n), dtype=int)
        for a in range(n):
            for b in range(n):
                key = tuple(x + y for x, y in zip(mons[active[a]], mons[active[b]]))
                gid[a, b] = keys.setdefault(key, len(keys))
        self.keys = list(keys)
        self.gid = gid
        self.counts = np.bincount(gid.ravel(), minlength=len(keys)).astype(float)
        self.exact_c = [f.coeff(k) for k in self.keys]
        self.missing = [e for e in f.terms if e not in keys]

    @property
    def dim(self) -> int:
        return len(self.active)

    def constraints(self) -> np.ndarray:
        n = self.dim
        a = np.zeros((len(self.keys), n * n))
        a[self.gid.ravel(), np.arange(n * n)] = 1.0
        return a

    def project(self, x: np.ndarray, c: np.ndarray) -> np.ndarray:
        sums = np.bincount(self.gid.ravel(), weights=x.ravel(), minlength=len(self.keys))
        return x + ((c - sums) / self.counts)[self.gid]

    def exact_gram(self, g: list[list[Fraction]]) -> list[list[Fraction]]:
        """Equal per-group shift onto the slice (the least-norm correction)."""
        n = len(g)
        sums = [Fraction(0)] * len(self.keys)
        for a in range(n):
            for b in range(n):
                sums[self.gid[a, b]] += g[a][b]
        shift = [(c - s) / int(k) for c, s, k in zip(self.exact_c, sums, self.counts)]
        return [[g[a][b] + shift[self.gid[a, b]] for b in range(n)] for a in range(n)]


class _Face:
    """Gram matrices ``G = V H V^T`` that vanish on known real zeros of ``f``.

    ``V`` spans the orthogonal complement of the monomial vectors at the
    zeros; any PSD Gram matrix of ``f`` has those vectors in its kernel, so
    nothing is lost by the restriction.
    """

    def __init__(self, sl: _Slice, v: list[list[Fraction]]):
        self.sl = sl
        self.v = v
        n = sl.dim
        m = len(v[0])
        self.m = m
        self.vf = np.array(v, dtype=float)
        ng = len(sl.keys)
        af = np.zeros((ng, m * m))
        nzv = [[(u, x) for u, x in enumerate(row) if x] for row in v]
        self.unknowns = [(u, w) for u in range(m) for w in range(u, m)]
        col = {uw: t for t, uw in enumerate(self.unknowns)}
        b = [dict() for _ in range(ng)]
        for a in range(n):
            for bb in range(n):
                g = sl.gid[a, bb]
                af[g] += np.outer(self.vf[a], self.vf[bb]).ravel()
                row = b[g]
                for u, x in nzv[a]:
                    for w, y in nzv[bb]:
                        t = col[(min(u, w), max(u, w))]
                        row[t] = row.get(t, 0) + x * y
        self.af = af
        self.pinv = np.linalg.pinv(af, rcond=1e-11)
        dense = [[Fraction(r.get(t, 0)) for t in range(len(self.unknowns))] for r in b]
        self.rows = row_basis(dense) if dense else []
        self.b = [dense[i] for i in self.rows]
        self.c = [sl.exact_c[i] for i in self.rows]
        self.consistent = solve(dense, sl.exact_c) is not None if dense else True
        self._corr = None

    @property
    def dim(self) -> int:
        return self.m

    @property
    def active(self) -> list[int]:
        return self.sl.active

    def constraints(self) -> np.ndarray:
        return self.af

    def project(self, x: np.ndarray, c: np.ndarray) -> np.ndarray:
        h = x.ravel()
        h = h - self.pinv @ (self.af @ h - c)
        h = h.reshape(self.m, self.m)
        return (h + h.T) / 2

    def exact_gram(self, h: list[list[Fraction]]) -> list[list[Fraction]]:
        m = self.m
        vec = [h[u][w] for u, w in self.unknowns]
        r = [ci - sum(x * y for x, y in zip(row, vec) if x) for row, ci in zip(self.b, self.c)]
        if any(r):
            if self._corr is None:
                gram = [[sum(x * y for x, y in zip(ri, rj) if x and y) for rj in self.b]
                        for ri in self.b]
                self._corr = gram
            y = solve_square(self._corr, r)
            for t in range(len(vec)):
                vec[t] += sum(row[t] * yi for row, yi in zip(self.b, y) if row[t])
        hh = [[Fraction(0)] * m for _ in range(m)]
        for (u, w), x in zip(self.unknowns, vec):
            hh[u][w] = hh[w][u] = x
        v = self.v
        n = len(v)
        vh = [[sum(v[a][u] * hh[u][w] for u in range(m) if v[a][u]) for w in range(m)]
              for a in range(n)]
        return [[sum(vh[a][w] * v[bb][w] for w in range(m) if v[bb][w]) for bb in range(n)]
                for a in range(n)]


def _real_zeros(f: Poly, active_polys: list, seed: int, starts: int = 12) -> list:
    """Exact rational real zeros of ``f`` found on a small grid or by local descent."""
    d = f.nvars
    found = set()
    grid = [Fraction(x) for x in (0, 1, -1, 2, -2)] + [Fraction(1, 2), Fraction(-1, 2)]
    rng = random.Random(seed)
    if len(grid) ** d <= 3000:
        cands = itertools.product(grid, repeat=d)
    else:
        cands = (tuple(rng.choice(grid) for _ in range(d)) for _ in range(3000))
    for z in cands:
        if evaluate(f, list(z)) == 0:
            found.add(tuple(z))
    exps = np.array(list(f.terms), dtype=float).reshape(-1, d)
    coef = np.array([float(v) for v in f.terms.values()])
    scale = float(np.max(np.abs(coef)))

    def val(x):
        return float(coef @ np.prod(np.power(x[None, :], exps), axis=1))

    for _ in range(starts):
        x0 = np.array([rng.uniform(-2, 2) for _ in range(d)])
        with np.errstate(all="ignore"):
            res = minimize(val, x0, method="L-BFGS-B", bounds=[(-4, 4)] * d,
                           options={"gtol": 1e-14, "ftol": 1e-16})
        if abs(res.fun) < 1e-8 * scale and np.all(np.isfinite(res.x)):
            z = tuple(Fraction(float(x)).limit_denominator(1000) for x in res.x)
            if evaluate(f, list(z)) == 0:
                found.add(z)
    return sorted(found)


def _pinned_kernels(sl: _Slice):
    """Kernels of principal blocks whose every entry is fixed by a single coefficient.

    A cell is pinned when its monomial has no other representation in the
    slice.  Greedy maximal cliques of pinned cells give exact blocks; each
    kernel vector of a block, padded with zeros, lies in the kernel of every
    PSD Gram matrix.  Returns ``(vectors, bad)`` with ``bad`` set when some
    pinned block is not PSD.
    """
    n = sl.dim
    own = np.where(np.eye(n, dtype=bool), 1, 2)
    pinned = sl.counts[sl.gid] == own
    seen, out = set(), []
    for a in range(n):
        if not pinned[a, a]:
            continue
        clique = [a]
        for b in range(n):
            if b != a and pinned[b, b] and all(pinned[b, t] for t in clique):
                clique.append(b)
        key = tuple(sorted(clique))
        if key in seen:
            continue
        seen.add(key)
        block = zeros(len(key))
        for u, i in enumerate(key):
            for w, j in enumerate(key):
                g = sl.gid[i, j]
                block[u, w] = sl.exact_c[g] / int(sl.counts[g])
        if not exact_psd_check(block).is_psd:
            return [], key
        for vec in nullspace([list(r) for r in block], len(key)):
            full = [Fraction(0)] * n
            for i, x in zip(key, vec):
                full[i] = x
            out.append(full)
    return out, None


def _affine_params(a: np.ndarray, c: np.ndarray, n: int):
    """Numeric parametrization ``X0 + sum y_i D_i`` of symmetric ``X`` with ``A vec(X) = c``."""
    iu = np.triu_indices(n, 1)
    r = np.arange(len(iu[0]))
    sym = np.zeros((len(r), n * n))
    sym[r, iu[0] * n + iu[1]] = 1.0
    sym[r, iu[1] * n + iu[0]] = -1.0
    full = np.vstack([a, sym])
    rhs = np.concatenate([c, np.zeros(len(r))])
    x0, *_ = np.linalg.lstsq(full, rhs, rcond=None)
    if np.linalg.norm(full @ x0 - rhs) > 1e-8 * (1 + np.linalg.norm(rhs)):
        return None
    dirs = null_space(full, rcond=1e-10).T.reshape(-1, n, n)
    x0 = x0.reshape(n, n)
    return (x0 + x0.T) / 2, (dirs + dirs.transpose(0, 2, 1)) / 2


def _max_margin(x0: np.ndarray, dirs: np.ndarray, mu_min: float = 1e-9):
    """Maximize ``t`` with ``X0 + sum y_i D_i - t I > 0`` by a log-det barrier.

    Damped Newton on ``-t - mu log det`` along a decreasing ``mu``.  Returns
    the best ``(X, t)`` seen.
    """
    n = x0.shape[0]
    k = len(dirs)
    mats = np.concatenate([dirs, -np.eye(n)[None]], axis=0) if k else -np.eye(n)[None]
    flat = mats.reshape(k + 1, -1)
    cvec = np.zeros(k + 1)
    cvec[-1] = -1.0
    v = np.zeros(k + 1)
    v[-1] = np.linalg.eigvalsh(x0)[0] - 1.0

    def at(vec):
        return x0 + (vec @ flat).reshape(n, n)

    def phi(vec, mu):
        try:
            ch = np.linalg.cholesky(at(vec))
        except np.linalg.LinAlgError:
            return np.inf
        return cvec @ vec - 2 * mu * np.sum(np.log(np.diag(ch)))

    best_x, best_t = at(v) + v[-1] * np.eye(n), v[-1]
    mu = 1.0
    while mu > mu_min:
        for _ in range(60):
            z = at(v)
            w = np.linalg.inv(z)
            w = (w + w.T) / 2
            try:
                r = np.linalg.cholesky(w)
            except np.linalg.LinAlgError:
                break
            kk = np.einsum("ji,kjl,lm->kim", r, mats, r).reshape(k + 1, -1)
            g = cvec - mu * kk @ np.eye(n).ravel()
            h = mu * kk @ kk.T
            try:
                step = -np.linalg.solve(h + 1e-14 * np.trace(h) * np.eye(k + 1), g)
            except np.linalg.LinAlgError:
                break
            dec = -g @ step
            if dec / 2 < 1e-10:
                break
            f0, s = phi(v, mu), 1.0
            while s > 1e-8 and phi(v + s * step, mu) > f0 - 0.25 * s * dec:
                s /= 2
            if s <= 1e-8:
                break
            v = v + s * step
        if v[-1] > best_t:
            best_x, best_t = at(v) + v[-1] * np.eye(n), v[-1]
        mu /= 8
    return best_x, best_t


def _psd_project(x: np.ndarray, floor: float) -> np.ndarray:
    w, v = np.linalg.eigh((x + x.T) / 2)
    return (v * np.maximum(w, floor)) @ v.T


def _dykstra(space, c: np.ndarray, floor: float, max_iter: int, tol: float):
    """Alternating projections between the slice and ``{X >= floor I}``.

    Stops once the gap is below ``tol`` or below a quarter of the floor: the
    PSD iterate then keeps a margin larger than the exact least-norm
    correction back onto the slice, so rounding can succeed.
    """
    n = space.dim
    good = max(tol, floor / 4)
    x = space.project(np.zeros((n, n)), c)
    p = np.zeros((n, n))
    y = x
    res = np.inf
    history = []
    it = 0
    psd = getattr(space, "psd", _psd_project)
    for it in range(max_iter):
        y = psd(x + p, floor)
        p = x + p - y
        x = space.project(y, c)
        res = float(np.linalg.norm(x - y))
        if res < good:
            break
        if it % 250 == 0:
            history.append(res)
            if len(history) > 4 and res > 1e3 * tol and res > 0.995 * history[-5]:
                break  # stalled well above tolerance
    return x, y, res, it + 1


def _round_and_verify(space, y: np.ndarray, scale: Fraction, basis: MonomialBasis,
                      f: Poly, den0: int, doublings: int):
    n = space.dim
    active = space.active
    den = den0
    for _ in range(doublings):
        g = [[Fraction(float(y[a, b])).limit_denominator(den) * scale for b in range(n)]
             for a in range(n)]
        g = [[(g[a][b] + g[b][a]) / 2 for b in range(n)] for a in range(n)]
        g = space.exact_gram(g)
        full = zeros(basis.N)
        for a, i in enumerate(active):
            for b, j in enumerate(active):
                full[i, j] = g[a][b]
        if exact_psd_check(full).is_psd:
            cert = GramCertificate(basis, full, f)
            cert.factors = extract_sos(cert)
            return cert
        den *= 2
    return None


def _dual_margin(sl: _Slice, x: np.ndarray, y: np.ndarray, c: np.ndarray):
    """Numeric separating functional from the last iterates, or None."""
    z = y - x
    lam = np.bincount(sl.gid.ravel(), weights=z.ravel(), minlength=len(sl.keys)) / sl.counts
    zs = lam[sl.gid]
    nz = np.linalg.norm(zs)
    if nz == 0:
        return None
    eig = np.linalg.eigvalsh(zs)[0] / nz
    val = float(lam @ c) / nz
    if eig >= -1e-7 and val < -1e-9:
        return -val
    return None


def sos_feasibility(f: Poly, basis: MonomialBasis, tol: float = 1e-9, max_iter: int = 50_000,
                    den0: int = 10**4, doublings: int = 14,
                    floors: Sequence[float] = (1e-3, 1e-5, 1e-7, 0.0),
                    seed: int = 0) -> SOSResult:
    """Search for an exact PSD Gram matrix of ``f`` over ``basis``.

    Raises BasisInsufficientError when some monomial of ``f`` is not a sum of
    two basis monomials.
    """
    if f.nvars != basis.nvars:
        raise ValueError("polynomial and basis differ in variable count")
    mons = basis.monomials
    sums = {tuple(x + y for x, y in zip(a, b)) for a in mons for b in mons}
    bad = [e for e in f.terms if e not in sums]
    if bad:
        raise BasisInsufficientError(f"monomials {bad} are not pairwise sums of basis monomials")
    if f.is_zero():
        cert = GramCertificate(basis, zeros(basis.N), f, [])
        return SOSResult(CERTIFIED, cert, 0.0, message="zero polynomial")
    active = _active_set(f, basis)
    sl = _Slice(f, basis, active)
    if sl.missing or not active:
        return SOSResult(INFEASIBLE, message="support of f leaves half its Newton polytope")
    space = sl
    pinned, bad = _pinned_kernels(sl)
    if bad is not None:
        return SOSResult(INFEASIBLE, message=f"coefficients pin an indefinite block on "
                                             f"{[mons[active[i]] for i in bad]}")
    zs = _real_zeros(f, [], seed)
    if zs or pinned:
        kernel = [[evaluate(Poly.monomial(mons[i]), list(z)) for i in active] for z in zs]
        comp = nullspace(kernel + pinned, len(active))
        if not comp:
            return SOSResult(INFEASIBLE, message=f"real zeros {[tuple(map(str, z)) for z in zs]} "
                                                 "and pinned blocks force every PSD Gram "
                                                 "matrix to vanish")
        space = _Face(sl, [list(col) for col in zip(*comp)])
        if not space.consistent:
            return SOSResult(INFEASIBLE, message="no Gram matrix vanishes on the real zeros of f")
        log.debug("restricted to a face of dimension %d using %d real zeros and %d pinned "
                  "kernel vectors", space.dim, len(zs), len(pinned))
    scale = max(abs(v) for v in f.terms.values())
    c = np.array([float(v / scale) for v in sl.exact_c])
    params = _affine_params(space.constraints(), c, space.dim)
    if params is not None:
        xm, t = _max_margin(*params)
        log.debug("barrier margin %.3e on a space of dimension %d", t, space.dim)
        if t > 0:
            cert = _round_and_verify(space, xm, scale, basis, f, den0, doublings)
            if cert is not None:
                return SOSResult(CERTIFIED, cert, 0.0, margin=float(t))
    budget = max(max_iter // len(floors), 1)
    last = None
    for floor in floors:
        x, y, res, its = _dykstra(space, c, floor, budget, tol)
        log.debug("floor=%g residual=%.3e after %d iterations", floor, res, its)
        last = (x, y, res)
        if res < max(tol, floor / 4):
            cert = _round_and_verify(space, y, scale, basis, f, den0, doublings)
            if cert is not None:
                return SOSResult(CERTIFIED, cert, res)
    x, y, res = last
    if res >= tol:
        margin = _dual_margin(sl, x, y, c) if space is sl else None
        if margin is not None:
            return SOSResult(INFEASIBLE, residual=res, margin=margin,
                             message="numeric separating functional found (not a proof)")
        return SOSResult(INCONCLUSIVE, residual=res, message="no convergence and no dual evidence")
    return SOSResult(INCONCLUSIVE, residual=res, message="rounding failed within the retry cap")


class _RepairSpace:
    """``G0 + span(E)`` with a common exact kernel, for last-coefficient repair."""

    def __init__(self, g0, dirs, kernel):
        n = g0.shape[0]
        self.n = n
        self.active = list(range(n))
        self.g0 = g0
        self.dirs = dirs
        self.g0f = np.array(g0, dtype=float)
        if dirs:
            mat = np.array([np.array(e, dtype=float).ravel() for e in dirs]).T
            q, r = np.linalg.qr(mat)
            keep = np.abs(np.diag(r)) > 1e-12
            self.qe = q[:, keep]
        else:
            self.qe = np.zeros((n * n, 0))
        if kernel:
            k = np.array(kernel, dtype=float).T
            u, sv, _ = np.linalg.svd(k, full_matrices=True)
            rank = int(np.sum(sv > 1e-12 * sv[0]))
            self.vo = u[:, rank:]
        else:
            self.vo = None
        self._normal = None

    @property
    def dim(self) -> int:
        return self.n

    def project(self, x: np.ndarray, c=None) -> np.ndarray:
        v = (x - self.g0f).ravel()
        return self.g0f + (self.qe @ (self.qe.T @ v)).reshape(self.n, self.n)

    def psd(self, x: np.ndarray, floor: float) -> np.ndarray:
        if self.vo is None:
            return _psd_project(x, floor)
        h = self.vo.T @ x @ self.vo
        return self.vo @ _psd_project(h, floor) @ self.vo.T

    def exact_gram(self, g):
        n = self.n
        diff = [g[a][b] - self.g0[a, b] for a in range(n) for b in range(n)]
        flat = [[e[a, b] for a in range(n) for b in range(n)] for e in self.dirs]
        if self._normal is None:
            self._normal = [[sum(x * y for x, y in zip(fi, fj) if x and y) for fj in flat]
                            for fi in flat]
        rhs = [sum(x * y for x, y in zip(fi, diff) if x) for fi in flat]
        t = solve(self._normal, rhs)
        out = self.g0.copy()
        for e, ti in zip(self.dirs, t):
            if ti:
                out = out + e * ti
        return [[out[a, b] for b in range(n)] for a in range(n)]


def repairable_gram(pencil, q: Poly, p: Poly, tol: float = 1e-9, max_iter: int = 40_000,
                    den0: int = 10**4, doublings: int = 14,
                    floors: Sequence[float] = (1e-3, 1e-5, 1e-7, 0.0),
                    seed: int = 0) -> SOSResult:
    """PSD Gram matrix of ``W_d[q, p]`` that ``psd_repair`` can install in ``pencil``.

    The search runs over ``B_d + span`` of the liftable ambiguity directions,
    so the difference to the current last coefficient always lifts.
    """
    from .ambiguity import liftable_ambiguity

    basis = pencil.basis
    d = pencil.d
    target = wronskian(q, p, d)
    g0 = pencil.coeffs[d]
    if exact_psd_check(g0).is_psd:
        cert = GramCertificate(basis, g0.copy(), target)
        cert.factors = extract_sos(cert)
        return SOSResult(CERTIFIED, cert, 0.0, message="current last coefficient is PSD")
    dirs = liftable_ambiguity(basis)
    mons = basis.monomials
    kernel = [[evaluate(Poly.monomial(m), list(z)) for m in mons]
              for z in (_real_zeros(target, [], seed) if not target.is_zero() else [])]
    if kernel and dirs:
        # (g0 + sum t_i E_i) k = 0 for every kernel vector k
        rows, rhs = [], []
        for k in kernel:
            ek = [e.dot(np.array(k, dtype=object)) for e in dirs]
            gk = g0.dot(np.array(k, dtype=object))
            for r in range(basis.N):
                rows.append([v[r] for v in ek])
                rhs.append(-gk[r])
        t0 = solve(rows, rhs)
        if t0 is None:
            return SOSResult(INFEASIBLE, message="no repairable Gram matrix vanishes on the real zeros")
        null = nullspace(rows, len(dirs))
        g0 = g0 + sum((e * t for e, t in zip(dirs, t0) if t), zeros(basis.N))
        dirs = [sum((e * v for e, v in zip(dirs, vec) if v), zeros(basis.N)) for vec in null]
    if not dirs:
        if exact_psd_check(g0).is_psd:
            cert = GramCertificate(basis, g0, target)
            cert.factors = extract_sos(cert)
            return SOSResult(CERTIFIED, cert, 0.0)
        return SOSResult(INFEASIBLE, message="the only repairable Gram matrix is not PSD")
    space = _RepairSpace(g0, dirs, kernel)
    budget = max(max_iter // len(floors), 1)
    res = np.inf
    for floor in floors:
        _, y, res, _ = _dykstra(space, None, floor, budget, tol)
        if res < max(tol, floor / 4):
            cert = _round_and_verify(space, y, Fraction(1), basis, target, den0, doublings)
            if cert is not None:
                return SOSResult(CERTIFIED, cert, res)
    return SOSResult(INCONCLUSIVE, residual=res, message="no PSD matrix found in the repairable set")


def gram_basis(f: Poly, cap: int = DEFAULT_CAP) -> MonomialBasis:
    return build_basis(DegreeBounds.for_gram(f), cap)


def sos_oracle(f: Poly, **kw) -> SOSResult:
    """SOS test over the half-degree basis of ``f``; odd supports are infeasible."""
    try:
        return sos_feasibility(f, gram_basis(f), **kw)
    except BasisInsufficientError as exc:
        return SOSResult(INFEASIBLE, message=f"no Gram matrix over any basis: {exc}")


# -- sampling ------------------------------------------------------------------------------------

@dataclass
class SampleReport:
    violation: bool
    point: list | None = None
    value: object = None
    checked: int = 0


def _rat(rng: random.Random, lo: Fraction, hi: Fraction, den: int = 1000) -> Fraction:
    return Fraction(rng.randint(int(lo * den), int(hi * den)), den)


def random_real_point(rng: random.Random, d: int, bound: int = 10) -> list[Fraction]:
    return [_rat(rng, -bound, bound) for _ in range(d)]


def random_upper_point(rng: random.Random, d: int, bound: int = 10) -> list[GaussianRational]:
    return [GaussianRational(_rat(rng, -bound, bound), _rat(rng, Fraction(1, 1000), bound))
            for _ in range(d)]


def psd_sampling_test(f: Poly, samples: int, seed: int, bound: int = 10) -> SampleReport:
    """Look for a real rational point where ``f < 0``."""
    rng = random.Random(seed)
    for t in range(samples):
        z = random_real_point(rng, f.nvars, bound)
        v = evaluate(f, z)
        if v < 0:
            return SampleReport(True, z, v, t + 1)
    return SampleReport(False, None, None, samples)


def nevanlinna_sample_check(f: RationalFunction, samples: int, seed: int,
                            bound: int = 10, tol: float = 1e-12) -> SampleReport:
    """Sample the open upper poly-half-plane for ``Im f < 0``."""
    rng = random.Random(seed)
    checked = 0
    for t in range(samples):
        z = random_upper_point(rng, f.nvars, bound)
        qv = evaluate(f.den, z)
        if qv == 0:
            continue
        checked += 1
        fv = evaluate(f.num, z) / qv
        fv = fv if isinstance(fv, GaussianRational) else GaussianRational(fv)
        if fv.im < 0 and float(fv.im) < -tol * (1 + abs(complex(fv))):
            return SampleReport(True, z, fv, checked)
    return SampleReport(False, None, None, checked)


# -- pipeline ---------------------------------------------------------------------------------------

@dataclass
class PipelineReport:
    f: RationalFunction
    gate: SampleReport
    results: list  # [(j, W_j, SOSResult)]

    @property
    def all_certified(self) -> bool:
        return all(r.certified for _, _, r in self.results)


def main_theorem_pipeline(f: RationalFunction, samples: int = 1000, seed: int = 0,
                          cap: int = DEFAULT_CAP, **kw) -> PipelineReport:
    """Certify every partial Wronskian of ``f`` as a sum of squares."""
    gate = nevanlinna_sample_check(f, samples, seed)
    if gate.violation:
        log.warning("f fails the Nevanlinna sampling gate at %s", gate.point)
    q, p = f.den, f.num
    basis = basis_for_pair(q, p, cap)
    results = []
    for j in range(1, f.nvars + 1):
        w = wronskian(q, p, j)
        results.append((j, w, sos_feasibility(w, basis, **kw)))
    return PipelineReport(f, gate, results)
