"""One test per acceptance criterion; each prints a PASS/FAIL line."""
import itertools
import random
import time
from fractions import Fraction

import numpy as np
import sympy as sp
from sympy.polys.matrices import DomainMatrix

from pencilsos import (AmbiguityLiftError, DegreeBounds, FactoredPoly, RationalFunction,
                       SingularBlockError, ambiguity_space_basis, build_basis, chain_pencil,
                       eval_resolvent, exact_psd_check, homogenize_basis, lift_ambiguity,
                       long_resolvent, main_theorem_pipeline, minimal_denominator_strip,
                       nevanlinna_sample_check, parse_poly, product_pencil, psd_repair,
                       quad_form, repairable_gram, sos_feasibility, gram_basis,
                       upper_halfplane_zero, verify_certificate, verify_polarization, wronskian)
from pencilsos.ambiguity import block_solution
from pencilsos.polarize import annihilates_top_derivative, pencil_times_basis
from pencilsos.polycore import evaluate
from pencilsos.soscheck import CERTIFIED, INCONCLUSIVE, INFEASIBLE

from conftest import record
from helpers import SYMS, random_nonzero_poly, random_poly, rational_point, to_sympy
from test_ambiguity import (COLUMN_5, COLUMN_6, PAPER_5, PAPER_6, ZD, ZL, ZMU, ZNU, ZR,
                            first_closed_form, symbolic_block)

MOTZKIN = "z1^4*z2^2 + z1^2*z2^4 - 3*z1^2*z2^2 + 1"


def rf(num, den, d):
    return RationalFunction(parse_poly(num, d), parse_poly(den, d))


CATALOG = {"z": rf("z1", "1", 1), "-1/z": rf("-1", "z1", 1),
           "z1z2/(z1+z2)": rf("z1*z2", "z1 + z2", 2), "(z1+z2)/2": rf("z1 + z2", "2", 2)}


def random_pairs(count=50, seed=2024):
    rng = random.Random(seed)
    out = []
    for t in range(count):
        d = 1 + t % 3
        out.append((random_nonzero_poly(rng, d, 3), random_poly(rng, d, 3)))
    return out


PAIRS = random_pairs()
_PENCILS = {}


def pencils():
    if not _PENCILS:
        for t, (q, p) in enumerate(PAIRS):
            _PENCILS[t] = product_pencil(q, p)
    return _PENCILS


def test_criterion_01_polarization_identity():
    t0 = time.perf_counter()
    ok = all(verify_polarization(q, p, pencils()[t]) for t, (q, p) in enumerate(PAIRS))
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 60
    record(1, ok, f"50 random pairs, exact identity, {elapsed:.2f}s (limit 60s)")
    assert ok


def test_criterion_02_chain_pencils():
    ok = True
    for k in range(6):
        mats, mus = chain_pencil(k)
        n = 2 * k + 1
        zeta = sp.symbols(f"x1:{n + 1}")
        vec = sp.Matrix([sp.Mul(*[z ** e for z, e in zip(zeta, m)]) for m in mus])
        pen = sp.zeros(n, n)
        for s, c in enumerate(mats):
            pen += zeta[s] * sp.Matrix(n, n, lambda i, j: sp.Rational(Fraction(c[i, j])))
        out = (pen * vec).expand()
        want = sp.Mul(*zeta[0::2])
        ok &= sp.expand(out[0] - want) == 0 and all(v == 0 for v in out[1:])
    mats, _ = chain_pencil(1)
    hand = (mats[0][0, 1] == Fraction(1, 2) and mats[1][1, 2] == Fraction(-1, 2)
            and mats[2][0, 2] == Fraction(1, 2))
    ok = ok and hand
    record(2, ok, "k = 0..5 exact; k=1 entries c12 = z1/2, c23 = -z2/2, c13 = z3/2")
    assert ok


def test_criterion_03_wronskian_diagonal():
    ok = True
    for t, (q, p) in enumerate(PAIRS):
        pen = pencils()[t]
        for k in range(1, q.nvars + 1):
            ok &= quad_form(pen.basis, pen.coeffs[k]) == wronskian(q, p, k)
    record(3, ok, "Psi B_k Psi^T == W_k[q, p] for all 50 pencils and every k")
    assert ok


def test_criterion_04_derivative_annihilation():
    ok = all(annihilates_top_derivative(pencils()[t], k)
             for t, (q, p) in enumerate(PAIRS) for k in range(1, q.nvars + 1))
    record(4, ok, "B_k d^{n_k} Psi^T / dz_k^{n_k} == 0 for all 50 pencils")
    assert ok


def test_criterion_05_long_resolvent():
    rng = random.Random(5)
    funcs = [rf("z1*z2", "z1 + z2", 2), rf("1", "z1", 1)]
    while len(funcs) < 50:
        d = rng.randint(1, 3)
        funcs.append(RationalFunction(random_poly(rng, d, 3), random_nonzero_poly(rng, d, 3)))
    ok, short = True, 0
    for f in funcs:
        rep = long_resolvent(f)
        hits = 0
        for _ in range(400):
            z = rational_point(rng, f.nvars)
            if evaluate(f.den, z) == 0:
                continue
            try:
                got = eval_resolvent(rep, z)
            except SingularBlockError:
                continue
            subs = {s: sp.Rational(x.numerator, x.denominator) for s, x in zip(SYMS, z)}
            want = (to_sympy(f.num) / to_sympy(f.den)).subs(subs)
            ok &= sp.Rational(got.numerator, got.denominator) == want
            hits += 1
            if hits == 20:
                break
        short += hits < 20
    ok = ok and short == 0
    record(5, ok, f"50 functions x 20 points exact vs sympy ({short} short of points)")
    assert ok


def test_criterion_06_ambiguity_basis():
    rng = random.Random(6)
    ok, total = True, 0
    for _ in range(20):
        d = rng.randint(1, 3)
        n0 = rng.randint(1, 3)
        hb = homogenize_basis(build_basis(DegreeBounds(n0, tuple(rng.randint(0, n0)
                                                                 for _ in range(d)))))
        els = ambiguity_space_basis(hb)
        total += len(els)
        groups = {}
        for i, j in itertools.combinations_with_replacement(range(hb.N), 2):
            beta = tuple(x + y for x, y in zip(hb[i], hb[j]))
            groups.setdefault(beta, []).append((i, j))
        for beta, cells in groups.items():
            # the coefficient of z^beta in Psi S Psi^T, as one linear row over the cells
            row = sp.Matrix([[1 if i == j else 2 for i, j in cells]])
            dim = len(row.nullspace())
            ok &= sum(e.beta == beta for e in els) == dim
        ok &= all(quad_form(hb, e.matrix).is_zero() for e in els)
    record(6, ok, f"20 random bases, {total} elements; per-beta counts match nullspace")
    assert ok


def dense_lift_exists(basis, s_d) -> bool:
    """Independent oracle: is there any symmetric S_0..S_{d-1} with S(z) Psi^T = 0?

    Rows are (basis row, monomial) coefficients of S(z) Psi^T; columns are the
    free symmetric cells of S_0..S_{d-1}.  Solvable iff rank(A) == rank([A|b]).
    """
    d, n = basis.bounds.d, basis.N
    mons = basis.monomials
    shift = [tuple(int(t == k - 1) for t in range(d)) for k in range(d + 1)]
    cells = list(itertools.combinations_with_replacement(range(n), 2))
    rows = {}

    def entry(i, j, k):
        return i, tuple(x + y for x, y in zip(mons[j], shift[k]))

    cols = []
    for k in range(d):
        for i, j in cells:
            targets = [entry(i, j, k)] + ([entry(j, i, k)] if i != j else [])
            cols.append([rows.setdefault(t, len(rows)) for t in targets])
    rhs = {}
    for i in range(n):
        for j in range(n):
            if s_d[i, j]:
                r = rows.setdefault(entry(i, j, d), len(rows))
                rhs[r] = rhs.get(r, 0) - sp.Rational(s_d[i, j])
    a = sp.zeros(len(rows), len(cols))
    for c, targets in enumerate(cols):
        for r in targets:
            a[r, c] += 1
    b = sp.Matrix([rhs.get(r, 0) for r in range(len(rows))])
    am = DomainMatrix.from_Matrix(a).convert_to(sp.QQ)
    ab = DomainMatrix.from_Matrix(a.row_join(b)).convert_to(sp.QQ)
    return am.rank() == ab.rank()


def eligible_bounds():
    for d in (1, 2, 3):
        for n0 in range(1, 4):
            for nk in itertools.product(range(n0 + 1), repeat=d):
                if nk[-1] == 0:
                    continue
                b = build_basis(DegreeBounds(n0, nk))
                if b.N <= 15:
                    yield b


def test_criterion_07_ambiguity_lift():
    lifted, failed, confirmed, examples = 0, 0, 0, []
    for basis in eligible_bounds():
        d = basis.bounds.d
        nd = basis.bounds.nk[-1]
        hb = homogenize_basis(basis)
        for el in ambiguity_space_basis(hb):
            # eligible: the z_d degree of every support monomial is at most n_d - 1
            if any(hb[i][d] > nd - 1 for i in el.support):
                continue
            try:
                pen = lift_ambiguity(el.matrix, basis)
            except AmbiguityLiftError:
                failed += 1
                confirmed += not dense_lift_exists(basis, el.matrix)
                if len(examples) < 3:
                    examples.append((basis.bounds, el.kind, el.beta))
                continue
            assert all(v.is_zero() for v in pencil_times_basis(pen))
            lifted += 1
    _, el5, d5, (_, mats5) = first_closed_form("triple")
    _, el6, d6, (_, mats6) = first_closed_form("quad")
    fixtures = (symbolic_block(mats5, {el5.roles["r"]: ZR, el5.roles["l"]: ZL, d5: ZD}) == PAPER_5
                and symbolic_block(mats6, {el6.roles["mu"]: ZMU, el6.roles["nu"]: ZNU,
                                           d6: ZD}) == PAPER_6
                and sp.expand(PAPER_5 * COLUMN_5) == sp.zeros(5, 1)
                and sp.expand(PAPER_6 * COLUMN_6) == sp.zeros(6, 1))
    ok = failed == 0 and fixtures
    detail = (f"{lifted} eligible elements lift, {failed} admit no lift ({confirmed} confirmed "
              f"by a dense oracle); 5x5/6x6 fixtures "
              f"{'reproduced' if fixtures else 'MISMATCH'}")
    if examples:
        detail += "; e.g. " + "; ".join(f"n0={b.n0} nk={b.nk} {k} beta={beta}"
                                        for b, k, beta in examples)
    record(7, ok, detail)
    assert fixtures
    assert failed == 0, detail


def test_criterion_08_psd_repair():
    t0 = time.perf_counter()
    ok = True
    for name, f in CATALOG.items():
        q, p = f.den, f.num
        b = product_pencil(q, p)
        res = repairable_gram(b, q, p)
        if not res.certified:
            ok = False
            continue
        a = psd_repair(b, q, p, res.certificate.gram)
        ok &= verify_polarization(q, p, a) and exact_psd_check(a.coeffs[-1]).is_psd
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 30
    record(8, ok, f"catalog of 4 repaired exactly, {elapsed:.2f}s (limit 30s)")
    assert ok


def test_criterion_09_main_pipeline():
    ok, count = True, 0
    for name, f in CATALOG.items():
        rep = main_theorem_pipeline(f, samples=200)
        for j, w, res in rep.results:
            count += 1
            if not res.certified or not verify_certificate(res.certificate):
                ok = False
                continue
            total = parse_poly("0", f.nvars)
            for c, h in res.certificate.factors:
                total = total + h * h * c
            ok &= total == w == wronskian(f.den, f.num, j)
    record(9, ok, f"{count} partial Wronskians certified, factors re-expand exactly")
    assert ok


def test_criterion_10_psd_not_sos():
    t0 = time.perf_counter()
    m = parse_poly(MOTZKIN, 2)
    res = sos_feasibility(m, gram_basis(m), tol=1e-9)
    neg = res.status in (INFEASIBLE, INCONCLUSIVE) and res.certificate is None
    g = m * parse_poly("z1^2 + z2^2", 2) ** 2
    res2 = sos_feasibility(g, gram_basis(g), tol=1e-9)
    pos = res2.status == CERTIFIED and verify_certificate(res2.certificate)
    elapsed = time.perf_counter() - t0
    ok = neg and pos and elapsed < 120
    record(10, ok, f"Motzkin: {res.status}; (z1^2+z2^2)^2 Motzkin: {res2.status}, "
                   f"{elapsed:.2f}s (limit 120s)")
    assert ok


def test_criterion_11_denominator_strip():
    f = parse_poly(MOTZKIN, 2)
    z1, r2 = parse_poly("z1", 2), parse_poly("z1^2 + z2^2", 2)
    res = minimal_denominator_strip(f, FactoredPoly.of(z1, r2))
    ok = (res.status == "minimal" and res.factors.factors == ((r2, 1),)
          and (z1, "drop-indefinite", CERTIFIED) in res.steps
          and any(g == r2 and act == "keep" and st != CERTIFIED for g, act, st in res.steps))
    record(11, ok, f"status {res.status}; kept {[str(g) for g, _ in res.factors.factors]}")
    assert ok


def test_criterion_12_upper_halfplane_zero():
    s = parse_poly("z1^2 + z2^2", 2)
    hit = upper_halfplane_zero(s, seed=0)
    ok = hit.found and min(z.imag for z in hit.point) > 0 and hit.residual < 1e-8
    record(12, ok, f"point found after {hit.attempts} attempt(s), |s| = {hit.residual:.1e}")
    assert ok


def test_criterion_13_nevanlinna_gate():
    neg = nevanlinna_sample_check(rf("-z1", "1", 1), 1000, 0)
    ok = neg.violation
    for f in CATALOG.values():
        rep = nevanlinna_sample_check(f, 1000, 0)
        ok &= not rep.violation
    record(13, ok, "-z violates; catalog clean over 1000 seeded samples each")
    assert ok
