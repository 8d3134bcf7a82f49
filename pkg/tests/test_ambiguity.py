import itertools
import random
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from pencilsos import (AmbiguityLiftError, AmbiguityPreconditionError, DegreeBounds,
                       ambiguity_space_basis, build_basis, elementary_transform_tree,
                       homogenize_basis, liftable_ambiguity, lift_ambiguity, pairs_for_beta,
                       parse_poly, product_pencil, psd_repair, quad_form, verify_polarization,
                       wronskian)
from pencilsos.ambiguity import all_pair_sets, block_solution
from pencilsos.exact import zeros
from pencilsos.polarize import pencil_times_basis


def random_bounds(rng, dmax=3, n0max=3):
    d = rng.randint(1, dmax)
    n0 = rng.randint(1, n0max)
    return DegreeBounds(n0, tuple(rng.randint(0, n0) for _ in range(d)))


def brute_groups(hb):
    groups = {}
    for i, j in itertools.combinations_with_replacement(range(hb.N), 2):
        beta = tuple(x + y for x, y in zip(hb[i], hb[j]))
        groups.setdefault(beta, []).append((i, j))
    return groups


def test_pairs_match_brute_force():
    rng = random.Random(4)
    for _ in range(15):
        hb = homogenize_basis(build_basis(random_bounds(rng)))
        groups = brute_groups(hb)
        for beta, cells in groups.items():
            assert pairs_for_beta(hb, beta).pairs == tuple(sorted(cells))
        assert {ps.beta for ps in all_pair_sets(hb)} == set(groups)


def test_named_pair_set():
    # |beta| = 4 homogenized, d = 2, n0 = 2: beta = z1^2 z2^2 pairs (z1^2, z2^2), (z1 z2, z1 z2)
    hb = homogenize_basis(build_basis(DegreeBounds(2, (2, 2))))
    ps = pairs_for_beta(hb, (0, 2, 2))
    assert ps.m == 2
    assert {frozenset((hb[i], hb[j])) for i, j in ps.pairs} == {
        frozenset({(0, 0, 2), (0, 2, 0)}), frozenset({(0, 1, 1)})}


def test_four_variable_tree():
    hb = homogenize_basis(build_basis(DegreeBounds(2, (1, 1, 1, 1))))
    ps = pairs_for_beta(hb, (0, 1, 1, 1, 1))
    assert ps.m == 3
    edges = elementary_transform_tree(hb, ps)
    assert len(edges) == 2
    els = [e for e in ambiguity_space_basis(hb) if e.beta == (0, 1, 1, 1, 1)]
    assert len(els) == 2 and all(e.kind == "quad" for e in els)


def test_tree_edges_are_single_moves():
    rng = random.Random(6)
    for _ in range(10):
        hb = homogenize_basis(build_basis(random_bounds(rng)))
        for ps in all_pair_sets(hb):
            if ps.m < 2:
                continue
            edges = elementary_transform_tree(hb, ps)
            assert len(edges) == ps.m - 1
            reached = {0} | {b for _, b, _ in edges}
            assert reached == set(range(ps.m))
            for a, b, (x, k, l) in edges:
                pa, pb = ps.pairs[a], ps.pairs[b]
                assert x in pa
                moved = list(hb[x])
                moved[k] += 1
                moved[l] -= 1
                assert hb.index(tuple(moved)) in pb


def sympy_ambiguity_dim(hb):
    """Nullspace dimension of the coefficient system over all symmetric cells."""
    cells = list(itertools.combinations_with_replacement(range(hb.N), 2))
    monos = sorted({tuple(x + y for x, y in zip(hb[i], hb[j])) for i, j in cells})
    row = {m: t for t, m in enumerate(monos)}
    a = sp.zeros(len(monos), len(cells))
    for c, (i, j) in enumerate(cells):
        a[row[tuple(x + y for x, y in zip(hb[i], hb[j]))], c] = 1 if i == j else 2
    return len(a.nullspace())


def test_counts_match_nullspace():
    rng = random.Random(8)
    for _ in range(12):
        hb = homogenize_basis(build_basis(random_bounds(rng)))
        els = ambiguity_space_basis(hb)
        per = Counter(e.beta for e in els)
        for beta, cells in brute_groups(hb).items():
            assert per.get(beta, 0) == len(cells) - 1
        if hb.N <= 15:
            assert len(els) == sympy_ambiguity_dim(hb)
        for e in els:
            assert quad_form(hb, e.matrix).is_zero()
        if els:
            stack = sp.Matrix([[e.matrix[i, j] for i in range(hb.N) for j in range(hb.N)]
                               for e in els])
            assert stack.rank() == len(els)


# -- closed-form block solutions --------------------------------------------------------

ZR, ZL, ZD, ZMU, ZNU = sp.symbols("z_r z_l z_d z_mu z_nu")
G, G1, G2 = sp.symbols("g g1 g2")

PAPER_5 = sp.Matrix([
    [0, 0, 0, -ZL, ZR],
    [0, 0, ZL, -ZR, 0],
    [0, ZL, 0, 0, -ZD],
    [-ZL, -ZR, 0, 2 * ZD, 0],
    [ZR, 0, -ZD, 0, 0]])
COLUMN_5 = sp.Matrix([ZD * ZR * G, ZD * ZL * G, ZR ** 2 * G, ZR * ZL * G, ZL ** 2 * G])

PAPER_6 = sp.Matrix([
    [0, 0, -ZNU, ZMU, 0, 0],
    [0, 0, 0, 0, -ZMU, ZNU],
    [-ZNU, 0, 0, 0, ZD, 0],
    [ZMU, 0, 0, 0, 0, -ZD],
    [0, -ZMU, ZD, 0, 0, 0],
    [0, ZNU, 0, -ZD, 0, 0]])
COLUMN_6 = sp.Matrix([ZD * G2, ZD * G1, ZMU * G1, ZNU * G1, ZNU * G2, ZMU * G2])


def test_displayed_blocks_annihilate():
    assert sp.expand(PAPER_5 * COLUMN_5) == sp.zeros(5, 1)
    assert sp.expand(PAPER_6 * COLUMN_6) == sp.zeros(6, 1)


def first_closed_form(kind):
    for n0 in range(2, 4):
        for d in range(2, 4):
            for nk in itertools.product(range(n0 + 1), repeat=d):
                basis = build_basis(DegreeBounds(n0, nk))
                hb = homogenize_basis(basis)
                for el in ambiguity_space_basis(hb):
                    if el.kind != kind:
                        continue
                    try:
                        rows, mats = block_solution(hb, el, d)
                    except ValueError:
                        continue
                    # the displayed blocks assume pairwise distinct row monomials
                    if len(set(rows)) == len(rows):
                        return hb, el, d, (rows, mats)
    raise AssertionError(f"no {kind} element with a closed form found")


def symbolic_block(mats, names):
    n = next(iter(mats.values())).shape[0]
    out = sp.zeros(n, n)
    for var, m in mats.items():
        for i in range(n):
            for j in range(n):
                if m[i, j]:
                    out[i, j] += sp.Rational(m[i, j]) * names[var]
    return out


def test_triple_fixture_reproduced():
    hb, el, d, (rows, mats) = first_closed_form("triple")
    names = {el.roles["r"]: ZR, el.roles["l"]: ZL, d: ZD}
    assert symbolic_block(mats, names) == PAPER_5


def test_quad_fixture_reproduced():
    hb, el, d, (rows, mats) = first_closed_form("quad")
    names = {el.roles["mu"]: ZMU, el.roles["nu"]: ZNU, d: ZD}
    assert symbolic_block(mats, names) == PAPER_6


# -- lifting ------------------------------------------------------------------------------

def counterexample():
    basis = build_basis(DegreeBounds(3, (3,)))
    s = zeros(4)
    s[1, 1] = 2
    s[0, 2] = s[2, 0] = -1
    return basis, s


def test_unliftable_counterexample():
    basis, s = counterexample()
    assert quad_form(basis, s).is_zero()
    with pytest.raises(AmbiguityLiftError):
        lift_ambiguity(s, basis)
    # dense oracle: no symmetric S_0 with S_0 Psi^T = -z S_1 Psi^T
    z = sp.symbols("z")
    psi = sp.Matrix([1, z, z ** 2, z ** 3])
    u = sp.symbols("u0:10")
    s0 = sp.zeros(4, 4)
    t = 0
    for i in range(4):
        for j in range(i, 4):
            s0[i, j] = s0[j, i] = u[t]
            t += 1
    s1 = sp.Matrix(4, 4, lambda i, j: s[i, j])
    eqs = []
    for v in sp.expand(s0 * psi + z * s1 * psi):
        eqs.extend(sp.Poly(v, z).coeffs())
    assert sp.linsolve(eqs, u) == sp.EmptySet


def test_precondition_errors():
    basis = build_basis(DegreeBounds(2, (2,)))
    s = zeros(basis.N)
    s[0, 0] = 1
    with pytest.raises(AmbiguityPreconditionError):
        lift_ambiguity(s, basis)


def dense_liftable_rank(basis):
    """Rank of the S_d part of all symmetric pencils with S(z) Psi^T = 0."""
    d, n = basis.bounds.d, basis.N
    zs = sp.symbols(f"z1:{d + 1}")
    psi = sp.Matrix([sp.Mul(*[v ** e for v, e in zip(zs, m)]) for m in basis.monomials])
    cells = list(itertools.combinations_with_replacement(range(n), 2))
    syms = sp.symbols(f"u0:{(d + 1) * len(cells)}")
    total = sp.zeros(n, n)
    for k in range(d + 1):
        factor = 1 if k == 0 else zs[k - 1]
        for c, (i, j) in enumerate(cells):
            x = syms[k * len(cells) + c]
            total[i, j] += factor * x
            if i != j:
                total[j, i] += factor * x
    eqs = []
    for v in sp.expand(total * psi):
        if v != 0:
            eqs.extend(sp.Poly(v, *zs).coeffs())
    a, _ = sp.linear_eq_to_matrix(eqs, syms)
    null = a.nullspace()
    if not null:
        return 0
    top = sp.Matrix.hstack(*[v[d * len(cells):, :] for v in null])
    return top.rank()


@pytest.mark.parametrize("bounds", [DegreeBounds(3, (3,)), DegreeBounds(2, (2,)),
                                    DegreeBounds(2, (2, 2)), DegreeBounds(2, (1, 2)),
                                    DegreeBounds(3, (1, 2))])
def test_liftable_matches_dense_oracle(bounds):
    basis = build_basis(bounds)
    dirs = liftable_ambiguity(basis)
    assert len(dirs) == dense_liftable_rank(basis)
    for s in dirs:
        pen = lift_ambiguity(s, basis)
        assert all(v.is_zero() for v in pencil_times_basis(pen))
        assert np.all(pen.coeffs[-1] == s)


def test_psd_repair_rejects_non_gram():
    q, p = parse_poly("z1 + z2", 2), parse_poly("z1*z2", 2)
    b = product_pencil(q, p)
    with pytest.raises(AmbiguityPreconditionError):
        psd_repair(b, q, p, zeros(b.N))


def test_psd_repair_identity_when_already_psd():
    # f = z: B_1 is already PSD, repair with itself returns the same pencil
    q, p = parse_poly("1", 1), parse_poly("z1", 1)
    b = product_pencil(q, p)
    out = psd_repair(b, q, p, b.coeffs[1])
    assert verify_polarization(q, p, out)
    assert out == b
    assert quad_form(b.basis, out.coeffs[1]) == wronskian(q, p, 1)
