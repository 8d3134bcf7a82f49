"""Exact dense linear algebra over any field of Python numbers.

Matrices are numpy object arrays (or nested lists) holding Fractions or
GaussianRationals.  Everything here is plain Gaussian elimination; sizes are
desk scale.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np


class SingularMatrixError(ZeroDivisionError):
    pass


def zeros(n: int, m: int | None = None) -> np.ndarray:
    m = n if m is None else m
    out = np.empty((n, m), dtype=object)
    out.fill(Fraction(0))
    return out


def identity(n: int) -> np.ndarray:
    out = zeros(n)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def as_exact(a) -> np.ndarray:
    arr = np.array(a, dtype=object)
    flat = arr.reshape(-1)
    for k, x in enumerate(flat):
        if isinstance(x, (int, np.integer)):
            flat[k] = Fraction(int(x))
        elif isinstance(x, str):
            flat[k] = Fraction(x)
    return arr


def is_symmetric(m: np.ndarray) -> bool:
    return m.shape[0] == m.shape[1] and bool(np.all(m == m.T))


def is_zero(m: np.ndarray) -> bool:
    return all(x == 0 for x in m.reshape(-1))


def rref(rows: list[list], ncols: int):
    """Reduced row echelon form in place; returns pivot columns."""
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        rows[r] = [x / piv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                ri = rows[i]
                rr = rows[r]
                rows[i] = [a - f * b for a, b in zip(ri, rr)]
        pivots.append(c)
        r += 1
    return pivots


def solve(a, b):
    """One solution of ``a x = b`` (free variables set to 0), or None."""
    a = [list(row) for row in a]
    n = len(a[0]) if a else 0
    aug = [row + [bi] for row, bi in zip(a, b)]
    pivots = rref(aug, n)
    for row in aug[len(pivots):]:
        if row[n] != 0:
            return None
    x = [Fraction(0)] * n
    for r, c in enumerate(pivots):
        x[c] = aug[r][n]
    return x


def solve_square(m, b):
    """Unique solution of a square system; raises SingularMatrixError."""
    n = len(m)
    aug = [list(m[i]) + [b[i]] for i in range(n)]
    for c in range(n):
        p = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if p is None:
            raise SingularMatrixError("singular matrix")
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        for i in range(c + 1, n):
            if aug[i][c] != 0:
                f = aug[i][c] / piv
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    x = [None] * n
    for i in range(n - 1, -1, -1):
        s = aug[i][n]
        for j in range(i + 1, n):
            if aug[i][j] != 0:
                s = s - aug[i][j] * x[j]
        x[i] = s / aug[i][i]
    return x


def det(m) -> object:
    n = len(m)
    a = [list(m[i]) for i in range(n)]
    out = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            out = -out
        piv = a[c][c]
        out = out * piv
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] / piv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return out


def row_basis(m) -> list[int]:
    """Indices of the first maximal linearly independent set of rows."""
    chosen: list[int] = []
    reduced: list[tuple[int, list]] = []  # (pivot col, normalized row)
    for i, row in enumerate(m):
        v = list(row)
        for c, r in reduced:
            if v[c] != 0:
                f = v[c]
                v = [a - f * b for a, b in zip(v, r)]
        c = next((k for k, x in enumerate(v) if x != 0), None)
        if c is None:
            continue
        piv = v[c]
        reduced.append((c, [x / piv for x in v]))
        chosen.append(i)
    return chosen


def rank(m) -> int:
    return len(row_basis(m))


def nullspace(a, ncols: int) -> list[list]:
    """Basis of the right nullspace of ``a`` (list of rows, ``ncols`` wide)."""
    rows = [list(r) for r in a]
    pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -rows[r][f]
        basis.append(v)
    return basis
