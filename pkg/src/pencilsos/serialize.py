"""JSON artifacts.  Rationals are strings ("-3/2"), polynomials use the text grammar."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .exact import zeros
from .monobasis import DegreeBounds, MonomialBasis, build_basis, homogenize_basis
from .polarize import MatrixPencil
from .polycore import Poly, format_poly, parse_poly


def rat(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def unrat(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    return Fraction(str(s).strip())


def poly_out(p: Poly) -> dict:
    return {"nvars": p.nvars, "text": format_poly(p)}


def poly_in(obj) -> Poly:
    return parse_poly(obj["text"], obj["nvars"])


def matrix_out(m) -> list:
    return [[rat(x) for x in row] for row in np.asarray(m, dtype=object)]


def matrix_in(rows) -> np.ndarray:
    n = len(rows)
    out = zeros(n)
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ValueError("matrix must be square")
        for j, x in enumerate(row):
            out[i, j] = unrat(x)
    return out


def sparse_out(m) -> list:
    m = np.asarray(m, dtype=object)
    return [[int(i), int(j), rat(m[i, j])] for i, j in zip(*np.nonzero(m != 0))]


def sparse_in(entries, n: int) -> np.ndarray:
    out = zeros(n)
    for i, j, v in entries:
        out[i, j] = unrat(v)
    return out


def basis_out(b: MonomialBasis) -> dict:
    return {"bounds": {"n0": b.bounds.n0, "nk": list(b.bounds.nk)},
            "basis": [list(m) for m in b.monomials], "homogenized": b.homogenized}


def basis_in(obj) -> MonomialBasis:
    """Rebuild the basis from its bounds and insist the listed order matches."""
    bounds = DegreeBounds(obj["bounds"]["n0"], tuple(obj["bounds"]["nk"]))
    b = build_basis(bounds, cap=10**6)
    if obj.get("homogenized"):
        b = homogenize_basis(b)
    listed = tuple(tuple(m) for m in obj["basis"])
    if listed != b.monomials:
        raise ValueError("listed basis does not match its degree bounds")
    return b


def pencil_out(pencil: MatrixPencil, kind: str = "pencil", **extra) -> dict:
    out = {"kind": kind, "d": pencil.d}
    if pencil.basis is not None:
        out.update(basis_out(pencil.basis))
    out["matrices"] = [matrix_out(c) for c in pencil.coeffs]
    for k, v in extra.items():
        out[k] = poly_out(v) if isinstance(v, Poly) else v
    return out


def pencil_in(obj) -> MatrixPencil:
    basis = basis_in(obj) if "basis" in obj else None
    coeffs = tuple(matrix_in(m) for m in obj["matrices"])
    if len(coeffs) != obj["d"] + 1:
        raise ValueError("matrix count does not match d")
    return MatrixPencil(basis, coeffs)


def certificate_out(cert, kind: str = "certificate") -> dict:
    out = {"kind": kind, **basis_out(cert.basis), "target": poly_out(cert.target),
           "gram": matrix_out(cert.gram),
           "factors": [{"weight": rat(c), "poly": format_poly(h)} for c, h in cert.factors]}
    return out


def certificate_in(obj):
    from .soscheck import GramCertificate

    basis = basis_in(obj)
    target = poly_in(obj["target"])
    factors = [(unrat(f["weight"]), parse_poly(f["poly"], target.nvars)) for f in obj["factors"]]
    return GramCertificate(basis, matrix_in(obj["gram"]), target, factors)


def point_out(z) -> list:
    out = []
    for x in z:
        if hasattr(x, "re"):
            out.append([rat(x.re), rat(x.im)])
        else:
            out.append([rat(x), "0"])
    return out


def point_in(obj) -> list:
    from .polycore import GaussianRational

    return [GaussianRational(unrat(a), unrat(b)) for a, b in obj]


def ambiguity_out(basis: MonomialBasis, elements) -> dict:
    return {"kind": "ambiguity-basis", **basis_out(basis),
            "elements": [{"beta": list(e.beta), "kind": e.kind, "support": list(e.support),
                          "matrix": sparse_out(e.matrix)} for e in elements]}
