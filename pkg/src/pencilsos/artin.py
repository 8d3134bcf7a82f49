"""Denominators of sums of squares.

Factors are supplied by the caller and trusted to be irreducible; nothing
here factors polynomials.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .polycore import Poly, evaluate
from .soscheck import CERTIFIED, INCONCLUSIVE, SOSResult, random_real_point, sos_oracle

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FactoredPoly:
    """``prod f_i^{m_i}``; irreducibility of each ``f_i`` is the caller's claim."""

    factors: tuple = ()  # ((Poly, multiplicity), ...)

    def __post_init__(self):
        merged: list = []
        for f, m in self.factors:
            if m < 0:
                raise ValueError("multiplicities must be non-negative")
            if f.is_zero():
                raise ValueError("zero factor")
            for t, (g, k) in enumerate(merged):
                if g == f:
                    merged[t] = (g, k + m)
                    break
            else:
                merged.append((f, m))
        object.__setattr__(self, "factors", tuple((f, m) for f, m in merged if m > 0))

    @classmethod
    def of(cls, *polys: Poly) -> "FactoredPoly":
        return cls(tuple((p, 1) for p in polys))

    def expand(self, nvars: int | None = None) -> Poly:
        if not self.factors:
            if nvars is None:
                raise ValueError("empty product needs nvars")
            return Poly.constant(1, nvars)
        out = Poly.constant(1, self.factors[0][0].nvars)
        for f, m in self.factors:
            out = out * f ** m
        return out

    def without(self, f: Poly, count: int | None = None) -> "FactoredPoly":
        out = []
        for g, m in self.factors:
            if g == f:
                m = 0 if count is None else m - count
            out.append((g, m))
        return FactoredPoly(tuple(out))

    def __len__(self):
        return sum(m for _, m in self.factors)


# -- sign classification -------------------------------------------------------------

@dataclass
class SignReport:
    indefinite: bool
    positive: list | None = None
    negative: list | None = None

    @property
    def status(self) -> str:
        return "indefinite" if self.indefinite else "no-sign-change-evidence"


def _probes(d: int):
    for k in range(d):
        for sgn in (1, -1):
            e = [Fraction(0)] * d
            e[k] = Fraction(sgn)
            yield e
    for sgn in (1, -1):
        yield [Fraction(sgn)] * d


def sign_classification_sample(s: Poly, samples: int = 500, seed: int = 0) -> SignReport:
    """Search for real points where ``s`` takes both strict signs."""
    if s.is_zero():
        raise ValueError("s must be nonzero")
    rng = random.Random(seed)
    pos = neg = None
    points = list(_probes(s.nvars)) + [random_real_point(rng, s.nvars) for _ in range(samples)]
    for z in points:
        v = evaluate(s, z)
        if v > 0 and pos is None:
            pos = z
        elif v < 0 and neg is None:
            neg = z
        if pos is not None and neg is not None:
            return SignReport(True, pos, neg)
    return SignReport(False, pos, neg)


# -- stripping --------------------------------------------------------------------------

MINIMAL = "minimal"


class NotCertifiedError(ValueError):
    """The starting product ``s^2 F`` is not certified as a sum of squares."""


@dataclass
class StripResult:
    factors: FactoredPoly
    status: str
    result: SOSResult | None
    steps: list = field(default_factory=list)  # (factor, action, oracle status)


def minimal_denominator_strip(f: Poly, s: FactoredPoly,
                              sos: Callable[[Poly], SOSResult] = sos_oracle,
                              samples: int = 500, seed: int = 0) -> StripResult:
    """Drop factors of ``s`` while ``s^2 f`` stays certified.

    Indefinite factors go first (all copies at once), then single copies in
    canonical order until a full pass removes nothing.  ``status`` is
    ``"minimal"`` when every surviving single removal was refuted by the
    oracle and ``"inconclusive"`` when some oracle call could not decide.
    """
    nv = f.nvars

    def check(fp: FactoredPoly) -> SOSResult:
        g = fp.expand(nv)
        return sos(g * g * f)

    first = check(s)
    if first.status == INCONCLUSIVE:
        return StripResult(s, INCONCLUSIVE, first, [(None, "initial", first.status)])
    if first.status != CERTIFIED:
        raise NotCertifiedError(f"s^2 F is not certified ({first.status}: {first.message})")
    cur, best = s, first
    steps = []

    indefinite = [g for g, _ in cur.factors
                  if sign_classification_sample(g, samples, seed).indefinite]
    if indefinite:
        cand = cur
        for g in indefinite:
            cand = cand.without(g)
        res = check(cand)
        for g in indefinite:
            steps.append((g, "drop-indefinite", res.status))
        if res.status == CERTIFIED:
            cur, best = cand, res
        else:
            # should not happen for an exact oracle; keep them and fall through
            log.warning("removing indefinite factors lost certification: %s", res.message)

    changed, undecided = True, False
    while changed:
        # only the last full pass decides minimality
        changed, undecided = False, False
        for g, _ in cur.factors:
            cand = cur.without(g, 1)
            res = check(cand)
            if res.status == CERTIFIED:
                steps.append((g, "drop", res.status))
                cur, best = cand, res
                changed = True
                break
            steps.append((g, "keep", res.status))
            if res.status == INCONCLUSIVE:
                undecided = True
    return StripResult(cur, INCONCLUSIVE if undecided else MINIMAL, best, steps)


# -- upper half-plane zeros --------------------------------------------------------------

@dataclass
class HalfPlaneZero:
    found: bool
    point: list | None = None
    residual: float | None = None
    variable: int | None = None
    attempts: int = 0


def _numeric(p: Poly):
    exps = np.array(list(p.terms.keys()), dtype=int).reshape(-1, p.nvars)
    coef = np.array([complex(v) for v in p.terms.values()])
    return exps, coef


def _eval(num, z: np.ndarray) -> complex:
    exps, coef = num
    if len(coef) == 0:
        return 0j
    return complex(np.sum(coef * np.prod(z[None, :] ** exps, axis=1)))


def _univariate(p: Poly, j: int, xhat: dict) -> np.ndarray:
    """Coefficients (highest first) of ``p`` restricted to the line in ``z_j``."""
    deg = p.degree_in(j)
    c = np.zeros(deg + 1, dtype=complex)
    for e, v in p.terms.items():
        t = complex(v)
        for k, x in xhat.items():
            t *= x ** e[k - 1]
        c[deg - e[j - 1]] += t
    return c


def upper_halfplane_zero(s: Poly, seed: int = 0, samples: int = 200,
                         tol: float = 1e-8) -> HalfPlaneZero:
    """Numeric zero of ``s`` with every coordinate in the open upper half-plane."""
    if s.is_constant():
        raise ValueError("s is constant")
    d = s.nvars
    j = max(k for k in range(1, d + 1) if not s.diff(k).is_zero())
    sn, dn = _numeric(s), _numeric(s.diff(j))
    scale = max(abs(float(v)) for v in s.terms.values())
    rng = np.random.default_rng(seed)
    others = [k for k in range(1, d + 1) if k != j]
    for attempt in range(1, samples + 1):
        xhat = {k: float(rng.uniform(-2, 2)) for k in others}
        coeffs = _univariate(s, j, xhat)
        nz = np.flatnonzero(np.abs(coeffs) > 0)
        if len(nz) == 0 or len(coeffs) - nz[0] < 2:
            continue
        roots = np.roots(coeffs[nz[0]:])
        # strictly upper roots first; real roots may still move up under the perturbation
        for root in sorted(roots, key=lambda r: -r.imag):
            if root.imag < -1e-9:
                continue
            for eps in (1e-2, 1e-3, 1e-4):
                z = np.zeros(d, dtype=complex)
                for k in others:
                    z[k - 1] = xhat[k] + 1j * eps * (1 + 0.1 * k)
                w = complex(root)
                # follow the root as the other coordinates leave the real line
                for step in range(1, 11):
                    zz = z.copy()
                    for k in others:
                        zz[k - 1] = xhat[k] + 1j * (z[k - 1].imag * step / 10)
                    for _ in range(50):
                        zz[j - 1] = w
                        fv, dv = _eval(sn, zz), _eval(dn, zz)
                        if dv == 0:
                            break
                        dw = fv / dv
                        w -= dw
                        if abs(dw) < 1e-15 * (1 + abs(w)):
                            break
                z[j - 1] = w
                res = abs(_eval(sn, z))
                if min(z.imag) > 0 and res < tol * scale:
                    return HalfPlaneZero(True, [complex(v) for v in z], res, j, attempt)
    return HalfPlaneZero(False, None, None, j, samples)


def check_halfplane_point(s: Poly, point: Sequence[complex], tol: float = 1e-8) -> bool:
    scale = max(abs(float(v)) for v in s.terms.values())
    z = np.array(point, dtype=complex)
    return bool(min(z.imag) > 0 and abs(_eval(_numeric(s), z)) < tol * scale)
