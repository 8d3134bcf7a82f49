"""Command-line front end.

Exit codes: 0 success or certified, 1 error, 2 verified negative result,
3 inconclusive.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import serialize as ser
from .ambiguity import (AmbiguityLiftError, AmbiguityPreconditionError, all_pair_sets,
                        ambiguity_space_basis, lift_ambiguity, psd_repair)
from .artin import FactoredPoly, NotCertifiedError, minimal_denominator_strip
from .exact import is_symmetric, rank
from .monobasis import (BasisTooLargeError, DEFAULT_CAP, DegreeBounds, build_basis,
                        homogenize_basis, quad_form)
from .polarize import (pencil_times_basis, product_pencil, verify_polarization)
from .polycore import (GaussianRational, Poly, PolySyntaxError, RationalFunction, evaluate,
                       format_poly, parse_poly, wronskian)
from .resolvent import eval_resolvent, long_resolvent
from .soscheck import (CERTIFIED, INCONCLUSIVE, INFEASIBLE, exact_psd_check, gram_basis,
                       main_theorem_pipeline, nevanlinna_sample_check, repairable_gram,
                       sos_feasibility, verify_certificate)

OK, ERROR, NEGATIVE, UNDECIDED = 0, 1, 2, 3
STATUS_EXIT = {CERTIFIED: OK, INFEASIBLE: NEGATIVE, INCONCLUSIVE: UNDECIDED}


class CliError(Exception):
    pass


def parse_poly_text(src: str, nvars: int | None = None) -> Poly:
    return parse_poly(src, nvars)


def _pair(args) -> tuple[Poly, Poly]:
    q0, p0 = parse_poly(args.q), parse_poly(args.p)
    nv = max(q0.nvars, p0.nvars, args.nvars or 0, 1)
    return parse_poly(args.q, nv), parse_poly(args.p, nv)


def _seed(args) -> int:
    if args.seed is None:
        print("seed: 0", file=sys.stderr)
        return 0
    return args.seed


class _Out:
    def __init__(self, args):
        self.args = args
        self.lines: list[str] = []

    def say(self, line: str = ""):
        self.lines.append(line)

    def finish(self, artifact: dict | None):
        if self.args.out and artifact is not None:
            with open(self.args.out, "w") as fh:
                json.dump(artifact, fh, indent=1)
        if self.args.json:
            print(json.dumps(artifact if artifact is not None else {}, indent=1))
        else:
            print("\n".join(self.lines))


# -- verbs ------------------------------------------------------------------------

def cmd_polarize(args, out: _Out) -> int:
    q, p = _pair(args)
    b = product_pencil(q, p, args.cap)
    ok = verify_polarization(q, p, b)
    out.say(f"basis size N={b.N}, d={b.d}; polarization identity {'holds' if ok else 'FAILS'}")
    out.finish(ser.pencil_out(b, q=q, p=p))
    return OK if ok else ERROR


def cmd_resolvent(args, out: _Out) -> int:
    q, p = _pair(args)
    f = RationalFunction(p, q)
    rep = long_resolvent(f, args.cap, _seed(args))
    art = ser.pencil_out(rep.pencil, kind="resolvent", q=q, p=p)
    art.update(scalar_index=rep.scalar_index, block_indices=list(rep.block_indices),
               transform={"Q": ser.matrix_out(rep.Q), "permutation": list(rep.permutation)})
    art.update(ser.basis_out(rep.basis))
    out.say(f"long resolvent of size {rep.size} (A22 block {len(rep.block_indices)}x{len(rep.block_indices)})")
    if args.point:
        z = [Fraction(x) for x in args.point.split(",")]
        out.say(f"value at {args.point}: {ser.rat(eval_resolvent(rep, z))}")
    out.finish(art)
    return OK


def cmd_wronskian(args, out: _Out) -> int:
    q, p = _pair(args)
    if not 1 <= args.j <= q.nvars:
        raise CliError(f"-j must be between 1 and {q.nvars}")
    w = wronskian(q, p, args.j)
    out.say(format_poly(w))
    out.finish({"kind": "wronskian", "q": ser.poly_out(q), "p": ser.poly_out(p), "j": args.j,
                "w": ser.poly_out(w)})
    return OK


def _sos_art(f: Poly, res) -> dict:
    art = {"kind": "sos-report", "f": ser.poly_out(f), "status": res.status,
           "message": res.message, "residual": res.residual, "margin": res.margin,
           "certificate": ser.certificate_out(res.certificate) if res.certificate else None}
    return art


def cmd_sos(args, out: _Out) -> int:
    f = parse_poly(args.f, args.nvars)
    res = sos_feasibility(f, gram_basis(f, args.cap), tol=args.tol, seed=_seed(args))
    out.say(f"status: {res.status}")
    if res.message:
        out.say(f"note: {res.message}")
    if res.certificate is not None:
        for c, h in res.certificate.factors:
            out.say(f"  {ser.rat(c)} * ({format_poly(h)})^2")
    out.finish(_sos_art(f, res))
    return STATUS_EXIT[res.status]


def _bounds(args) -> DegreeBounds:
    nk = tuple(int(x) for x in args.nk.split(","))
    return DegreeBounds(args.n0, nk)


def cmd_ambiguity(args, out: _Out) -> int:
    hb = homogenize_basis(build_basis(_bounds(args), args.cap))
    els = ambiguity_space_basis(hb)
    out.say(f"homogenized basis N={hb.N}; {len(els)} ambiguity basis elements")
    for e in els:
        out.say(f"  beta={list(e.beta)} {e.kind} support={list(e.support)}")
    out.finish(ser.ambiguity_out(hb, els))
    return OK


def cmd_lift(args, out: _Out) -> int:
    with open(args.input) as fh:
        obj = json.load(fh)
    if obj.get("kind") == "ambiguity-basis":
        if args.element is None:
            raise CliError("--element is required when lifting from an ambiguity basis")
        hb = ser.basis_in(obj)
        basis = build_basis(hb.bounds)
        s_d = ser.sparse_in(obj["elements"][args.element]["matrix"], hb.N)
    elif obj.get("kind") == "matrix":
        basis = ser.basis_in(obj)
        s_d = ser.matrix_in(obj["matrix"])
    else:
        raise CliError("lift expects an ambiguity-basis or matrix artifact")
    try:
        pencil = lift_ambiguity(s_d, basis)
    except AmbiguityLiftError as exc:
        out.say(f"no lift exists: {exc}")
        out.finish({"kind": "lift-impossible", "message": str(exc)})
        return NEGATIVE
    out.say(f"lifted pencil of size {pencil.N} annihilates Psi")
    out.finish(ser.pencil_out(pencil, kind="annihilating-pencil"))
    return OK


def cmd_psd_repair(args, out: _Out) -> int:
    q, p = _pair(args)
    b = product_pencil(q, p, args.cap)
    if args.gram:
        with open(args.gram) as fh:
            cert = ser.certificate_in(json.load(fh))
        gram, status = cert.gram, CERTIFIED
    else:
        res = repairable_gram(b, q, p, seed=_seed(args))
        status = res.status
        gram = res.certificate.gram if res.certified else None
    if gram is None:
        out.say(f"no PSD last coefficient found: {status}")
        out.finish({"kind": "repair-report", "status": status})
        return STATUS_EXIT[status]
    a = psd_repair(b, q, p, gram)
    out.say(f"repaired pencil: polarization holds, last coefficient PSD (N={a.N})")
    out.finish(ser.pencil_out(a, kind="psd-pencil", q=q, p=p))
    return OK


def cmd_nevanlinna(args, out: _Out) -> int:
    q, p = _pair(args)
    f = RationalFunction(p, q)
    seed = _seed(args)
    rep = nevanlinna_sample_check(f, args.samples, seed)
    art = {"kind": "nevanlinna-report", "num": ser.poly_out(p), "den": ser.poly_out(q),
           "samples": args.samples, "seed": seed, "violation": rep.violation, "checked": rep.checked,
           "point": ser.point_out(rep.point) if rep.point else None}
    if rep.violation:
        v = rep.value
        out.say(f"counterexample: Im f < 0 at {[str(x) for x in rep.point]} (f = {v})")
    else:
        out.say(f"no violation in {rep.checked} samples")
    out.finish(art)
    return NEGATIVE if rep.violation else OK


def cmd_strip(args, out: _Out) -> int:
    f0 = parse_poly(args.F)
    nv = max([f0.nvars] + [parse_poly(t).nvars for t in args.factor] + [args.nvars or 0])
    f = parse_poly(args.F, nv)
    s = FactoredPoly.of(*(parse_poly(t, nv) for t in args.factor))
    try:
        res = minimal_denominator_strip(f, s, seed=_seed(args))
    except NotCertifiedError as exc:
        out.say(str(exc))
        out.finish({"kind": "strip-report", "status": INFEASIBLE, "message": str(exc)})
        return NEGATIVE
    kept = [format_poly(g) + (f"^{m}" if m > 1 else "") for g, m in res.factors.factors]
    out.say(f"status: {res.status}")
    out.say("denominator: " + (" * ".join(f"({k})" for k in kept) if kept else "1"))
    for g, action, st in res.steps:
        out.say(f"  {action:16s} {format_poly(g) if g is not None else '-':20s} {st}")
    art = {"kind": "strip-report", "F": ser.poly_out(f), "status": res.status,
           "input": [{"poly": format_poly(g), "multiplicity": m} for g, m in s.factors],
           "factors": [{"poly": format_poly(g), "multiplicity": m} for g, m in res.factors.factors],
           "certificate": ser.certificate_out(res.result.certificate)
           if res.result is not None and res.result.certificate is not None else None}
    out.finish(art)
    return OK if res.status == "minimal" else UNDECIDED


def cmd_pipeline(args, out: _Out) -> int:
    q, p = _pair(args)
    rep = main_theorem_pipeline(RationalFunction(p, q), args.samples, _seed(args))
    out.say("sampling gate: " + ("VIOLATION" if rep.gate.violation else "passed"))
    results = []
    for j, w, r in rep.results:
        out.say(f"  W_{j} = {format_poly(w)}: {r.status}")
        results.append({"j": j, "wronskian": ser.poly_out(w), "status": r.status,
                        "certificate": ser.certificate_out(r.certificate) if r.certificate else None})
    out.finish({"kind": "pipeline-report", "num": ser.poly_out(p), "den": ser.poly_out(q),
                "gate_violation": rep.gate.violation, "results": results})
    if rep.all_certified:
        return OK
    return max(STATUS_EXIT[r.status] for _, _, r in rep.results)


# -- verify ------------------------------------------------------------------------------

def _check(cond: bool, what: str, problems: list):
    if not cond:
        problems.append(what)


def verify_artifact(obj: dict) -> list[str]:
    """Independent re-check of an artifact; returns the list of failed claims."""
    kind = obj.get("kind")
    problems: list[str] = []
    if kind in ("pencil", "psd-pencil"):
        pencil = ser.pencil_in(obj)
        q, p = ser.poly_in(obj["q"]), ser.poly_in(obj["p"])
        _check(verify_polarization(q, p, pencil), "polarization identity", problems)
        if kind == "psd-pencil":
            _check(exact_psd_check(pencil.coeffs[-1]).is_psd, "last coefficient PSD", problems)
    elif kind == "resolvent":
        q, p = ser.poly_in(obj["q"]), ser.poly_in(obj["p"])
        tilde = ser.pencil_in({k: v for k, v in obj.items() if k not in ("basis",)})
        qm = ser.matrix_in(obj["transform"]["Q"])
        perm = obj["transform"]["permutation"]
        basis = ser.basis_in(obj)
        inv = np.argsort(perm)
        mats = []
        for c in tilde.coeffs:
            back = qm.T.dot(c).dot(qm)
            mats.append(back[np.ix_(inv, inv)])
        from .polarize import MatrixPencil
        orig = MatrixPencil(basis, tuple(mats))
        _check(verify_polarization(q, p, orig), "untransformed pencil polarizes (q, p)", problems)
        first = [Fraction(x) for x in qm[0]]
        want = [q.coeff(basis[i]) for i in perm]
        _check(first == want, "first transform row carries the coefficients of q", problems)
        from .resolvent import ResolventRep, SingularBlockError
        rep = ResolventRep(tilde, obj["scalar_index"], tuple(obj["block_indices"]), qm,
                           tuple(perm), basis)
        import random
        rng = random.Random(12345)
        hits = 0
        for _ in range(40):
            z = [Fraction(rng.randint(-99, 99), rng.randint(1, 13)) for _ in range(q.nvars)]
            qv = evaluate(q, z)
            if qv == 0:
                continue
            try:
                v = eval_resolvent(rep, z)
            except (SingularBlockError, ZeroDivisionError):
                continue
            hits += 1
            _check(v == evaluate(p, z) / qv, f"Schur complement equals p/q at {z}", problems)
        _check(hits > 0, "resolvent evaluable at some sample point", problems)
    elif kind == "wronskian":
        q, p = ser.poly_in(obj["q"]), ser.poly_in(obj["p"])
        _check(wronskian(q, p, obj["j"]) == ser.poly_in(obj["w"]), "Wronskian value", problems)
    elif kind == "certificate":
        _check(verify_certificate(ser.certificate_in(obj)), "certificate", problems)
    elif kind == "sos-report":
        if obj.get("certificate"):
            cert = ser.certificate_in(obj["certificate"])
            _check(cert.target == ser.poly_in(obj["f"]), "certificate target is f", problems)
            _check(verify_certificate(cert), "certificate", problems)
        else:
            _check(obj["status"] != CERTIFIED, "certified report carries a certificate", problems)
    elif kind == "ambiguity-basis":
        hb = ser.basis_in(obj)
        by_beta: dict = {}
        for e in obj["elements"]:
            m = ser.sparse_in(e["matrix"], hb.N)
            _check(is_symmetric(m), f"element at {e['beta']} symmetric", problems)
            _check(quad_form(hb, m).is_zero(), f"element at {e['beta']} is an ambiguity", problems)
            by_beta.setdefault(tuple(e["beta"]), []).append(m)
        for ps in all_pair_sets(hb):
            mats = by_beta.get(ps.beta, [])
            _check(len(mats) == max(ps.m - 1, 0), f"element count at {list(ps.beta)}", problems)
            if mats:
                flat = [[x for row in m for x in row] for m in mats]
                _check(rank(flat) == len(mats), f"independence at {list(ps.beta)}", problems)
    elif kind == "annihilating-pencil":
        pencil = ser.pencil_in(obj)
        _check(all(v.is_zero() for v in pencil_times_basis(pencil)), "S(z) Psi(z)^T = 0", problems)
    elif kind == "pipeline-report":
        q, p = ser.poly_in(obj["den"]), ser.poly_in(obj["num"])
        for r in obj["results"]:
            w = wronskian(q, p, r["j"])
            _check(w == ser.poly_in(r["wronskian"]), f"W_{r['j']}", problems)
            if r["certificate"]:
                cert = ser.certificate_in(r["certificate"])
                _check(cert.target == w and verify_certificate(cert), f"certificate for W_{r['j']}",
                       problems)
            else:
                _check(r["status"] != CERTIFIED, f"certified W_{r['j']} has a certificate", problems)
    elif kind == "nevanlinna-report":
        f = RationalFunction(ser.poly_in(obj["num"]), ser.poly_in(obj["den"]))
        if obj["violation"]:
            z = ser.point_in(obj["point"])
            _check(all(x.im > 0 for x in z), "sample point in the upper half-plane", problems)
            v = evaluate(f.num, z) / evaluate(f.den, z)
            v = v if isinstance(v, GaussianRational) else GaussianRational(v)
            _check(v.im < 0, "Im f < 0 at the reported point", problems)
        else:
            rep = nevanlinna_sample_check(f, obj["samples"], obj["seed"])
            _check(not rep.violation, "re-sampling with the same seed finds no violation", problems)
    elif kind == "strip-report":
        if obj.get("certificate"):
            f = ser.poly_in(obj["F"])
            cert = ser.certificate_in(obj["certificate"])
            nv = f.nvars
            s = Poly.constant(1, nv)
            for t in obj["factors"]:
                s = s * parse_poly(t["poly"], nv) ** t["multiplicity"]
            _check(cert.target == s * s * f, "certificate target is s^2 F", problems)
            _check(verify_certificate(cert), "certificate", problems)
            inp = {t["poly"]: t["multiplicity"] for t in obj["input"]}
            _check(all(inp.get(t["poly"], 0) >= t["multiplicity"] for t in obj["factors"]),
                   "result is a sub-multiset of the input factors", problems)
    else:
        raise CliError(f"unknown artifact kind {kind!r}")
    return problems


def cmd_verify(args, out: _Out) -> int:
    with open(args.file) as fh:
        obj = json.load(fh)
    problems = verify_artifact(obj)
    if problems:
        for p in problems:
            out.say(f"FAILED: {p}")
    else:
        out.say(f"{obj.get('kind')}: all checks passed")
    out.finish({"kind": "verify-report", "artifact": obj.get("kind"), "failed": problems})
    return NEGATIVE if problems else OK


# -- parser -----------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    # usage errors are plain errors; exit code 2 is reserved for verified negatives
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="pencilsos", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--out", help="write the JSON artifact here")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized steps (default 0)")
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="basis size cap")
    common.add_argument("--nvars", type=int, default=None, help="number of variables")
    sub = ap.add_subparsers(parser_class=_Parser, dest="verb", required=True)

    def pair(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("-q", required=True, help="denominator polynomial")
        sp.add_argument("-p", required=True, help="numerator polynomial")
        sp.set_defaults(fn=fn)
        return sp

    pair("polarize", cmd_polarize, "product pencil of (q, p)")
    sp = pair("resolvent", cmd_resolvent, "long-resolvent representation of p/q")
    sp.add_argument("--point", help="comma-separated rational point to evaluate at")
    sp = pair("wronskian", cmd_wronskian, "partial Wronskian q dp/dz_j - p dq/dz_j")
    sp.add_argument("-j", type=int, required=True)
    sp = sub.add_parser("sos", parents=[common], help="SOS certificate search")
    sp.add_argument("-f", required=True)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.set_defaults(fn=cmd_sos)
    sp = sub.add_parser("ambiguity-basis", parents=[common], help="stencil basis of the ambiguity space")
    sp.add_argument("--n0", type=int, required=True)
    sp.add_argument("--nk", required=True, help="comma-separated per-variable degree bounds")
    sp.set_defaults(fn=cmd_ambiguity)
    sp = sub.add_parser("lift", parents=[common], help="complete a last-coefficient ambiguity")
    sp.add_argument("input", help="ambiguity-basis or matrix artifact")
    sp.add_argument("--element", type=int, help="element index when lifting from an ambiguity basis")
    sp.set_defaults(fn=cmd_lift)
    sp = pair("psd-repair", cmd_psd_repair, "pencil with PSD last coefficient")
    sp.add_argument("--gram", help="certificate artifact to install as the last coefficient")
    sp = pair("nevanlinna-check", cmd_nevanlinna, "sample Im f on the upper poly-half-plane")
    sp.add_argument("--samples", type=int, default=1000)
    sp = pair("pipeline", cmd_pipeline, "SOS certificates for every partial Wronskian")
    sp.add_argument("--samples", type=int, default=1000)
    sp = sub.add_parser("artin-strip", parents=[common], help="strip a factored SOS denominator")
    sp.add_argument("-F", required=True)
    sp.add_argument("--factor", action="append", required=True)
    sp.set_defaults(fn=cmd_strip)
    sp = sub.add_parser("verify", parents=[common], help="re-check a JSON artifact")
    sp.add_argument("file")
    sp.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = _Out(args)
    try:
        return args.fn(args, out)
    except (CliError, PolySyntaxError, BasisTooLargeError, AmbiguityPreconditionError,
            NotCertifiedError, OSError, ValueError, ZeroDivisionError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
