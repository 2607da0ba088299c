"""Command-line front end: ``capform <subcommand> [options]``.

Every subcommand writes one JSON document to stdout or ``--out``. Exit codes:
0 success, 1 failed verification, 2 bad usage or malformed input.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
from pathlib import Path
from typing import Callable

from . import discform, hecke, numeval, orders, quatalg, spectra, thetacoeff, vvlift, weilrep
from .exactcore import fmt_rat, prime_factors, rat

DEFAULT_SEED = 20240601


class UsageError(Exception):
    pass


class VerificationFailure(Exception):
    def __init__(self, report):
        super().__init__("verification failed")
        self.report = report


def _dump(obj, out: str | None):
    text = json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _default(x):
    # numpy scalars and Fractions that slipped through
    if hasattr(x, "item"):
        return x.item()
    if hasattr(x, "numerator"):
        return fmt_rat(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _ints(text: str, n: int | None = None) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"expected {n} integers, got {len(vals)}")
    return vals


def _order(args) -> orders.Order:
    try:
        return orders.load_order(args.order)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise UsageError(f"cannot read order {args.order!r}: {exc}") from None


def _datum(args, N: int) -> vvlift.MaassDatum:
    try:
        return vvlift.MaassDatum(N, vvlift.parse_al_signs(args.al_signs))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------- commands


def cmd_algebra(args):
    if args.input:
        alg = quatalg.QuatAlg.from_json(json.loads(Path(args.input).read_text()))
    else:
        if args.a is None or args.b is None:
            raise UsageError("give --a and --b, or --in")
        alg = quatalg.QuatAlg(rat(args.a), rat(args.b))
    out = alg.describe()
    if args.elt:
        q = quatalg.parse_elt(alg, args.elt.split(","))
        tr, nrd = quatalg.trace_norm(q)
        out["element"] = {"coords": q.to_json(), "trace": fmt_rat(tr), "norm": fmt_rat(nrd)}
    return out


def cmd_order(args):
    return orders.order_summary(_order(args))


def cmd_discform(args):
    return discform.report(discform.DiscGroup(_order(args)))


def cmd_weil(args):
    D = discform.DiscGroup(_order(args))
    a, b, c, d = _ints(args.matrix, 4)
    M = ((a, b), (c, d))
    try:
        weilrep.check_sl2(M)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    word = weilrep.word_decompose(M)
    mat = weilrep.rho(M, D, word)
    out = {"matrix": [[a, b], [c, d]], "word": str(word), "rho": weilrep.weil_json(mat)}
    if weilrep.in_gamma0(M, D.N):
        ok = weilrep.gamma0_closed_form(M, D) == mat
        out["gamma0_closed_form_agrees"] = ok
        if not ok:
            raise VerificationFailure(out)
    return out


def cmd_lift(args):
    D = discform.DiscGroup(_order(args))
    datum = _datum(args, D.N)
    comps = vvlift.lift_components(datum, D)
    return {
        "datum": datum.to_json(),
        "components": vvlift.components_json(comps),
        "t_factors": vvlift.t_sign_report(D, datum),
    }


def cmd_coeff(args):
    if args.input:
        return thetacoeff.FormalCoeffSum.from_json(json.loads(Path(args.input).read_text())).to_json()
    o = _order(args)
    D = discform.DiscGroup(o)
    datum = _datum(args, D.N)
    if args.beta:
        try:
            q = quatalg.parse_elt(o.algebra, args.beta.split(","))
            beta = D.dual.from_quat(q)
        except ValueError as exc:
            raise UsageError(f"bad --beta: {exc}") from None
        if beta.is_zero():
            raise UsageError("beta = 0 has no coefficient")
        form = thetacoeff.A_divisor_form if args.form == "divisor" else thetacoeff.A_closed_form
        return form(beta, datum, D, strict=args.strict).to_json()
    if args.qmax:
        rows = thetacoeff.coefficient_table(D, datum, rat(args.qmax), strict=args.strict)
        return [{"beta": list(D.dual.to_quat(b).to_json()), "A": s.to_json()} for b, s in rows]
    raise UsageError("give --beta, --qmax or --in")


def cmd_hecke(args):
    D = discform.DiscGroup(_order(args))
    p = args.p
    if D.N % p:
        return {"p": p, "unramified": hecke.unramified_mu(p).to_json()}
    if args.battery != "default":
        raise UsageError("only --battery default is available")
    try:
        report = hecke.ramified_eigenvalue_check(D, p)
    except hecke.HeckeIdentityError as exc:
        raise VerificationFailure({"error": str(exc)}) from None
    report["character_sums"] = hecke.coset_character_sums(D, p)
    if not (report["matches_expected"] and report["character_sums"]["ok"]):
        raise VerificationFailure(report)
    return report


def cmd_lfactor(args):
    out = spectra.std_identity_check(args.p, args.ramified)
    if not args.ramified:
        out["cap"] = spectra.cap_consistency(args.p)
        out["palindromic"] = spectra.local_factor_unramified(args.p).is_palindromic()
    if not out["ok"]:
        raise VerificationFailure(out)
    return out


def cmd_eval(args):
    D = discform.DiscGroup(_order(args))
    try:
        maass = numeval.NumericMaass.load(args.maass)
        pt = numeval.EvalPoint.parse(args.point)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from None
    try:
        return numeval.evaluate_lift(D, maass, pt, rat(args.qmax))
    except numeval.MissingCoefficient as exc:
        raise UsageError(str(exc.args[0])) from None


# ---------------------------------------------------------------- verify


def _suite_order(D, rng):
    maximal = orders.is_maximal(D.dual.order)[0]
    ok = maximal and D.size == D.N**2 and D.level == D.N
    return {"N": D.N, "maximal": maximal, "index": D.size, "level": D.level, "ok": ok}


def _suite_discform(D, rng):
    m = discform.milgram_sum(D)
    ok = m == -D.N and all(discform.gamma_from_milgram(D, p) == -1 for p in prime_factors(D.N))
    return {"milgram": fmt_rat(m.as_rational()) if m.is_rational() else m.to_json(), "ok": ok}


def _suite_weil(D, rng):
    out = {}
    if D.size <= 49:
        out["relations"] = weilrep.relation_report(D)
    split = weilrep.SplitWeil(D)
    mats = [weilrep.random_gamma0(D.N, rng, 10**4) for _ in range(25)]
    out["gamma0_samples"] = len(mats)
    out["gamma0_ok"] = all(weilrep.gamma0_check(M, D, split) for M in mats)
    out["ok"] = out["gamma0_ok"] and all(out.get("relations", {"x": True}).values())
    return out


def _suite_lift(D, rng):
    ok = vvlift.welldefinedness_check(D, samples=5, seed=rng.randrange(2**31))
    return {"welldefined": ok, "ok": ok}


def _suite_coeff(D, rng):
    rep = thetacoeff.equivalence_sweep(D, 6)
    return {**rep, "failures": len(rep["failures"])}


def _suite_hecke(D, rng):
    out = {}
    ok = True
    for p in prime_factors(D.N):
        rep = hecke.ramified_eigenvalue_check(D, p)
        sums = hecke.coset_character_sums(D, p)
        out[str(p)] = {"constant": rep["constant"], "expected": rep["expected"], "character_sums_ok": sums["ok"]}
        ok &= rep["matches_expected"] and sums["ok"]
    out["ok"] = ok
    return out


SUITES: dict[str, Callable] = {
    "order": _suite_order,
    "discform": _suite_discform,
    "weil": _suite_weil,
    "lift": _suite_lift,
    "coeff": _suite_coeff,
    "hecke": _suite_hecke,
}


def _suite_lfactor():
    rows = {}
    for p in (2, 3, 5, 7, 11):
        unram = spectra.std_identity_check(p)["ok"]
        ram = spectra.std_identity_check(p, True)["ok"]
        rows[str(p)] = unram and ram and spectra.cap_consistency(p)["so33_matches_lift"]
    return {**rows, "ok": all(rows.values())}


def _suite_numeric():
    grid = {}
    for a in (1.0, 4 * math.pi):
        for p in (1.0, math.pi):
            for r in (0.0, 1.0, 2.5):
                grid[f"a={a:.6g},p={p:.6g},r={r:g}"] = numeval.laplace_identity_check(a, p, r) <= 1e-6
    return {"laplace": grid, "ok": all(grid.values())}


def cmd_verify(args):
    rng = random.Random(args.seed)
    suites = list(SUITES) + ["lfactor", "numeric"] if args.suite == "all" else [args.suite]
    sources = [args.order] if args.order else [f"catalog:{n}" for n in (2, 3, 5, 7)]
    report: dict = {"seed": args.seed, "suites": {}}
    for name in suites:
        if name == "lfactor":
            report["suites"][name] = _suite_lfactor()
            continue
        if name == "numeric":
            report["suites"][name] = _suite_numeric()
            continue
        per = {}
        for src in sources:
            D = discform.DiscGroup(orders.load_order(src))
            per[src] = SUITES[name](D, rng)
        report["suites"][name] = {**per, "ok": all(v["ok"] for v in per.values())}
    report["ok"] = all(s["ok"] for s in report["suites"].values())
    if not report["ok"]:
        raise VerificationFailure(report)
    return report


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="capform", description="Exact and numeric tools for theta lifts of Maass forms to O(1,5).")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, order=True, signs=False, help=None):
        p = sub.add_parser(name, help=help)
        p.add_argument("--out", help="write JSON here instead of stdout")
        if order:
            p.add_argument("--order", default="catalog:2", help="catalog:N or a path to an order JSON file")
        if signs:
            p.add_argument("--al-signs", default="", help='Atkin-Lehner signs such as "2:-1,3:1"')
        p.set_defaults(func=fn)
        return p

    p = add("algebra", cmd_algebra, order=False, help="quaternion algebra data")
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--in", dest="input")
    p.add_argument("--elt", help="element coordinates in (1,i,j,k)")

    add("order", cmd_order, help="order, Gram matrix and dual lattice")
    add("discform", cmd_discform, help="discriminant form report")

    p = add("weil", cmd_weil, help="Weil representation matrix")
    p.add_argument("--matrix", required=True, help='"a,b,c,d" in SL2(Z)')

    add("lift", cmd_lift, signs=True, help="component expansion of the vector-valued lift")

    p = add("coeff", cmd_coeff, signs=True, help="Fourier coefficient A(beta)")
    p.add_argument("--beta", help="beta in (1,i,j,k) coordinates")
    p.add_argument("--qmax", help="tabulate all beta with Q(beta) <= qmax")
    p.add_argument("--form", choices=("closed", "divisor"), default="closed")
    p.add_argument("--strict", action="store_true", help="fail on non-integral coefficient arguments")
    p.add_argument("--in", dest="input", help="re-read a coefficient JSON")

    p = add("hecke", cmd_hecke, help="Hecke eigenvalue checks")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--battery", default="default")

    p = add("lfactor", cmd_lfactor, order=False, help="local standard L-factor identities")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--ramified", action="store_true")

    p = add("eval", cmd_eval, help="numeric evaluation of the truncated lift")
    p.add_argument("--maass", required=True, help="JSON with level, al_signs, r, coeffs")
    p.add_argument("--point", required=True, help='"x1,x2,x3,x4;y"')
    p.add_argument("--qmax", default="6")

    p = add("verify", cmd_verify, help="run verification suites")
    p.set_defaults(order=None)
    p.add_argument("--suite", choices=sorted(SUITES) + ["lfactor", "numeric", "all"], default="all")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = getattr(args, "out", None)
    try:
        result = args.func(args)
    except VerificationFailure as exc:
        _dump({"status": "failed", "report": exc.report}, out)
        return 1
    except UsageError as exc:
        print(f"capform: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, orders.OrderError) as exc:
        print(f"capform: error: {exc}", file=sys.stderr)
        return 2
    except (AssertionError, ArithmeticError) as exc:
        _dump({"status": "failed", "error": type(exc).__name__, "message": str(exc)}, out)
        return 1
    _dump(result, out)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
