"""Command-line interface: every command prints JSON lines that embed the parsed job.

Exit codes: 0 success, 1 verification failure, 2 pole or degeneracy, 3 usage error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Any, Callable, Sequence

from .errors import (
    CalibrationError,
    ConvergenceError,
    InternalConsistencyError,
    MismatchError,
    NotRationalError,
    PoleError,
    SBOError,
    SingularSystem,
    ToleranceExceeded,
    WindowUnstable,
)
from .lattice import (
    CompositionFactor,
    GroupCase,
    Params,
    all_rows,
    framework_row,
    framework_scale,
    lambda_closed,
    lambda_from_lemma,
    parse_factor,
    parse_pair,
    sigma,
    sigma_prime,
    singular_set_membership,
    target_ktype_prime,
)
from .numerics import format_rat, parse_rat

EXIT_OK, EXIT_FAIL, EXIT_POLE, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class VerificationFailed(Exception):
    def __init__(self, record: dict) -> None:
        super().__init__("verification failed")
        self.record = record


# ---------------------------------------------------------------------------
# parsing helpers


def exact(text: str) -> Fraction:
    try:
        return parse_rat(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"exact parameter expected as 'p/q', got {text!r}") from exc


def real_number(text: str) -> float:
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a real number: {text!r}") from exc


def _case(spec: dict) -> GroupCase:
    try:
        return GroupCase(spec["case"]["family"], spec["case"]["n"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _params(spec: dict) -> Params:
    return Params(exact(spec["params"]["r"]), exact(spec["params"]["rp"]))


def _dump(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# command implementations (each takes a job spec and returns a JSON-able record)


def run_eval(spec: dict) -> dict:
    from . import spectral

    case = _case(spec)
    pair = parse_pair(case, spec["pair"])
    variant = spec["variant"]
    p = spec["params"]
    if variant in ("t", "t1", "printed"):
        params = _params(spec)
        if case.is_real:
            fn = {"t": spectral.t_real, "t1": spectral.t1_real}.get(variant)
            if fn is None:
                raise UsageError("variant 'printed' applies to the complex case")
            value, label = fn(case, params, pair), variant
        else:
            if variant == "t1":
                raise UsageError("variant t1 is provided for the real case")
            if variant == "printed":
                value, label = spectral.t_complex_closed(case, params, pair), "t_printed"
            else:
                value, label = spectral.t_complex_corrected(case, params, pair), "t_corrected"
    elif variant == "t2":
        if not case.is_real:
            raise UsageError("variant t2 is provided for the real case")
        value, label = spectral.t2_real(case, exact(p["r"]), int(spec["j"]), pair), "t2"
    elif variant == "t3":
        fn = spectral.t3_real if case.is_real else spectral.t3_complex
        value, label = fn(case, exact(p["r"]), int(spec["N"]), pair), "t3"
    elif variant == "tplus":
        if case.is_real:
            raise UsageError("variant tplus is provided for the complex case")
        value, label = spectral.t_plus_complex(case, int(spec["i"]), int(spec["j"]), pair), "tplus"
    else:
        raise UsageError(f"unknown variant {variant!r}")
    return {"value": format_rat(value), "variant": label}


def run_residuals(spec: dict) -> dict:
    from . import spectral

    case = _case(spec)
    params = _params(spec)
    window = spec["window"]
    variant = spec["variant"]
    if case.is_real:
        fn = lambda p: spectral.t_real(case, params, p)  # noqa: E731
    elif variant == "printed":
        fn = lambda p: spectral.t_complex_closed(case, params, p)  # noqa: E731
    else:
        fn = lambda p: spectral.t_complex_corrected(case, params, p)  # noqa: E731
    table = spectral.make_table(case, params, window, fn)
    res = spectral.residuals(case, params, table)
    rows = sum(1 for _ in all_rows(case, params, window))
    record = {
        "rows": rows,
        "nonzero": len(res),
        "residuals": [[str(p), d, format_rat(v)] for p, d, v in res],
        "variant": variant,
    }
    if res and variant != "printed":
        raise VerificationFailed(record)
    return record


def _factors(spec: dict) -> tuple[CompositionFactor, CompositionFactor]:
    try:
        return parse_factor(spec["v"], "G"), parse_factor(spec["w"], "G'")
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def run_mult(spec: dict) -> dict:
    from .solver import multiplicity

    case = _case(spec)
    params = _params(spec)
    v, w = _factors(spec)
    res = multiplicity(case, params, v, w, spec.get("window"), strict=False)
    return res.to_json_obj()


def run_basis(spec: dict) -> dict:
    from .solver import assemble, nullspace, recommended_window

    case = _case(spec)
    params = _params(spec)
    v, w = _factors(spec)
    window = spec.get("window") or recommended_window(case, params, v, w)
    basis = nullspace(assemble(case, params, window, v, w))
    return basis.to_json_obj()


def run_compare(spec: dict) -> dict:
    from .solver import assemble, compare_with_closed_form, nullspace

    case = _case(spec)
    params = _params(spec)
    window = spec.get("window") or 10
    basis = nullspace(assemble(case, params, window))
    try:
        rep = compare_with_closed_form(case, params, basis)
    except MismatchError as exc:
        raise VerificationFailed({"proportional": False, "error": str(exc), "pair": str(exc.pair) if exc.pair else None})
    return rep.to_json_obj()


def run_funk_hecke(spec: dict) -> dict:
    from .quadrature import verify_funk_hecke

    rep = verify_funk_hecke(
        spec["case"]["n"], spec["alpha"], spec["alpha_p"], real_number(spec["params"]["r"]), real_number(spec["params"]["rp"]), spec["samples"]
    )
    record = rep.to_json_obj()
    record["pass"] = rep.rel_error <= spec["tol"]
    if not record["pass"]:
        raise VerificationFailed(record)
    return record


def run_norms(spec: dict) -> dict:
    from .quadrature import verify_norm_formulas

    try:
        rep = verify_norm_formulas(spec["case"]["n"], spec["alpha_max"])
    except ToleranceExceeded as exc:
        raise VerificationFailed({"error": str(exc), "where": list(exc.where or ())})
    return rep.to_json_obj()


def run_growth(spec: dict) -> dict:
    from .spectral import boundedness_profile

    n = spec["case"]["n"]
    r = real_number(spec["params"]["r"])
    prof = boundedness_profile(n, r, spec["N"], spec["ap_max"], spec["l_max"])
    out = prof.to_json_obj()
    if spec.get("doubling"):
        prof2 = boundedness_profile(n, r, spec["N"], spec["ap_max"], 2 * spec["l_max"])
        change = abs(prof2.sup - prof.sup) / prof.sup
        out["sup_doubled"] = prof2.sup
        out["relative_change"] = change
        out["stable"] = change <= 0.01
    return out


# ---------------------------------------------------------------------------
# verify suites


def _suite_relations(spec: dict) -> dict:
    from . import spectral

    case = _case(spec)
    window = spec["window"] or 12
    failures = []
    checked = 0
    for params in spectral.iter_generic_real_params(spec["seed"], spec["count"], case=case):
        table = spectral.closed_form_table(case, params, window)
        res = spectral.residuals(case, params, table)
        for p, d, _ in all_rows(case, params, window):
            if framework_row(case, params, p, d) and _scaled(case, params, p, d):
                failures.append({"params": params.as_json(), "pair": str(p), "direction": d, "kind": "framework"})
        checked += 1
        if res:
            failures.append({"params": params.as_json(), "nonzero": len(res)})
    return {"checked": checked, "failures": failures, "pass": not failures and checked > 0}


def _scaled(case: GroupCase, params: Params, p, d) -> bool:
    """True when the two independent row constructions disagree."""
    from .lattice import relation_row

    a = relation_row(case, params, p, d)
    b = framework_row(case, params, p, d)
    s = framework_scale(case, p)
    keys = set(a) | set(b)
    return any(a.get(k, 0) != s * b.get(k, 0) for k in keys)


def _suite_lambda(spec: dict) -> dict:
    case = _case(spec)
    window = spec["window"] or 12
    bad = []
    for p in case.pairs(window):
        for d in case.directions:
            lc, ll = lambda_closed(case, p, d), lambda_from_lemma(case, p, d)
            if dict(lc) != dict(ll):
                bad.append([str(p), d, "closed!=lemma"])
                continue
            if not lc:
                continue
            if sum(v for _, v in lc) != 1:
                bad.append([str(p), d, "sum"])
            bp = target_ktype_prime(case, p, d)
            lhs = sum(v * (sigma(case, q.ktype) - sigma(case, p.ktype)) for q, v in lc)
            rhs = sigma_prime(case, bp) - sigma_prime(case, p.ktype_prime) + 2 * (case.rho - case.rho_prime)
            if lhs != rhs:
                bad.append([str(p), d, "weighted"])
    return {"failures": bad, "pass": not bad}


def _suite_tables(spec: dict) -> dict:
    from .solver import (
        COMPLEX_FACTOR_KINDS,
        expected_subquotient_multiplicity,
        multiplicity,
        reducibility_params,
    )

    case = _case(spec)
    kinds = ("F", "T") if case.is_real else COMPLEX_FACTOR_KINDS
    cells = []
    ok = True
    for i in range(spec["imax"] + 1):
        for j in range(spec["jmax"] + 1):
            params = reducibility_params(case, i, j)
            for v in kinds:
                for w in kinds:
                    res = multiplicity(case, params, CompositionFactor(v, i, "G"), CompositionFactor(w, j, "G'"), strict=False)
                    exp = expected_subquotient_multiplicity(case, i, j, v, w)
                    good = res.stable and res.multiplicity == exp
                    ok &= good
                    cells.append({"i": i, "j": j, "v": v, "w": w, "multiplicity": res.multiplicity, "expected": exp, "stable": res.stable})
    return {"cells": cells, "pass": ok}


def _suite_funk_hecke(spec: dict) -> dict:
    from .quadrature import verify_funk_hecke

    n = spec["case"]["n"]
    worst = 0.0
    rows = []
    for r, rp in ((0.2, 0.1), (0.3, -0.2)):
        for a in range(spec["alpha_max"] + 1):
            for ap in range(a + 1):
                rep = verify_funk_hecke(n, a, ap, r, rp, spec["samples"])
                worst = max(worst, rep.rel_error)
                rows.append({"r": r, "rp": rp, "alpha": a, "alpha_p": ap, "error": rep.rel_error})
    return {"max_rel_error": worst, "rows": rows, "pass": worst <= spec["tol"]}


def _suite_norms(spec: dict) -> dict:
    from .quadrature import verify_norm_formulas

    try:
        rep = verify_norm_formulas(spec["case"]["n"], spec["alpha_max"])
    except ToleranceExceeded as exc:
        return {"error": str(exc), "pass": False}
    return {"max_rel_error": rep.rel_error, "pass": True}


def _suite_growth(spec: dict) -> dict:
    from .spectral import boundedness_profile

    n = spec["case"]["n"]
    r = real_number(spec["params"]["r"])
    out = []
    ok = True
    for N in spec["Ns"]:
        try:
            a = boundedness_profile(n, r, N, spec["ap_max"], spec["l_max"])
            b = boundedness_profile(n, r, N, spec["ap_max"], 2 * spec["l_max"])
        except SBOError as exc:
            ok = False
            out.append({"N": N, "error": f"{type(exc).__name__}: {exc}"})
            continue
        change = abs(b.sup - a.sup) / a.sup
        good = change <= 0.01
        ok &= good
        out.append({"N": N, "sup": a.sup, "sup_doubled": b.sup, "relative_change": change, "stable": good})
    return {"profiles": out, "pass": ok}


def _suite_calibration(spec: dict) -> dict:
    from .spectral import calibrate_complex

    rep = calibrate_complex(spec["case"]["n"], spec["window"] or 4)
    out = rep.to_json_obj()
    out["pass"] = not rep.corrected_residuals
    return out


SUITES: dict[str, Callable[[dict], dict]] = {
    "relations": _suite_relations,
    "lambda": _suite_lambda,
    "tables": _suite_tables,
    "funk-hecke": _suite_funk_hecke,
    "norms": _suite_norms,
    "growth": _suite_growth,
    "calibration": _suite_calibration,
}


def run_verify(spec: dict) -> dict:
    record = SUITES[spec["suite"]](spec)
    if not record.get("pass"):
        raise VerificationFailed(record)
    return record


COMMANDS: dict[str, Callable[[dict], dict]] = {
    "eval": run_eval,
    "residuals": run_residuals,
    "mult": run_mult,
    "basis": run_basis,
    "compare": run_compare,
    "funk-hecke": run_funk_hecke,
    "norms": run_norms,
    "growth": run_growth,
    "verify": run_verify,
}

EXACT_COMMANDS = {"eval", "residuals", "mult", "basis", "compare"}
ORACLE_COMMANDS = {"funk-hecke", "norms", "growth"}


def execute(spec: dict) -> tuple[int, dict]:
    """Run one job; returns ``(exit code, record)`` and never raises for expected failures."""
    try:
        record = COMMANDS[spec["command"]](spec)
        code = EXIT_OK
    except VerificationFailed as exc:
        record, code = exc.record, EXIT_FAIL
    except (PoleError, SingularSystem, NotRationalError, WindowUnstable, ConvergenceError, CalibrationError) as exc:
        record, code = {"error": type(exc).__name__, "message": str(exc)}, EXIT_POLE
    except (InternalConsistencyError, MismatchError) as exc:
        record, code = {"error": type(exc).__name__, "message": str(exc)}, EXIT_FAIL
    except (UsageError, SBOError, ValueError, KeyError) as exc:
        record, code = {"error": type(exc).__name__, "message": str(exc)}, EXIT_USAGE
    record = dict(record)
    record["job"] = spec
    record["exit_code"] = code
    return code, record


# ---------------------------------------------------------------------------
# argument parsing


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--case", choices=("real", "complex"), default=d, help="group family (default real)")
    p.add_argument("--n", type=int, default=d, help="dimension parameter n (default 3)")
    p.add_argument("--window", type=int, default=d, help="lattice window W")
    p.add_argument("--out", default=d, help="write JSON lines to this file instead of stdout")
    p.add_argument("--jobs", type=int, default=d, help="worker processes for sweeps (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sbo", description="Symmetry-breaking operators on K-type lattices.")
    _global_flags(parser, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name: str, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        _global_flags(p, suppress=True)
        return p

    p = cmd("eval", "evaluate a spectral function at one pair")
    p.add_argument("--r", default="0")
    p.add_argument("--rp", default="0")
    p.add_argument("--pair", action="append", required=True, help="'a,ap' or 'a1,a2;a1p,a2p' (repeatable)")
    p.add_argument("--variant", default="t", choices=("t", "t1", "t2", "t3", "tplus", "printed"))
    p.add_argument("--i", type=int)
    p.add_argument("--j", type=int)
    p.add_argument("--N", type=int)

    p = cmd("residuals", "evaluate every relation row on a closed-form table")
    p.add_argument("--r", default="0")
    p.add_argument("--rp", default="0")
    p.add_argument("--variant", default="corrected", choices=("corrected", "printed"))

    for name, help_ in (("mult", "multiplicity between (sub)quotients"), ("basis", "explicit exact basis")):
        p = cmd(name, help_)
        p.add_argument("--r", default=None)
        p.add_argument("--rp", default=None)
        p.add_argument("--v", default="Full", help="source factor, e.g. Full, F(2), Tplus(1)")
        p.add_argument("--w", default="Full", help="target factor")
        p.add_argument("--sweep", default=None, help="'IMAX,JMAX': all reducibility points (i, j) up to the bounds")

    p = cmd("compare", "compare the solver basis with the closed form")
    p.add_argument("--r", default="0")
    p.add_argument("--rp", default="0")

    p = cmd("funk-hecke", "quadrature check of the Funk-Hecke identity")
    p.add_argument("--r", default="1/5")
    p.add_argument("--rp", default="1/10")
    p.add_argument("--alpha", type=int, default=0)
    p.add_argument("--alpha-p", type=int, default=0)
    p.add_argument("--samples", type=int, default=5)
    p.add_argument("--tol", type=float, default=1e-5)

    p = cmd("norms", "quadrature check of the norm formulas")
    p.add_argument("--alpha-max", type=int, default=5)

    p = cmd("growth", "boundedness profile of the discrete-component series")
    p.add_argument("--r", default="-7/10")
    p.add_argument("--N", type=int, default=0)
    p.add_argument("--ap-max", type=int, default=20)
    p.add_argument("--l-max", type=int, default=200)
    p.add_argument("--doubling", action="store_true", help="also report the change under doubling l_max")

    p = cmd("verify", "run a verification suite")
    p.add_argument("--suite", required=True, choices=sorted(SUITES))
    p.add_argument("--imax", type=int, default=3)
    p.add_argument("--jmax", type=int, default=3)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--alpha-max", type=int, default=4)
    p.add_argument("--samples", type=int, default=5)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--r", default="-7/10")
    p.add_argument("--Ns", default="0,1")
    p.add_argument("--ap-max", type=int, default=20)
    p.add_argument("--l-max", type=int, default=200)
    return parser


def _base_spec(args: argparse.Namespace) -> dict:
    family = getattr(args, "case", None) or "real"
    n = getattr(args, "n", None) or 3
    return {"command": args.command, "case": {"family": family, "n": n}, "window": getattr(args, "window", None)}


def build_jobs(args: argparse.Namespace) -> list[dict]:
    """Expand parsed arguments into one or more job specs (in output order)."""
    base = _base_spec(args)
    c = args.command
    if c in ORACLE_COMMANDS and base["window"] is not None:
        raise UsageError(f"--window has no meaning for the oracle command {c!r}")
    if c in ORACLE_COMMANDS and base["case"]["family"] != "real":
        raise UsageError("the quadrature oracle covers the real case only")
    if c == "eval":
        # validate exactness early (floats are refused)
        if args.variant in ("t", "t1", "printed"):
            exact(args.r), exact(args.rp)
        else:
            exact(args.r)
        jobs = []
        for pair in args.pair:
            spec = dict(base, params={"r": args.r, "rp": args.rp}, pair=pair, variant=args.variant)
            for k in ("i", "j", "N"):
                if getattr(args, k) is not None:
                    spec[k] = getattr(args, k)
            if args.variant == "t2" and "j" not in spec:
                raise UsageError("variant t2 needs --j")
            if args.variant == "t3" and "N" not in spec:
                raise UsageError("variant t3 needs --N")
            if args.variant == "tplus" and ("i" not in spec or "j" not in spec):
                raise UsageError("variant tplus needs --i and --j")
            jobs.append(spec)
        return jobs
    if c == "residuals":
        exact(args.r), exact(args.rp)
        return [dict(base, params={"r": args.r, "rp": args.rp}, variant=args.variant, window=base["window"] or 12)]
    if c in ("mult", "basis"):
        if args.sweep:
            from .solver import reducibility_params

            imax, jmax = (int(x) for x in args.sweep.split(","))
            case = _case(base)
            jobs = []
            for i in range(imax + 1):
                for j in range(jmax + 1):
                    pp = reducibility_params(case, i, j)
                    v = _with_index(args.v, i)
                    w = _with_index(args.w, j)
                    jobs.append(dict(base, params=pp.as_json(), v=v, w=w))
            return jobs
        if args.r is None or args.rp is None:
            raise UsageError("--r and --rp (or --sweep) are required")
        exact(args.r), exact(args.rp)
        return [dict(base, params={"r": args.r, "rp": args.rp}, v=args.v, w=args.w)]
    if c == "compare":
        exact(args.r), exact(args.rp)
        return [dict(base, params={"r": args.r, "rp": args.rp})]
    if c == "funk-hecke":
        real_number(args.r), real_number(args.rp)
        return [dict(base, params={"r": args.r, "rp": args.rp}, alpha=args.alpha, alpha_p=args.alpha_p, samples=args.samples, tol=args.tol)]
    if c == "norms":
        return [dict(base, alpha_max=args.alpha_max)]
    if c == "growth":
        real_number(args.r)
        return [dict(base, params={"r": args.r}, N=args.N, ap_max=args.ap_max, l_max=args.l_max, doubling=args.doubling)]
    if c == "verify":
        spec = dict(base, suite=args.suite)
        s = args.suite
        if s == "relations":
            spec.update(count=args.count, seed=args.seed)
        elif s == "tables":
            spec.update(imax=args.imax, jmax=args.jmax)
        elif s == "funk-hecke":
            spec.update(alpha_max=args.alpha_max, samples=args.samples, tol=args.tol)
        elif s == "norms":
            spec.update(alpha_max=5 if args.alpha_max is None else args.alpha_max)
        elif s == "growth":
            spec.update(params={"r": args.r}, Ns=[int(x) for x in args.Ns.split(",")], ap_max=args.ap_max, l_max=args.l_max)
        return [spec]
    raise UsageError(f"unknown command {c!r}")


def _with_index(text: str, idx: int) -> str:
    """``T`` -> ``T(idx)`` for sweeps; explicit indices and ``Full`` are kept."""
    t = text.strip()
    if t == "Full" or "(" in t:
        return t
    return f"{t}({idx})"


def run_jobs(jobs: Sequence[dict], workers: int) -> list[tuple[int, dict]]:
    if workers <= 1 or len(jobs) <= 1:
        return [execute(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(execute, jobs))


_NEGATIVE_VALUE = re.compile(r"^-(\d+(/\d+)?|\d*\.\d+([eE][-+]?\d+)?)$")


def normalize_argv(argv: Sequence[str]) -> list[str]:
    """Attach negative values such as ``-1/2`` to their flag (``--rp=-1/2``).

    argparse would otherwise read a leading minus as the start of an option.
    """
    out: list[str] = []
    k = 0
    argv = list(argv)
    while k < len(argv):
        tok = argv[k]
        if tok.startswith("--") and "=" not in tok and k + 1 < len(argv) and _NEGATIVE_VALUE.match(argv[k + 1]):
            out.append(f"{tok}={argv[k + 1]}")
            k += 2
            continue
        out.append(tok)
        k += 1
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = normalize_argv(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_USAGE if exc.code else EXIT_OK
    out_path = getattr(args, "out", None)
    workers = getattr(args, "jobs", None) or 1
    try:
        jobs = build_jobs(args)
    except (UsageError, SBOError, ValueError) as exc:
        line = _dump({"error": type(exc).__name__, "message": str(exc), "exit_code": EXIT_USAGE, "job": _base_spec(args)})
        _emit([line], out_path)
        return EXIT_USAGE
    results = run_jobs(jobs, workers)
    if args.command in ("mult", "basis") and getattr(args, "sweep", None):
        records = [rec for _, rec in results]
        code = max(c for c, _ in results)
        lines = [_dump({"job": dict(_base_spec(args), sweep=args.sweep, v=args.v, w=args.w), "results": records, "exit_code": code})]
    else:
        lines = [_dump(rec) for _, rec in results]
        code = max(c for c, _ in results)
    _emit(lines, out_path)
    return code


def _emit(lines: list[str], out_path: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
