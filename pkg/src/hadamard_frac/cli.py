"""``hadamard-frac`` command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical
failure, 4 regime guard.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__
from .criterion import ProblemParams, SignFunctionals, evaluate, sign_functionals
from .initial_data import (
    RadialProfile,
    closed_form_integral,
    cutoff_weighted_integral,
    load_custom_profile,
    total_integral,
)
from .kernels import (
    Constant,
    FracParams,
    LogGridFunction,
    LogPower,
    MuFamily,
    Sampled,
    hadamard_caputo_derivative,
    hadamard_left_integral,
    hadamard_right_integral,
    rl_left_integral,
    rl_right_integral,
)
from .probe import ProbeConfig, RegimeError, rows_to_csv, sweep, sweep_summary
from .quadrature import QuadratureError, QuadratureSpec
from .testfunctions import CutoffParams, MuParams, TestFunction, default_exponents
from .verification import SUITES, run_suites

SCHEMA = "hadamard-frac/1"

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_REGIME = 4


class UsageError(ValueError):
    pass


# output


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def dump_json(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON with sorted keys and every float printed to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dump_json(obj[k], indent, _level + 1)}" for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}{dump_json(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    return json.dumps(str(obj))


def _csv_value(v: Any) -> str:
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, (float, np.floating)):
        return "" if not math.isfinite(v) else format(float(v), ".17g")
    return str(v)


def _csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_csv_value(v) for v in r])
    return buf.getvalue()


def _flatten(d: Any, prefix: str = "") -> list[tuple[str, Any]]:
    out: list[tuple[str, Any]] = []
    if isinstance(d, dict):
        for k in sorted(d, key=str):
            out += _flatten(d[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(d, (list, tuple)) and d and all(isinstance(v, (dict, list, tuple)) for v in d):
        for i, v in enumerate(d):
            out += _flatten(v, f"{prefix}[{i}]")
    elif isinstance(d, (list, tuple)):
        out.append((prefix, " ".join(_csv_value(v) for v in d)))
    else:
        out.append((prefix, d))
    return out


def _text(d: dict) -> str:
    return "\n".join(f"{k}: {_csv_value(v)}" for k, v in _flatten(d)) + "\n"


def _emit(args, payload: dict, table: tuple[Sequence[str], Sequence[Sequence[Any]]] | None = None) -> None:
    payload = {"schema": SCHEMA, **payload}
    if args.format == "json":
        text = dump_json(payload) + "\n"
    elif args.format == "csv":
        if table is None:
            table = (("key", "value"), _flatten(payload))
        text = _csv(*table)
    else:
        text = _text(payload)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# argument parsing helpers


def _parse_integrand(spec: str):
    """``const:C``, ``logpow:BETA``, ``mu:KAPPA`` (``name=value`` also accepted) or ``sampled:PATH``."""
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "sampled":
        return "sampled", rest
    value = rest.split("=", 1)[-1] if rest else ""
    try:
        x = float(value) if value else None
    except ValueError:
        raise UsageError(f"bad integrand parameter in {spec!r}") from None
    if kind in ("const", "constant"):
        return Constant(1.0 if x is None else x)
    if x is None:
        raise UsageError(f"integrand {spec!r} needs a parameter")
    if kind in ("logpow", "logpower"):
        return LogPower(x)
    if kind == "mu":
        return MuFamily(x)
    raise UsageError(f"unknown integrand kind {kind!r}; expected const, logpow, mu or sampled")


def _load_sampled(path: str, a: float, T: float) -> Sampled:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    try:
        vals = [float(r[-1]) for r in rows[1:]]
    except ValueError as exc:
        raise UsageError(f"{path}: non-numeric sample ({exc})") from None
    return Sampled(LogGridFunction(a, T, np.asarray(vals)))


def _profile_tag(name: str) -> str:
    key = name.strip().lower().replace("_", "").replace("-", "")
    table = {"inverseweight": "inverse-weight", "gaussweight": "gauss-weight", "expdecay": "exp-decay", "custom": "custom"}
    if key not in table:
        raise UsageError(f"unknown profile {name!r}; expected inverse-weight, gauss-weight, exp-decay or custom")
    return table[key]


def _parse_profile(spec: str, N: int, custom_csv: str | None) -> RadialProfile:
    """``TAG[:real|imaginary]``."""
    tag, _, part = spec.partition(":")
    tag = _profile_tag(tag)
    part = part or "real"
    if part in ("re", "f1"):
        part = "real"
    if part in ("im", "imag", "f2"):
        part = "imaginary"
    if tag == "custom":
        if not custom_csv:
            raise UsageError("custom profiles need --custom-csv PATH")
        return load_custom_profile(custom_csv, N, part)
    return RadialProfile(tag, N, part)


def _quad(args) -> QuadratureSpec:
    kw = {}
    if args.rel_tol is not None:
        kw["rel_tol"] = args.rel_tol
    if getattr(args, "rule", None):
        kw["rule"] = args.rule
    return QuadratureSpec(**kw)


def _profile_integrals(profiles: Sequence[RadialProfile], rel_tol: float) -> tuple[float, float]:
    f1 = f2 = 0.0
    for rp in profiles:
        v = total_integral(rp, rel_tol)
        if rp.part == "real":
            f1 += v
        else:
            f2 += v
    return f1, f2


# subcommands


_OPS = {"Ia": rl_left_integral, "IT": rl_right_integral, "Ja": hadamard_left_integral, "JT": hadamard_right_integral}


def cmd_op(args) -> int:
    q = _quad(args)
    f = _parse_integrand(args.integrand)
    if isinstance(f, tuple):
        f = _load_sampled(f[1], args.a, args.T)
    results = []
    if args.kind == "D":
        alpha = args.alpha if args.alpha is not None else args.sigma
        if alpha is None:
            raise UsageError("--kind D needs --alpha")
        p = FracParams(1.0, args.a, args.T)
        for t in args.t:
            r = hadamard_caputo_derivative(f, alpha, p, t, q, with_error=True)
            results.append({"t": t, "value": r.value, "error": r.error})
        order = {"alpha": alpha}
    else:
        if args.sigma is None:
            raise UsageError(f"--kind {args.kind} needs --sigma")
        p = FracParams(args.sigma, args.a, args.T)
        op = _OPS[args.kind]
        for t in args.t:
            r = op(f, p, t, q, with_error=True)
            results.append({"t": t, "value": r.value, "error": r.error})
        order = {"sigma": args.sigma}
    payload = {"command": "op", "kind": args.kind, "integrand": args.integrand, "a": args.a, "T": args.T, **order, "results": results}
    table = (("t", "value", "error"), [(r["t"], r["value"], r["error"]) for r in results])
    _emit(args, payload, table)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_suites(args.suite or None, tol=args.tol, quad=_quad(args), inject=args.inject_bug)
    ok = all(r.passed for r in results)
    payload = {
        "command": "verify",
        "passed": ok,
        "tolerance": args.tol,
        "suites": [r.to_dict() for r in results],
    }
    table = (
        ("suite", "passed", "worst_error", "worst_bound_ratio", "checks", "failed"),
        [(r.name, r.passed, r.worst_error, r.worst_bound_ratio, len(r.checks), ";".join(r.to_dict()["failed"])) for r in results],
    )
    if args.format == "text" and not args.out:
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            extra = "" if r.worst_bound_ratio is None else f" bound ratio {r.worst_bound_ratio:.3g}"
            print(f"{status} {r.name}: {len(r.checks)} checks, worst relative error {r.worst_error:.3g}{extra}")
            for name in r.to_dict()["failed"]:
                print(f"  failed: {name}")
    else:
        _emit(args, payload, table)
    return EXIT_OK if ok else EXIT_VERIFY


def _problem(args) -> ProblemParams:
    return ProblemParams(args.alpha, args.gamma, args.N, args.p, args.lambda1, args.lambda2, args.a)


def cmd_criterion(args) -> int:
    pp = _problem(args)
    if args.profile and (args.f1_integral is not None or args.f2_integral is not None):
        raise UsageError("give either --profile or --f1-integral/--f2-integral, not both")
    if args.profile:
        profiles = [_parse_profile(s, pp.N, args.custom_csv) for s in args.profile]
        f1, f2 = _profile_integrals(profiles, _quad(args).rel_tol)
    elif args.f1_integral is not None or args.f2_integral is not None:
        f1 = args.f1_integral or 0.0
        f2 = args.f2_integral or 0.0
    else:
        raise UsageError("criterion needs --profile or --f1-integral/--f2-integral")
    sf = sign_functionals(pp, f1, f2)
    report = evaluate(pp, sf)
    payload = {
        "command": "criterion",
        "params": {"alpha": pp.alpha, "gamma": pp.gamma, "N": pp.N, "p": pp.p, "lambda1": pp.lambda1, "lambda2": pp.lambda2, "a": pp.a},
        "f_integrals": {"f1": f1, "f2": f2},
        "report": report.to_dict(),
    }
    _emit(args, payload)
    return EXIT_OK


def cmd_integrals(args) -> int:
    tag = _profile_tag(args.profile)
    if tag == "custom":
        rp = load_custom_profile(args.custom_csv, args.N) if args.custom_csv else None
        if rp is None:
            raise UsageError("custom profiles need --custom-csv PATH")
    else:
        rp = RadialProfile(tag, args.N)
    q = _quad(args)
    total = total_integral(rp, q.rel_tol)
    exact = closed_form_integral(rp)
    payload: dict[str, Any] = {
        "command": "integrals",
        "profile": tag,
        "N": args.N,
        "total_integral": total,
        "closed_form": exact,
        "relative_difference": None if exact is None else abs(total - exact) / abs(exact),
    }
    if args.R is not None:
        c = CutoffParams(args.R, args.ell, args.N)
        payload["cutoff_weighted_integral"] = cutoff_weighted_integral(rp, c)
        payload["R"] = args.R
        payload["ell"] = args.ell
    _emit(args, payload)
    return EXIT_OK


def cmd_probe(args) -> int:
    pp = _problem(args)
    kappa, ell = default_exponents(pp.alpha, pp.p)
    kappa = args.kappa if args.kappa is not None else kappa
    ell = args.ell if args.ell is not None else ell
    if not kappa >= 1.0 or int(ell) != ell or ell < 2:
        raise RegimeError(f"kappa={kappa} must be >= 1 and ell={ell} an integer >= 2")
    R0 = args.R[0]
    tf = TestFunction(MuParams(pp.a, R0 ** (args.theta or 2.0 / pp.alpha), kappa), CutoffParams(R0, int(ell), pp.N))
    cfg = ProbeConfig(pp, tf, tuple(args.R), args.theta, _quad(args))
    profiles = [_parse_profile(s, pp.N, args.custom_csv) for s in (args.profile or ["exp-decay:real"])]
    f1, f2 = _profile_integrals(profiles, cfg.quad.rel_tol)
    sf = sign_functionals(pp, f1, f2)
    result = sweep(cfg, sf, profiles)
    summary = sweep_summary(cfg, sf, result)
    summary["command"] = "probe"
    summary["sign_functionals"] = {"I1": sf.I1, "I2": sf.I2}
    summary["profiles"] = [f"{rp.tag}:{rp.part}" for rp in profiles]
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(rows_to_csv(result.rows))
    if args.format == "csv":
        text = rows_to_csv(result.rows)
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        summary["rows"] = [r.to_dict() for r in result.rows]
        _emit(args, summary)
    if args.out or args.format == "csv":
        slope = "n/a" if result.slope is None else f"{result.slope:.6g}"
        print(f"slope {slope} vs decay exponent {summary['decay_exponent']:.6g} ({summary['regime']})", file=sys.stderr)
    return EXIT_OK


# parser


def build_parser() -> argparse.ArgumentParser:
    # not a parent parser: parents share action objects, so set_defaults on one subcommand leaks
    def common(p: argparse.ArgumentParser, fmt: str = "json") -> argparse.ArgumentParser:
        p.add_argument("--format", choices=("json", "csv", "text"), default=fmt)
        p.add_argument("--rel-tol", type=float, default=None, help="quadrature relative tolerance")
        p.add_argument("--out", default=None, help="write the output here instead of stdout")
        return p

    parser = argparse.ArgumentParser(prog="hadamard-frac", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    op = common(sub.add_parser("op", help="evaluate a fractional operator"))
    op.add_argument("--kind", required=True, choices=("Ia", "IT", "Ja", "JT", "D"))
    op.add_argument("--integrand", required=True, help="const:C, logpow:BETA, mu:kappa=K or sampled:PATH")
    op.add_argument("--sigma", type=float)
    op.add_argument("--alpha", type=float, help="order of the derivative for --kind D")
    op.add_argument("--a", type=float, default=1.0)
    op.add_argument("--T", type=float, default=math.e)
    op.add_argument("--t", type=float, nargs="+", required=True)
    op.add_argument("--rule", choices=("gauss-jacobi", "adaptive-graded"))
    op.set_defaults(func=cmd_op)

    ver = common(sub.add_parser("verify", help="run the identity suites"), "text")
    ver.add_argument("--suite", action="append", choices=SUITES)
    ver.add_argument("--tol", type=float, default=1e-8, help="relative tolerance of each identity")
    ver.add_argument("--inject-bug", metavar="IDENTITY", help="flip the sign of matching identities (harness self-test)")
    ver.set_defaults(func=cmd_verify)

    def problem_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--alpha", type=float, required=True)
        p.add_argument("--gamma", type=float, required=True)
        p.add_argument("--N", type=int, required=True)
        p.add_argument("--p", type=float, required=True)
        p.add_argument("--lambda1", type=float, default=1.0)
        p.add_argument("--lambda2", type=float, default=0.0)
        p.add_argument("--a", type=float, default=1.0)
        p.add_argument("--profile", action="append", help="TAG[:real|imaginary], repeatable")
        p.add_argument("--custom-csv", help="two-column r,g CSV for the custom profile")

    crit = common(sub.add_parser("criterion", help="evaluate the nonexistence criteria"))
    problem_flags(crit)
    crit.add_argument("--f1-integral", type=float)
    crit.add_argument("--f2-integral", type=float)
    crit.set_defaults(func=cmd_criterion)

    integ = common(sub.add_parser("integrals", help="integrals of the example initial data"))
    integ.add_argument("--profile", required=True)
    integ.add_argument("--N", type=int, required=True)
    integ.add_argument("--custom-csv")
    integ.add_argument("--R", type=float, help="also report the cutoff-weighted integral at this radius")
    integ.add_argument("--ell", type=int, default=4)
    integ.set_defaults(func=cmd_integrals)

    pr = common(sub.add_parser("probe", help="sweep the test-function estimates over R"))
    problem_flags(pr)
    pr.add_argument("--R", type=float, nargs="+", default=[10.0, 20.0, 40.0, 80.0])
    pr.add_argument("--theta", type=float, help="horizon exponent, T = exp(R**theta); default 2/alpha")
    pr.add_argument("--kappa", type=float)
    pr.add_argument("--ell", type=int)
    pr.add_argument("--csv", help="also write the per-radius rows to this CSV file")
    pr.set_defaults(func=cmd_probe)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RegimeError as exc:
        print(f"regime error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except QuadratureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
