"""Command-line entry point: ``liouville-lab <subcommand> [options]``.

Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import estimates, pohozaev, radialpoly
from .errors import DegenerateExponents, InvalidConfig, InvalidParams, LabError, UnsupportedOrder
from .params import (
    ProblemParams,
    classify,
    criticality_gap,
    find_epsilon,
    parse_number,
    scaling_exponents,
)
from .radial_ode import InitialData, integrate, shoot_scalar, shoot_system_m1
from .scan import CONFIG_HELP, ScanConfig, emit_curve, run_scan

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2

# bad requests rather than numerical trouble
USAGE_ERRORS = (InvalidParams, InvalidConfig, DegenerateExponents, UnsupportedOrder)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad input; route that to our usage code."""

    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _number(text: str):
    try:
        return parse_number(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _add_params(sub):
    sub.add_argument("--n", type=int, required=True, help="dimension")
    sub.add_argument("--m", type=int, required=True, help="polyharmonic order")
    sub.add_argument("--a", type=_number, default=0, help="weight on the u equation (default 0)")
    sub.add_argument("--b", type=_number, default=0, help="weight on the v equation (default 0)")
    sub.add_argument("--p", type=_number, required=True, help="exponent of v; rationals like 7/3 stay exact")
    sub.add_argument("--q", type=_number, required=True, help="exponent of u")


def _params(args) -> ProblemParams:
    return ProblemParams(args.n, args.m, args.a, args.b, args.p, args.q)


def _emit(args, record: dict, lines: list[str]):
    if getattr(args, "json", False):
        print(json.dumps(record))
    else:
        print("\n".join(lines))


def cmd_classify(args):
    params = _params(args)
    gap = criticality_gap(params)
    _emit(args, {"classification": str(classify(params)), "gap": float(gap)}, [str(classify(params))])


def cmd_exponents(args):
    ex = scaling_exponents(_params(args))
    _emit(args, {"alpha_u": ex.alpha_u, "alpha_v": ex.alpha_v}, [f"alpha_u = {ex.alpha_u:.15g}", f"alpha_v = {ex.alpha_v:.15g}"])


def cmd_epsilon(args):
    cert = find_epsilon(_params(args))
    rec = {"epsilon": cert.epsilon, "f1": cert.f1, "f1_tilde": cert.f1_tilde, "f2": cert.f2}
    _emit(args, rec, [f"{k} = {v:.15g}" for k, v in rec.items()])


def _shoot(params, args):
    if params.m == 1 and (params.p != params.q or params.a != params.b or args.system):
        lo, hi = args.bracket_lo or 0.1, args.bracket_hi or 10.0
        return shoot_system_m1(params, lo, hi, r_max=args.rmax)
    lo, hi = args.bracket_lo or 1e-3, args.bracket_hi or 1e3
    return shoot_scalar(params, r_max=args.rmax, bracket=(lo, hi))


def cmd_shoot(args):
    params = _params(args)
    outcome = _shoot(params, args)
    res = outcome.result
    rec = {**res.as_dict(), "parameter": outcome.parameter}
    if res.kind == "PositiveToRmax":
        line = f"PositiveToRmax slope_u={res.slope_u:.6f} slope_v={res.slope_v:.6f}"
    elif res.kind == "SignChange":
        line = f"SignChange r={res.r:.10g} component={res.component}"
    else:
        line = f"BlowUp r={res.r:.10g}"
    lines = [line] + ([f"shooting parameter = {outcome.parameter}"] if outcome.parameter != () else [])
    _emit(args, rec, lines)


def cmd_pohozaev(args):
    params = _params(args)
    m = params.m
    w0 = args.w0 if args.w0 else [1.0] * m
    z0 = args.z0 if args.z0 else list(w0)
    if len(w0) != m or len(z0) != m:
        raise UsageError(f"--w0/--z0 need {m} values each")
    traj = integrate(params, InitialData(tuple(w0), tuple(z0)), r_max=args.radius * 1.01, rtol=1e-12, atol=1e-30)
    lam = args.lam if args.lam is not None else (params.n - 2 * m) / 2
    report = pohozaev.residual(params, traj, args.radius, float(lam))
    print(report.table())
    print(json.dumps(report.as_dict()))


def cmd_scan(args):
    overrides = {"resume": True} if args.resume else {}
    if args.workers is not None:
        overrides["workers"] = args.workers
    config = ScanConfig.from_file(args.config, **overrides)
    records = run_scan(config)
    print(f"{len(records)} records -> {config.output_path}")


def cmd_curve(args):
    lo = args.p_lo
    hi = args.p_lo if args.p_hi is None else args.p_hi
    out = args.output or sys.stdout
    emit_curve(args.n, args.m, args.a, args.b, (lo, hi), args.resolution, out)


def cmd_poly_check(args):
    result = radialpoly.poly_check(cases=args.cases, seed=args.seed)
    for name, (ok, total) in result.items():
        print(f"{name}: {'PASS' if ok == total else 'FAIL'} ({ok}/{total} exact zeros)")
    if any(ok != total for ok, total in result.values()):
        raise LabError("identity failed on some polynomial")


def cmd_decay(args):
    params = _params(args)
    w0 = args.w0 if args.w0 else [1.0] * params.m
    z0 = args.z0 if args.z0 else list(w0)
    traj = integrate(params, InitialData(tuple(w0), tuple(z0)), r_max=args.rmax, stop_on_sign_change=True)
    print(json.dumps(estimates.pointwise_decay_check(params, traj).as_dict()))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="liouville-lab", description="Radial shooting and identity checks for coupled polyharmonic equations with power weights.")
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub = subs.add_parser("classify", help="position of (p, q) relative to the critical hyperbola")
    _add_params(sub)
    sub.add_argument("--json", action="store_true")
    sub.set_defaults(func=cmd_classify)

    sub = subs.add_parser("exponents", help="scaling exponents alpha_u, alpha_v")
    _add_params(sub)
    sub.add_argument("--json", action="store_true")
    sub.set_defaults(func=cmd_exponents)

    sub = subs.add_parser("epsilon", help="epsilon certificate for subcritical parameters")
    _add_params(sub)
    sub.add_argument("--json", action="store_true")
    sub.set_defaults(func=cmd_epsilon)

    sub = subs.add_parser("shoot", help="shoot from the origin and classify the outcome")
    _add_params(sub)
    sub.add_argument("--rmax", type=float, default=1e4)
    sub.add_argument("--bracket-lo", type=float, default=None, help="lower end of the shooting bracket")
    sub.add_argument("--bracket-hi", type=float, default=None, help="upper end of the shooting bracket")
    sub.add_argument("--system", action="store_true", help="m = 1: shoot on v(0) even when p = q")
    sub.add_argument("--json", action="store_true")
    sub.set_defaults(func=cmd_shoot)

    sub = subs.add_parser("pohozaev", help="Pohozaev identity residual on one trajectory (gamma = n - 2m - lambda)")
    _add_params(sub)
    sub.add_argument("--radius", type=float, default=1.0)
    sub.add_argument("--lambda", dest="lam", type=float, default=None, help="default (n-2m)/2")
    sub.add_argument("--w0", type=float, nargs="+", help="(-Δ)^i u(0), i < m (default all 1)")
    sub.add_argument("--z0", type=float, nargs="+", help="(-Δ)^i v(0), i < m (default --w0)")
    sub.set_defaults(func=cmd_pohozaev)

    sub = subs.add_parser("decay", help="pointwise decay report on one trajectory")
    _add_params(sub)
    sub.add_argument("--rmax", type=float, default=1e3)
    sub.add_argument("--w0", type=float, nargs="+")
    sub.add_argument("--z0", type=float, nargs="+")
    sub.set_defaults(func=cmd_decay)

    sub = subs.add_parser(
        "scan",
        help="(p, q) grid scan to JSON lines",
        description=CONFIG_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub.add_argument("config", help="key = value config file")
    sub.add_argument("--resume", action="store_true", help="skip cells already in the output")
    sub.add_argument("--workers", type=int, default=None, help="override the config's worker count")
    sub.set_defaults(func=cmd_scan)

    sub = subs.add_parser(
        "curve",
        help="critical hyperbola as CSV",
        description="CSV with header `p,q_critical`; p values with no q on the curve become `#` comment rows.",
    )
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--m", type=int, required=True)
    sub.add_argument("--a", type=_number, default=0)
    sub.add_argument("--b", type=_number, default=0)
    sub.add_argument("--p-lo", type=_number, required=True)
    sub.add_argument("--p-hi", type=_number, default=None)
    sub.add_argument("--resolution", type=int, default=1)
    sub.add_argument("--output", default=None, help="CSV path (default stdout)")
    sub.set_defaults(func=cmd_curve)

    sub = subs.add_parser("poly-check", help="exact check of the radial commutator identities")
    sub.add_argument("--cases", type=int, default=500)
    sub.add_argument("--seed", type=int, default=0)
    sub.set_defaults(func=cmd_poly_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args) or EXIT_OK
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LabError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


cli = main

if __name__ == "__main__":
    sys.exit(main())
