"""Command-line front end.

    helmholtz-ermakov spectrum  --profile P --interval A B [--count N]
    helmholtz-ermakov evolve    --profile P --lambda L --span T0 T1
    helmholtz-ermakov phases    --profile P --lambda L --span T0 T1 [--rho SRC]
    helmholtz-ermakov adiabatic --profile P --lambda L --span T0 T1
    helmholtz-ermakov selftest

Exit status: 0 on success, 2 on usage errors, 3 on numerical failure.
Data output carries no timestamps, so identical flags give identical bytes;
``--meta`` prepends a provenance header.
"""

import argparse
import csv
import io
import json
import math
import platform
import sys
from importlib import metadata
from pathlib import Path

import numpy as np

from . import adiabatic, phases, selfcheck
from .ermakov import (
    Convention,
    OscState,
    PinneyState,
    adiabatic_seed,
    evolve_coupled,
    solve_pinney,
)
from .exceptions import DomainError, NumericalError
from .ode import IntegrationSettings
from .profiles import PowerLaw, ProfileParseError, parse_profile, render_profile
from .spectrum import SpectrumProblem, solve_dirichlet_eigenvalues

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

SPECTRUM_COLUMNS = ("n", "lambda", "nodes", "boundary_residual")
EVOLVE_COLUMNS = ("t", "q", "p", "rho", "rho_dot", "ermakov_invariant", "theta_unwrapped")
PHASES_COLUMNS = ("n", "lewis_phase", "geometric_phase", "berry_phase", "dynamical_angle", "geometric_angle")
ADIABATIC_COLUMNS = (
    "t",
    "rho_leading",
    "rho_hankel",
    "rho_polynomial",
    "rho_numeric",
    "residual_leading",
    "residual_hankel",
    "residual_polynomial",
    "residual_numeric",
)
DEFAULT_FORMAT = {"spectrum": "csv", "evolve": "csv", "phases": "json", "adiabatic": "csv", "selftest": "text"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(x):
    """17 significant digits; integers stay integers."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if x is None:
        return "nan"
    # + 0.0 folds -0.0 into 0.0
    return format(float(x) + 0.0, ".17g")


def _json_value(x):
    if isinstance(x, dict):
        return {k: _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x) + 0.0
    return x if math.isfinite(x) else None


# ---------------------------------------------------------------------------
# argument parsing


def _finite(text):
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(val):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return val


def _positive(text):
    val = _finite(text)
    if not val > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return val


def _count(text):
    try:
        val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if val < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1: {text!r}")
    return val


def _level(text):
    try:
        val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if val < 0:
        raise argparse.ArgumentTypeError(f"quantum numbers are non-negative: {text!r}")
    return val


def _common(p, formats):
    p.add_argument("--format", choices=formats, help="output format (default depends on command)")
    p.add_argument("--output", "-o", help="write to this file instead of standard output")
    p.add_argument("--meta", action="store_true", help="prepend a provenance header")


def _profile_args(p, span=True):
    p.add_argument("--profile", required=True, help="e.g. const:c=1, powerlaw:b=1,m=2, table:file=phi.csv")
    if span:
        p.add_argument("--lambda", dest="lam", type=_positive, required=True, help="eigenvalue parameter")
        p.add_argument("--span", nargs=2, type=_finite, required=True, metavar=("T0", "T1"))


def _tolerance_args(p):
    p.add_argument("--rel-tol", type=_positive, default=1e-10)
    p.add_argument("--abs-tol", type=_positive, default=1e-12)
    p.add_argument("--max-steps", type=_count, default=10_000_000)


def build_parser():
    parser = _Parser(prog="helmholtz-ermakov", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("spectrum", help="Dirichlet eigenvalues of psi'' + lambda phi psi = 0")
    _profile_args(p, span=False)
    p.add_argument("--interval", nargs=2, type=_finite, required=True, metavar=("A", "B"))
    p.add_argument("--count", type=_count, default=5)
    p.add_argument("--tol", type=_positive, default=1e-10, help="absolute tolerance on each eigenvalue")
    _common(p, ("csv", "json"))

    p = sub.add_parser("evolve", help="coupled oscillator and Milne-Pinney trajectory")
    _profile_args(p)
    p.add_argument("--q0", type=_finite, default=1.0)
    p.add_argument("--p0", type=_finite, default=0.0)
    p.add_argument("--rho0", type=_positive, help="default: the local equilibrium of the Pinney equation")
    p.add_argument("--rho-dot0", type=_finite, default=0.0)
    p.add_argument("--convention", choices=("standard", "rescaled"), default="standard")
    p.add_argument("--samples", type=_count, default=501)
    _tolerance_args(p)
    _common(p, ("csv", "json"))

    p = sub.add_parser("phases", help="classical angles and quantum phases along rho(t)")
    _profile_args(p)
    p.add_argument("--rho", choices=("numeric", "adiabatic", "hankel", "polynomial"), default="numeric")
    p.add_argument("--convention", choices=("standard", "rescaled"),
                   help="default: standard for --rho numeric, rescaled otherwise")
    p.add_argument("--n", nargs="+", type=_level, default=[0], help="quantum numbers")
    p.add_argument("--period", type=_positive, help="cycle length for the Hannay angle and Berry phase")
    p.add_argument("--closure-tol", type=_positive, default=1e-6)
    p.add_argument("--rho0", type=_positive)
    p.add_argument("--rho-dot0", type=_finite, default=0.0)
    _tolerance_args(p)
    _common(p, ("csv", "json"))

    p = sub.add_parser("adiabatic", help="leading, closed-form and numeric rho side by side")
    _profile_args(p)
    p.add_argument("--samples", type=_count, default=101)
    _tolerance_args(p)
    _common(p, ("csv", "json"))

    p = sub.add_parser("selftest", help="run the built-in numerical checks")
    p.add_argument("--only", nargs="+", choices=tuple(selfcheck.CHECKS), metavar="KEY")
    _common(p, ("text", "json"))
    return parser


def _profile(text):
    try:
        return parse_profile(text)
    except ProfileParseError as exc:
        raise UsageError(f"--profile: {exc}") from None


def _span(args):
    t0, t1 = args.span
    if t0 == t1:
        raise UsageError("--span: T0 and T1 must differ")
    return t0, t1


def _settings(args):
    return IntegrationSettings(rel_tol=args.rel_tol, abs_tol=args.abs_tol, max_steps=args.max_steps)


def _convention(name):
    return Convention(name)


# ---------------------------------------------------------------------------
# commands; each returns (columns, rows, payload) where payload is the JSON object


def cmd_spectrum(args):
    profile = _profile(args.profile)
    a, b = args.interval
    if not a < b:
        raise UsageError("--interval: A must be less than B")
    problem = SpectrumProblem(profile, (a, b), args.count, tol=args.tol)
    result = solve_dirichlet_eigenvalues(problem)
    rows = [(p.n, p.eigenvalue, p.nodes, p.boundary_residual) for p in result.pairs]
    payload = {
        "profile": render_profile(profile),
        "interval": [a, b],
        "eigenpairs": [dict(zip(SPECTRUM_COLUMNS, r)) for r in rows],
    }
    return SPECTRUM_COLUMNS, rows, payload


def cmd_evolve(args):
    profile = _profile(args.profile)
    t0, t1 = _span(args)
    convention = _convention(args.convention)
    osc0 = OscState(t0, args.q0, args.p0)
    pin0 = None
    if args.rho0 is not None:
        pin0 = PinneyState(t0, args.rho0, args.rho_dot0)
    if convention is Convention.STANDARD:
        traj = evolve_coupled(profile, args.lam, osc0, t1, pin0, _settings(args))
    else:
        traj = adiabatic.evolve_rescaled(profile, args.lam, osc0, t1, pin0, _settings(args))
    t = np.linspace(t0, t1, args.samples)
    t[-1] = t1
    y = traj.dense(t)
    inv = traj.invariant(t)
    theta = traj.unwrapped_angle(t)
    rows = [tuple(r) for r in np.column_stack([t, y, inv, theta])]
    payload = {
        "profile": render_profile(profile),
        "lambda": args.lam,
        "convention": args.convention,
        "span": [t0, t1],
        "steps": traj.dense.n_steps,
        "columns": list(EVOLVE_COLUMNS),
        "rows": [list(r) for r in rows],
    }
    return EVOLVE_COLUMNS, rows, payload


def _lewis_index(profile):
    """Lewis index n with m = -4n/(2n+1), or None when m is not in that family."""
    if not isinstance(profile, PowerLaw) or profile.m in (0.0, -2.0):
        return None
    n = -profile.m / (2 * profile.m + 4)
    k = round(n)
    if k >= 1 and abs(n - k) <= 1e-12 * k:
        return int(k)
    return None


def _rho_path(args, profile, t0, t1, convention):
    lam = args.lam
    if args.rho == "numeric":
        if args.rho0 is None:
            pin0 = adiabatic_seed(profile, lam, t0, convention)
            pin0 = PinneyState(t0, pin0.rho, args.rho_dot0)
        else:
            pin0 = PinneyState(t0, args.rho0, args.rho_dot0)
        return solve_pinney(profile, lam, pin0, t1, convention, _settings(args))
    lo, hi = min(t0, t1), max(t0, t1)
    if args.rho == "adiabatic":
        return adiabatic.leading_path(profile, lo, hi, lam, convention)
    if not isinstance(profile, PowerLaw):
        raise UsageError(f"--rho {args.rho} needs a powerlaw profile")
    if lo <= 0:
        raise UsageError(f"--rho {args.rho} needs a span inside t > 0")
    if args.rho == "hankel":
        return adiabatic.hankel_path(adiabatic.PowerLawCase(profile.b, profile.m, lam), lo, hi, convention)
    n = _lewis_index(profile)
    if n is None:
        raise UsageError("--rho polynomial needs m = -4n/(2n+1) for a positive integer n")
    return adiabatic.polynomial_path(adiabatic.PolynomialCase(n, profile.b, lam), lo, hi, convention)


def cmd_phases(args):
    profile = _profile(args.profile)
    t0, t1 = _span(args)
    name = args.convention or ("standard" if args.rho == "numeric" else "rescaled")
    convention = _convention(name)
    if args.period is not None and abs(t1 - t0) < args.period * (1 - 1e-12):
        raise UsageError("--period must not exceed the span length")
    if args.period is not None and t1 < t0:
        raise UsageError("--period needs T1 > T0")
    path = _rho_path(args, profile, t0, t1, convention)

    report = phases.angle_report(path, t0, t1)
    total = phases.inverse_rho_squared_integral(path, t0, t1)
    hannay = None
    if args.period is not None:
        hannay = phases.hannay_angle(path, args.period, t0, args.closure_tol)
    closed = None
    if isinstance(profile, PowerLaw) and min(t0, t1) > 0:
        closed = adiabatic.geometric_angle_powerlaw(profile.m, profile.b, t0, t1)

    levels = []
    for n in args.n:
        q = phases.quantum_report(n, path, t0, t1, args.period, args.closure_tol)
        levels.append({
            "n": n,
            "lewis_phase": q.lewis_phase,
            "geometric_phase": q.geometric_phase,
            "berry_phase": q.berry_phase,
        })
    rows = [
        (lv["n"], lv["lewis_phase"], lv["geometric_phase"], lv["berry_phase"],
         report.dynamical_angle, report.geometric_angle)
        for lv in levels
    ]
    payload = {
        "profile": render_profile(profile),
        "lambda": args.lam,
        "span": [t0, t1],
        "rho_source": args.rho,
        "convention": name,
        "dynamical_angle": report.dynamical_angle,
        "geometric_angle": report.geometric_angle,
        "angle_total": report.total,
        "inverse_rho_squared_integral": total,
        "hannay_angle": hannay,
        "powerlaw_geometric_angle": closed,
        "hbar": phases.HBAR,
        "levels": levels,
    }
    return PHASES_COLUMNS, rows, payload


def cmd_adiabatic(args):
    profile = _profile(args.profile)
    t0, t1 = _span(args)
    lam = args.lam
    lo, hi = min(t0, t1), max(t0, t1)
    t = np.linspace(t0, t1, args.samples)
    t[-1] = t1
    nan = np.full(t.shape, np.nan)

    def residual(derivs):
        return adiabatic.rescaled_residual(profile, lam, t, derivs)

    lead = adiabatic.leading_derivatives(profile, t)
    hankel = poly = None
    if isinstance(profile, PowerLaw) and lo > 0:
        hankel = adiabatic.hankel_derivatives(adiabatic.PowerLawCase(profile.b, profile.m, lam), t)
        n = _lewis_index(profile)
        if n is not None:
            poly = adiabatic.polynomial_derivatives(adiabatic.PolynomialCase(n, profile.b, lam), t)

    # the numeric solution starts on the closed-form branch when there is one
    seed = hankel if hankel is not None else lead
    pin0 = PinneyState(t0, float(seed[0][0]), float(seed[1][0]))
    numeric = solve_pinney(profile, lam, pin0, t1, Convention.RESCALED, _settings(args))
    rho_num = numeric.dense(t)[:, 0]

    cols = [
        t,
        lead[0],
        hankel[0] if hankel is not None else nan,
        poly[0] if poly is not None else nan,
        rho_num,
        residual(lead),
        residual(hankel) if hankel is not None else nan,
        residual(poly) if poly is not None else nan,
        numeric.residual(t),
    ]
    rows = [tuple(r) for r in np.column_stack(cols)]
    payload = {
        "profile": render_profile(profile),
        "lambda": lam,
        "convention": "rescaled",
        "span": [t0, t1],
        "columns": list(ADIABATIC_COLUMNS),
        "rows": [list(r) for r in rows],
    }
    return ADIABATIC_COLUMNS, rows, payload


def cmd_selftest(args):
    results = selfcheck.run_checks(args.only)
    payload = {
        "checks": [
            {"key": r.key, "title": r.title, "error": r.error, "limit": r.limit,
             "seconds": r.seconds, "passed": r.passed}
            for r in results
        ],
        "passed": all(r.passed for r in results),
    }
    return None, results, payload


COMMANDS = {
    "spectrum": cmd_spectrum,
    "evolve": cmd_evolve,
    "phases": cmd_phases,
    "adiabatic": cmd_adiabatic,
    "selftest": cmd_selftest,
}


# ---------------------------------------------------------------------------
# output


def _meta(args, argv):
    try:
        version = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        version = "unknown"
    return {
        "program": "helmholtz-ermakov",
        "version": version,
        "argv": list(argv),
        "python": platform.python_version(),
        "numpy": np.__version__,
    }


def render(command, fmt_name, columns, rows, payload, meta=None):
    if fmt_name == "json":
        obj = {"command": command, **payload}
        if meta is not None:
            obj["meta"] = meta
        return json.dumps(_json_value(obj), indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    if meta is not None:
        for key, val in meta.items():
            buf.write(f"# {key}: {' '.join(val) if isinstance(val, list) else val}\n")
    if fmt_name == "text":
        for r in rows:
            buf.write(r.line() + "\n")
        n_pass = sum(r.passed for r in rows)
        buf.write(f"{n_pass}/{len(rows)} checks passed\n")
        return buf.getvalue()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([fmt(x) for x in r])
    return buf.getvalue()


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        columns, rows, payload = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"helmholtz-ermakov: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"helmholtz-ermakov: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        where = "unknown" if exc.t is None else repr(float(exc.t))
        print(
            f"helmholtz-ermakov: numerical failure in {exc.module} at t={where}: {exc.reason}",
            file=sys.stderr,
        )
        return EXIT_NUMERICAL

    text = render(args.command, args.format or DEFAULT_FORMAT[args.command], columns, rows, payload,
                  _meta(args, argv) if args.meta else None)
    if args.output:
        try:
            Path(args.output).write_text(text)
        except OSError as exc:
            print(f"helmholtz-ermakov: usage error: cannot write {args.output}: {exc.strerror}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.write(text)
    if args.command == "selftest" and not payload["passed"]:
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
