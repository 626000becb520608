"""Command-line interface: ``efdyn {analyze,integrate,solve,param,verify,sweep}``.

Tables go out as CSV (single header, LF endings, 17 significant digits),
reports as JSON. Exit codes: 0 success, 1 argument or domain error,
2 numerical failure, 3 verification threshold exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from . import closedforms as cf
from . import parametric as pm
from .dynamics import Method, integrate_physical, integrate_system
from .errors import DomainError, IntegrationError, QuadratureError
from .invariants import (PhysicalState, ermakov_c_invariant, ermakov_invariant,
                         invariant_drift, invariant_first, invariant_second,
                         pseudo_hamiltonian)
from .model import (EfParams, PointIndex, center_condition, fixed_points,
                    rosenau_status)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3
TOL_ENV = "EFDYN_DEFAULT_TOL"


class CliError(Exception):
    def __init__(self, message, code=EXIT_USAGE):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, str):
        return x
    return "%.17g" % x


def real(text: str) -> float:
    """Locale-independent float that must be finite."""
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return x


def grid(text: str) -> tuple[float, float, int]:
    """``lo:hi:count`` triple."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected lo:hi:count, got {text!r}")
    lo, hi = real(parts[0]), real(parts[1])
    try:
        count = int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"count must be an integer, got {parts[2]!r}") from None
    if count < 1:
        raise argparse.ArgumentTypeError("count must be positive")
    if count > 1 and not hi > lo:
        raise argparse.ArgumentTypeError("range needs hi > lo")
    return lo, hi, count


def grid_values(g: tuple[float, float, int]) -> list[float]:
    lo, hi, count = g
    if count == 1:
        return [lo]
    return [lo + (i * (hi - lo)) / (count - 1) for i in range(count)]


_NUMERIC_VALUE = re.compile(r"^-[\d.]")


def _join_negative_values(argv: Sequence[str]) -> list[str]:
    # "--range -1:1:5" would otherwise be read as an unknown option
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and _NUMERIC_VALUE.match(argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


class _Output:
    def __init__(self, path: Optional[str]):
        self.path = path
        self.handle = None

    def __enter__(self):
        if self.path in (None, "-"):
            self.handle = sys.stdout
        else:
            self.handle = open(self.path, "w", newline="\n", encoding="utf-8")
        return self.handle

    def __exit__(self, *exc):
        if self.handle is not sys.stdout:
            self.handle.close()
        else:
            sys.stdout.flush()
        return False


def write_csv(out, header: Sequence[str], rows) -> None:
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(fmt(x) for x in row) + "\n")


def _params(args) -> EfParams:
    try:
        return EfParams(args.alpha, args.lam, args.n)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _add_params(p: argparse.ArgumentParser, required: bool = True):
    p.add_argument("--alpha", type=real, required=required)
    p.add_argument("--lambda", dest="lam", type=real, required=required)
    p.add_argument("--n", type=real, required=required)


def _add_out(p: argparse.ArgumentParser):
    p.add_argument("--out", default="-", help="output file, '-' for stdout (default)")


# ---------------------------------------------------------------------------
# analyze

@dataclass
class AnalysisReport:
    params: dict
    equilibria: list
    rosenau: dict
    center: dict

    @classmethod
    def build(cls, p: EfParams) -> "AnalysisReport":
        eqs = fixed_points(p)
        st = rosenau_status(p)
        cc = center_condition(p)
        return cls(
            params={"alpha": p.alpha, "lambda": p.lam, "n": p.n},
            equilibria=[{
                "index": e.index.value, "u": e.u, "v": e.v,
                "delta1": e.delta1, "delta2": e.delta2, "discriminant": e.discriminant,
                "kind": e.kind.value,
                "coincident_with": [c.value for c in e.coincident_with],
            } for e in eqs],
            rosenau={"first": st.first, "second": st.second},
            center={"necessary": cc.necessary, "sufficient": cc.sufficient},
        )

    def to_dict(self) -> dict:
        return {"params": self.params, "equilibria": self.equilibria,
                "rosenau": self.rosenau, "center": self.center}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        d = json.loads(text)
        return cls(d["params"], d["equilibria"], d["rosenau"], d["center"])


def cmd_analyze(args) -> int:
    p = _params(args)
    if p.n == 1.0:
        print("warning: n = 1, P3 is undefined and omitted", file=sys.stderr)
    report = AnalysisReport.build(p)
    with _Output(args.out) as out:
        out.write(report.to_json() + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# integrate

def _method_args(p: argparse.ArgumentParser):
    p.add_argument("--method", choices=[m.value for m in Method], default="rkf45")
    p.add_argument("--dt", type=real, help="step for euler/rk4")
    p.add_argument("--tol", type=real, help="tolerance for rkf45 (default 1e-10)")


def _check_method(args):
    if args.method != "rkf45" and args.dt is None:
        raise CliError(f"--method {args.method} needs --dt")


def cmd_integrate(args) -> int:
    p = _params(args)
    _check_method(args)
    code = EXIT_OK
    try:
        traj = integrate_system(p, args.u0, args.v0, args.t_max, args.method,
                                dt=args.dt, tol=args.tol)
        reason = traj.stop_reason
    except IntegrationError as exc:
        traj, reason = exc.trajectory, "step size underflow"
    if reason != "completed":
        code = EXIT_NUMERIC
    with _Output(args.out) as out:
        write_csv(out, ("t", "u", "v"), ((t, u, v) for t, (u, v) in zip(traj.times, traj.states)))
        if code != EXIT_OK:
            out.write(f"# stopped: {reason}\n")
    if code != EXIT_OK:
        print(f"integration stopped: {reason}", file=sys.stderr)
    return code


# ---------------------------------------------------------------------------
# solve

SOLVE_FAMILIES = {
    "pseudo": cf.Family.PSEUDO_ERF,
    "ermakov": cf.Family.ERMAKOV_GENERAL,
    "pinney": cf.Family.PINNEY,
    "ermakov-partner": cf.Family.ERMAKOV_PARTNER,
    "sech": cf.Family.SECH_SOLITON,
    "diode": cf.Family.DIODE_PARTNER,
    "aslanov": None,
}


def _closed_form(args) -> cf.ClosedForm:
    fam = SOLVE_FAMILIES[args.family]
    if fam is None:
        if args.k is None and args.p is None:
            return cf.closed_form(cf.Family.ASLANOV_PARTICULAR)
        return cf.closed_form(cf.Family.ASLANOV_GENERAL,
                              k=-1.0 if args.k is None else args.k,
                              p=-1.5 if args.p is None else args.p)
    return cf.closed_form(fam, H=args.H, Y0=args.Y0, branch=args.branch, C=args.C)


def _add_family_params(p: argparse.ArgumentParser):
    p.add_argument("--H", type=real, default=0.0, help="pseudo: Hamiltonian level")
    p.add_argument("--Y0", type=real, default=0.0, help="pseudo: centre of the profile")
    p.add_argument("--branch", choices=["+", "-"], default="+", help="pseudo: branch sign")
    p.add_argument("--C", type=real, default=0.0, help="ermakov: integration constant")
    p.add_argument("--k", type=real, help="aslanov: coefficient")
    p.add_argument("--p", type=real, help="aslanov: exponent")


def cmd_solve(args) -> int:
    form = _closed_form(args)
    lo, hi = form.domain
    xs = grid_values(args.range)
    for x in (xs[0], xs[-1]):
        if not form.contains(x):
            edge = lo if x <= lo else hi
            raise DomainError(f"x={fmt(x)} is outside the domain ({fmt(lo)}, {fmt(hi)}) "
                              f"of family {args.family}; boundary at {fmt(edge)}")
    header = ("x", "f", "df") if args.with_slope else ("x", "f")
    rows = ((x, form(x), form.slope(x)) if args.with_slope else (x, form(x)) for x in xs)
    with _Output(args.out) as out:
        write_csv(out, header, rows)
    return EXIT_OK


# ---------------------------------------------------------------------------
# param

def cmd_param(args) -> int:
    tau = args.tau
    if args.family == "first":
        curve = pm.curve_first(args.lam, args.c1, args.c2, args.a, args.b, tau, tau0=args.tau0)
    elif args.family == "second":
        curve = pm.curve_second(args.lam, args.c1, args.c2, args.a, args.b, args.sign, tau,
                                tau0=args.tau0)
    else:
        curve = pm.curve_lambda0(args.c1, args.c2, args.b, args.sign, tau, tau0=args.tau0)
    check = args.emit_check and curve.family == pm.FIRST
    if args.emit_check and not check:
        print("warning: --emit-check applies to the first family only", file=sys.stderr)
    ratios = curve.identity_ratio() if check else None
    header = ("tau", "Y", "q", "check") if check else ("tau", "Y", "q")
    with _Output(args.out) as out:
        out.write(",".join(header) + "\n")
        for k, (start, stop) in enumerate(curve.segments):
            if k > 0:
                out.write("# segment\n")
            for i in range(start, stop):
                row = [curve.tau[i], curve.Y[i], curve.q[i]]
                if check:
                    row.append(ratios[i])
                out.write(",".join(fmt(x) for x in row) + "\n")
    print(f"alpha = {fmt(curve.alpha)}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify

def default_tol() -> float:
    text = os.environ.get(TOL_ENV)
    if text is None:
        return 1e-6
    try:
        x = float(text)
    except ValueError:
        raise CliError(f"{TOL_ENV} is not a number: {text!r}") from None
    if not x > 0.0:
        raise CliError(f"{TOL_ENV} must be positive")
    return x


def applicable_invariants(p: EfParams) -> dict:
    """Invariant name -> function of PhysicalState, or None when not applicable."""
    st = rosenau_status(p)
    out = {}
    out["pseudo_hamiltonian"] = (pseudo_hamiltonian
                                 if (p.alpha, p.lam, p.n) == (-1.0, -2.0, -1.0) else None)
    ermakov = (p.alpha, p.lam, p.n) == (-1.0, -2.0, -3.0)
    out["ermakov_invariant"] = ermakov_invariant if ermakov else None
    out["ermakov_c_invariant"] = ermakov_c_invariant if ermakov else None
    out["invariant_first"] = ((lambda s: invariant_first(p, s))
                              if st.first and p.lam != -1.0 else None)
    out["invariant_second"] = ((lambda s: invariant_second(p, s))
                               if st.second and p.lam != 0.0 else None)
    return out


def cmd_verify(args) -> int:
    tol = args.tol if args.tol is not None else default_tol()
    if not tol > 0.0:
        raise CliError("--tol must be positive")
    form = _closed_form(args) if args.family else None
    if args.alpha is None or args.lam is None or args.n is None:
        if form is None or form.equation is None:
            raise CliError("--alpha, --lambda and --n are required without --family")
        p = form.equation
    else:
        p = _params(args)

    Y0, q0, qY0 = args.Y0_ic, args.q0, args.qY0
    if None in (Y0, q0, qY0):
        if form is None:
            raise CliError("initial conditions --y-start --q0 --qy0 are required without --family")
        pts = form.interior(2)
        Y0 = pts[0] if Y0 is None else Y0
        q0, qY0 = form(Y0), form.slope(Y0)
    Y_max = args.Y_max
    if Y_max is None:
        Y_max = form.interior(2)[1] if form is not None else Y0 + 1.0

    try:
        traj = integrate_physical(p, Y0, q0, qY0, Y_max, args.method, dt=args.dt,
                                  tol=args.int_tol)
    except IntegrationError as exc:
        raise CliError(str(exc), EXIT_NUMERIC) from None
    if traj.stop_reason != "completed":
        raise CliError(f"integration stopped: {traj.stop_reason}", EXIT_NUMERIC)

    states = traj.physical_states()
    report: dict = {}
    ok = True
    for name, fn in applicable_invariants(p).items():
        if fn is None:
            report[name] = "not applicable"
            continue
        d = invariant_drift(fn(s) for s in states)
        report[name] = {"max_abs_dev": d.max_abs_dev, "rel_dev": d.rel_dev}
        ok = ok and d.rel_dev < tol
    if form is not None:
        xs = form.interior(args.points)
        res = max(form.residual(x) for x in xs)
        report["residual"] = {"family": args.family, "points": len(xs), "max_residual": res}
        ok = ok and res < tol
    report["tolerance"] = tol
    report["passed"] = ok
    with _Output(args.out) as out:
        out.write(json.dumps(report, indent=2) + "\n")
    return EXIT_OK if ok else EXIT_VERIFY


# ---------------------------------------------------------------------------
# sweep

SWEEP_HEADER = ("lambda", "n", "p3_kind", "delta1", "delta2", "necessary", "sufficient")


def sweep_cell(cell: tuple[float, float, float]) -> tuple:
    alpha, lam, n = cell
    p = EfParams(alpha, lam, n)
    cc = center_condition(p)
    p3 = fixed_points(p).get(PointIndex.P3)
    if p3 is None:
        return lam, n, "undefined", math.nan, math.nan, cc.necessary, cc.sufficient
    return lam, n, p3.kind.value, p3.delta1, p3.delta2, cc.necessary, cc.sufficient


def sweep_rows(alpha: float, lams: Sequence[float], ns: Sequence[float], jobs: int = 1) -> list:
    """Rows in row-major order (lambda outer, n inner) whatever the worker count."""
    cells = [(alpha, lam, n) for lam in lams for n in ns]
    if jobs <= 1:
        return [sweep_cell(c) for c in cells]
    chunk = max(1, len(cells) // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(sweep_cell, cells, chunksize=chunk))


def cmd_sweep(args) -> int:
    if args.jobs < 1:
        raise CliError("--jobs must be at least 1")
    try:
        EfParams(args.alpha, 0.0, 0.0)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    rows = sweep_rows(args.alpha, grid_values(args.lam), grid_values(args.n), args.jobs)
    with _Output(args.out) as out:
        write_csv(out, SWEEP_HEADER, rows)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="efdyn", description="Emden-Fowler phase-plane toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="equilibria, Rosenau lines and center condition (JSON)")
    _add_params(p)
    _add_out(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("integrate", help="orbit of the autonomous system (CSV t,u,v)")
    _add_params(p)
    p.add_argument("--u0", type=real, required=True)
    p.add_argument("--v0", type=real, required=True)
    p.add_argument("--t-max", dest="t_max", type=real, required=True)
    _method_args(p)
    _add_out(p)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("solve", help="sample a closed-form solution (CSV x,f)")
    p.add_argument("--family", choices=sorted(SOLVE_FAMILIES), required=True)
    _add_family_params(p)
    p.add_argument("--range", type=grid, required=True, help="lo:hi:count")
    p.add_argument("--with-slope", action="store_true", help="add a df column")
    _add_out(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("param", help="sample a parametric solution family (CSV tau,Y,q)")
    p.add_argument("--family", choices=["first", "second", "lambda0"], required=True)
    p.add_argument("--lambda", dest="lam", type=real, default=0.0)
    p.add_argument("--c1", type=real, default=1.0)
    p.add_argument("--c2", type=real, default=0.0)
    p.add_argument("--a", type=real, default=1.0)
    p.add_argument("--b", type=real, default=1.0)
    p.add_argument("--sign", choices=["+", "-"], default="+")
    p.add_argument("--tau", type=grid, required=True, help="lo:hi:count")
    p.add_argument("--tau0", type=real, help="lower limit of the Theta integral")
    p.add_argument("--emit-check", action="store_true",
                   help="append q^2 alpha^(1/lambda) / (tau^2 Y), first family only")
    _add_out(p)
    p.set_defaults(func=cmd_param)

    p = sub.add_parser("verify", help="invariant drift and closed-form residuals (JSON)")
    _add_params(p, required=False)
    p.add_argument("--y-start", dest="Y0_ic", type=real, help="initial Y")
    p.add_argument("--q0", type=real)
    p.add_argument("--qy0", dest="qY0", type=real)
    p.add_argument("--y-max", dest="Y_max", type=real)
    p.add_argument("--family", choices=sorted(SOLVE_FAMILIES))
    _add_family_params(p)
    p.add_argument("--points", type=int, default=50, help="residual sample count")
    p.add_argument("--tol", type=real, help=f"pass threshold (default 1e-6 or ${TOL_ENV})")
    p.add_argument("--method", choices=[m.value for m in Method], default="rkf45")
    p.add_argument("--dt", type=real)
    p.add_argument("--int-tol", type=real, default=1e-10, help="rkf45 tolerance")
    _add_out(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="P3 classification atlas over (lambda, n) (CSV)")
    p.add_argument("--alpha", type=real, required=True)
    p.add_argument("--lambda", dest="lam", type=grid, required=True, help="lo:hi:count")
    p.add_argument("--n", type=grid, required=True, help="lo:hi:count")
    p.add_argument("--jobs", type=int, default=1)
    _add_out(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_negative_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "method", None) is not None and args.command == "verify":
            _check_method(args)
        return args.func(args)
    except CliError as exc:
        print(f"efdyn {args.command}: {exc}", file=sys.stderr)
        return exc.code
    except (QuadratureError, IntegrationError) as exc:
        print(f"efdyn {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DomainError, ValueError) as exc:
        print(f"efdyn {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
