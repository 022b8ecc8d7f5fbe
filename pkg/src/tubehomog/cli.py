"""Command-line front end: ``tubehomog {classify,spectrum,pencil,verify}``.

Exit status: 0 success, 2 invalid input, 3 numerical failure.  A verify
run whose verdict fails still exits 0; the verdict is in the report.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .base import box_dirichlet_spectrum, sphere_volume
from .errors import ConvergenceFailure, PoleProximity, TubeHomogError
from .limits import homogenized_spectrum
from .pencil import PencilParams, pencil_spectrum
from .regimes import (Coupled, DecoupledThreshold, Pencil, ScaledLaplacian, ScalingLaw, classify,
                      limits_from_law, phase_point)
from .report import SCHEMA_VERSION, export_report, to_dict
from .simulator import convergence_study


class UsageError(Exception):
    pass


def rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid rational value: {text!r} (use e.g. 3/2)") from None


def positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number: {text!r}") from None
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return x


def nonneg_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number: {text!r}") from None
    if not x >= 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text!r}")
    return x


def rational_list(text: str) -> list[float]:
    return [float(rational(part)) for part in text.split(",") if part.strip()]


def _add_law(p: argparse.ArgumentParser, n_default: Optional[int]) -> None:
    g = p.add_argument_group("scaling law: d = d0 eps^alpha (or exp(-a/eps^2)), q = q0 eps^beta")
    g.add_argument("--n", type=int, default=n_default, help="dimension N")
    g.add_argument("--alpha", type=rational, help="hole-radius exponent (rational, e.g. 3/2)")
    g.add_argument("--a", dest="a_exp", type=positive_float, help="exponential hole radius rate (N=2)")
    g.add_argument("--beta", type=rational, help="tube-length exponent (rational)")
    g.add_argument("--d0", type=positive_float, default=1.0)
    g.add_argument("--q0", type=positive_float, default=1.0)


def _add_output(p: argparse.ArgumentParser, csv_ok: bool = True) -> None:
    p.add_argument("--format", choices=["json", "csv"] if csv_ok else ["json"], default="json")
    p.add_argument("--output", "-o", help="write here instead of stdout")


def _law(args) -> ScalingLaw:
    if args.n is None:
        raise UsageError("--n is required")
    if args.beta is None:
        raise UsageError("--beta is required")
    if (args.alpha is None) == (args.a_exp is None):
        raise UsageError("exactly one of --alpha and --a is required")
    if args.a_exp is not None:
        return ScalingLaw.exponential(args.a_exp, args.beta, q0=args.q0, N=args.n)
    return ScalingLaw.power(args.n, args.alpha, args.beta, d0=args.d0, q0=args.q0)


def _omega(args) -> float:
    if getattr(args, "omega", None) is not None:
        return args.omega
    if getattr(args, "n", None) is None:
        raise UsageError("--omega or --n is required")
    return sphere_volume(args.n)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tubehomog", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="limits, homogenized problem and phase label of a scaling law")
    _add_law(c, None)
    c.add_argument("--omega", type=positive_float)
    c.add_argument("--output", "-o")

    s = sub.add_parser("spectrum", help="homogenized spectrum over a box")
    s.add_argument("--regime", choices=["auto", "pencil", "decoupled", "scaled", "coupled"], default="auto")
    _add_law(s, None)
    s.add_argument("--p", type=nonneg_float)
    s.add_argument("--q", type=positive_float)
    s.add_argument("--c", type=positive_float, help="scale of the scaled Laplacian")
    s.add_argument("--v", type=nonneg_float, help="coupling constant V")
    s.add_argument("--omega", type=positive_float)
    s.add_argument("--sides", type=positive_float, nargs="+", default=[1.0, 1.0])
    s.add_argument("--count", type=int, default=20)
    s.add_argument("--n-max", type=int, default=3)
    _add_output(s)

    p = sub.add_parser("pencil", help="pencil eigenvalues with branch tags")
    p.add_argument("--p", type=positive_float, required=True)
    p.add_argument("--q", type=positive_float, required=True)
    p.add_argument("--omega", type=positive_float)
    p.add_argument("--n", type=int, default=2, help="dimension used for omega when --omega is absent")
    p.add_argument("--sides", type=positive_float, nargs="+", default=[1.0, 1.0])
    p.add_argument("--count", type=int, default=20, help="number of base eigenvalues")
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--cap", type=int, help="hard-branch roots per interval")
    p.add_argument("--pole-guard", type=positive_float, default=1e-9)
    _add_output(p)

    v = sub.add_parser("verify", help="direct finite-difference model against the limit (N=2)")
    _add_law(v, 2)
    v.add_argument("--eps", type=rational_list, default=[0.25, 0.125, 0.0625],
                   help="comma-separated, strictly decreasing (e.g. 1/4,1/8,1/16)")
    v.add_argument("--m", type=int, default=1)
    v.add_argument("--K", type=int, default=4, help="grid points per period")
    v.add_argument("--n-t", type=int)
    v.add_argument("--sides", type=positive_float, nargs=2, default=[1.0, 1.0])
    v.add_argument("--threshold", type=positive_float, default=0.1)
    v.add_argument("--tol", type=positive_float, default=1e-10, help="eigen-residual tolerance")
    v.add_argument("--window", type=positive_float, nargs=2, metavar=("LO", "HI"))
    v.add_argument("--workers", type=int, default=1)
    _add_output(v)
    return parser


def _classify(args):
    law = _law(args)
    limits = limits_from_law(law)
    omega = _omega(args)
    problem = classify(limits, law.N, omega)
    phase = phase_point(law) if law.alpha is not None and law.N > 2 else None
    out = {"schema_version": SCHEMA_VERSION, "regime": problem.kind, "N": law.N, "omega": omega,
           "p": limits.p, "q": limits.q, "r": limits.r, "D": limits.D, "Q": limits.Q, "phase": phase,
           "problem": {k: v for k, v in to_dict(problem).items() if k not in ("type", "schema_version")}}
    return out, "json"


def _explicit_problem(args):
    if args.regime == "pencil":
        if args.p is None or args.q is None:
            raise UsageError("--regime pencil requires --p and --q")
        if args.p == 0:
            raise UsageError("--regime pencil requires --p > 0 (use --regime decoupled for p = 0)")
        return Pencil(p=args.p, q=args.q, omega=_omega(args))
    if args.regime == "decoupled":
        if args.q is None:
            raise UsageError("--regime decoupled requires --q")
        return DecoupledThreshold(q=args.q)
    if args.regime == "scaled":
        if args.c is not None:
            return ScaledLaplacian(c=args.c)
        if args.p is None:
            raise UsageError("--regime scaled requires --c or --p")
        return ScaledLaplacian(c=1.0 / (1.0 + 0.5 * args.p * _omega(args)))
    if args.v is None:
        raise UsageError("--regime coupled requires --v")
    return Coupled(V=args.v)


def _spectrum(args):
    if args.count < 0:
        raise UsageError("--count must be non-negative")
    if args.regime == "auto":
        law = _law(args)
        problem = classify(limits_from_law(law), law.N, _omega(args))
    else:
        problem = _explicit_problem(args)
    base = box_dirichlet_spectrum(args.sides, args.count)
    return homogenized_spectrum(problem, base, args.count, n_max=args.n_max), args.format


def _pencil(args):
    params = PencilParams(p=args.p, q=args.q, omega=_omega(args), pole_guard=args.pole_guard)
    base = box_dirichlet_spectrum(args.sides, args.count)
    return pencil_spectrum(base, params, n_max=args.n_max, per_interval_cap=args.cap), args.format


def _verify(args):
    law = _law(args)
    if law.N != 2:
        raise UsageError("--n must be 2 for verify")
    window = tuple(args.window) if args.window else None
    report = convergence_study(law, args.eps, m=args.m, K=args.K, n_t=args.n_t, side_lengths=tuple(args.sides),
                               threshold=args.threshold, tol=args.tol, window=window, max_workers=args.workers)
    for row in report.rows:
        if row.error and row.error.startswith(("ConvergenceFailure", "PoleProximity")):
            raise ConvergenceFailure(row.error)
    return report, args.format


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"classify": _classify, "spectrum": _spectrum, "pencil": _pencil, "verify": _verify}
    try:
        result, fmt = handlers[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"tubehomog {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (PoleProximity, ConvergenceFailure) as exc:
        print(f"tubehomog {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 3
    except (TubeHomogError, ValueError) as exc:
        print(f"tubehomog {args.command}: error: {exc}", file=sys.stderr)
        return 2
    data = export_report(result, fmt)
    try:
        if args.output:
            with open(args.output, "wb") as fh:
                fh.write(data)
        else:
            sys.stdout.write(data.decode("utf-8"))
            sys.stdout.flush()
    except OSError as exc:
        print(f"tubehomog: cannot write output: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
