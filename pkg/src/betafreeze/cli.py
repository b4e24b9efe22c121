"""Command-line front end.

    betafreeze sample  --ensemble hermite --k 4 --beta 10 --n 40000 --seed 42 --out s.csv
    betafreeze model   --ensemble laguerre --k 4 --gamma 1
    betafreeze density --ensemble hermite --k 4 --beta 2 --out grid.csv
    betafreeze verify  --suite invariants --kmax 10
    betafreeze diag airy --kvalues 10,100,400

Exit status: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from typing import Optional

import numpy as np

from . import __version__
from .density import (
    default_grid,
    exact_level_density_beta2,
    gaussian_mixture,
    mixture_pdf,
    semicircle_pdf,
)
from .ensembles import HERMITE, LAGUERRE, EnsembleSpec, SpecError, resolve_laguerre_params, sample_spectra
from .fluctuations import airy_edge_diagnostic, hermite_fluctuation_model, laguerre_fluctuation_model
from .verify import (
    VerificationReport,
    chi_normal_limit_check,
    density_agreement_check,
    fluctuation_mc_check,
    invariant_suite,
    perturbation_order_check,
)

__all__ = ["main", "dispatch", "resolve_laguerre_params"]

SUITES = ("invariants", "chi", "fluctuation", "perturbation", "density", "all")


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _add_spec_args(p: argparse.ArgumentParser, beta_required: bool = True, beta_default=None):
    p.add_argument("--ensemble", choices=(HERMITE, LAGUERRE), default=HERMITE)
    p.add_argument("--k", type=_positive_int, default=4)
    if beta_required:
        p.add_argument("--beta", type=float, required=beta_default is None, default=beta_default)
    else:
        p.add_argument("--beta", type=float, default=None)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--gamma", type=float, help="Laguerre: hold gamma fixed (case a)")
    g.add_argument("--p", type=float, help="Laguerre: hold the weight power p fixed (case b)")
    g.add_argument("--a", type=float, help="Laguerre: ensemble parameter a directly")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="betafreeze", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"betafreeze {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample scaled spectra to CSV")
    _add_spec_args(p)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")

    p = sub.add_parser("model", help="emit the large-beta fluctuation model as JSON")
    _add_spec_args(p, beta_required=False)
    p.add_argument("--out", default="-")

    p = sub.add_parser("density", help="emit level-density curves on a grid as CSV")
    _add_spec_args(p)
    p.add_argument("--grid", type=_positive_int, default=512, help="number of grid points")
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--out", default="-")

    p = sub.add_parser("verify", help="run verification suites, emit a JSON report")
    p.add_argument("--suite", choices=SUITES, default="invariants")
    _add_spec_args(p, beta_default=1e4)
    p.add_argument("--kmax", type=_positive_int, default=20)
    p.add_argument("--gammas", type=_float_list, default=[0.5, 1.0, 5.0])
    p.add_argument("--r", type=float, default=1e4, help="chi degrees of freedom for the chi suite")
    p.add_argument("--eps", type=_float_list, default=[1e-2, 5e-3, 2.5e-3])
    p.add_argument("--n", type=_positive_int, default=100_000)
    p.add_argument("--nbins", type=_positive_int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")

    p = sub.add_parser("diag", help="diagnostics")
    dsub = p.add_subparsers(dest="diag", required=True)
    a = dsub.add_parser("airy", help="largest-root edge scaling sequence (k, m_k, t_k)")
    a.add_argument("--kvalues", type=_int_list, default=[10, 50, 100, 200, 400])
    a.add_argument("--out", default="-")
    return parser


def _resolve_spec(args, parser, need_beta=True) -> EnsembleSpec:
    try:
        if args.ensemble == HERMITE:
            if args.gamma is not None or args.p is not None or args.a is not None:
                parser.error("--gamma/--p/--a apply only to --ensemble laguerre")
            return EnsembleSpec.hermite(args.k, args.beta)
        if args.gamma is None and args.p is None and args.a is None:
            parser.error("Laguerre needs exactly one of --gamma, --p, --a")
        return EnsembleSpec.laguerre(args.k, args.beta, a=args.a, gamma=args.gamma, p=args.p)
    except SpecError as exc:
        parser.error(str(exc))


def _meta(spec: Optional[EnsembleSpec] = None, seed=None, **extra) -> dict:
    m = {"version": __version__}
    if spec is not None:
        m["spec"] = spec.as_dict()
    if seed is not None:
        m["seed"] = seed
    m.update(extra)
    return m


def _meta_line(meta: dict) -> str:
    return "# betafreeze " + json.dumps(meta, sort_keys=True) + "\n"


def _write(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)


def cmd_sample(args, parser) -> int:
    spec = _resolve_spec(args, parser)
    vals = sample_spectra(spec, args.n, args.seed)
    buf = io.StringIO()
    buf.write(_meta_line(_meta(spec, args.seed, n=args.n)))
    buf.write("sample_index,eig_index,value\n")
    k = spec.k
    for s in range(vals.shape[0]):
        row = vals[s]
        for i in range(k):
            buf.write(f"{s},{i + 1},{fmt(row[i])}\n")
    _write(args.out, buf.getvalue())
    return 0


def cmd_model(args, parser) -> int:
    if args.ensemble == HERMITE:
        if args.gamma is not None or args.p is not None or args.a is not None:
            parser.error("--gamma/--p/--a apply only to --ensemble laguerre")
        model = hermite_fluctuation_model(args.k)
        meta = _meta(kind=HERMITE, k=args.k)
    else:
        if args.gamma is not None:
            gamma = args.gamma
            if not gamma > 0:
                parser.error(f"gamma must be positive, got {gamma}")
            meta = _meta(kind=LAGUERRE, k=args.k, gamma=gamma)
        else:
            if args.beta is None:
                parser.error("--p / --a need --beta to resolve gamma")
            spec = _resolve_spec(args, parser)
            gamma = spec.gamma
            meta = _meta(spec)
        model = laguerre_fluctuation_model(args.k, gamma)
    _write(args.out, model.to_json(meta) + "\n")
    return 0


def cmd_density(args, parser) -> int:
    spec = _resolve_spec(args, parser)
    if spec.kind == HERMITE:
        model = hermite_fluctuation_model(spec.k)
    else:
        model = laguerre_fluctuation_model(spec.k, spec.gamma)
    mix = gaussian_mixture(model, spec.beta)
    grid = default_grid(model, args.grid)
    lo = grid[0] if args.lo is None else args.lo
    hi = grid[-1] if args.hi is None else args.hi
    if not lo < hi:
        parser.error(f"--lo must be below --hi (got {lo}, {hi})")
    grid = np.linspace(lo, hi, args.grid)
    mixture = mixture_pdf(mix, grid)
    exact = exact_level_density_beta2(spec.k, grid) if spec.kind == HERMITE and spec.beta == 2.0 else None
    semi = semicircle_pdf(grid) if spec.kind == HERMITE else None
    buf = io.StringIO()
    buf.write(_meta_line(_meta(spec, grid=args.grid, lo=float(lo), hi=float(hi))))
    buf.write("x,mixture,exact_beta2,semicircle\n")
    for i, x in enumerate(grid):
        e = fmt(exact[i]) if exact is not None else ""
        c = fmt(semi[i]) if semi is not None else ""
        buf.write(f"{fmt(x)},{fmt(mixture[i])},{e},{c}\n")
    _write(args.out, buf.getvalue())
    return 0


def cmd_verify(args, parser) -> int:
    report = VerificationReport()
    suites = ("invariants", "chi", "fluctuation", "perturbation", "density") if args.suite == "all" else (args.suite,)
    spec = None
    if any(s in suites for s in ("fluctuation", "density")):
        spec = _resolve_spec(args, parser)
    try:
        for s in suites:
            if s == "invariants":
                report.extend(invariant_suite(args.kmax, args.gammas))
            elif s == "chi":
                report.extend(chi_normal_limit_check(args.r, args.n, args.seed))
            elif s == "fluctuation":
                report.extend(fluctuation_mc_check(spec, args.n, args.seed))
            elif s == "perturbation":
                report.extend(perturbation_order_check(max(args.k, 2), args.eps, args.seed))
            elif s == "density":
                report.extend(density_agreement_check(spec, args.n, args.nbins, args.seed))
    except ValueError as exc:
        parser.error(str(exc))
    meta = _meta(spec, args.seed, suite=args.suite, n=args.n)
    _write(args.out, report.to_json(meta) + "\n")
    return 0 if report.overall else 1


def cmd_diag(args, parser) -> int:
    if any(k < 2 for k in args.kvalues):
        parser.error("--kvalues entries must be >= 2")
    rows = airy_edge_diagnostic(args.kvalues)
    buf = io.StringIO()
    buf.write(_meta_line(_meta(diag="airy", kvalues=list(args.kvalues))))
    buf.write("k,m_k,t_k\n")
    for k, m, t in rows:
        buf.write(f"{k},{fmt(m)},{fmt(t)}\n")
    _write(args.out, buf.getvalue())
    return 0


COMMANDS = {
    "sample": cmd_sample,
    "model": cmd_model,
    "density": cmd_density,
    "verify": cmd_verify,
    "diag": cmd_diag,
}


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return COMMANDS[args.command](args, parser)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    except SpecError as exc:
        print(f"betafreeze: error: {exc}", file=sys.stderr)
        return 2


def main(argv=None):
    sys.exit(dispatch(argv))


if __name__ == "__main__":
    main()
