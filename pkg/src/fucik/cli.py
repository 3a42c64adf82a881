"""Command-line front end.

Subcommands: ``inradius``, ``curve``, ``classify``, ``converge``,
``profile`` and ``viscosity``.  Exit status is 0 on success, 2 for invalid
input, 3 when a solver runs out of budget or too few curve samples succeed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__, geometry, one_dim, packing, spectrum, svg
from .errors import BudgetExceeded, FucikError, ValidationError

SCHEMA = "fucik/1"
EXIT_OK, EXIT_ERROR, EXIT_INVALID, EXIT_BUDGET = 0, 1, 2, 3
MIN_OK_FRACTION = 0.9


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _index_list(text: str) -> list[int]:
    """``3``, ``1,2,5`` or an inclusive range ``1..4``."""
    try:
        if ".." in text:
            lo, hi = (int(v) for v in text.split("..", 1))
            values = list(range(lo, hi + 1))
        else:
            values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an index, list or range like 1..4, got {text!r}") from exc
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"indices must be positive, got {text!r}")
    return values


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from exc
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fucik", description="Limit Fucik spectrum of planar domains and intervals.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, fmt=("json",), domain=True):
        if domain:
            p.add_argument("--domain", metavar="PATH", help="domain JSON file")
            p.add_argument("--interval", action="store_true", help="use the unit interval (0, 1)")
        p.add_argument("--tol", type=_positive, help="solver tolerance (length units)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=None, help="cap on worker threads")
        p.add_argument("--format", choices=fmt, default=fmt[0])
        p.add_argument("--out", metavar="PATH", help="write the result here instead of stdout")

    p = sub.add_parser("inradius", help="largest inscribed ball")
    common(p)

    p = sub.add_parser("curve", help="sample the curve C2 (or the 1D families with --interval)")
    common(p, fmt=("csv", "json", "svg"))
    p.add_argument("--t-min", type=_positive, default=2.0**-6, help="smallest weight (slope s with --interval)")
    p.add_argument("--t-max", type=_positive, default=2.0**6)
    p.add_argument("--samples", type=int, default=65)
    p.add_argument("--k", type=_index_list, default=None, help="curve indices for --interval, e.g. 1..4")
    p.add_argument("--branch", choices=one_dim.BRANCHES)
    p.add_argument("--p", "--p-list", dest="p", type=_float_list, default=None, help="finite exponents, comma separated")
    p.add_argument("--infinity", action="store_true", help="include the p = infinity curves")
    p.add_argument("--svg", metavar="PATH", help="also write an SVG plot")

    p = sub.add_parser("classify", help="Type I / IIA / IIB classification")
    common(p)

    p = sub.add_parser("converge", help="distance of finite-p curve points to the limit")
    common(p, fmt=("json", "csv"), domain=False)
    p.add_argument("--k", type=_index_list, required=True)
    p.add_argument("--branch", choices=one_dim.BRANCHES)
    p.add_argument("--s", type=_positive, default=1.0)
    p.add_argument("--p", "--p-list", dest="p", type=_float_list, default=[4, 8, 16, 32, 64, 128, 256, 512])

    p = sub.add_parser("profile", help="two-bump eigenfunction profile on (0, 1)")
    common(p, fmt=("csv", "json"), domain=False)
    p.add_argument("--ell", type=float, required=True)
    p.add_argument("--p", "--p-list", dest="p", type=_float_list, default=None)
    p.add_argument("--infinity", action="store_true")
    p.add_argument("--samples", type=int, default=201)

    p = sub.add_parser("viscosity", help="residual of the limit equation for the two-bump profile")
    common(p, domain=False)
    p.add_argument("--ell", type=float, required=True)
    p.add_argument("--alpha", type=_positive, help="default 2/ell")
    p.add_argument("--beta", type=_positive, help="default 2/(1-ell)")
    p.add_argument("--n", type=int, default=1000, help="grid size")
    return parser


# ---------------------------------------------------------------------------


def _domain(args) -> geometry.DomainSpec:
    if args.interval and args.domain:
        raise ValidationError("give either --domain or --interval, not both")
    if args.interval:
        return geometry.interval()
    if not args.domain:
        raise ValidationError("--domain PATH (or --interval) is required")
    return geometry.load_domain(args.domain)


def _envelope(payload: dict) -> dict:
    return {"schema": SCHEMA, "tool_version": __version__, **payload}


def _json(payload: dict) -> str:
    return json.dumps(_envelope(payload), indent=2, allow_nan=True) + "\n"


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, newline="")
    else:
        sys.stdout.write(text)


def cmd_inradius(args) -> int:
    domain = _domain(args)
    sol = packing.inradius(domain, args.tol)
    _emit(args, _json({
        "command": "inradius",
        "radius": sol.radius,
        "center": list(sol.center),
        "certified_gap": sol.certified_gap,
        "iterations": sol.iterations,
    }))
    return EXIT_OK


def _interval_curves(args) -> int:
    ks = args.k or [1, 2, 3, 4]
    ps: list[float] = list(args.p or [])
    if args.infinity or not ps:
        ps.append(math.inf)
    s_values = spectrum.log_grid(args.t_min, args.t_max, args.samples)
    families = [
        fam
        for p in ps
        for k in ks
        for fam in one_dim.families_for(k, p)
        if args.branch is None or fam.branch == args.branch
    ]
    if not families:
        raise ValidationError("no curve family matches the requested k and branch")
    rows = one_dim.family_rows(families, s_values)
    series = []
    for fam in families:
        pts = [r for r in rows if (r["k"], r["branch"], r["p"]) == (fam.k, fam.branch, fam.p)]
        label = f"k={fam.k} {fam.branch} p={fam.p}"
        series.append((label, [r["alpha_root"] for r in pts], [r["beta_root"] for r in pts]))
    level = 2.0 if families[0].p == math.inf else one_dim.pi_p(families[0].p)
    plot = svg.render(series, level, "1D spectrum on (0, 1)")
    if args.format == "json":
        _emit(args, _json({"command": "curve", "rows": rows}))
    elif args.format == "svg":
        _emit(args, plot)
    else:
        _emit(args, one_dim.rows_to_csv(rows, one_dim.FAMILY_COLUMNS))
    if args.svg:
        Path(args.svg).write_text(plot)
    return EXIT_OK


def cmd_curve(args) -> int:
    if args.interval and not args.domain:
        return _interval_curves(args)
    domain = _domain(args)
    curve = spectrum.curve_C2(
        domain, args.t_min, args.t_max, args.samples, args.tol, seed=args.seed, threads=args.threads
    )
    ok = [s for s in curve.samples if s.ok]
    plot = svg.render([("C2", [s.alpha for s in ok], [s.beta for s in ok])], curve.trivial_level, "C2 curve")
    if args.format == "json":
        _emit(args, _json({"command": "curve", **curve.to_dict()}))
    elif args.format == "svg":
        _emit(args, plot)
    else:
        _emit(args, curve.to_csv())
    if args.svg:
        Path(args.svg).write_text(plot)
    failed = [s for s in curve.samples if not s.ok]
    for s in failed:
        print(f"warning: sample t={s.t!r} failed: {s.error}", file=sys.stderr)
    return EXIT_OK if curve.ok_fraction >= MIN_OK_FRACTION else EXIT_BUDGET


def cmd_classify(args) -> int:
    domain = _domain(args)
    result = spectrum.classify(domain, args.tol, seed=args.seed)
    _emit(args, _json({"command": "classify", **result.to_dict()}))
    return EXIT_OK


def _families(ks: list[int], branch: str | None) -> list[tuple[int, str]]:
    out = []
    for k in ks:
        for fam in one_dim.families_for(k):
            if branch is None or fam.branch == branch:
                out.append((k, fam.branch))
    if not out:
        raise ValidationError("no curve family matches the requested k and branch")
    return out


def cmd_converge(args) -> int:
    reports = [one_dim.converge_check(k, b, args.s, args.p) for k, b in _families(args.k, args.branch)]
    if args.format == "csv":
        rows = [{"k": r.k, "branch": r.branch, "s": r.s, **row} for r in reports for row in r.rows]
        _emit(args, one_dim.rows_to_csv(rows, ("k", "branch", "s", "p", "alpha_root", "beta_root", "distance")))
    else:
        _emit(args, _json({"command": "converge", "reports": [r.to_dict() for r in reports]}))
    return EXIT_OK


def cmd_profile(args) -> int:
    if args.samples < 2:
        raise ValidationError("--samples must be at least 2")
    x = np.linspace(0.0, 1.0, args.samples)
    if args.p and args.infinity:
        raise ValidationError("give either --p or --infinity, not both")
    if args.p:
        if len(args.p) != 1:
            raise ValidationError("profile takes a single --p value")
        u = one_dim.eigenfunction_p(args.ell, args.p[0], x)
        p = args.p[0]
    else:
        u = one_dim.eigenfunction_infinity(args.ell, x)
        p = math.inf
    if args.format == "json":
        _emit(args, _json({"command": "profile", "ell": args.ell, "p": p, "x": x.tolist(), "u": u.tolist()}))
    else:
        _emit(args, one_dim.profile_csv(x, u))
    return EXIT_OK


def cmd_viscosity(args) -> int:
    pair = one_dim.limit_pair(args.ell)
    pair = one_dim.FucikPair(args.alpha or pair.alpha, args.beta or pair.beta)
    grid = one_dim.GridFunction1D.from_function(lambda x: one_dim.eigenfunction_infinity(args.ell, x), args.n)
    report = one_dim.viscosity_residual(grid, pair)
    _emit(args, _json({
        "command": "viscosity",
        "ell": args.ell,
        "alpha": pair.alpha,
        "beta": pair.beta,
        "n": args.n,
        **report.to_dict(),
    }))
    return EXIT_OK


COMMANDS = {
    "inradius": cmd_inradius,
    "curve": cmd_curve,
    "classify": cmd_classify,
    "converge": cmd_converge,
    "profile": cmd_profile,
    "viscosity": cmd_viscosity,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.threads is not None and args.threads < 1:
            raise ValidationError("--threads must be at least 1")
        return COMMANDS[args.command](args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (FucikError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID if isinstance(exc, ValueError) else EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
