"""Command-line interface.

Exit codes: 0 success, 2 parse error, 3 degenerate geometry, 4 invalid
heptagon, 5 certificate failure.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import klein, walkgraph
from .heptagon import (
    DegenerateHeptagonError,
    HeptagonError,
    adjoint_formula,
    adjoint_nullspace,
    heptagon_from_json,
    residual,
    theta_witness,
)
from .projgeom import MONOMIALS, IdenticalLinesError, QuarticForm
from .ringexpr import RingExprError, eval_ring_expr
from .tautring import DimensionMismatchError, scorza_cycle_product

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DEGENERATE = 3
EXIT_INVALID = 4
EXIT_CERTIFICATE = 5


def _dump(data, stream=None):
    stream = stream or sys.stdout
    json.dump(data, stream, indent=2, sort_keys=False)
    stream.write("\n")


def _error(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_ring_eval(args) -> int:
    try:
        cls = eval_ring_expr(args.expr, args.n, args.g)
    except RingExprError as exc:
        return _error(str(exc), EXIT_PARSE)
    except IndexError as exc:
        return _error(str(exc), EXIT_PARSE)
    out = {"class": str(cls), "terms": cls.to_json()}
    try:
        deg = cls.degree()
        out["degree"] = str(deg)
    except DimensionMismatchError as exc:
        out["degree"] = None
        out["note"] = str(exc)
    if args.json:
        _dump(out)
    else:
        print(out["degree"] if out["degree"] is not None else out["class"])
    return EXIT_OK


def cmd_ring_scorza(args) -> int:
    try:
        value = scorza_cycle_product(args.n, args.g)
    except ValueError as exc:
        return _error(str(exc), EXIT_PARSE)
    print(value)
    return EXIT_OK


def cmd_walks(args) -> int:
    print(walkgraph.closed_walks(args.k))
    return EXIT_OK


def cmd_bound(args) -> int:
    ledger = walkgraph.bound_ledger()
    if args.json:
        _dump(ledger)
        return EXIT_OK
    print(f"biscribed triangles          {ledger['biscribed_triangles']}")
    print(f"closed walks of length 7     {ledger['closed_walks_7']}")
    print(f"excluded configurations      {ledger['biscribed_triangles']} * "
          f"{ledger['closed_walks_7']} / 6 = {ledger['excluded_configurations']}")
    print(f"scorza cycle product (n=7)   {ledger['scorza_cycle_product_7']}")
    print(f"heptagon upper bound         {ledger['scorza_cycle_product_7']} - "
          f"{ledger['excluded_configurations']} = {ledger['heptagon_upper_bound']}")
    print(f"per theta modulo D7          {ledger['heptagon_upper_bound']} / "
          f"{ledger['dihedral_order']} = {ledger['per_theta_modulo_dihedral']}")
    print(f"per quartic modulo D7        {ledger['even_theta_characteristics']} * "
          f"{ledger['per_theta_modulo_dihedral']} = {ledger['per_quartic_modulo_dihedral']}")
    return EXIT_OK


def _load_heptagon(path: str):
    with (sys.stdin if path == "-" else open(path)) as fh:
        data = json.load(fh)
    return heptagon_from_json(data)


def cmd_adjoint(args) -> int:
    try:
        h = _load_heptagon(args.file)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        return _error(f"cannot parse heptagon JSON: {exc}", EXIT_PARSE)
    except (HeptagonError, IdenticalLinesError) as exc:
        return _error(str(exc), EXIT_INVALID)
    except (ValueError, ZeroDivisionError) as exc:
        return _error(f"cannot parse heptagon JSON: {exc}", EXIT_PARSE)

    res = residual(h)
    report = {
        "residual_points": [
            {"pair": list(pair), "kind": "inner" if res.is_inner(pair) else "outer",
             "point": p.to_json()}
            for pair, p in res.points.items()
        ]
    }
    forms = {}
    if args.method in ("formula", "both"):
        forms["formula"] = adjoint_formula(h)
    if args.method in ("nullspace", "both"):
        try:
            Q, dim = adjoint_nullspace(h)
        except DegenerateHeptagonError as exc:
            return _error(str(exc), EXIT_DEGENERATE)
        forms["nullspace"] = Q
        report["kernel_dim"] = dim
    if "formula" in forms and forms["formula"].is_zero():
        return _error("adjoint formula vanishes identically", EXIT_DEGENERATE)
    report["monomials"] = [list(e) for e in MONOMIALS]
    report["adjoint"] = {name: QuarticForm(Q.normalized()).to_json() for name, Q in forms.items()}
    if len(forms) == 2:
        report["methods_agree"] = forms["formula"].proportional(forms["nullspace"])
    if args.check_theta:
        report["theta_witness"] = theta_witness(h).to_json()
    if args.svg:
        from .plot import PlotError, PlotSpec, heptagon_svg

        try:
            svg = heptagon_svg(h, next(iter(forms.values())), PlotSpec(resolution=args.resolution))
        except PlotError as exc:
            return _error(str(exc), EXIT_INVALID)
        with open(args.svg, "w") as fh:
            fh.write(svg)
    _dump(report)
    if report.get("methods_agree") is False:
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_klein_certify(args) -> int:
    try:
        report, ctx, fiber = klein.certify(
            full_fiber=args.full_fiber,
            prime_start=args.modular_prime,
            alpha_root=args.alpha_root,
            jobs=args.jobs,
            exact_jacobian=not args.skip_exact,
            nullspace=not args.skip_exact,
        )
    except klein.CertificateError as exc:
        return _error(str(exc), EXIT_CERTIFICATE)
    if args.export:
        with open(args.export, "w") as fh:
            _dump(klein.export_fiber(ctx, fiber), fh)
    _dump(report.to_json())
    return EXIT_OK if report.passed else EXIT_CERTIFICATE


def cmd_fiber_export(args) -> int:
    try:
        report, ctx, fiber = klein.certify(alpha_root=args.alpha_root, jobs=args.jobs)
    except klein.CertificateError as exc:
        return _error(str(exc), EXIT_CERTIFICATE)
    data = klein.export_fiber(ctx, fiber)
    if args.output in (None, "-"):
        _dump(data)
    else:
        with open(args.output, "w") as fh:
            _dump(data, fh)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heptagons", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    ring = sub.add_parser("ring", help="tautological ring calculator")
    ring_sub = ring.add_subparsers(dest="ring_command", required=True)
    ev = ring_sub.add_parser("eval", help="expand an expression and print its degree")
    ev.add_argument("-n", type=int, required=True, help="number of curve factors")
    ev.add_argument("-g", type=int, default=3, help="genus (default 3)")
    ev.add_argument("--json", action="store_true", help="print the expanded class as JSON")
    ev.add_argument("expr")
    ev.set_defaults(func=cmd_ring_eval)
    sc = ring_sub.add_parser("scorza", help="degree of S12 S23 ... S1n")
    sc.add_argument("-n", type=int, required=True)
    sc.add_argument("-g", type=int, default=3)
    sc.set_defaults(func=cmd_ring_scorza)

    walks = sub.add_parser("walks", help="closed walks on the biscribed-triangle graph")
    walks.add_argument("--k", type=int, default=7)
    walks.set_defaults(func=cmd_walks)

    bound = sub.add_parser("bound", help="recompute the upper-bound ledger")
    bound.add_argument("--json", action="store_true")
    bound.set_defaults(func=cmd_bound)

    adj = sub.add_parser("adjoint", help="adjoint quartic of a heptagon given as JSON")
    adj.add_argument("file", help="heptagon JSON file, or - for stdin")
    adj.add_argument("--method", choices=("formula", "nullspace", "both"), default="formula")
    adj.add_argument("--check-theta", action="store_true")
    adj.add_argument("--svg", metavar="PATH")
    adj.add_argument("--resolution", type=int, default=200, help="marching-squares grid size")
    adj.set_defaults(func=cmd_adjoint)

    kl = sub.add_parser("klein", help="Klein quartic certificates")
    kl_sub = kl.add_subparsers(dest="klein_command", required=True)
    cert = kl_sub.add_parser("certify", help="run every certificate and print the report")
    cert.add_argument("--full-fiber", action="store_true", help="Jacobian rank at all 336 heptagons")
    cert.add_argument("--modular-prime", type=int, default=None,
                      help=f"search for a usable prime from here (env {klein.PRIME_ENV})")
    cert.add_argument("--alpha-root", type=int, default=0, choices=range(7))
    cert.add_argument("--skip-exact", action="store_true",
                      help="skip exact elimination on the base heptagon (modular only)")
    cert.add_argument("--export", metavar="PATH", help="write the fiber as heptagon JSON")
    cert.add_argument("--jobs", type=int, default=1)
    cert.set_defaults(func=cmd_klein_certify)

    fib = sub.add_parser("fiber", help="fiber of the adjoint map over the Klein quartic")
    fib_sub = fib.add_subparsers(dest="fiber_command", required=True)
    exp = fib_sub.add_parser("export", help="print all 336 heptagons")
    exp.add_argument("-o", "--output", default=None)
    exp.add_argument("--alpha-root", type=int, default=0, choices=range(7))
    exp.add_argument("--jobs", type=int, default=1)
    exp.set_defaults(func=cmd_fiber_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
