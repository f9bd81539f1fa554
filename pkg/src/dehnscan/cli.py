#
# cli.py
#

# Command-line front end.  Every subcommand prints one JSON document with
# high-precision values rendered as decimal strings.

import argparse
import json
import sys

import mpmath as mp

from . import exactnum, geometry, lattice, ranklemmas, scanner
from .errors import DehnscanError


def _nstr(x, digits):
    return mp.nstr(mp.mpc(x), digits, strip_zeros=False)


def _parse_slopes(text):
    out = []
    for part in text.split(";"):
        p, q = part.split(",")
        out.append(geometry.Slope(int(p), int(q)))
    return out


def _parse_value(text):
    if "," in text:
        re_s, im_s = text.split(",")
        return mp.mpc(mp.mpf(re_s.strip()), mp.mpf(im_s.strip()))
    return mp.mpf(text.strip())


def cmd_solve(args):
    gs = geometry.load_gluing_system(args.file)
    shapes = geometry.solve_complete(gs, args.digits)
    with mp.workdps(args.digits + 10):
        u, v = geometry.peripheral_logs(gs, shapes)
        doc = {
            "name": gs.name,
            "shapes": [[_nstr(mp.re(z), args.digits), _nstr(mp.im(z), args.digits)] for z in shapes.z],
            "u": [_nstr(x, 8) for x in u],
            "v": [_nstr(x, 8) for x in v],
            "residual": _nstr(shapes.residual, 5),
        }
    print(json.dumps(doc, indent=1))
    return 0


def cmd_fill(args):
    gs = geometry.load_gluing_system(args.file)
    slopes = _parse_slopes(args.slope)
    fp = geometry.solve_filled(gs, slopes, args.digits)
    with mp.workdps(args.digits + 10):
        doc = {
            "name": gs.name,
            "slopes": [[s.p, s.q] for s in slopes],
            "shapes": [[_nstr(mp.re(z), args.digits), _nstr(mp.im(z), args.digits)] for z in fp.shapes.z],
            "u": [_nstr(x, args.digits) for x in fp.u],
            "v": [_nstr(x, args.digits) for x in fp.v],
            "t": [_nstr(x, args.digits) for x in fp.t],
            "residual": _nstr(fp.shapes.residual, 5),
        }
    print(json.dumps(doc, indent=1))
    return 0


def cmd_nz(args):
    from . import nzseries

    gs = geometry.load_gluing_system(args.file)
    phi = nzseries.fit_potential(gs, args.order, args.digits)
    coeffs = {}
    with mp.workdps(args.digits + 10):
        for (i, j), c in sorted(phi.coeffs.items()):
            coeffs["%d,%d" % (i, j)] = [_nstr(mp.re(c), args.digits), _nstr(mp.im(c), args.digits)]
    print(json.dumps({"name": gs.name, "order": args.order, "phi": coeffs}, indent=1))
    return 0


def cmd_sgi(args):
    from . import nzseries

    gs = geometry.load_gluing_system(args.file)
    phi = nzseries.fit_potential(gs, args.order, args.digits)
    tol = mp.mpf(args.tol) if args.tol else mp.mpf(10) ** (-args.digits // 2)
    flag = nzseries.sgi_test(phi, tol)
    m = nzseries.m22(phi)
    with mp.workdps(args.digits + 10):
        doc = {
            "name": gs.name,
            "sgi": bool(flag),
            "m22": [_nstr(mp.re(m), 20), _nstr(mp.im(m), 20)],
            "tol": repr(float(tol)),
        }
    print(json.dumps(doc, indent=1))
    return 0


def cmd_siegel(args):
    forms = [tuple(int(c) for c in part.split(",")) for part in args.forms.split(";")]
    n = args.n or len(forms[0])
    basis = lattice.siegel_basis(forms, n)
    doc = {
        "kind": "basis",
        "vectors": [list(v) for v in basis],
        "product_ratio": lattice.siegel_product_ratio(basis, forms),
    }
    print(json.dumps(doc, indent=1))
    return 0


def cmd_relation(args):
    with mp.workdps(args.digits + 25):
        values = [_parse_value(p) for p in args.values.split(";")]
    cert = lattice.integer_relation(values, args.bound, args.digits)
    doc = {
        "kind": cert.kind,
        "coefficients": list(cert.coefficients) if cert.found else None,
        "residual": repr(cert.residual) if cert.found else None,
    }
    print(json.dumps(doc, indent=1))
    return 0


def cmd_quadratic(args):
    with mp.workdps(args.digits + 25):
        tau = _parse_value(args.value)
    flag, witness = lattice.is_quadratic(tau, args.digits)
    doc = {
        "kind": "quadratic" if flag else "none-found",
        "coefficients": list(witness.coefficients) if witness else None,
        "residual": repr(witness.residual) if witness else None,
    }
    print(json.dumps(doc, indent=1))
    return 0


def cmd_ranklemma41(args):
    rows = tuple(tuple(int(c) for c in part.split(",")) for part in args.rows.split(";"))
    pairs = [tuple(int(c) for c in part.split(",")) for part in args.pairs.split(";")]
    base = exactnum.parse_int_polynomial(args.tau_poly) if args.tau_poly else ranklemmas.PLASTIC_POLY
    m = ranklemmas.TwistedMatrix(rows, base)
    s = ranklemmas.SlopeConstraint(pairs[0], pairs[1])
    result = ranklemmas.classify_lemma41(m, s)
    doc = {
        "rank": result.twisted_rank,
        "classification": result.classification.value,
        "matrix_form": result.matrix_form,
    }
    print(json.dumps(doc, indent=1))
    return 0


def cmd_scan(args):
    gs = geometry.load_gluing_system(args.file)
    tol = mp.mpf(args.tol) if args.tol else mp.mpf(10) ** (-args.digits // 2)
    mode = {"op": "op", "or": "or"}[args.mode]
    report = scanner.scan_cosmetic(gs, args.max, tol, mode=mode, digits=args.digits)
    print(report.to_json())
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(report.to_csv())
    return 1 if report.unexplained else 0


def cmd_scan2(args):
    gs = geometry.load_gluing_system(args.file)
    tol = mp.mpf(args.tol) if args.tol else mp.mpf(10) ** (-args.digits // 2)
    report = scanner.scan_two_cusp(
        gs, args.max, tol, digits=args.digits, dependence_bound=args.bound,
        symmetric=args.symmetric, sample=args.sample)
    print(report.to_json())
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(report.to_csv())
    return 1 if (report.unexplained or report.unexplained_dependence) else 0


def build_parser():
    ap = argparse.ArgumentParser(prog="dehnscan",
                                 description="hyperbolic Dehn-filling solvers and scanners")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="complete hyperbolic structure")
    p.add_argument("file")
    p.add_argument("--digits", type=int, default=60)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("fill", help="Dehn-filled structure")
    p.add_argument("file")
    p.add_argument("--slope", required=True, help="p,q[;p,q ...] one per cusp")
    p.add_argument("--digits", type=int, default=60)
    p.set_defaults(func=cmd_fill)

    p = sub.add_parser("nz", help="potential-function series fit")
    p.add_argument("file")
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--digits", type=int, default=60)
    p.set_defaults(func=cmd_nz)

    p = sub.add_parser("sgi", help="geometric-isolation test")
    p.add_argument("file")
    p.add_argument("--order", type=int, default=6)
    p.add_argument("--digits", type=int, default=60)
    p.add_argument("--tol", default=None)
    p.set_defaults(func=cmd_sgi)

    p = sub.add_parser("siegel", help="small kernel basis for integer forms")
    p.add_argument("--forms", required=True, help="a,b,...;a,b,...")
    p.add_argument("--n", type=int, default=None)
    p.set_defaults(func=cmd_siegel)

    p = sub.add_parser("relation", help="integer relation among values")
    p.add_argument("--values", required=True, help="decimal[;decimal...], complex as re,im")
    p.add_argument("--bound", type=int, default=lattice.DEFAULT_RELATION_BOUND)
    p.add_argument("--digits", type=int, default=120)
    p.set_defaults(func=cmd_relation)

    p = sub.add_parser("quadratic", help="quadraticity of a cusp shape")
    p.add_argument("--value", required=True, help="re,im")
    p.add_argument("--digits", type=int, default=100)
    p.set_defaults(func=cmd_quadratic)

    p = sub.add_parser("ranklemma41", help="twisted 2x2 rank classification")
    p.add_argument("--rows", required=True, help="a1,b1,c1,d1;a2,b2,c2,d2")
    p.add_argument("--pairs", required=True, help="p,q;p',q'")
    p.add_argument("--tau-poly", default=None, help="integer minimal polynomial of tau")
    p.set_defaults(func=cmd_ranklemma41)

    p = sub.add_parser("scan", help="cosmetic-filling collision scan (1 cusp)")
    p.add_argument("file")
    p.add_argument("--max", type=int, required=True)
    p.add_argument("--digits", type=int, default=60)
    p.add_argument("--tol", default=None)
    p.add_argument("--mode", choices=["op", "or"], default="op")
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("scan2", help="two-cusp holonomy-set scan")
    p.add_argument("file")
    p.add_argument("--max", type=int, required=True)
    p.add_argument("--digits", type=int, default=60)
    p.add_argument("--tol", default=None)
    p.add_argument("--bound", type=int, default=50)
    p.add_argument("--symmetric", action="store_true")
    p.add_argument("--sample", type=int, default=None)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_scan2)

    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DehnscanError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
