"""Command-line front end: ``freqgap {scan,certify,verify,export}``.

Exit codes: 0 success or definitive verdict, 1 failed check or
indeterminate verdict, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys

import numpy as np

from .errors import (CheckFailed, FreqGapError, IndeterminateSign,
                     QuadratureFailure)
from .identity import IDENTITY_TOL, verify_identity
from .oscillation import (NEAR_INTEGER, VerdictStatus, find_special_points,
                          gap_verdict)
from .profile import (HALF_PI, Method, ProfileQuery, certified_sign,
                      endpoint_values, profile_on_grid)
from .solutions import catalog, check_solution

SCAN_COLUMNS = ("lambda", "n", "p_half", "dp_half", "sign_p", "sign_dp",
                "verdict", "zeros_p", "crits_p", "total")


def _real(x):
    return format(float(x), ".17g")


def _sign_symbol(value, err):
    try:
        return certified_sign(value, err).symbol
    except IndeterminateSign:
        return "?"


def scan_row(lam, dim):
    """One CSV row (as a dict) for the scan table."""
    q = ProfileQuery(lam, dim)
    ev = endpoint_values(q)
    verdict = gap_verdict(q)
    row = {
        "lambda": _real(lam), "n": str(dim),
        "p_half": _real(ev.p_half), "dp_half": _real(ev.dp_half),
        "sign_p": _sign_symbol(ev.p_half, ev.err_p),
        "sign_dp": _sign_symbol(ev.dp_half, ev.err_dp),
        "verdict": verdict.label, "zeros_p": "", "crits_p": "", "total": "",
    }
    try:
        rep = find_special_points(q)
    except IndeterminateSign:
        return row
    row.update(zeros_p=str(len(rep.zeros)), crits_p=str(len(rep.crits)),
               total=str(rep.total))
    return row


def _lambda_grid(lo, hi, step):
    count = int(math.floor((hi - lo) / step * (1 + 1e-12) + 1e-9)) + 1
    # rounding keeps decimal steps such as 0.1 free of representation noise
    return [round(lo + i * step, 12) for i in range(count)]


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline="", encoding="utf-8"), True


def cmd_scan(args, parser):
    if args.lam is not None:
        grid = [args.lam]
    else:
        if args.lambda_min is None or args.lambda_max is None:
            parser.error("scan needs --lambda or --lambda-min/--lambda-max")
        if not 0 < args.lambda_min < args.lambda_max or not args.step > 0:
            parser.error("need 0 < lambda-min < lambda-max and step > 0")
        grid = _lambda_grid(args.lambda_min, args.lambda_max, args.step)
    rows = [scan_row(lam, args.dim) for lam in grid]
    out, close = _open_out(args.out)
    try:
        writer = csv.DictWriter(out, fieldnames=SCAN_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if close:
            out.close()
    return 0


def _known_three_halves(lam):
    k = (lam - 1.5) / 2
    return k >= 0 and float(k).is_integer(), int(k) if k >= 0 else -1


def cmd_certify(args, parser):
    lam = args.lam if args.lam is not None else args.lam_pos
    dim = args.dim if args.dim is not None else args.dim_pos
    if lam is None or dim is None:
        parser.error("certify needs a frequency and a dimension")
    q = ProfileQuery(lam, dim)
    ev = endpoint_values(q)
    v = gap_verdict(q)
    print(f"lambda = {lam:.17g}, n = {dim}, mu = {q.mu:.17g}")
    print(f"p(pi/2)  = {ev.p_half: .17g}  (err {ev.err_p:.3g})")
    print(f"p'(pi/2) = {ev.dp_half: .17g}  (err {ev.err_dp:.3g})")
    print(f"sign product = {v.sign_product:.17g}, margin "
          f"{'ok' if v.margin_ok else 'FAILED'}")
    if v.status is VerdictStatus.EXCLUDED:
        print(f"excluded: interval ({2 * v.k},{2 * v.k + 1})")
        return 0
    if v.status is VerdictStatus.NOT_EXCLUDED:
        known, k = _known_three_halves(lam)
        if known:
            print(f"not excluded ({lam:g} = 2·{k}+3/2 is a known frequency)")
        else:
            f = math.floor(lam)
            print(f"not excluded (lambda lies in ({f},{f + 1}), not a gap interval)")
        return 0
    if v.status is VerdictStatus.INTEGER_BOUNDARY:
        print(f"integer: {lam:g} is a known frequency")
        return 0
    if abs(lam - round(lam)) < NEAR_INTEGER:
        print("indeterminate (near-integer)")
    else:
        print("indeterminate (endpoint values fail the margin rule)")
    return 1


def _parse_dims(text, parser):
    try:
        dims = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        parser.error(f"cannot parse dimensions {text!r}")
    if not dims:
        parser.error("no dimensions given")
    if min(dims) < 2:
        parser.error("dimension must be ≥ 2")
    return dims


def cmd_verify(args, parser):
    lam_max = args.lambda_max if args.lambda_max is not None else args.lam_max_pos
    if lam_max is None:
        parser.error("verify needs lambda_max")
    if lam_max < 1:
        parser.error("lambda_max must be >= 1")
    dims = _parse_dims(args.dims, parser)
    header = (f"{'solution':<16}{'n':>3}{'lambda':>8}{'min u':>12}{'max u_n':>12}"
              f"{'laplace':>11}{'lhs':>14}{'rhs':>14}{'rel.res':>10}  status")
    print(header)
    failures = []
    worst = 0.0
    for dim in dims:
        for sol in catalog(lam_max, dim):
            try:
                chk = check_solution(sol, samples=args.samples)
                rep = verify_identity(sol)
                verdict = gap_verdict(ProfileQuery(sol.lam, dim))
            except (CheckFailed, QuadratureFailure) as exc:
                failures.append(f"{sol}: {exc}")
                print(f"{sol.family.value:<16}{dim:>3}{sol.lam:>8g}  FAIL  {exc}")
                continue
            ok = rep.passed and verdict.status is not VerdictStatus.EXCLUDED
            worst = max(worst, rep.residual_rel)
            print(f"{sol.family.value:<16}{dim:>3}{sol.lam:>8g}"
                  f"{chk.min_thin_u:>12.3e}{chk.max_thin_un:>12.3e}"
                  f"{chk.max_laplacian:>11.2e}{rep.lhs:>14.6e}{rep.rhs:>14.6e}"
                  f"{rep.residual_rel:>10.1e}  {'ok' if ok else 'FAIL'}")
            if not ok:
                failures.append(f"{sol}: residual {rep.residual_rel:.3g}, "
                                f"verdict {verdict.label}")
    if failures:
        print(f"FAILED: {len(failures)} case(s); first offender: {failures[0]}")
        return 1
    print(f"all passed; max relative residual {worst:.3g} (tolerance {IDENTITY_TOL:g})")
    return 0


def profile_csv(lam, dim, points, method=Method.SERIES):
    phi = np.linspace(0.0, HALF_PI, points)
    p, dp, _, _ = profile_on_grid(ProfileQuery(lam, dim), phi, method)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("phi", "p", "dp"))
    for row in zip(phi, p, dp):
        writer.writerow([_real(x) for x in row])
    return buf.getvalue()


def profile_svg(lam, dim, points, method=Method.SERIES, width=640, height=400):
    """Static SVG 1.1 line plot of p (solid) and p' (dashed) on [0, pi/2]."""
    phi = np.linspace(0.0, HALF_PI, points)
    p, dp, _, _ = profile_on_grid(ProfileQuery(lam, dim), phi, method)
    pad = 40
    top = max(1.0, float(np.max(np.abs(np.r_[p, dp]))))

    def xy(x, y):
        return (pad + (width - 2 * pad) * x / HALF_PI,
                height / 2 - (height / 2 - pad) * y / top)

    def polyline(ys, extra):
        pts = " ".join("%.3f,%.3f" % xy(x, y) for x, y in zip(phi, ys))
        return f'<polyline fill="none" stroke="black" {extra}points="{pts}"/>'

    x0, y0 = xy(0.0, 0.0)
    x1, _ = xy(HALF_PI, 0.0)
    return "\n".join([
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<title>profile lambda={lam:g} n={dim}</title>',
        f'<line x1="{x0:.3f}" y1="{y0:.3f}" x2="{x1:.3f}" y2="{y0:.3f}" stroke="gray"/>',
        polyline(p, ""),
        polyline(dp, 'stroke-dasharray="4 3" '),
        "</svg>",
        "",
    ])


def cmd_export(args, parser):
    if args.lam is None or args.dim is None:
        parser.error("export needs --lambda and --dim")
    if args.points < 2:
        parser.error("--points must be >= 2")
    render = profile_csv if args.format == "csv" else profile_svg
    text = render(args.lam, args.dim, args.points, Method(args.method))
    try:
        out, close = _open_out(args.out)
        try:
            out.write(text)
        finally:
            if close:
                out.close()
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return 1
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="freqgap",
        description="Profiles, sign checks and frequency-gap verdicts for "
                    "homogeneous solutions of the thin obstacle problem.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("scan", help="CSV table of endpoint signs and verdicts")
    sp.add_argument("--lambda", dest="lam", type=float)
    sp.add_argument("--lambda-min", type=float)
    sp.add_argument("--lambda-max", type=float)
    sp.add_argument("--step", type=float, default=0.25)
    sp.add_argument("--dim", type=int, default=3)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("certify", help="gap verdict for one frequency")
    sp.add_argument("lam_pos", nargs="?", type=float, metavar="LAMBDA")
    sp.add_argument("dim_pos", nargs="?", type=int, metavar="DIM")
    sp.add_argument("--lambda", dest="lam", type=float)
    sp.add_argument("--dim", type=int)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("verify", help="check the explicit solution catalog")
    sp.add_argument("lam_max_pos", nargs="?", type=float, metavar="LAMBDA_MAX")
    sp.add_argument("--lambda-max", type=float)
    sp.add_argument("--dims", default="2,3,4,5")
    sp.add_argument("--samples", type=int, default=10_000)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("export", help="write profile samples as CSV or SVG")
    sp.add_argument("--lambda", dest="lam", type=float)
    sp.add_argument("--dim", type=int)
    sp.add_argument("--points", type=int, default=101)
    sp.add_argument("--format", choices=("csv", "svg"), default="csv")
    sp.add_argument("--method", choices=("series", "ode"), default="series")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_export)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("dim", "dim_pos"):
        value = getattr(args, name, None)
        if value is not None and value < 2:
            parser.error("dimension must be ≥ 2")
    for name in ("lam", "lam_pos", "lambda_min"):
        value = getattr(args, name, None)
        if value is not None and not (math.isfinite(value) and value > 0):
            parser.error("frequency must be finite and > 0")
    try:
        return args.func(args, parser)
    except FreqGapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
