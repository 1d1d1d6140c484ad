"""Command-line front end.

Subcommands: ``approximate`` (one approximant), ``row`` (a row sweep with
analytics), ``verify`` (built-in verification suites), ``list-examples``.
Reports are JSON documents with every numeric field rendered as a string
tagged by the arithmetic mode and precision recorded at the top level;
exact-mode rationals serialize as "p/q" strings.  Row reports gain a CSV
sidecar with the per-order numeric series for plotting.

Exit codes: 0 success, 1 verification failure, 2 usage/spec error,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction

from . import verify as verify_mod
from .exceptions import NumericError, UsageError
from .hermite import MultiIndex, compute_hermite
from .numerics import Polynomial
from .pade import compute_incomplete
from .rows import (
    circle_compact,
    denominator_diff_values,
    denominator_rate,
    estimate_rstar,
    fit_rate_parity_aware,
    indicator_report,
    scalar_row,
    sup_error_values,
    system_row,
    telescope,
)
from .scalars import Context, Exact, format_exact, parse_exact
from .series import PowerSeries, SystemOfSeries, catalog, list_catalog, parse_series_spec

SCHEMA = "rowpade-report/1"


# ---------------------------------------------------------------------------
# literal parsing
# ---------------------------------------------------------------------------

def _parse_point(text: str) -> Exact:
    """Complex literal "re" or "re:im" with rational parts."""
    parts = text.split(":")
    if len(parts) > 2:
        raise UsageError(f"bad point literal {text!r} (use re or re:im)")
    re = parse_exact(parts[0])
    im = parse_exact(parts[1]) if len(parts) == 2 else Exact(0)
    return Exact(re.re, im.re)


def _parse_params(items) -> dict:
    params = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"bad --params entry {item!r} (use key=value)")
        key, value = item.split("=", 1)
        params[key.strip()] = value.strip()
    return params


def _parse_n_range(text: str):
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError as e:
        raise UsageError(f"bad range {text!r} (use a:b)") from e


def _parse_multi_index(text: str) -> MultiIndex:
    try:
        return MultiIndex.of(tuple(int(p) for p in text.split(",")))
    except ValueError as e:
        raise UsageError(f"bad multi-index {text!r}") from e


def _parse_compact(text: str, ctx: Context, epsilon: float):
    kind, _, rest = text.partition(":")
    if kind != "circle":
        raise UsageError(f"unknown compact kind {kind!r} (supported: circle)")
    opts = {}
    for piece in rest.split(","):
        if not piece:
            continue
        if "=" not in piece:
            raise UsageError(f"bad compact option {piece!r}")
        key, value = piece.split("=", 1)
        opts[key.strip()] = value.strip()
    radius = parse_exact(opts.get("r", "1")).re
    points = int(opts.get("points", "512"))
    center = _parse_point(opts.get("center", "0"))
    return circle_compact(radius, ctx, points, center=center, epsilon=epsilon,
                          label=text)


def _parse_target(text: str) -> Polynomial:
    return Polynomial(tuple(parse_exact(c) for c in text.split(",")))


def _load_series(args):
    spec = args.series
    if spec is None:
        raise UsageError("--series is required")
    if spec.startswith("catalog:"):
        return catalog(spec[len("catalog:"):], _parse_params(args.params))
    try:
        with open(spec, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise UsageError(f"cannot read series spec: {e}") from e
    except json.JSONDecodeError as e:
        raise UsageError(f"malformed series spec JSON: {e}") from e
    return parse_series_spec(doc)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _scalar_json(value, ctx: Context):
    if isinstance(value, Exact):
        return format_exact(value)
    if value is None:
        return None
    z = ctx.to_mpc(value)
    if z.imag == 0:
        return ctx.nstr(z.real)
    return {"re": ctx.nstr(z.real), "im": ctx.nstr(z.imag)}


def _poly_json(poly: Polynomial, ctx: Context):
    return [_scalar_json(c, ctx) for c in poly.coeffs]


def _zeros_json(zero_set, ctx: Context):
    return [{"re": ctx.nstr(r.value.real), "im": ctx.nstr(r.value.imag),
             "multiplicity": r.multiplicity, "residual": ctx.nstr(r.residual)}
            for r in zero_set]


def _float_str(x) -> str:
    return repr(float(x))


def _rate_fit_json(fit):
    return {"regressionRate": _float_str(fit.regression_rate),
            "tailMaxRate": _float_str(fit.tail_max_rate),
            "window": list(fit.window),
            "residual": _float_str(fit.residual),
            "pointsUsed": fit.points_used,
            "flag": fit.flag}


def _emit(report: dict, out_path, csv_rows=None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        if csv_rows is not None:
            base, _ = os.path.splitext(out_path)
            with open(base + ".csv", "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["n", "quantity", "value"])
                writer.writerows(csv_rows)
    else:
        print(text)


def _context(args) -> Context:
    return Context(args.mode, args.precision_bits)


def _config_echo(args, ctx: Context, extra=None) -> dict:
    config = {
        "series": args.series,
        "params": _parse_params(getattr(args, "params", None)),
        "mode": ctx.mode,
        "precisionBits": ctx.precision_bits,
    }
    if extra:
        config.update(extra)
    return config


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_approximate(args) -> int:
    ctx = _context(args)
    if args.n is None:
        raise UsageError("approximate requires --n")
    source = _load_series(args)

    record: dict
    if isinstance(source, SystemOfSeries) and (args.multi_index or source.d > 1):
        if not args.multi_index:
            raise UsageError("a system source requires --multi-index")
        mindex = _parse_multi_index(args.multi_index)
        h = compute_hermite(source, args.n, mindex, ctx)
        record = {
            "n": h.n,
            "multiIndex": list(mindex.parts),
            "lambda": h.lam,
            "denominator": _poly_json(h.q, ctx),
            "numerators": [_poly_json(p, ctx) for p in h.p],
            "zeros": _zeros_json(h.zero_set, ctx),
            "normalizedExactly": h.canonical_exact,
            "solveResidual": None if h.solve_residual is None else ctx.nstr(h.solve_residual),
        }
    else:
        f = source[0] if isinstance(source, SystemOfSeries) else source
        m = args.m if args.m is not None else (
            _parse_multi_index(args.multi_index).total if args.multi_index else None)
        if m is None:
            raise UsageError("a scalar source requires --m (and optionally --mstar)")
        mstar = args.mstar if args.mstar is not None else m
        app = compute_incomplete(f, args.n, m, mstar, ctx)
        record = {
            "n": app.n, "m": app.m, "mstar": app.mstar,
            "lambda": app.lam,
            "denominator": _poly_json(app.q, ctx),
            "numerator": _poly_json(app.p, ctx),
            "zeros": _zeros_json(app.zero_set, ctx),
            "normalizedExactly": app.canonical_exact,
            "solveResidual": None if app.solve_residual is None else ctx.nstr(app.solve_residual),
        }

    report = {
        "schema": SCHEMA,
        "command": "approximate",
        "mode": ctx.mode,
        "precisionBits": ctx.precision_bits,
        "config": _config_echo(args, ctx, {"n": args.n}),
        "approximant": record,
    }
    _emit(report, args.out)
    return 0


def cmd_row(args) -> int:
    ctx = _context(args)
    if args.n_range is None:
        raise UsageError("row requires --n-range a:b")
    n_lo, n_hi = _parse_n_range(args.n_range)
    source = _load_series(args)
    jobs = args.jobs if args.jobs else (os.cpu_count() or 1)

    if isinstance(source, SystemOfSeries) and source.d > 1:
        if not args.multi_index:
            raise UsageError("a system source requires --multi-index")
        mindex = _parse_multi_index(args.multi_index)
        row = system_row(source, mindex, args.component, (n_lo, n_hi), ctx, jobs=jobs)
        config_extra = {"multiIndex": list(mindex.parts), "component": args.component}
    else:
        f = source[0] if isinstance(source, SystemOfSeries) else source
        if args.m is None:
            raise UsageError("a scalar source requires --m")
        mstar = args.mstar if args.mstar is not None else args.m
        row = scalar_row(f, args.m, mstar, (n_lo, n_hi), ctx, jobs=jobs)
        config_extra = {"m": args.m, "mstar": mstar}
    config_extra["nRange"] = [n_lo, n_hi]
    config_extra["epsilon"] = args.epsilon
    config_extra["jobs"] = jobs
    config_extra["compacts"] = list(args.compact or [])
    config_extra["indicatorPoints"] = args.indicator_points
    config_extra["targetDenominator"] = args.target_denominator

    summary: dict = {}
    failures: list = []
    csv_rows: list = []

    telescopes = {}
    for n in row.orders()[:-1]:
        try:
            telescopes[n] = telescope(row, n)
        except NumericError as e:
            failures.append({"item": f"telescope:{n}", "error": str(e)})

    per_n = []
    for n in row.orders():
        member = row.members[n]
        den = row.common_denominator(n)
        entry = {
            "n": n,
            "lambda": member.lam,
            "denominator": _poly_json(den.q, ctx),
            "zeros": _zeros_json(row.zero_sets[n], ctx),
            "normalizedExactly": den.canonical_exact,
        }
        term = telescopes.get(n)
        if term is not None:
            entry["telescope"] = {
                "A": _scalar_json(term.a if isinstance(term.a, Exact) else term.a, ctx),
                "absA": ctx.nstr(term.a_abs),
                "q": _poly_json(term.q, ctx),
            }
            csv_rows.append([n, "absA", _float_str(term.a_abs)])
        per_n.append(entry)

    try:
        est = estimate_rstar(row)
        summary["radius"] = {
            "rstar": _float_str(est.rstar),
            "regressionRate": _float_str(est.regression_rate),
            "tailMaxRate": _float_str(est.tail_max_rate),
            "estimator": est.estimator_used,
            "window": list(est.window),
        }
    except NumericError as e:
        failures.append({"item": "radius", "error": str(e)})

    points = [_parse_point(p) for p in (args.indicator_points.split(",")
                                        if args.indicator_points else [])]
    if points:
        summary["indicators"] = []
        for point in points:
            try:
                rep = indicator_report(row, point)
                summary["indicators"].append({
                    "point": format_exact(point),
                    "delta": _float_str(rep.delta_big),
                    "deltaRaw": _float_str(rep.delta_raw),
                    "deltaJ": [_float_str(d) for d in rep.delta_j],
                    "mu": rep.mu,
                    "decisionTol": rep.decision_tol,
                })
            except NumericError as e:
                failures.append({"item": f"indicator:{point}", "error": str(e)})

    if args.compact:
        summary["errors"] = []
        for spec in args.compact:
            try:
                K = _parse_compact(spec, ctx, args.epsilon)
                values = sup_error_values(row, K)
                ns = sorted(values)
                start = ns[max(0, int(len(ns) / 3))]
                fit = fit_rate_parity_aware(values, (start, ns[-1]))
                summary["errors"].append({"compact": K.label,
                                          "fit": _rate_fit_json(fit)})
                for n, v in sorted(values.items()):
                    csv_rows.append([n, f"supError[{K.label}]", _float_str(v)])
            except NumericError as e:
                failures.append({"item": f"compact:{spec}", "error": str(e)})

    if args.target_denominator:
        try:
            target = _parse_target(args.target_denominator)
            values = denominator_diff_values(row, target)
            fit = denominator_rate(row, target)
            summary["denominatorRate"] = _rate_fit_json(fit)
            for n, v in sorted(values.items()):
                csv_rows.append([n, "denomDiff", _float_str(v)])
        except NumericError as e:
            failures.append({"item": "target-denominator", "error": str(e)})

    report = {
        "schema": SCHEMA,
        "command": "row",
        "mode": ctx.mode,
        "precisionBits": ctx.precision_bits,
        "config": _config_echo(args, ctx, config_extra),
        "perN": per_n,
        "summary": summary,
        "failures": failures,
    }
    _emit(report, args.out, csv_rows)
    return 0


def cmd_verify(args) -> int:
    results = verify_mod.run_suite(args.suite)
    records = []
    all_passed = True
    for r in results:
        line = f"{'PASS' if r.passed else 'FAIL'} {r.key}: {r.detail} ({r.elapsed:.1f}s)"
        print(line, file=sys.stderr)
        all_passed = all_passed and r.passed
        records.append({"criterion": r.key, "suite": r.suite, "passed": r.passed,
                        "detail": r.detail, "elapsedSeconds": round(r.elapsed, 3)})
    report = {
        "schema": SCHEMA,
        "command": "verify",
        "mode": "mixed",
        "precisionBits": 256,
        "config": {"suite": args.suite},
        "criteria": records,
        "passed": all_passed,
    }
    _emit(report, args.out)
    return 0 if all_passed else 1


def cmd_list_examples(args) -> int:
    entries = [{"name": name, "description": desc} for name, desc in list_catalog()]
    report = {"schema": SCHEMA, "command": "list-examples", "catalog": entries}
    if args.out:
        _emit(report, args.out)
    else:
        for e in entries:
            print(f"{e['name']:12s} {e['description']}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rowpade",
        description="Row sequences of rational approximants with convergence diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--series", help="series-spec JSON file, or catalog:NAME")
        p.add_argument("--params", action="append", metavar="K=V",
                       help="catalog parameter (repeatable)")
        p.add_argument("--mode", choices=("exact", "float"), default="exact")
        p.add_argument("--precision-bits", type=int, default=256)
        p.add_argument("--out", help="write the JSON report here")

    p_approx = sub.add_parser("approximate", help="compute one approximant")
    add_common(p_approx)
    p_approx.add_argument("--n", type=int)
    p_approx.add_argument("--multi-index", metavar="M1,M2,...")
    p_approx.add_argument("--m", type=int)
    p_approx.add_argument("--mstar", type=int)
    p_approx.set_defaults(func=cmd_approximate)

    p_row = sub.add_parser("row", help="sweep a row and run analytics")
    add_common(p_row)
    p_row.add_argument("--n-range", metavar="A:B")
    p_row.add_argument("--multi-index", metavar="M1,M2,...")
    p_row.add_argument("--component", type=int, default=1)
    p_row.add_argument("--m", type=int)
    p_row.add_argument("--mstar", type=int)
    p_row.add_argument("--epsilon", type=float, default=1e-2)
    p_row.add_argument("--compact", action="append", metavar="circle:r=1,points=512")
    p_row.add_argument("--indicator-points", metavar="P1,P2,...")
    p_row.add_argument("--target-denominator", metavar="C0,C1,...")
    p_row.add_argument("--jobs", type=int, default=0,
                       help="parallel workers for member computation (0 = cores)")
    p_row.set_defaults(func=cmd_row)

    p_verify = sub.add_parser("verify", help="run a built-in verification suite")
    p_verify.add_argument("--suite", default="all", help="|".join(verify_mod.SUITES))
    p_verify.add_argument("--out", help="write the JSON report here")
    p_verify.set_defaults(func=cmd_verify)

    p_list = sub.add_parser("list-examples", help="list catalog systems")
    p_list.add_argument("--out", help="write the JSON report here")
    p_list.set_defaults(func=cmd_list_examples)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except NumericError as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
