"""Command-line surface for the symkernel pipeline.

Subcommands: validate, coeffs, diag, spectrum, index, compare. Spaces
come from a small spec grammar ("S2:r=1", "H2:a=2", products joined by
'*') or from a RiemannData JSON file; fibers from "scalar", "vector",
"spinor", "weight:q", products of those, or a representation JSON file.
Exit codes: 0 ok, 1 check failed, 2 usage or parse error, 3 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import plots, report
from .curvature import (
    assemble,
    flat_riemann,
    hyperbolic_riemann,
    product_riemann,
    riemann_from_dict,
    riemann_to_dict,
    sphere_riemann,
    sphere_volume,
    validate,
)
from .diagonal import DEFAULT_TOL_QUAD, diagonal
from .dirac import _DEFAULT_INDEX_TIMES, dirac_index
from .errors import (
    BadParams,
    NotCompact,
    QuadratureNotConverged,
    SymkernelError,
    TailTooLarge,
    Unsupported,
)
from .gaussian import DEFAULT_ORDER, MAX_ORDER, heat_coefficients
from .representations import rep_from_dict, represent, scalar_rep, weight_rep

_DEFAULT_TOL_ALG = 1e-10
_DIAG_TIMES = (0.1, 0.25, 0.5, 1.0, 2.0)
_SPECTRUM_LEVELS = 30

_EXIT_CODES = (
    "exit codes: 0 ok, 1 check failed, "
    "2 usage or parse error, 3 numerical non-convergence"
)


# ---------------------------------------------------------------------------
# spec parsing


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, ValueError) as exc:
        raise BadParams(f"cannot read JSON file {path}: {exc}") from None


def _parse_factor(token):
    """One space factor -> (RiemannData, volume or None)."""
    name, sep, body = token.partition(":")
    name = name.strip()
    params = {}
    if sep:
        if not body.strip():
            raise BadParams(f"empty parameter list in space factor {token!r}")
        for item in body.split(","):
            key, eq, value = item.partition("=")
            key, value = key.strip(), value.strip()
            if not eq or not key or not value:
                raise BadParams(f"cannot parse {item!r} in space factor {token!r}")
            params[key] = value

    def take_float(key, default):
        raw = params.pop(key, None)
        if raw is None:
            return default
        try:
            out = float(raw)
        except ValueError:
            raise BadParams(f"{key}={raw!r} is not a number") from None
        if out <= 0:
            raise BadParams(f"{key} must be positive, got {raw}")
        return out

    def take_int(key, default):
        raw = params.pop(key, None)
        if raw is None:
            return default
        try:
            out = int(raw)
        except ValueError:
            raise BadParams(f"{key}={raw!r} is not an integer") from None
        if out < 1:
            raise BadParams(f"{key} must be at least 1, got {raw}")
        return out

    spheres = {"S2": 2, "S3": 3, "S4": 4}
    hyper = {"H2": 2, "H3": 3}
    if name in spheres:
        n, r = spheres[name], take_float("r", 1.0)
        out = (sphere_riemann(n, r), sphere_volume(n, r))
    elif name == "sphere":
        n, r = take_int("n", 2), take_float("r", 1.0)
        out = (sphere_riemann(n, r), sphere_volume(n, r))
    elif name in hyper:
        n, a = hyper[name], take_float("a", 1.0)
        out = (hyperbolic_riemann(n, a), None)
    elif name == "hyperbolic":
        n, a = take_int("n", 2), take_float("a", 1.0)
        out = (hyperbolic_riemann(n, a), None)
    elif name in ("flat", "R"):
        out = (flat_riemann(take_int("n", 1)), None)
    else:
        raise BadParams(f"unknown space factor {name!r}")
    if params:
        extra = ", ".join(sorted(params))
        raise BadParams(f"unknown parameters for {name}: {extra}")
    return out


def parse_space(text):
    """Space spec string or JSON path -> (RiemannData, volume or None)."""
    if os.path.isfile(text):
        rd = riemann_from_dict(_load_json(text))
        return rd, None
    factors, volumes = [], []
    for token in text.split("*"):
        token = token.strip()
        if not token:
            raise BadParams(f"empty factor in space spec {text!r}")
        rd, vol = _parse_factor(token)
        factors.append(rd)
        volumes.append(vol)
    if len(factors) == 1:
        rd = factors[0]
    else:
        rd = product_riemann(factors)
    if any(v is None for v in volumes):
        return rd, None
    return rd, math.prod(volumes)


def _parse_alpha(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise BadParams(f"cannot parse charge {text!r} as a rational") from None


def build_rep(alg, rep_spec, alpha):
    """Resolve --rep/--alpha into (rep, field, tag)."""
    if alpha is not None and rep_spec is not None:
        raise BadParams("pass --rep or --alpha, not both")
    if alpha is not None:
        charge = _parse_alpha(alpha)
        return weight_rep(alg, charge), None, f"weight:{charge}"
    if rep_spec is None:
        return scalar_rep(alg), None, "scalar"
    if os.path.isfile(rep_spec):
        rep, field = rep_from_dict(alg, _load_json(rep_spec))
        return rep, field, rep.name
    return represent(alg, rep_spec), None, rep_spec


def _alpha_pair(rep):
    if rep.alpha is None:
        return [0, 1]
    return [int(rep.alpha.numerator), int(rep.alpha.denominator)]


def _times(args, default):
    ts = args.t if args.t else list(default)
    if any(t <= 0 for t in ts):
        raise BadParams("every -t must be positive")
    return sorted(set(float(t) for t in ts))


def _check_common(args):
    if args.tol_alg <= 0 or args.tol_quad <= 0:
        raise BadParams("tolerances must be positive")
    if not 0 <= args.order <= MAX_ORDER:
        raise BadParams(f"order must be between 0 and {MAX_ORDER}")
    if args.plot and not args.out:
        raise BadParams("--plot needs --out to name the figure file")


def _emit(args, payload, csv_header, csv_rows, plotter=None):
    if args.format == "csv":
        text = report.csv_text(csv_header, csv_rows)
    else:
        text = report.dumps(payload) + "\n"
    if args.out:
        report.write_text(args.out, text)
    else:
        sys.stdout.write(text)
    if args.plot and plotter is not None:
        plotter(os.path.splitext(args.out)[0] + ".png")


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args):
    _check_common(args)
    rd, _ = parse_space(args.space)
    alg = assemble(rd, tol_alg=args.tol_alg)
    rep = validate(alg, rd, tol=args.tol_alg)
    names = sorted(rep.residuals)
    payload = {
        "space": args.space,
        "tol_alg": args.tol_alg,
        "ok": bool(rep.ok),
        "worst_family": rep.worst[0],
        "worst_residual": rep.worst[1],
        "residuals": {name: rep.residuals[name] for name in names},
    }
    # make the report usable as a space file: append the tensor document
    payload.update(riemann_to_dict(rd))
    rows = [(name, rep.residuals[name], rep.residuals[name] <= args.tol_alg)
            for name in names]

    def plotter(path):
        plots.plot_residuals(
            path, names, [rep.residuals[n] for n in names], args.tol_alg,
            f"identity residuals: {args.space}",
        )

    _emit(args, payload, ("family", "residual", "ok"), rows, plotter)
    return 0 if rep.ok else 1


def cmd_coeffs(args):
    _check_common(args)
    rd, _ = parse_space(args.space)
    alg = assemble(rd, tol_alg=args.tol_alg)
    rep, field, rep_tag = build_rep(alg, args.rep, args.alpha)
    exp = heat_coefficients(alg, rep, order=args.order, field=field)
    eye = np.eye(rep.dim)
    a1_target = alg.scalar_curvature / 6.0 * eye
    a1_residual = 0.0
    if args.order >= 1:
        a1_residual = float(np.max(np.abs(exp.coefficients[1] - a1_target)))
    traces = exp.traces()
    payload = {
        "K": args.order,
        "a": [report.complex_matrix(a) for a in exp.coefficients],
        "trace": [report.complex_pair(v) for v in traces],
        "space_tag": args.space,
        "rep_tag": rep_tag,
        "a1_residual": a1_residual,
        "ok": a1_residual <= args.tol_alg,
    }
    rows = [(k, float(traces[k].real)) for k in range(args.order + 1)]

    def plotter(path):
        plots.plot_coefficients(
            path, list(range(args.order + 1)), traces,
            f"coefficient traces: {args.space}, {rep_tag}",
        )

    _emit(args, payload, ("k", "trace_re"), rows, plotter)
    return 0 if a1_residual <= args.tol_alg else 1


def cmd_diag(args):
    _check_common(args)
    rd, _ = parse_space(args.space)
    alg = assemble(rd, tol_alg=args.tol_alg)
    rep, field, rep_tag = build_rep(alg, args.rep, args.alpha)
    ts = _times(args, _DIAG_TIMES)
    res = diagonal(alg, rep, ts, field=field, tol_quad=args.tol_quad)
    pair = _alpha_pair(rep)
    payload = [
        {
            "space": args.space,
            "rep": rep_tag,
            "alpha": pair,
            "t": t,
            "method": res.method,
            "value": [v, 0.0],
            "est_error": e,
        }
        for t, v, e in zip(res.ts, res.values, res.est_errors)
    ]
    rows = [(t, v, e, res.method)
            for t, v, e in zip(res.ts, res.values, res.est_errors)]

    def plotter(path):
        plots.plot_curves(
            path, res.ts, [(res.method, res.values)], "diagonal value",
            f"heat kernel diagonal: {args.space}, {rep_tag}",
        )

    _emit(args, payload, ("t", "value", "est_error", "method"), rows, plotter)
    return 0


def cmd_spectrum(args):
    _check_common(args)
    rd, _ = parse_space(args.space)
    alg = assemble(rd, tol_alg=args.tol_alg)
    rep, _, rep_tag = build_rep(alg, args.rep, args.alpha)
    if alg.rank != 1 or alg.dim != 2 or alg.flat_dim != 0:
        raise Unsupported("the spectrum listing covers single rank-one spaces")
    if rep.dim != 1:
        raise Unsupported("the spectrum listing covers scalar and weight fibers")
    alpha = abs(rep.alpha) if rep.alpha is not None else Fraction(0)
    lam = float(alg.eigenvalues[0])
    rsq = 1.0 / abs(lam)
    modes = []
    continuum_edge = None
    if lam > 0:
        level = alpha
        for k in range(_SPECTRUM_LEVELS):
            eig = float(level * (level + 1) - alpha**2) / rsq
            modes.append({"k": k, "eigenvalue": eig,
                          "multiplicity": float(2 * level + 1)})
            level += 1
    else:
        continuum_edge = float(Fraction(1, 4) + alpha**2) / rsq
        j = 0
        while j < alpha - Fraction(1, 2):
            eig = float((2 * j + 1) * alpha - j * (j + 1)) / rsq
            density = float(2 * (alpha - Fraction(1, 2) - j)) / (4.0 * math.pi * rsq)
            modes.append({"k": j, "eigenvalue": eig, "multiplicity": density})
            j += 1
    payload = {
        "space": args.space,
        "rep": rep_tag,
        "alpha": _alpha_pair(rep),
        "modes": modes,
        "continuum_edge": continuum_edge,
    }
    rows = [(m["k"], m["eigenvalue"], m["multiplicity"]) for m in modes]

    def plotter(path):
        plots.plot_spectrum(
            path, [m["eigenvalue"] for m in modes],
            [m["multiplicity"] for m in modes],
            f"spectrum: {args.space}, {rep_tag}", continuum_edge,
        )

    _emit(args, payload, ("k", "eigenvalue", "multiplicity"), rows, plotter)
    return 0


def cmd_index(args):
    _check_common(args)
    rd, volume = parse_space(args.space)
    alg = assemble(rd, tol_alg=args.tol_alg)
    twist, field, rep_tag = (None, None, "scalar")
    if args.rep is not None or args.alpha is not None:
        twist, field, rep_tag = build_rep(alg, args.rep, args.alpha)
    if volume is None:
        if alg.flat_dim > 0 or np.any(alg.eigenvalues <= 0):
            raise NotCompact("the index needs a closed space")
        raise BadParams(
            "the index needs a catalog space with a known volume"
        )
    ts = tuple(_times(args, _DEFAULT_INDEX_TIMES))
    res = dirac_index(alg, twist=twist, field=field, ts=ts,
                      volume=volume, tol_quad=args.tol_quad)
    payload = {
        "n": alg.dim,
        "space": args.space,
        "rep": rep_tag,
        "index": res.coefficient_value,
        "nearest_integer": res.index,
        "t_spread": res.spread,
        "graded": list(res.graded_values),
        "ts": list(res.ts),
    }
    rows = [(alg.dim, args.space, rep_tag, res.coefficient_value,
             res.index, res.spread)]

    def plotter(path):
        if res.graded_values:
            plots.plot_index(
                path, res.ts, res.graded_values, res.index,
                f"index: {args.space}, twist {rep_tag}",
            )

    _emit(args, payload,
          ("n", "space", "rep", "index", "nearest_integer", "t_spread"),
          rows, plotter)
    return 0


def cmd_compare(args):
    _check_common(args)
    rd, _ = parse_space(args.space)
    alg = assemble(rd, tol_alg=args.tol_alg)
    rep, field, rep_tag = build_rep(alg, args.rep, args.alpha)
    ts = _times(args, _DIAG_TIMES)
    results = {}
    for method in ("contour", "spectral"):
        results[method] = diagonal(alg, rep, ts, field=field,
                                   tol_quad=args.tol_quad, method=method)
    names = sorted(results)
    rows_json, rows_csv = [], []
    all_pass, overall_dev = True, 0.0
    for pos, t in enumerate(ts):
        values = [results[m].values[pos] for m in names]
        errors = [results[m].est_errors[pos] for m in names]
        scale = max(max(abs(v) for v in values), 1e-300)
        dev = (max(values) - min(values)) / scale
        # the est_error fields track truncation targets, not rounding in
        # the pole-subtracted quadrature, hence the safety factor
        threshold = max(args.tol_quad, 10.0 * sum(errors) / scale)
        passed = dev <= threshold
        all_pass &= passed
        overall_dev = max(overall_dev, dev)
        rows_json.append({
            "t": t,
            "methods": {
                m: {"value": [results[m].values[pos], 0.0],
                    "est_error": results[m].est_errors[pos]}
                for m in names
            },
            "max_rel_dev": dev,
            "pass": passed,
        })
        for m in names:
            rows_csv.append((t, results[m].values[pos],
                             results[m].est_errors[pos], m, dev, passed))
    payload = {
        "space": args.space,
        "rep": rep_tag,
        "alpha": _alpha_pair(rep),
        "tol_quad": args.tol_quad,
        "rows": rows_json,
        "max_rel_dev": overall_dev,
        "pass": all_pass,
    }

    def plotter(path):
        plots.plot_compare(
            path, ts, {m: results[m].values for m in names},
            [r["max_rel_dev"] for r in rows_json],
            f"route comparison: {args.space}, {rep_tag}",
        )

    _emit(args, payload,
          ("t", "value", "est_error", "method", "max_rel_dev", "pass"),
          rows_csv, plotter)
    return 0 if all_pass else 1


# ---------------------------------------------------------------------------
# argument plumbing


def _add_common(sub):
    sub.add_argument("--space", required=True,
                     help="space spec (e.g. S2:r=1, H2:a=2, S2:r=1*H2:a=1, "
                          "flat:n=3) or path to a curvature-tensor JSON")
    sub.add_argument("--rep", default=None,
                     help="fiber spec: scalar | vector | spinor | weight:q | "
                          "products joined by '*' | path to a fiber JSON "
                          "(for index: the twist bundle)")
    sub.add_argument("--alpha", default=None,
                     help="rational weight charge; shorthand for --rep weight:q")
    sub.add_argument("--order", type=int, default=DEFAULT_ORDER,
                     help=f"expansion order K <= {MAX_ORDER} (default "
                          f"{DEFAULT_ORDER})")
    sub.add_argument("--t", type=float, action="append", default=None,
                     help="evaluation time, repeatable (sorted before use)")
    sub.add_argument("--tol-alg", type=float, default=_DEFAULT_TOL_ALG,
                     help="algebraic identity tolerance (default 1e-10)")
    sub.add_argument("--tol-quad", type=float, default=DEFAULT_TOL_QUAD,
                     help="quadrature/mode-sum tolerance (default 1e-12)")
    sub.add_argument("--out", default=None,
                     help="output file path (default: stdout)")
    sub.add_argument("--format", choices=("json", "csv"), default="json",
                     help="output format (default json)")
    sub.add_argument("--plot", action="store_true",
                     help="also render a PNG figure next to --out")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="symkernel",
        description="heat kernels on symmetric spaces: algebra validation, "
                    "expansion coefficients, exact diagonals, spectra, and "
                    "the Dirac index",
        epilog=_EXIT_CODES,
    )
    subs = parser.add_subparsers(dest="command", required=True)
    specs = [
        ("validate", cmd_validate, "check every algebraic identity of a space"),
        ("coeffs", cmd_coeffs, "heat coefficient table for a space and fiber"),
        ("diag", cmd_diag, "heat kernel diagonal over a time grid"),
        ("spectrum", cmd_spectrum, "eigenvalue listing for rank-one spaces"),
        ("index", cmd_index, "Dirac index via coefficients and graded traces"),
        ("compare", cmd_compare, "cross-check every applicable diagonal route"),
    ]
    for name, func, help_text in specs:
        sub = subs.add_parser(name, help=help_text, epilog=_EXIT_CODES)
        _add_common(sub)
        sub.set_defaults(func=func)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BadParams as exc:
        print(f"symkernel: error: {exc}", file=sys.stderr)
        return 2
    except (QuadratureNotConverged, TailTooLarge) as exc:
        print(f"symkernel: error: {exc}", file=sys.stderr)
        return 3
    except SymkernelError as exc:
        print(f"symkernel: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
