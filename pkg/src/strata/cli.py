"""Command-line front end: one subcommand per analysis, JSON/CSV reports.

Exact values cross the boundary as "p/q" strings; floats appear only in
derived display quantities (slopes, logs). Reports carry a top-level
schema tag and are byte-deterministic for a fixed argv and config, so
runs can be diffed.
"""

import argparse
import csv
import io
import json
import random
import re
import sys
from dataclasses import dataclass, fields, replace
from fractions import Fraction

from . import calculus, dimension, gallery, measure, topology
from . import functions as F
from . import layers as L
from . import sets as S
from .enclosure import Enclosure
from .errors import BudgetExhaustedError, DomainError
from .layers import ComplexityBudget

__all__ = ["Config", "load_config", "run", "main"]

SCHEMA = "strata/1"

_RATIONAL_RE = re.compile(r"-?\d+(/\d+)?")


@dataclass(frozen=True)
class Config:
    """Defaults a config file or flags may override, one invocation at a time."""

    precision_bits: int = 32
    tolerance: Fraction = Fraction(1, 2**20)
    zero_test_bits: int = 256
    max_dyadic_exponent: int = 8
    max_poly_degree: int = 2
    max_coeff_height: int = 4
    max_series_terms: int = 64
    format: str = "json"

    def __post_init__(self):
        for f in fields(self):
            if f.name != "format" and getattr(self, f.name) <= 0:
                raise DomainError(f"config {f.name} must be positive")
        if self.format not in ("json", "csv"):
            raise DomainError(f"unknown output format {self.format!r}")

    def budget(self) -> ComplexityBudget:
        return ComplexityBudget(
            max_dyadic_exponent=self.max_dyadic_exponent,
            max_poly_degree=self.max_poly_degree,
            max_coeff_height=self.max_coeff_height,
            max_series_terms=self.max_series_terms)


_INT_KEYS = ("precision_bits", "zero_test_bits", "max_dyadic_exponent",
             "max_poly_degree", "max_coeff_height", "max_series_terms")


def parse_rational(text: str) -> Fraction:
    if not _RATIONAL_RE.fullmatch(text.strip()):
        raise DomainError(
            f"expected an exact rational like 3 or -2/7, got {text!r}")
    return Fraction(text.strip())


def load_config(path: str) -> Config:
    values: dict = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as err:
        raise DomainError(f"cannot read config {path}: {err}") from err
    for i, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if not sep or not key or not raw:
            raise DomainError(f"{path}:{i}: expected key=value, got {line!r}")
        if key in _INT_KEYS:
            try:
                values[key] = int(raw)
            except ValueError as err:
                raise DomainError(f"{path}:{i}: {key} wants an integer") from err
        elif key == "tolerance":
            values[key] = parse_rational(raw)
        elif key == "format":
            values[key] = raw
        else:
            raise DomainError(f"{path}:{i}: unknown config key {key!r}")
    return Config(**values)


def _parse_point(text: str) -> L.LayeredReal:
    """A catalogue constant by name, or an exact rational."""
    text = text.strip()
    if _RATIONAL_RE.fullmatch(text):
        return L.from_fraction(Fraction(text))
    try:
        return L.constant(text)
    except DomainError:
        raise DomainError(
            f"expected an exact rational like -2/7 or a catalogue "
            f"constant name, got {text!r}") from None


def _fmt(v: Fraction) -> str:
    return L.format_fraction(v)


def _enc(e: Enclosure) -> dict:
    return {"low": _fmt(e.low), "high": _fmt(e.high)}


def _exact_or_pair(e: Enclosure):
    return _fmt(e.low) if e.width == 0 else [_fmt(e.low), _fmt(e.high)]


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--seed", type=int, help="seed for sampling subcommands")
    p.add_argument("--precision", type=int, help="override precision bits")
    p.add_argument("--tol", help="override tolerance, as p/q")


def _add_fn(p: argparse.ArgumentParser):
    p.add_argument("--fn", required=True, help="gallery entry name")
    p.add_argument("--param", action="append", default=[],
                   help="entry parameter key=value, repeatable "
                        "(a, b, terms, depth, theta)")


def _add_set(p: argparse.ArgumentParser):
    p.add_argument("--set", required=True,
                   choices=("cantor", "interval", "finite"))
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--lo", default="0")
    p.add_argument("--hi", default="1")
    p.add_argument("--points", help="comma-separated exact rationals")


def build_parser() -> _Parser:
    parser = _Parser(prog="strata", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name, **kw):
        p = sub.add_parser(name, **kw)
        _add_common(p)
        return p

    p = cmd("rank", help="minimal layer of a constant or rational")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--const", help="catalogue constant name")
    g.add_argument("--value", help="exact rational p/q")

    p = cmd("enumerate", help="budgeted points of a layer in an interval")
    p.add_argument("--layer", type=int, required=True)
    p.add_argument("--lo", default="0")
    p.add_argument("--hi", default="1")
    p.add_argument("--sample", type=int,
                   help="report a seeded random sample of this size")

    p = cmd("ball", help="budgeted layer points of a metric ball")
    p.add_argument("--center", required=True)
    p.add_argument("--radius", required=True)
    p.add_argument("--layer", type=int, required=True)

    p = cmd("continuity", help="certified continuity window or witness")
    _add_fn(p)
    p.add_argument("--x", required=True)
    p.add_argument("--layer", type=int, required=True)
    p.add_argument("--eps", default="1/64")

    p = cmd("derive", help="difference-quotient derivative at a point")
    _add_fn(p)
    p.add_argument("--x", required=True)
    p.add_argument("--layer", type=int, required=True)

    p = cmd("integrate", help="tagged Riemann sum or certified integral")
    _add_fn(p)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--layer", type=int, required=True)
    p.add_argument("--N", type=int, help="fixed partition size (exact sum)")
    p.add_argument("--tags", choices=("left", "midpoint"), default="midpoint")

    p = cmd("ftc", help="layer-by-layer derivative/integral agreement table")
    p.add_argument("--fn", default="masked_oscillation_rate")
    p.add_argument("--big-fn", default="masked_oscillation")
    p.add_argument("--param", action="append", default=[])
    p.add_argument("--a", default="-1/2")
    p.add_argument("--x-end", default="1/2")
    p.add_argument("--probe", default="0")
    p.add_argument("--layer", type=int, default=2)
    p.add_argument("--integral-tol", default="1/1024")
    p.add_argument("--max-bracket-cells", type=int, default=2**9)

    p = cmd("taylor", help="expansion with certified remainder")
    _add_fn(p)
    p.add_argument("--x", required=True)
    p.add_argument("--h", required=True)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--layer", type=int, required=True)

    p = cmd("measure", help="budgeted outer measure of a set")
    _add_set(p)
    p.add_argument("--layer", type=int, required=True)

    p = cmd("lp", help="certified Lp norm over an interval")
    _add_fn(p)
    p.add_argument("--p", default="2")
    p.add_argument("--lo", default="0")
    p.add_argument("--hi", default="1")
    p.add_argument("--layer", type=int, required=True)

    p = cmd("liouville", help="order-k witness chain for a value")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--const")
    g.add_argument("--value")
    p.add_argument("--layer", type=int, required=True)
    p.add_argument("--k-max", type=int, default=3)
    p.add_argument("--q-cap", type=int, default=10**4)

    p = cmd("entropy", help="minimal eps-cover count of a set")
    _add_set(p)
    p.add_argument("--layer", type=int, default=0)
    p.add_argument("--eps", required=True)

    p = cmd("dim", help="box-dimension slope over an eps schedule")
    _add_set(p)
    p.add_argument("--layer", type=int, default=0)
    p.add_argument("--eps-base", default="1/2")
    p.add_argument("--eps-count", type=int, default=6)

    p = cmd("graph-dim", help="box-dimension slope of a function graph")
    _add_fn(p)
    p.add_argument("--lo", default="0")
    p.add_argument("--hi", default="1")
    p.add_argument("--layer", type=int, required=True)
    p.add_argument("--eps-base", default="1/2")
    p.add_argument("--eps-count", type=int, default=6)

    p = cmd("gallery", help="catalogue listing, or recomputed verdict table")
    p.add_argument("--check", action="store_true",
                   help="recompute continuity/growth verdicts (slow)")

    p = cmd("weierstrass-scan", help="derivative-stack growth scan")
    p.add_argument("--a", action="append", required=True,
                   help="damping coefficient p/q, repeatable")
    p.add_argument("--b", action="append", required=True,
                   help="frequency base p/q, repeatable")
    p.add_argument("--k-start", type=int, default=3)
    p.add_argument("--k-stop", type=int, default=8)

    p = cmd("jump-demo", help="a step threshold viewed from below and above")
    p.add_argument("--theta", default="sqrt2_over_2",
                   help="catalogue constant name or exact rational")
    p.add_argument("--max-layer", type=int, default=2)
    p.add_argument("--lo", default="0")
    p.add_argument("--hi", default="1")

    return parser


# ---------------------------------------------------------------------------
# handlers: each returns a JSON-ready payload; tabular data sits in "rows"
# ---------------------------------------------------------------------------


def _fn_params(pairs) -> dict:
    out = {}
    for text in pairs:
        key, sep, raw = text.partition("=")
        key, raw = key.strip(), raw.strip()
        if not sep or not key or not raw:
            raise DomainError(f"--param expects key=value, got {text!r}")
        if key in ("terms", "depth"):
            try:
                out[key] = int(raw)
            except ValueError as err:
                raise DomainError(f"parameter {key} wants an integer") from err
        elif key == "theta":
            out[key] = _parse_point(raw)
        else:
            out[key] = parse_rational(raw)
    return out


def _build_fn(args) -> F.FunctionDescriptor:
    return gallery.build(args.fn, **_fn_params(args.param))


def _build_set(args, config: Config) -> S.SetDescriptor:
    if args.set == "cantor":
        return S.cantor_approximant(args.depth)
    if args.set == "interval":
        return S.interval_set(_parse_point(args.lo), _parse_point(args.hi))
    if not args.points:
        raise DomainError("a finite set needs --points")
    pts = [_parse_point(t) for t in args.points.split(",")]
    return S.finite_set(pts)


def _eps_schedule(base: Fraction, count: int) -> tuple[Fraction, ...]:
    if not 0 < base < 1:
        raise DomainError("the eps base must sit in (0, 1)")
    if count < 1:
        raise DomainError("the eps schedule needs at least one step")
    return tuple(base**j for j in range(1, count + 1))


def _cmd_rank(args, config):
    x = L.constant(args.const) if args.const else \
        L.from_fraction(parse_rational(args.value))
    return {"input": args.const or args.value,
            "rank": L.classify_rank(x),
            "value": L.value_payload(x, config.precision_bits)}


def _cmd_enumerate(args, config):
    lo, hi = _parse_point(args.lo), _parse_point(args.hi)
    points = L.enumerate_layer(args.layer, (lo, hi), config.budget())
    if args.sample is not None:
        if args.sample < 0:
            raise DomainError("sample size cannot be negative")
        rng = random.Random(args.seed if args.seed is not None else 0)
        keep = sorted(rng.sample(range(len(points)),
                                 min(args.sample, len(points))))
        points = [points[i] for i in keep]
    rows = [{"index": i, **L.value_payload(p, config.precision_bits)}
            for i, p in enumerate(points)]
    return {"layer": args.layer, "count": len(points), "rows": rows}


def _cmd_ball(args, config):
    b = topology.Ball(_parse_point(args.center), parse_rational(args.radius),
                      args.layer)
    points = topology.ball_points(b, config.budget())
    kind = topology.local_type(b.center, args.layer, b.radius, config.budget())
    rows = [{"index": i, **L.value_payload(p, config.precision_bits)}
            for i, p in enumerate(points)]
    return {"layer": args.layer, "center": args.center,
            "radius": args.radius, "local_type": kind.tag,
            "count": len(points), "rows": rows}


def _cmd_continuity(args, config):
    f = _build_fn(args)
    delta, witness = calculus.continuity_check(
        f, _parse_point(args.x), args.layer, parse_rational(args.eps),
        config.budget(), precision=config.precision_bits)
    return {"fn": args.fn, "x": args.x, "layer": args.layer, "eps": args.eps,
            "continuous": delta is not None,
            "delta": None if delta is None else _fmt(delta),
            "witness": None if witness is None
            else L.value_payload(witness, config.precision_bits)}


def _cmd_derive(args, config, tol: Fraction):
    f = _build_fn(args)
    r = calculus.fractal_derivative(f, _parse_point(args.x), args.layer, tol)
    return {"fn": args.fn, "x": args.x, "layer": args.layer,
            "status": r.status,
            "value": None if r.value is None else _enc(r.value),
            "left": None if r.left_value is None else _enc(r.left_value),
            "right": None if r.right_value is None else _enc(r.right_value),
            "output_rank": r.output_rank, "samples_used": r.samples_used}


def _cmd_integrate(args, config, tol: Fraction):
    f = _build_fn(args)
    r = calculus.riemann_integral(f, _parse_point(args.a), _parse_point(args.b),
                                  args.layer, tol, tags=args.tags, cells=args.N)
    return {"fn": args.fn, "a": args.a, "b": args.b, "layer": args.layer,
            "tags": args.tags, "integrable": r.integrable,
            "value": None if r.riemann_value is None
            else _exact_or_pair(r.riemann_value),
            "lower_sum": _fmt(r.lower_sum.low),
            "upper_sum": _fmt(r.upper_sum.high),
            "output_rank": r.output_rank,
            "partition_size": r.partition_size}


def _cmd_ftc(args, config, tol: Fraction):
    params = _fn_params(args.param)
    f = gallery.build(args.fn, **params)
    big_f = gallery.build(args.big_fn, **params)
    report = calculus.ftc_check(f, big_f, _parse_point(args.a),
                                _parse_point(args.x_end), args.layer,
                                _parse_point(args.probe), tol,
                                integral_tol=parse_rational(args.integral_tol),
                                max_bracket_cells=args.max_bracket_cells)
    rows = [{"layer": row.layer,
             "derivative_at_probe": "" if row.derivative_at_probe is None
             else _exact_or_pair(row.derivative_at_probe),
             "derivative_status": row.derivative_status,
             "f_at_probe": "" if row.f_at_probe is None
             else _exact_or_pair(row.f_at_probe),
             "verdict": row.verdict} for row in report.per_layer_rows]
    return {"fn": args.fn, "big_fn": args.big_fn,
            "integral_of_derivative": None if report.integral_of_derivative is None
            else _enc(report.integral_of_derivative),
            "endpoint_difference": _enc(report.endpoint_difference),
            "agrees": report.agrees, "rows": rows}


def _cmd_taylor(args, config, tol: Fraction):
    f = _build_fn(args)
    r = calculus.taylor_expand(f, _parse_point(args.x), _parse_point(args.h),
                               args.order, args.layer, tol)
    return {"fn": args.fn, "x": args.x, "h": args.h, "order": args.order,
            "layer": args.layer,
            "polynomial_value": _enc(r.polynomial_value),
            "remainder": _enc(r.remainder),
            "remainder_rank": r.remainder_rank,
            "finite_differences": [_enc(d) for d in r.finite_differences]}


def _cmd_measure(args, config):
    A = _build_set(args, config)
    r = measure.outer_measure(A, args.layer, config.budget())
    payload = {"set": S.descriptor_payload(A, config.precision_bits),
               "layer": r.layer,
               "cover_size": len(r.cover.intervals)}
    if isinstance(r.value, measure.CoverFailure):
        payload["value"] = None
        payload["failure_witness"] = L.value_payload(r.value.witness,
                                                     config.precision_bits)
    else:
        payload["value"] = _enc(r.value)
    return payload


def _cmd_lp(args, config, tol: Fraction):
    f = _build_fn(args)
    r = measure.lp_norm(f, parse_rational(args.p),
                        (_parse_point(args.lo), _parse_point(args.hi)),
                        args.layer, tol=tol)
    return {"fn": args.fn, "p": args.p, "layer": r.layer,
            "member": r.member, "norm": _enc(r.norm)}


def _cmd_liouville(args, config):
    x = L.constant(args.const) if args.const else \
        L.from_fraction(parse_rational(args.value))
    r = measure.liouville_test(x, args.layer, args.k_max, config.budget(),
                               q_cap=args.q_cap)
    rows = []
    for k, w in enumerate(r.witnesses, start=1):
        ok = measure.verify_liouville_witness(
            x, w.p, w.q, k, precision_bits=config.zero_test_bits)
        rows.append({"order": k, "p": w.p, "q": w.q,
                     "gap": _fmt(w.gap), "reverified": ok})
    return {"input": args.const or args.value, "layer": args.layer,
            "k_max": args.k_max, "q_cap": args.q_cap,
            "k_verified": r.k_verified,
            "member_up_to_k": r.member_up_to_k, "rows": rows}


def _cmd_entropy(args, config):
    A = _build_set(args, config)
    count, log_count = dimension.covering_entropy(
        A, args.layer, parse_rational(args.eps), config.budget())
    return {"set": S.descriptor_payload(A, config.precision_bits),
            "layer": args.layer, "eps": args.eps,
            "count": count, "log_count": log_count}


def _profile_rows(est) -> list[dict]:
    return [{"eps": _fmt(eps), "count": count, "log_count": ln}
            for eps, count, ln in est.profile.points]


def _cmd_dim(args, config):
    A = _build_set(args, config)
    schedule = _eps_schedule(parse_rational(args.eps_base), args.eps_count)
    est = dimension.dimension_estimate(A, args.layer, schedule, config.budget())
    return {"set": S.descriptor_payload(A, config.precision_bits),
            "layer": args.layer, "slope": est.slope,
            "slope_ci": list(est.slope_ci), "rows": _profile_rows(est)}


def _cmd_graph_dim(args, config):
    f = _build_fn(args)
    schedule = _eps_schedule(parse_rational(args.eps_base), args.eps_count)
    est = dimension.graph_dimension(
        f, (_parse_point(args.lo), _parse_point(args.hi)), args.layer,
        schedule, config.budget())
    return {"fn": args.fn, "layer": args.layer, "slope": est.slope,
            "slope_ci": list(est.slope_ci),
            "skipped_columns": est.profile.skipped_columns,
            "rows": _profile_rows(est)}


def _cmd_gallery(args, config):
    if not args.check:
        rows = [{"name": e.name,
                 "declared_level": "" if e.declared_level is None
                 else e.declared_level,
                 "declared_target": "" if e.declared_target is None
                 else e.declared_target,
                 "notes": e.declared_notes} for e in gallery.entries()]
        return {"mode": "list", "rows": rows}
    rows = [{"name": r.name,
             "declared_level": "" if r.declared_level is None
             else r.declared_level,
             "declared_target": "" if r.declared_target is None
             else r.declared_target,
             "computed": r.computed, "verdict": r.verdict,
             "error": r.error or ""} for r in gallery.gallery_report()]
    return {"mode": "check", "rows": rows}


def _cmd_weierstrass_scan(args, config):
    if args.k_stop - args.k_start < 3:
        raise DomainError("the scan needs at least three truncation depths")
    rows_out = []
    scan = gallery.weierstrass_threshold_scan(
        tuple(parse_rational(t) for t in args.a),
        tuple(parse_rational(t) for t in args.b),
        range(args.k_start, args.k_stop))
    for r in scan:
        rows_out.append({
            "a": _fmt(r.a), "b": _fmt(r.b), "ab": _fmt(r.ab),
            "ratio": r.ratio, "classification": r.classification,
            "paper_prediction": r.paper_prediction,
            "classical_prediction": r.classical_prediction,
            "discrepancy": r.discrepancy,
            "geometric_bound": "" if r.geometric_bound is None
            else float(r.geometric_bound),
            "maxima": ";".join(repr(float(m)) for m in r.maxima)})
    return {"k_start": args.k_start, "k_stop": args.k_stop, "rows": rows_out}


def _cmd_jump_demo(args, config):
    theta = _parse_point(args.theta)
    rows = []
    demo = gallery.definability_jump_demo(
        theta, range(0, args.max_layer + 1),
        (_parse_point(args.lo), _parse_point(args.hi)))
    for r in demo:
        rows.append({
            "layer": r.layer, "representable": r.representable,
            "jump_visible": r.jump_visible,
            "integral_low": "" if r.integral is None else _fmt(r.integral.low),
            "integral_high": "" if r.integral is None else _fmt(r.integral.high),
            "note": r.note})
    return {"theta": args.theta, "rows": rows}


# ---------------------------------------------------------------------------
# dispatch and rendering
# ---------------------------------------------------------------------------


def _dispatch(args, config: Config, tol: Fraction) -> dict:
    simple = {
        "rank": _cmd_rank, "enumerate": _cmd_enumerate, "ball": _cmd_ball,
        "continuity": _cmd_continuity, "measure": _cmd_measure,
        "liouville": _cmd_liouville, "entropy": _cmd_entropy,
        "dim": _cmd_dim, "graph-dim": _cmd_graph_dim,
        "gallery": _cmd_gallery, "weierstrass-scan": _cmd_weierstrass_scan,
        "jump-demo": _cmd_jump_demo,
    }
    with_tol = {
        "derive": _cmd_derive, "integrate": _cmd_integrate, "ftc": _cmd_ftc,
        "taylor": _cmd_taylor, "lp": _cmd_lp,
    }
    if args.command in simple:
        return simple[args.command](args, config)
    return with_tol[args.command](args, config, tol)


def _render(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    rows = payload.get("rows")
    if not rows:
        rows = [{k: v for k, v in payload.items()
                 if not isinstance(v, (dict, list))}]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()),
                            lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if v is None else v) for k, v in row.items()})
    return buf.getvalue()


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return exit_.code if isinstance(exit_.code, int) else 1

    try:
        config = load_config(args.config) if args.config else Config()
        if args.precision is not None:
            config = replace(config, precision_bits=args.precision)
        if args.format is not None:
            config = replace(config, format=args.format)
        tol = parse_rational(args.tol) if args.tol else config.tolerance
        if tol <= 0:
            raise DomainError("tolerance must be positive")

        payload = _dispatch(args, config, tol)
        payload["schema"] = SCHEMA
        if args.seed is not None:
            payload["seed"] = args.seed
        text = _render(payload, config.format)
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    except (DomainError, ValueError) as err:
        print(f"strata: error: {err}", file=sys.stderr)
        return 1
    except BudgetExhaustedError as err:
        print(f"strata: budget exhausted: {err}", file=sys.stderr)
        return 2
    except Exception as err:  # pragma: no cover - defensive
        print(f"strata: internal error: {err!r}", file=sys.stderr)
        return 3


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
