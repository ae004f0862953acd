"""Command-line front end: ``kahler-bochner {compute,check,certify,constancy}``.

Exit codes
----------
0 success, 1 residual breach, 2 parse/usage error, 3 domain error,
4 NotPreserving, 5 BochnerFlat, 6 any other verdict (or non-constant mu).

All randomness is drawn from numpy's PCG64 generator seeded with the
``--seed`` flag, so corpora reproduce exactly.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .bochner_core import (
    FLAT_TOL,
    CurvatureBundle,
    bochner_from_curvature,
    bochner_idempotence_residual,
    random_kaehler_curvature,
    ricci_of_bochner_residual,
    trace_identity_residual,
)
from .errors import (
    DimensionMismatch,
    KaehlerError,
    NotInvertible,
    NotPositiveDefinite,
    OutsideDomain,
    ParseError,
    UnknownName,
    UnsupportedDimension,
)
from .formats import load_chart_spec, load_map_file, parse_floats
from .homothety import (
    EXACT_TOL,
    HolomorphicLinearMap,
    PointData,
    Verdict,
    homothety_certificate,
    multi_point_constancy,
)
from .kaehler_geometry import NumericPotential, catalog_chart, chart_potential, curvature_at, metric_at
from .report import RunReport
from .tensor_core import curvature_symmetry_residuals, tensor_norm

EXIT_OK, EXIT_BREACH, EXIT_PARSE, EXIT_DOMAIN = 0, 1, 2, 3
VERDICT_EXIT = {
    Verdict.HOMOTHETY: 0,
    Verdict.NOT_PRESERVING: 4,
    Verdict.BOCHNER_FLAT: 5,
}
EXIT_OTHER = 6

# identity-suite tolerances (relative)
SUITE_TOL = {
    "curvature_symmetry": 1e-8,
    "bochner_symmetry": 1e-8,
    "trace_identity": 1e-8,
    "ricci_of_bochner": 1e-8,
    "idempotence": 1e-9,
}
CHART_CHECK_RADIUS = 0.3


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _chart_from_args(args):
    if args.chart_file:
        return load_chart_spec(args.chart_file)
    try:
        chart = catalog_chart(args.chart, args.n, seed=args.seed, degree=args.degree)
    except (UnknownName, UnsupportedDimension) as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    if getattr(args, "backend", "exact") == "numeric":
        chart = chart.with_backend(NumericPotential(chart_potential(chart)))
    return chart


def identity_suite(bundle: CurvatureBundle, rng_seed: int = 0) -> dict:
    """Max residuals of the Bochner identities for one curvature sample.

    Residuals of ``B`` are relative to ``max(||B||, 1e-6 ||R||)`` so a
    numerically vanishing ``B`` is judged against the curvature scale.
    """
    frame = bundle.frame
    B = bochner_from_curvature(bundle, validate=False)
    r_norm = tensor_norm(bundle.R, frame)
    scale = max(B.norm(), FLAT_TOL * r_norm)
    rng = np.random.default_rng(rng_seed)
    x = rng.standard_normal(frame.dim)
    if scale == 0.0:
        zero = dict.fromkeys(SUITE_TOL, 0.0)
        return {"residuals": zero, "bochner_norm": 0.0, "curvature_norm": r_norm}
    residuals = {
        "curvature_symmetry": max(curvature_symmetry_residuals(bundle.R, frame).values()) if r_norm else 0.0,
        "bochner_symmetry": max(curvature_symmetry_residuals(B.B, frame, scale).values()),
        "trace_identity": trace_identity_residual(B, x, rng=rng, scale=scale),
        "ricci_of_bochner": ricci_of_bochner_residual(B, scale),
        "idempotence": bochner_idempotence_residual(B, scale),
    }
    return {"residuals": residuals, "bochner_norm": B.norm(), "curvature_norm": r_norm}


# ---------------------------------------------------------------------------
# commands


def cmd_compute(args) -> RunReport:
    chart = _chart_from_args(args)
    try:
        point = parse_floats(args.point)
    except ParseError as exc:
        raise CliError(f"--point: {exc}", EXIT_PARSE) from None
    if point.size != 2 * chart.n:
        raise CliError(f"--point needs {2 * chart.n} coordinates for n={chart.n}, got {point.size}", EXIT_PARSE)
    frame = metric_at(chart, point)
    bundle = CurvatureBundle.from_curvature(frame, curvature_at(chart, point))
    B = bochner_from_curvature(bundle, validate=False)
    suite = identity_suite(bundle)
    r_norm = suite["curvature_norm"]
    results = {
        "g": frame.g,
        "J": frame.J,
        "R": bundle.R,
        "S": bundle.S,
        "S_endo": bundle.S_endo,
        "tau": bundle.tau,
        "B": B.B,
        "curvature_norm": r_norm,
        "bochner_norm": B.norm(),
        "bochner_ratio": B.norm() / r_norm if r_norm else 0.0,
        "curvature_symmetry_residuals": curvature_symmetry_residuals(bundle.R, frame),
        "bochner_symmetry_residuals": curvature_symmetry_residuals(
            B.B, frame, max(B.norm(), FLAT_TOL * r_norm) or None
        ),
        "trace_identity_residual": suite["residuals"]["trace_identity"],
        "suite_residuals": suite["residuals"],
    }
    inputs = {"chart": chart.name, "n": chart.n, "point": point, "params": chart.params}
    return RunReport("compute", inputs, results, "ok", EXIT_OK)


def _random_sample(seed, n):
    return seed, identity_suite(random_kaehler_curvature(seed, n), rng_seed=seed)


def cmd_check(args) -> RunReport:
    if args.trials is not None and args.trials < 1:
        raise CliError("--trials must be at least 1", EXIT_PARSE)
    trials = args.trials or 5
    inputs = {"trials": trials, "seed": args.seed}
    if args.random:
        inputs.update(corpus="random", n=args.n)
        seeds = [args.seed + i for i in range(trials)]
        with ThreadPoolExecutor(max_workers=max(args.workers, 1)) as pool:
            samples = sorted(pool.map(lambda s: _random_sample(s, args.n), seeds), key=lambda t: t[0])
        labelled = [(f"seed={s}", r) for s, r in samples]
    else:
        chart = _chart_from_args(args)
        inputs.update(corpus="chart", chart=chart.name, n=chart.n)
        rng = np.random.Generator(np.random.PCG64(args.seed))
        points = [np.zeros(2 * chart.n)]
        for _ in range(trials - 1):
            v = rng.standard_normal(2 * chart.n)
            points.append(CHART_CHECK_RADIUS * rng.uniform() * v / np.linalg.norm(v))
        labelled = []
        for pt in points:
            bundle = CurvatureBundle.from_curvature(metric_at(chart, pt), curvature_at(chart, pt))
            labelled.append((f"point={pt.tolist()}", identity_suite(bundle)))

    worst = {}
    for key, tol in SUITE_TOL.items():
        label, sample = max(labelled, key=lambda t: t[1]["residuals"][key])
        worst[key] = {"max": sample["residuals"][key], "tol": tol, "at": label}
    breaches = {k: v for k, v in worst.items() if not v["max"] <= v["tol"]}
    results = {"samples": len(labelled), "max_residuals": worst, "breaches": sorted(breaches)}
    if breaches:
        key = max(breaches, key=lambda k: breaches[k]["max"] / breaches[k]["tol"])
        print(f"residual breach: {key} = {breaches[key]['max']:.3e} at {breaches[key]['at']}", file=sys.stderr)
        return RunReport("check", inputs, results, "breach", EXIT_BREACH)
    return RunReport("check", inputs, results, "ok", EXIT_OK)


def _certify_block(block, tol):
    p = PointData.from_chart(block.chart, block.point_p)
    q = PointData.from_chart(block.chart, block.point_q)
    try:
        F = HolomorphicLinearMap(p.frame, q.frame, block.F)
    except (NotInvertible, DimensionMismatch) as exc:
        raise CliError(f"line {block.line}: {exc}", EXIT_PARSE) from None
    return homothety_certificate(p, q, F, tol)


def _block_inputs(block):
    return {
        "line": block.line,
        "chart": block.chart_text,
        "point_p": block.point_p,
        "point_q": block.point_q,
        "F": block.F,
    }


def cmd_certify(args) -> RunReport:
    blocks = load_map_file(args.map_file)
    reports = [_certify_block(b, args.tol) for b in blocks]
    code = next((VERDICT_EXIT.get(r.verdict, EXIT_OTHER) for r in reports if not r.is_homothety), EXIT_OK)
    inputs = {"map_file": str(args.map_file), "tol": args.tol, "blocks": [_block_inputs(b) for b in blocks]}
    results = {"reports": [r.to_dict() for r in reports]}
    if len(reports) == 1:
        results["report"] = results["reports"][0]
    status = "Homothety" if code == EXIT_OK else next(r.verdict.value for r in reports if not r.is_homothety)
    return RunReport("certify", inputs, results, status, code)


def cmd_constancy(args) -> RunReport:
    blocks = load_map_file(args.map_file)
    if len(blocks) < 2:
        raise CliError("constancy needs at least two point blocks", EXIT_PARSE)
    tuples = []
    for block in blocks:
        p = PointData.from_chart(block.chart, block.point_p)
        q = PointData.from_chart(block.chart, block.point_q)
        try:
            tuples.append((p, q, HolomorphicLinearMap(p.frame, q.frame, block.F)))
        except (NotInvertible, DimensionMismatch) as exc:
            raise CliError(f"line {block.line}: {exc}", EXIT_PARSE) from None
    result = multi_point_constancy(tuples, args.tol)
    inputs = {"map_file": str(args.map_file), "tol": args.tol, "blocks": [_block_inputs(b) for b in blocks]}
    results = {
        "mu": result.mus,
        "constant": result.constant,
        "spread": result.spread,
        "failed_index": result.failed_index,
        "reports": [r.to_dict() for r in result.reports],
    }
    if result.failed_index is not None:
        bad = result.reports[result.failed_index]
        print(f"block at line {blocks[result.failed_index].line}: {bad.verdict.value}", file=sys.stderr)
        return RunReport("constancy", inputs, results, bad.verdict.value, VERDICT_EXIT.get(bad.verdict, EXIT_OTHER))
    if not result.constant:
        return RunReport("constancy", inputs, results, "NotConstant", EXIT_OTHER)
    return RunReport("constancy", inputs, results, "Constant", EXIT_OK)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kahler-bochner", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def chart_args(p, required=True):
        group = p.add_mutually_exclusive_group(required=required)
        group.add_argument("--chart", help="catalog chart name")
        group.add_argument("--chart-file", type=Path, help="chart specification file")
        p.add_argument("--n", type=int, default=2, help="complex dimension (default 2)")
        p.add_argument("--seed", type=int, default=0, help="64-bit PCG64 seed")
        p.add_argument("--degree", type=int, default=4, help="random-poly degree")
        p.add_argument("--backend", choices=("exact", "numeric"), default="exact")

    def output_arg(p):
        p.add_argument("--output", "-o", type=Path, help="write JSON here instead of stdout")

    p = sub.add_parser("compute", help="g, J, R, S, tau and B at a point")
    chart_args(p)
    p.add_argument("--point", required=True, help="comma-separated x1..xn,y1..yn")
    output_arg(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("check", help="run the Bochner identity suite")
    chart_args(p, required=False)
    p.add_argument("--random", action="store_true", help="random polynomial corpus")
    p.add_argument("--trials", type=int, default=None, help="corpus size / number of points")
    p.add_argument("--workers", type=int, default=1)
    output_arg(p)
    p.set_defaults(func=cmd_check)

    for name, func, helptext in (
        ("certify", cmd_certify, "homothety certificate for each map block"),
        ("constancy", cmd_constancy, "certify several blocks and test mu constancy"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("map_file", type=Path)
        p.add_argument("--tol", type=float, default=EXACT_TOL)
        output_arg(p)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "check" and not args.random and not (args.chart or args.chart_file):
        parser.error("check needs --random or a chart")
    if args.command == "check" and args.random and (args.chart or args.chart_file):
        parser.error("--random and a chart are mutually exclusive")
    try:
        report = args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ParseError, UnknownName) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (DimensionMismatch, UnsupportedDimension) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (OutsideDomain, NotPositiveDefinite) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except KaehlerError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_OTHER
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    text = report.to_json()
    if args.output:
        args.output.write_text(text + "\n")
    else:
        print(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
