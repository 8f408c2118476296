#!/usr/bin/env python
import logging
from argparse import Namespace

from tabulate import tabulate

from delone_diagnostics.almostperiod import (
    BumpSpec,
    UapVerdict,
    bohr_diagnostic,
    delone_distance,
    eps_almost_periods,
    return_vectors,
    uap_diagnostic,
)
from delone_diagnostics.dynamics import (
    find_separating_anchor,
    proximality_probe,
    separation_radius,
)
from delone_diagnostics.errors import InputError
from delone_diagnostics.generators import source_from_spec
from delone_diagnostics.geometry import Ball
from delone_diagnostics.sources import (
    DeloneSource,
    delone_check,
    detect_periods,
    flc_census,
    materialize,
    normalize,
)
from delone_diagnostics.utils.point_files import source_from_points, write_points
from delone_diagnostics.utils.reports import (
    op_record,
    to_jsonable,
    write_plot_data,
    write_report,
)
from delone_diagnostics.utils.spec_files import load_generator_spec

DESC = """This file contains the subcommands of the Delone set diagnostics script."""

# Window radius used when --window is not given
DEFAULT_WINDOWS = {
    "generate": 50.0,
    "analyze": 50.0,
    "compare": 50.0,
    "diagnose": 200.0,
}
DEFAULT_FORMATS = {
    "generate": "points",
    "analyze": "json",
    "compare": "json",
    "diagnose": "json",
}
ANALYSES = [
    "delone_check",
    "flc_census",
    "detect_periods",
    "eps_almost_periods",
    "return_vectors",
    "bohr_diagnostic",
    "uap_diagnostic",
]
# Fractions of the window radius sampled for the plot data
PLOT_FRACTIONS = (0.25, 0.5, 0.75, 1.0)


def load_sources(args: Namespace) -> list[DeloneSource]:
    """Generator specs first, then point files, each in the order given."""
    sources = [source_from_spec(load_generator_spec(path)) for path in args.spec or []]
    sources += [source_from_points(path) for path in args.points or []]
    return sources


def _single_source(args: Namespace) -> DeloneSource:
    sources = load_sources(args)
    assert len(sources) == 1, (
        f"Expected exactly one input (--spec or --points), got {len(sources)}."
    )
    return sources[0]


def _window(args: Namespace, dim: int = 1) -> Ball:
    radius = args.window or DEFAULT_WINDOWS[args.subcommand]
    assert radius > 0, f"Window radius must be positive, got {radius}."
    return Ball.around_origin(radius, dim)


def _format(args: Namespace) -> str:
    return args.format or DEFAULT_FORMATS[args.subcommand]


def resolve_epsilon(args: Namespace, src: DeloneSource, window: Ball) -> float:
    """The --epsilon value, scaled by the measured packing radius if asked for."""
    if args.epsilon is None:
        raise InputError("This analysis needs --epsilon.")
    if args.epsilon["unit"] == "r_min":
        r_min = delone_check(src, window).r_min
        epsilon = args.epsilon["value"] * r_min
        logging.info(
            f"Resolved epsilon {args.epsilon['value']:g} * r_min = {epsilon:g}."
        )
        return epsilon
    return args.epsilon["value"]


def resolved_params(args: Namespace, **extra) -> dict:
    params = {k: v for k, v in vars(args).items() if k != "log"}
    params.update(extra)
    return params


def _uap_summary(verdict: UapVerdict) -> dict:
    steps = []
    for step in verdict.steps:
        steps.append(
            {
                "epsilon": step.epsilon,
                "return_vectors_max_gap": step.return_vectors.max_gap,
                "max_gap": [report.max_gap for report in step.reports],
                "periods": [len(report.periods) for report in step.reports],
                "witness": [
                    {"a": w.a, "max_displacement": w.max_displacement}
                    for w in step.witnesses
                ],
                "failures": step.failures,
            }
        )
    return {
        "verdict": verdict.verdict,
        "windows": verdict.windows,
        "skipped": verdict.skipped,
        "seed": verdict.seed,
        "steps": steps,
    }


def _run_analysis(op: str, src: DeloneSource, window: Ball, args: Namespace) -> dict:
    if op == "delone_check":
        return op_record(op, {"window": window}, delone_check(src, window))

    if op == "flc_census":
        census = flc_census(src, args.radius, window, args.tol)
        return op_record(
            op,
            {"window": window, "r": args.radius, "tol": args.tol},
            {"classes": len(census), "counts": [count for _, count in census]},
        )

    if op == "detect_periods":
        periods = detect_periods(src, window, args.tol)
        return op_record(op, {"window": window, "tol": args.tol}, {"periods": periods})

    if op == "eps_almost_periods":
        epsilon = resolve_epsilon(args, src, window)
        report = eps_almost_periods(src, epsilon, window)
        return op_record(op, {"window": window, "epsilon": epsilon}, report)

    if op == "return_vectors":
        report = return_vectors(normalize(src), args.radius, window)
        return op_record(op, {"window": window, "r": args.radius}, report)

    if op == "bohr_diagnostic":
        phi = BumpSpec(half_width=args.half_width)
        pitch = args.pitch or phi.half_width / 10
        epsilon = resolve_epsilon(args, src, window)
        report = bohr_diagnostic(src, phi, epsilon, pitch, window)
        params = {"window": window, "epsilon": epsilon, "phi": phi, "pitch": pitch}
        return op_record(op, params, report)

    if op == "uap_diagnostic":
        return _diagnose(src, window, args)

    raise InputError(f"Unknown analysis '{op}', expected one of {ANALYSES}.")


def _diagnose(src: DeloneSource, window: Ball, args: Namespace) -> dict:
    windows = [Ball.around_origin(window.radius / 2), window]
    ladder = None
    if args.epsilon is not None:
        ladder = [resolve_epsilon(args, src, window)]
    verdict = uap_diagnostic(src, ladder=ladder, windows=windows, seed=args.seed)
    params = {"windows": windows, "ladder": ladder, "seed": args.seed}
    return op_record("uap_diagnostic", params, _uap_summary(verdict))


def _plot_rows(src: DeloneSource, window: Ball, args: Namespace) -> list[dict]:
    """Covering radius and ε-period gaps per window radius, census size per r."""
    rows = []
    for fraction in PLOT_FRACTIONS:
        sub = Ball(window.center, fraction * window.radius)
        rows.append(
            {"series": "r_max", "x": sub.radius, "y": delone_check(src, sub).r_max}
        )
    if "eps_almost_periods" in args.ops:
        epsilon = resolve_epsilon(args, src, window)
        for fraction in PLOT_FRACTIONS:
            sub = Ball(window.center, fraction * window.radius)
            gap = eps_almost_periods(src, epsilon, sub).max_gap
            rows.append({"series": "eps_max_gap", "x": sub.radius, "y": gap})
    if "flc_census" in args.ops:
        for fraction in PLOT_FRACTIONS:
            r = fraction * args.radius
            count = len(flc_census(src, r, window, args.tol))
            rows.append({"series": "census_classes", "x": r, "y": count})
    return rows


def cmd_generate(args: Namespace):
    """Materialize a generator spec on the window and write it as a point file."""
    assert args.spec and not args.points, "generate takes exactly one --spec."
    src = _single_source(args)
    window = _window(args, src.dim)
    pts = materialize(src, window)
    fmt = _format(args)
    if fmt == "points":
        assert args.out, "generate --format points needs --out."
        write_points(pts, args.out, window)
    elif fmt == "json":
        write_report(
            {
                "op": "generate",
                "params": resolved_params(args, window=window),
                "points": pts,
            },
            args.out,
        )
    else:
        raise InputError(f"generate cannot write format '{fmt}'.")
    logging.info(f"Generated {len(pts)} points of '{src.label}' on {window}.")


def cmd_analyze(args: Namespace):
    """Run the analyses named by --ops and write their report or plot data."""
    src = _single_source(args)
    window = _window(args, src.dim)
    unknown = [op for op in args.ops if op not in ANALYSES]
    assert not unknown, f"Unknown analyses {unknown}, expected some of {ANALYSES}."

    fmt = _format(args)
    if fmt == "csv":
        write_plot_data(_plot_rows(src, window, args), args.out)
        return
    assert fmt == "json", f"analyze cannot write format '{fmt}'."

    results = []
    for op in args.ops:
        logging.info(f"Running '{op}' on '{src.label}'...")
        results.append(_run_analysis(op, src, window, args))
    summary = [
        [r["op"], r.get("max_gap", ""), r.get("verdict", r.get("classes", ""))]
        for r in results
    ]
    logging.info("\n" + tabulate(summary, headers=["op", "max gap", "outcome"]))
    write_report(
        {"input": src.label, "params": resolved_params(args), "results": results},
        args.out,
    )


def cmd_compare(args: Namespace):
    """Delone distance, proximality and a separating anchor for two inputs."""
    sources = load_sources(args)
    assert len(sources) == 2, f"compare needs two inputs, got {len(sources)}."
    e1, e2 = sources
    window = _window(args, e1.dim)

    distance = delone_distance(e1, e2, args.r_cap)
    proximality = proximality_probe(e1, e2, window, args.radius)

    anchor = None
    try:
        bounds = [
            src.r_max_upper or delone_check(src, window).r_max for src in sources
        ]
        C_radius = separation_radius(max(bounds))
        anchor = find_separating_anchor(e1, e2, C_radius, window, args.tol)
    except InputError as e:
        logging.warning(f"No separating anchor search: {e}")

    results = [
        op_record("delone_distance", {"r_cap": args.r_cap}, {"distance": distance}),
        op_record("proximality_probe", {"r": args.radius}, proximality),
        op_record(
            "find_separating_anchor",
            {"tol": args.tol},
            anchor if anchor is not None else {"found": None},
        ),
    ]
    logging.info(
        "\n"
        + tabulate(
            [
                ["delone_distance", distance],
                ["proximality", proximality.inf_estimate],
                ["anchor", to_jsonable(anchor.anchor) if anchor else None],
            ],
            headers=[e1.label, e2.label],
        )
    )
    write_report(
        {
            "inputs": [e1.label, e2.label],
            "params": resolved_params(args),
            "results": results,
        },
        args.out,
    )


def cmd_diagnose(args: Namespace):
    """Run the almost-periodicity ladder and write its verdict record."""
    src = _single_source(args)
    window = _window(args, src.dim)
    record = _diagnose(src, window, args)
    logging.info(f"Verdict: {record['verdict']}.")
    report = {"input": src.label, "params": resolved_params(args), "results": [record]}
    write_report(report, args.out)
