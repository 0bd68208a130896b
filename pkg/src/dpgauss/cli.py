"""Command-line interface.

Subcommands:
  calibrate       noise scale for a privacy budget (analytic, classical, laplace)
  profile         achieved delta of a given Gaussian noise scale
  perturb         evaluate a query on a dataset file and release it with noise
  denoise         post-process a release file with a shrinkage/threshold estimator
  bench-sweep     tabulate analytic vs classical scales over an (epsilon, delta) grid
  bench-estimate  synthetic mean/histogram estimation-error experiments

Exit codes: 0 on success, 2 on domain or validation errors, 3 on numerical
failure.  Numeric output uses shortest round-trip decimal formatting, so
repeated identical invocations produce byte-identical files.  When the
environment variable DPGAUSS_OUT_DIR is set, relative output paths are
resolved under it.

Example:
  dpgauss calibrate --mechanism analytic --epsilon 1 --delta 1e-6
  dpgauss perturb --input data.csv --query mean --mechanism analytic \\
      --epsilon 1 --delta 1e-6 --seed 7 --output release.json
  dpgauss denoise --release release.json --estimator js --output denoised.json
  dpgauss bench-sweep --epsilons 0.5,0.9 --deltas 1e-3,1e-5 -o sweep.csv
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import bench, figures
from .calibrate import (
    CalibrationResult,
    PrivacySpec,
    achieved_delta,
    calibrate_analytic,
    calibrate_classical,
    calibrate_laplace,
)
from .denoise import (
    DenoiserChoice,
    DenoiserKind,
    default_threshold,
    denoise_james_stein,
)
from .errors import BracketingError, CalibrationError, DomainError
from .mechanism import (
    Mechanism,
    QueryKind,
    QuerySpec,
    Release,
    evaluate_query,
    perturb_gaussian,
    perturb_laplace,
)

_OUT_DIR_ENV = "DPGAUSS_OUT_DIR"


def _out_path(path: str) -> Path:
    base = os.environ.get(_OUT_DIR_ENV)
    p = Path(path)
    if base and not p.is_absolute():
        return Path(base) / p
    return p


def _fmt(value: object) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _emit_mapping(pairs: list[tuple[str, object]], fmt: str) -> str:
    """Render key/value output as plain lines, JSON, or a one-row CSV.

    None-valued keys are dropped from plain output, null/empty elsewhere.
    """
    if fmt == "json":
        return json.dumps({k: v for k, v in pairs}) + "\n"
    if fmt == "csv":
        header = ",".join(k for k, _ in pairs)
        row = ",".join("" if v is None else _fmt(v) for _, v in pairs)
        return header + "\n" + row + "\n"
    lines = [f"{k} {_fmt(v)}" for k, v in pairs if v is not None]
    return "\n".join(lines) + "\n"


def _calibration_pairs(result: CalibrationResult) -> list[tuple[str, object]]:
    return [
        ("sigma", result.sigma),
        ("alpha", result.alpha),
        ("branch", result.branch.value),
        ("delta_zero", result.delta_zero),
        ("achieved_delta", result.achieved_delta),
        ("iterations", result.iterations),
    ]


def _add_format_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format",
        choices=("plain", "json", "csv"),
        default="plain",
        help="output rendering (default plain)",
    )


def _add_calibrate(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("calibrate", help="noise scale for a privacy budget")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, default=None, help="required for Gaussian mechanisms")
    p.add_argument("--sensitivity", type=float, default=1.0,
                   help="L2 sensitivity (L1 for laplace); default 1")
    p.add_argument("--mechanism", choices=("analytic", "classical", "laplace"),
                   default="analytic")
    p.add_argument("--tolerance", type=float, default=1e-12)
    _add_format_flag(p)


def _run_calibrate(args: argparse.Namespace) -> int:
    result = _calibrate_for(args.mechanism, args.epsilon, args.delta,
                            args.sensitivity, args.tolerance)
    sys.stdout.write(_emit_mapping(_calibration_pairs(result), args.format))
    return 0


def _calibrate_for(mechanism: str, epsilon: float, delta: float | None,
                   sensitivity: float, tolerance: float = 1e-12) -> CalibrationResult:
    if mechanism == "laplace":
        return calibrate_laplace(epsilon, sensitivity)
    if delta is None:
        raise DomainError("--delta is required for Gaussian mechanisms")
    spec = PrivacySpec(epsilon=epsilon, delta=delta)
    if mechanism == "classical":
        return calibrate_classical(spec, sensitivity)
    return calibrate_analytic(spec, sensitivity, tolerance)


def _add_profile(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("profile", help="achieved delta of a Gaussian noise scale")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--sensitivity", type=float, default=1.0)
    _add_format_flag(p)


def _run_profile(args: argparse.Namespace) -> int:
    value = achieved_delta(args.epsilon, args.sigma, args.sensitivity)
    if args.format == "plain":
        sys.stdout.write(_fmt(value) + "\n")
    else:
        sys.stdout.write(_emit_mapping([("achieved_delta", value)], args.format))
    return 0


def _add_perturb(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("perturb", help="noisy release of a query on a dataset file")
    p.add_argument("--input", required=True, help="CSV matrix (mean) or one label per line "
                   "(histogram)")
    p.add_argument("--query", choices=("mean", "histogram"), required=True)
    p.add_argument("--bins", type=int, default=None, help="histogram bin count d")
    p.add_argument("--mechanism", choices=("analytic", "classical", "laplace", "none"),
                   default="analytic")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", default=None, help="release JSON path (default stdout)")


def _load_query_input(args: argparse.Namespace) -> tuple[QuerySpec, np.ndarray]:
    path = Path(args.input)
    if not path.exists():
        raise DomainError(f"input file not found: {path}")
    try:
        if args.query == "mean":
            data = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
        else:
            data = np.loadtxt(path, dtype=int, ndmin=1)
    except (ValueError, OSError) as exc:
        raise DomainError(f"could not parse {path}: {exc}") from exc
    if args.query == "mean":
        n, d = data.shape
        return QuerySpec.mean(n, d), data
    if args.bins is None:
        raise DomainError("--bins is required for histogram queries")
    return QuerySpec.histogram(data.shape[0], args.bins), data


def _run_perturb(args: argparse.Namespace) -> int:
    query, data = _load_query_input(args)
    exact = evaluate_query(query, data)
    if args.mechanism == "none":
        release = perturb_gaussian(exact, 0.0, args.seed)
    elif args.mechanism == "laplace":
        if args.epsilon is None:
            raise DomainError("--epsilon is required for the laplace mechanism")
        scale = calibrate_laplace(args.epsilon, query.sensitivities.l1).sigma
        release = perturb_laplace(exact, scale, args.seed)
    else:
        if args.epsilon is None or args.delta is None:
            raise DomainError("--epsilon and --delta are required for Gaussian mechanisms")
        result = _calibrate_for(args.mechanism, args.epsilon, args.delta, query.sensitivities.l2)
        mechanism = (
            Mechanism.ANALYTIC_GAUSSIAN if args.mechanism == "analytic"
            else Mechanism.CLASSICAL_GAUSSIAN
        )
        release = perturb_gaussian(exact, result.sigma, args.seed, mechanism)
    payload = json.dumps(release.to_dict()) + "\n"
    if args.output is None:
        sys.stdout.write(payload)
    else:
        _out_path(args.output).write_text(payload)
    return 0


def _add_denoise(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("denoise", help="post-process a release file")
    p.add_argument("--release", required=True, help="release JSON from perturb")
    p.add_argument("--estimator", choices=("bayes", "js", "soft"), required=True)
    p.add_argument("--w2", type=float, default=None, help="prior variance (bayes)")
    p.add_argument("--threshold", type=float, default=None,
                   help="soft threshold; default sigma*sqrt(2 ln d)")
    p.add_argument("--positive-part", action="store_true",
                   help="clip the James-Stein factor at zero")
    p.add_argument("--output", "-o", default=None, help="denoised JSON path (default stdout)")


def _run_denoise(args: argparse.Namespace) -> int:
    path = Path(args.release)
    if not path.exists():
        raise DomainError(f"release file not found: {path}")
    try:
        release = Release.from_dict(json.loads(path.read_text()))
    except json.JSONDecodeError as exc:
        raise DomainError(f"could not parse {path}: {exc}") from exc
    kind = {
        "bayes": DenoiserKind.BAYES_GAUSSIAN_PRIOR,
        "js": DenoiserKind.JAMES_STEIN,
        "soft": DenoiserKind.SOFT_THRESHOLD,
    }[args.estimator]
    if kind is DenoiserKind.BAYES_GAUSSIAN_PRIOR and args.w2 is None:
        raise DomainError("--w2 is required for the bayes estimator")
    choice = DenoiserChoice(kind=kind, w2=args.w2, threshold=args.threshold)
    meta: dict[str, object] = {"estimator": args.estimator}
    if kind is DenoiserKind.BAYES_GAUSSIAN_PRIOR:
        values = choice.apply(release)
        meta["w2"] = args.w2
    elif kind is DenoiserKind.JAMES_STEIN:
        values = (
            denoise_james_stein(release, positive_part=True)
            if args.positive_part
            else choice.apply(release)
        )
        meta["positive_part"] = args.positive_part
    else:
        values = choice.apply(release)
        meta["threshold"] = (
            args.threshold if args.threshold is not None
            else default_threshold(release.sigma, release.d)
        )
    payload = json.dumps(
        {"values": [float(v) for v in values], "d": int(values.shape[0]), **meta}
    ) + "\n"
    if args.output is None:
        sys.stdout.write(payload)
    else:
        _out_path(args.output).write_text(payload)
    return 0


def _csv_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise DomainError(f"expected a comma-separated list of numbers, got {text!r}") from exc


def _csv_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise DomainError(f"expected a comma-separated list of integers, got {text!r}") from exc


def _add_bench_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", "-o", default=None, help="records path (default stdout)")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p.add_argument("--figure", default=None,
                   help="figure PNG path (default: alongside --output)")
    p.add_argument("--no-figure", action="store_true", help="skip figure rendering")


def _figure_path(args: argparse.Namespace) -> Path | None:
    if args.no_figure:
        return None
    if args.figure is not None:
        return _out_path(args.figure)
    if args.output is not None:
        return _out_path(args.output).with_suffix(".png")
    return None


def _write_records(records: Sequence[object], args: argparse.Namespace) -> None:
    text = (
        bench.records_to_csv_text(records)
        if args.format == "csv"
        else bench.records_to_jsonl_text(records)
    )
    if args.output is None:
        sys.stdout.write(text)
    else:
        _out_path(args.output).write_text(text)


def _add_bench_sweep(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("bench-sweep", help="analytic vs classical calibration sweep")
    p.add_argument("--epsilons", type=_csv_floats, required=True)
    p.add_argument("--deltas", type=_csv_floats, required=True)
    p.add_argument("--sensitivity", type=float, default=1.0)
    p.add_argument("--tolerance", type=float, default=1e-12)
    _add_bench_output_flags(p)


def _run_bench_sweep(args: argparse.Namespace) -> int:
    config = bench.SweepConfig(
        epsilon_grid=args.epsilons,
        delta_grid=args.deltas,
        delta_l2=args.sensitivity,
        tolerance=args.tolerance,
    )
    rows = bench.run_calibration_sweep(config)
    _write_records(rows, args)
    figure = _figure_path(args)
    if figure is not None:
        figures.save_sweep_figure(rows, str(figure))
    return 0


def _add_bench_estimate(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("bench-estimate", help="synthetic estimation-error experiment")
    p.add_argument("--task", choices=("mean", "histogram"), required=True)
    p.add_argument("--dims", type=_csv_ints, required=True, help="dimension grid")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--delta", type=float, default=1e-4)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--methods", default=",".join(bench.ALL_METHODS),
                   help="comma-separated subset of "
                        f"{','.join(bench.ALL_METHODS + (bench.METHOD_NONE,))}")
    p.add_argument("--seed", type=int, default=0, help="base seed")
    p.add_argument("--summary", default=None, help="also write per-(method, d) summary here")
    _add_bench_output_flags(p)


def _run_bench_estimate(args: argparse.Namespace) -> int:
    task = QueryKind.MEAN if args.task == "mean" else QueryKind.HISTOGRAM
    config = bench.EstimationConfig(
        task=task,
        d_grid=args.dims,
        epsilon=args.epsilon,
        n=args.n,
        delta=args.delta,
        trials=args.trials,
        methods=tuple(args.methods.split(",")),
        base_seed=args.seed,
    )
    records = bench.run_estimation_experiment(config)
    _write_records(records, args)
    summary = bench.summarize(records)
    if args.summary is not None:
        text = (
            bench.records_to_csv_text(summary)
            if args.format == "csv"
            else bench.records_to_jsonl_text(summary)
        )
        _out_path(args.summary).write_text(text)
    figure = _figure_path(args)
    if figure is not None:
        figures.save_estimation_figure(summary, task, str(figure))
    return 0


_RUNNERS = {
    "calibrate": _run_calibrate,
    "profile": _run_profile,
    "perturb": _run_perturb,
    "denoise": _run_denoise,
    "bench-sweep": _run_bench_sweep,
    "bench-estimate": _run_bench_estimate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dpgauss",
        description="Calibrated Gaussian noise for differential privacy, "
        "with post-release denoising and benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_calibrate(sub)
    _add_profile(sub)
    _add_perturb(sub)
    _add_denoise(sub)
    _add_bench_sweep(sub)
    _add_bench_estimate(sub)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _RUNNERS[args.command](args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (BracketingError, CalibrationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
