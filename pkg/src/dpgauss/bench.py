"""Benchmark harness: calibration sweeps and synthetic estimation runs.

Two experiment families are provided.  The calibration sweep tabulates the
noise scales of the analytic and classical Gaussian calibrations over an
(epsilon, delta) grid, together with the variance gain of the former.  The
estimation experiments release a mean or histogram query under several
mechanisms (with optional post-release denoising) and record per-trial
errors.  Both emit CSV or JSON-lines records suitable for plotting.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, fields
from typing import Sequence, TextIO

import numpy as np

from .calibrate import (
    PrivacySpec,
    calibrate_analytic,
    calibrate_classical,
    calibrate_laplace,
)
from .denoise import denoise_james_stein, denoise_soft_threshold
from .errors import DomainError
from .mechanism import (
    Mechanism,
    QueryKind,
    QuerySpec,
    evaluate_query,
    perturb_gaussian,
    perturb_laplace,
)

# Canonical method names, as they appear in output records.
METHOD_CLASSICAL = "cGM"
METHOD_ANALYTIC = "aGM"
METHOD_JAMES_STEIN = "aGM-JS"
METHOD_SOFT_THRESHOLD = "aGM-TH"
METHOD_LAPLACE = "Lap"
METHOD_NONE = "none"

ALL_METHODS = (
    METHOD_CLASSICAL,
    METHOD_ANALYTIC,
    METHOD_JAMES_STEIN,
    METHOD_SOFT_THRESHOLD,
    METHOD_LAPLACE,
)

_ANALYTIC_FAMILY = {METHOD_ANALYTIC, METHOD_JAMES_STEIN, METHOD_SOFT_THRESHOLD}


@dataclass(frozen=True)
class SweepConfig:
    epsilon_grid: tuple[float, ...]
    delta_grid: tuple[float, ...]
    delta_l2: float = 1.0
    tolerance: float = 1e-12

    def __post_init__(self) -> None:
        object.__setattr__(self, "epsilon_grid", tuple(float(e) for e in self.epsilon_grid))
        object.__setattr__(self, "delta_grid", tuple(float(d) for d in self.delta_grid))
        if not self.epsilon_grid or not self.delta_grid:
            raise DomainError("sweep grids must be nonempty")
        if any(not math.isfinite(e) or e <= 0.0 for e in self.epsilon_grid):
            raise DomainError("sweep epsilons must be finite and > 0")
        if any(not 0.0 < d < 1.0 for d in self.delta_grid):
            raise DomainError("sweep deltas must lie in (0, 1)")
        if not math.isfinite(self.delta_l2) or self.delta_l2 <= 0.0:
            raise DomainError(f"delta_l2 must be finite and > 0, got {self.delta_l2!r}")
        if not math.isfinite(self.tolerance) or self.tolerance <= 0.0:
            raise DomainError(f"tolerance must be finite and > 0, got {self.tolerance!r}")


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    delta: float
    sigma_classical: float | None
    sigma_analytic: float
    variance_gain: float | None


def run_calibration_sweep(config: SweepConfig) -> list[SweepRow]:
    """Calibrate both Gaussian variants over the grid.

    Grid points outside the classical formula's validity (epsilon >= 1)
    produce analytic-only rows with the classical scale and gain absent.
    Deterministic: no randomness is involved.
    """
    rows = []
    for eps in config.epsilon_grid:
        for delta in config.delta_grid:
            spec = PrivacySpec(epsilon=eps, delta=delta)
            analytic = calibrate_analytic(spec, config.delta_l2, config.tolerance)
            try:
                classical = calibrate_classical(spec, config.delta_l2)
                sigma_classical: float | None = classical.sigma
                gain: float | None = (classical.sigma / analytic.sigma) ** 2
            except DomainError:
                sigma_classical = None
                gain = None
            rows.append(
                SweepRow(
                    epsilon=eps,
                    delta=delta,
                    sigma_classical=sigma_classical,
                    sigma_analytic=analytic.sigma,
                    variance_gain=gain,
                )
            )
    return rows


@dataclass(frozen=True)
class EstimationConfig:
    task: QueryKind
    d_grid: tuple[int, ...]
    epsilon: float
    n: int = 500
    delta: float = 1e-4
    trials: int = 100
    methods: tuple[str, ...] = ALL_METHODS
    base_seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "d_grid", tuple(int(d) for d in self.d_grid))
        object.__setattr__(self, "methods", tuple(self.methods))
        if not isinstance(self.task, QueryKind):
            try:
                object.__setattr__(self, "task", QueryKind(self.task))
            except ValueError:
                raise DomainError(f"task must be a QueryKind, got {self.task!r}") from None
        if not self.d_grid or any(d < 1 for d in self.d_grid):
            raise DomainError("d_grid must be nonempty with positive dimensions")
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n!r}")
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials!r}")
        if not math.isfinite(self.epsilon) or self.epsilon <= 0.0:
            raise DomainError(f"epsilon must be finite and > 0, got {self.epsilon!r}")
        if not 0.0 < self.delta < 1.0:
            raise DomainError(f"delta must lie in (0, 1), got {self.delta!r}")
        unknown = set(self.methods) - set(ALL_METHODS) - {METHOD_NONE}
        if unknown or not self.methods:
            raise DomainError(
                f"methods must be a nonempty subset of {ALL_METHODS + (METHOD_NONE,)}, "
                f"got {self.methods!r}"
            )
        if METHOD_JAMES_STEIN in self.methods and any(d < 3 for d in self.d_grid):
            raise DomainError("James-Stein denoising needs every dimension >= 3")
        if self.task is QueryKind.HISTOGRAM and any(d < 2 for d in self.d_grid):
            raise DomainError("histogram experiments need every dimension >= 2")
        if self.base_seed < 0:
            raise DomainError(f"base_seed must be nonnegative, got {self.base_seed!r}")


@dataclass(frozen=True)
class ExperimentRecord:
    method: str
    d: int
    epsilon: float
    delta: float
    trial: int
    error: float
    error_l1: float
    error_l2: float
    sigma_used: float


def gen_mean_dataset(n: int, d: int, seed: int) -> np.ndarray:
    """n records scattered uniformly (L-infinity radius 1/2) around a
    standard-normal center; the column-mean query's ground truth is near
    that center."""
    if n < 1 or d < 1:
        raise DomainError(f"need n >= 1 and d >= 1, got n={n!r}, d={d!r}")
    rng = np.random.default_rng(seed)
    center = rng.standard_normal(d)
    offsets = rng.uniform(-0.5, 0.5, size=(n, d))
    return center + offsets


def gen_histogram_dataset(n: int, d: int, seed: int) -> np.ndarray:
    """n labels in [1, d] drawn from a multinomial whose parameters come
    from a symmetric Dirichlet with concentration 1/d (resampled per call),
    which makes the resulting histograms highly sparse."""
    if n < 1 or d < 2:
        raise DomainError(f"need n >= 1 and d >= 2, got n={n!r}, d={d!r}")
    rng = np.random.default_rng(seed)
    probs = rng.dirichlet(np.full(d, 1.0 / d))
    return rng.choice(d, size=n, p=probs) + 1


def _trial_seeds(base_seed: int, d: int, trial: int) -> tuple[int, int, int, int]:
    # Fixed mixing of (base_seed, d, trial) into four independent streams:
    # dataset, analytic-Gaussian noise, classical-Gaussian noise, Laplace
    # noise.  Reseeding per trial keeps trials independent and the whole run
    # reproducible without a shared generator.
    state = np.random.SeedSequence([base_seed, d, trial]).generate_state(4, dtype=np.uint64)
    return tuple(int(s) for s in state)


def run_estimation_experiment(config: EstimationConfig) -> list[ExperimentRecord]:
    """Release a synthetic query under each requested method and record
    per-trial errors.

    Within a trial every method sees the same dataset; the James-Stein and
    soft-threshold rows denoise the same analytic-Gaussian release.  The
    per-method noise streams are keyed by (base_seed, d, trial) only, so a
    record is bitwise-reproducible regardless of which other methods run.
    """
    records = []
    for d in config.d_grid:
        if config.task is QueryKind.MEAN:
            query = QuerySpec.mean(config.n, d)
        else:
            query = QuerySpec.histogram(config.n, d)
        spec = PrivacySpec(epsilon=config.epsilon, delta=config.delta)
        sigma_analytic = calibrate_analytic(spec, query.sensitivities.l2).sigma
        # strict=False: the published comparisons evaluate the closed form
        # at the epsilon = 1 boundary, outside its proved (0, 1) range.
        sigma_classical = (
            calibrate_classical(spec, query.sensitivities.l2, strict=False).sigma
            if METHOD_CLASSICAL in config.methods
            else None
        )
        laplace_scale = (
            calibrate_laplace(config.epsilon, query.sensitivities.l1).sigma
            if METHOD_LAPLACE in config.methods
            else None
        )
        for trial in range(config.trials):
            seed_data, seed_agm, seed_cgm, seed_lap = _trial_seeds(config.base_seed, d, trial)
            if config.task is QueryKind.MEAN:
                dataset = gen_mean_dataset(config.n, d, seed_data)
            else:
                dataset = gen_histogram_dataset(config.n, d, seed_data)
            exact = evaluate_query(query, dataset)

            estimates: dict[str, tuple[np.ndarray, float]] = {}
            if _ANALYTIC_FAMILY & set(config.methods):
                agm = perturb_gaussian(exact, sigma_analytic, seed_agm)
                if METHOD_ANALYTIC in config.methods:
                    estimates[METHOD_ANALYTIC] = (agm.values, sigma_analytic)
                if METHOD_JAMES_STEIN in config.methods:
                    estimates[METHOD_JAMES_STEIN] = (denoise_james_stein(agm), sigma_analytic)
                if METHOD_SOFT_THRESHOLD in config.methods:
                    estimates[METHOD_SOFT_THRESHOLD] = (
                        denoise_soft_threshold(agm),
                        sigma_analytic,
                    )
            if METHOD_CLASSICAL in config.methods:
                cgm = perturb_gaussian(
                    exact, sigma_classical, seed_cgm, Mechanism.CLASSICAL_GAUSSIAN
                )
                estimates[METHOD_CLASSICAL] = (cgm.values, sigma_classical)
            if METHOD_LAPLACE in config.methods:
                lap = perturb_laplace(exact, laplace_scale, seed_lap)
                estimates[METHOD_LAPLACE] = (lap.values, laplace_scale)
            if METHOD_NONE in config.methods:
                estimates[METHOD_NONE] = (exact, 0.0)

            for method in config.methods:
                values, sigma_used = estimates[method]
                diff = values - exact
                error_l1 = float(np.abs(diff).sum())
                error_l2 = float(math.sqrt(diff @ diff))
                error = error_l2 if config.task is QueryKind.MEAN else error_l1
                records.append(
                    ExperimentRecord(
                        method=method,
                        d=d,
                        epsilon=config.epsilon,
                        delta=config.delta if method != METHOD_LAPLACE else 0.0,
                        trial=trial,
                        error=error,
                        error_l1=error_l1,
                        error_l2=error_l2,
                        sigma_used=float(sigma_used),
                    )
                )
    records.sort(key=lambda r: (r.method, r.d, r.trial))
    return records


@dataclass(frozen=True)
class SummaryRow:
    method: str
    d: int
    mean_error: float
    stderr: float


def summarize(records: Sequence[ExperimentRecord]) -> list[SummaryRow]:
    """Mean error and standard error per (method, d) group."""
    if not records:
        raise DomainError("summarize needs at least one record")
    groups: dict[tuple[str, int], list[float]] = {}
    for record in records:
        groups.setdefault((record.method, record.d), []).append(record.error)
    rows = []
    for (method, d), errors in sorted(groups.items()):
        arr = np.asarray(errors)
        stderr = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
        rows.append(SummaryRow(method=method, d=d, mean_error=float(arr.mean()), stderr=stderr))
    return rows


def _cell(value: object) -> str:
    # repr of a Python float is the shortest string that round-trips, which
    # keeps CSV cells exactly comparable across runs.
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_records_csv(records: Sequence[object], stream: TextIO) -> None:
    """RFC-4180 CSV with a header row taken from the record fields."""
    if not records:
        raise DomainError("no records to write")
    names = [f.name for f in fields(records[0])]
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(names)
    for record in records:
        writer.writerow([_cell(getattr(record, name)) for name in names])


def write_records_jsonl(records: Sequence[object], stream: TextIO) -> None:
    """One JSON object per line, fields in record order."""
    if not records:
        raise DomainError("no records to write")
    for record in records:
        stream.write(json.dumps(asdict(record)))
        stream.write("\n")


def records_to_csv_text(records: Sequence[object]) -> str:
    out = io.StringIO()
    write_records_csv(records, out)
    return out.getvalue()


def records_to_jsonl_text(records: Sequence[object]) -> str:
    out = io.StringIO()
    write_records_jsonl(records, out)
    return out.getvalue()
