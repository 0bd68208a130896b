"""Tests for the sweep and estimation experiment harness."""

import io
import json
import math

import numpy as np
import pytest

from dpgauss.bench import (
    ALL_METHODS,
    EstimationConfig,
    ExperimentRecord,
    SweepConfig,
    gen_histogram_dataset,
    gen_mean_dataset,
    records_to_csv_text,
    records_to_jsonl_text,
    run_calibration_sweep,
    run_estimation_experiment,
    summarize,
    write_records_csv,
    write_records_jsonl,
)
from dpgauss.errors import DomainError
from dpgauss.mechanism import QueryKind


# ----------------------------------------------------------------- the sweep


def test_sweep_analytic_never_loses():
    config = SweepConfig(epsilon_grid=(0.1, 0.5, 0.9), delta_grid=(1e-6, 1e-3, 0.1))
    for row in run_calibration_sweep(config):
        assert row.sigma_classical is not None
        assert row.sigma_analytic <= row.sigma_classical
        assert row.variance_gain >= 1.0


def test_sweep_gain_near_epsilon_one():
    config = SweepConfig(epsilon_grid=(0.999,), delta_grid=(1e-3,))
    (row,) = run_calibration_sweep(config)
    assert row.variance_gain >= 1.4


def test_sweep_gain_grows_with_delta():
    config = SweepConfig(epsilon_grid=(0.5,), delta_grid=(1e-8, 1e-2))
    small_delta, large_delta = run_calibration_sweep(config)
    assert large_delta.variance_gain > small_delta.variance_gain


def test_sweep_marks_classical_gaps():
    # The closed form is unproved at epsilon >= 1, so those cells stay empty.
    config = SweepConfig(epsilon_grid=(0.5, 1.0, 2.0), delta_grid=(1e-4,))
    rows = run_calibration_sweep(config)
    assert rows[0].sigma_classical is not None
    for row in rows[1:]:
        assert row.sigma_classical is None and row.variance_gain is None
        assert math.isfinite(row.sigma_analytic)


def test_sweep_config_validation():
    with pytest.raises(DomainError):
        SweepConfig(epsilon_grid=(), delta_grid=(1e-4,))
    with pytest.raises(DomainError):
        SweepConfig(epsilon_grid=(0.5,), delta_grid=(0.0,))
    with pytest.raises(DomainError):
        SweepConfig(epsilon_grid=(-1.0,), delta_grid=(1e-4,))
    with pytest.raises(DomainError):
        SweepConfig(epsilon_grid=(0.5,), delta_grid=(1e-4,), delta_l2=0.0)


# ----------------------------------------------------------- synthetic data


def test_mean_dataset_is_seeded_and_bounded():
    first = gen_mean_dataset(200, 16, seed=11)
    second = gen_mean_dataset(200, 16, seed=11)
    other = gen_mean_dataset(200, 16, seed=12)
    assert np.array_equal(first, second)
    assert not np.array_equal(first, other)
    # Records live in an L-infinity ball of diameter 1 around the center,
    # which is exactly what the mean query's sensitivity model assumes.
    spread = first.max(axis=0) - first.min(axis=0)
    assert spread.max() <= 1.0


def test_histogram_dataset_labels_and_sparsity():
    for seed in range(30):
        labels = gen_histogram_dataset(500, 1000, seed)
        assert np.issubdtype(labels.dtype, np.integer)
        assert labels.min() >= 1 and labels.max() <= 1000
        # Dirichlet(1/d) parameters concentrate the labels on a few bins.
        assert len(np.unique(labels)) / 1000 < 0.1


def test_dataset_generators_reject_bad_counts():
    with pytest.raises(DomainError):
        gen_mean_dataset(0, 4, seed=0)
    with pytest.raises(DomainError):
        gen_histogram_dataset(10, 1, seed=0)


# -------------------------------------------------------------- experiments


def test_estimation_config_coerces_task_strings():
    config = EstimationConfig(task="Mean", d_grid=(4,), epsilon=0.5, methods=("aGM",))
    assert config.task is QueryKind.MEAN
    with pytest.raises(DomainError, match="task"):
        EstimationConfig(task="median", d_grid=(4,), epsilon=0.5, methods=("aGM",))


def test_estimation_config_validation():
    with pytest.raises(DomainError, match="subset"):
        EstimationConfig(task=QueryKind.MEAN, d_grid=(4,), epsilon=0.5, methods=("gGM",))
    with pytest.raises(DomainError, match="James-Stein"):
        EstimationConfig(task=QueryKind.MEAN, d_grid=(2,), epsilon=0.5, methods=("aGM-JS",))
    with pytest.raises(DomainError):
        EstimationConfig(task=QueryKind.MEAN, d_grid=(), epsilon=0.5)
    with pytest.raises(DomainError):
        EstimationConfig(task=QueryKind.MEAN, d_grid=(4,), epsilon=0.0)
    with pytest.raises(DomainError):
        EstimationConfig(task=QueryKind.MEAN, d_grid=(4,), epsilon=0.5, delta=1.0)
    with pytest.raises(DomainError):
        EstimationConfig(task=QueryKind.MEAN, d_grid=(4,), epsilon=0.5, trials=0)
    with pytest.raises(DomainError, match="histogram"):
        EstimationConfig(task=QueryKind.HISTOGRAM, d_grid=(1,), epsilon=0.5, methods=("aGM",))


def test_experiment_is_deterministic():
    config = EstimationConfig(
        task=QueryKind.MEAN, d_grid=(8,), epsilon=0.5, trials=3, base_seed=7, n=50
    )
    assert run_estimation_experiment(config) == run_estimation_experiment(config)


def test_experiment_record_counting_and_order():
    config = EstimationConfig(
        task=QueryKind.MEAN, d_grid=(8, 4), epsilon=0.5, trials=3, base_seed=1, n=50
    )
    records = run_estimation_experiment(config)
    assert len(records) == len(ALL_METHODS) * 2 * 3
    keys = [(r.method, r.d, r.trial) for r in records]
    assert keys == sorted(keys)
    single = EstimationConfig(
        task=QueryKind.MEAN, d_grid=(4,), epsilon=0.5, trials=1, methods=("aGM",), n=50
    )
    assert len(run_estimation_experiment(single)) == 1


def test_experiment_records_do_not_depend_on_method_subset():
    shared = dict(task=QueryKind.MEAN, d_grid=(6,), epsilon=0.8, trials=4, base_seed=3, n=40)
    full = run_estimation_experiment(EstimationConfig(methods=ALL_METHODS, **shared))
    pair = run_estimation_experiment(EstimationConfig(methods=("aGM", "Lap"), **shared))
    assert [r for r in full if r.method == "aGM"] == [r for r in pair if r.method == "aGM"]
    assert [r for r in full if r.method == "Lap"] == [r for r in pair if r.method == "Lap"]


def test_experiment_field_conventions():
    config = EstimationConfig(
        task=QueryKind.HISTOGRAM,
        d_grid=(12,),
        epsilon=0.5,
        trials=2,
        methods=("aGM", "aGM-TH", "Lap", "none"),
        base_seed=5,
        n=60,
    )
    records = run_estimation_experiment(config)
    by_method = {}
    for record in records:
        by_method.setdefault(record.method, []).append(record)
    # Laplace answers a pure budget; everything else carries the config delta.
    assert all(r.delta == 0.0 for r in by_method["Lap"])
    assert all(r.delta == config.delta for r in by_method["aGM"])
    assert all(r.error == 0.0 for r in by_method["none"])
    assert all(r.sigma_used == 0.0 for r in by_method["none"])
    # Histogram experiments score the L1 error; denoised rows reuse the
    # analytic scale they were released at.
    assert all(r.error == r.error_l1 for r in records)
    agm_sigma = by_method["aGM"][0].sigma_used
    assert all(r.sigma_used == agm_sigma for r in by_method["aGM-TH"])


def test_mean_task_scores_l2_error():
    config = EstimationConfig(
        task=QueryKind.MEAN, d_grid=(5,), epsilon=0.5, trials=2, methods=("aGM",), n=30
    )
    for record in run_estimation_experiment(config):
        assert record.error == record.error_l2


# ------------------------------------------------------------------ summary


def test_summarize_groups_and_spread():
    records = [
        ExperimentRecord("aGM", 4, 0.5, 1e-4, t, float(err), 0.0, 0.0, 1.0)
        for t, err in enumerate([1.0, 3.0])
    ]
    (row,) = summarize(records)
    assert row.method == "aGM" and row.d == 4
    assert row.mean_error == pytest.approx(2.0)
    assert row.stderr == pytest.approx(1.0)  # std([1,3], ddof=1)/sqrt(2)


def test_summarize_single_record_has_zero_stderr():
    records = [ExperimentRecord("Lap", 4, 0.5, 0.0, 0, 2.5, 0.0, 0.0, 1.0)]
    (row,) = summarize(records)
    assert row.stderr == 0.0


def test_summarize_stderr_scaling():
    rng = np.random.default_rng(17)
    errors = rng.standard_normal(400) + 10.0
    small = summarize(
        [ExperimentRecord("aGM", 4, 0.5, 1e-4, t, float(e), 0.0, 0.0, 1.0)
         for t, e in enumerate(errors[:100])]
    )[0]
    large = summarize(
        [ExperimentRecord("aGM", 4, 0.5, 1e-4, t, float(e), 0.0, 0.0, 1.0)
         for t, e in enumerate(errors)]
    )[0]
    # Quadrupling the trials roughly halves the standard error.
    assert large.stderr == pytest.approx(small.stderr / 2.0, rel=0.35)


def test_summarize_rejects_empty_input():
    with pytest.raises(DomainError):
        summarize([])


# ------------------------------------------------------------ serialization


def test_csv_output_shape_and_parsing():
    config = SweepConfig(epsilon_grid=(0.5, 2.0), delta_grid=(1e-4,))
    rows = run_calibration_sweep(config)
    text = records_to_csv_text(rows)
    lines = text.splitlines()
    assert lines[0] == "epsilon,delta,sigma_classical,sigma_analytic,variance_gain"
    assert len(lines) == 3
    first = lines[1].split(",")
    # repr round-trip: parsing the cell recovers the exact float.
    assert float(first[3]) == rows[0].sigma_analytic
    # The epsilon = 2 row has empty classical cells.
    assert lines[2].split(",")[2] == ""


def test_csv_stream_and_text_agree():
    config = SweepConfig(epsilon_grid=(0.5,), delta_grid=(1e-4,))
    rows = run_calibration_sweep(config)
    stream = io.StringIO()
    write_records_csv(rows, stream)
    assert stream.getvalue() == records_to_csv_text(rows)


def test_jsonl_round_trip():
    config = EstimationConfig(
        task=QueryKind.MEAN, d_grid=(4,), epsilon=0.5, trials=2, methods=("aGM",), n=30
    )
    records = run_estimation_experiment(config)
    text = records_to_jsonl_text(records)
    parsed = [json.loads(line) for line in text.splitlines()]
    assert len(parsed) == len(records)
    assert parsed[0]["method"] == "aGM"
    assert parsed[0]["error"] == records[0].error


def test_writers_reject_empty_record_lists():
    with pytest.raises(DomainError):
        write_records_csv([], io.StringIO())
    with pytest.raises(DomainError):
        write_records_jsonl([], io.StringIO())
