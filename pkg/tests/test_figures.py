"""Tests for the rendered report figures."""

import hashlib

import pytest

from dpgauss.bench import (
    EstimationConfig,
    SweepConfig,
    run_calibration_sweep,
    run_estimation_experiment,
    summarize,
)
from dpgauss.errors import DomainError
from dpgauss.figures import save_estimation_figure, save_sweep_figure
from dpgauss.mechanism import QueryKind


def _digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_sweep_figure_renders_and_is_reproducible(tmp_path):
    rows = run_calibration_sweep(
        SweepConfig(epsilon_grid=(0.1, 0.5, 0.9), delta_grid=(1e-6, 1e-4))
    )
    first = tmp_path / "sweep_a.png"
    second = tmp_path / "sweep_b.png"
    save_sweep_figure(rows, str(first))
    save_sweep_figure(rows, str(second))
    assert first.stat().st_size > 0
    assert _digest(first) == _digest(second)


def test_estimation_figure_renders_and_is_reproducible(tmp_path):
    config = EstimationConfig(
        task=QueryKind.MEAN, d_grid=(4, 16), epsilon=0.5, trials=3, n=50,
        methods=("aGM", "cGM", "Lap"),
    )
    summary = summarize(run_estimation_experiment(config))
    first = tmp_path / "est_a.png"
    second = tmp_path / "est_b.png"
    save_estimation_figure(summary, QueryKind.MEAN, str(first))
    save_estimation_figure(summary, QueryKind.MEAN, str(second))
    assert first.stat().st_size > 0
    assert _digest(first) == _digest(second)


def test_figures_reject_empty_rows(tmp_path):
    with pytest.raises(DomainError):
        save_sweep_figure([], str(tmp_path / "x.png"))
    with pytest.raises(DomainError):
        save_estimation_figure([], QueryKind.MEAN, str(tmp_path / "y.png"))
