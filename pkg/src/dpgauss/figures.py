"""Figure rendering for benchmark outputs.

The CLI report path writes these PNGs next to the delimited records so a
run is inspectable without further tooling.  The delimited files remain the
canonical output; figures are a convenience view of the same records.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")  # file output only, never a display

import matplotlib.pyplot as plt

from .bench import SummaryRow, SweepRow
from .errors import DomainError
from .mechanism import QueryKind

# Dropping the autogenerated Software key keeps PNG bytes identical across
# repeated runs of the same invocation.
_PNG_METADATA = {"Software": None}


def save_sweep_figure(rows: Sequence[SweepRow], path: str) -> None:
    """Noise scales and variance gain across the sweep grid.

    The x axis is epsilon when the grid varies it, otherwise delta.
    """
    if not rows:
        raise DomainError("no sweep rows to plot")
    epsilons = sorted({row.epsilon for row in rows})
    by_eps = len(epsilons) > 1 or len({row.delta for row in rows}) == 1

    fig, (ax_sigma, ax_gain) = plt.subplots(1, 2, figsize=(9.6, 4.0))
    if by_eps:
        series_keys = sorted({row.delta for row in rows})
        label = lambda k: f"$\\delta$ = {k:g}"
        x_of = lambda row: row.epsilon
        key_of = lambda row: row.delta
        ax_sigma.set_xlabel("$\\varepsilon$")
        ax_gain.set_xlabel("$\\varepsilon$")
    else:
        series_keys = epsilons
        label = lambda k: f"$\\varepsilon$ = {k:g}"
        x_of = lambda row: row.delta
        key_of = lambda row: row.epsilon
        ax_sigma.set_xlabel("$\\delta$")
        ax_gain.set_xlabel("$\\delta$")

    for key in series_keys:
        series = sorted((r for r in rows if key_of(r) == key), key=x_of)
        xs = [x_of(r) for r in series]
        ax_sigma.plot(xs, [r.sigma_analytic for r in series], marker="o", label=label(key))
        classical = [(x_of(r), r.sigma_classical) for r in series if r.sigma_classical is not None]
        if classical:
            ax_sigma.plot(
                [c[0] for c in classical],
                [c[1] for c in classical],
                marker="s",
                linestyle="--",
                label=label(key) + " (classical)",
            )
        gains = [(x_of(r), r.variance_gain) for r in series if r.variance_gain is not None]
        if gains:
            ax_gain.plot(
                [g[0] for g in gains], [g[1] for g in gains], marker="o", label=label(key)
            )

    ax_sigma.set_xscale("log")
    ax_sigma.set_yscale("log")
    ax_sigma.set_ylabel("noise scale $\\sigma$")
    ax_sigma.legend(fontsize="small")
    ax_sigma.grid(True, which="both", alpha=0.3)
    ax_gain.set_xscale("log")
    ax_gain.set_ylabel("variance gain")
    ax_gain.axhline(1.0, color="gray", linewidth=0.8)
    ax_gain.legend(fontsize="small")
    ax_gain.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata=_PNG_METADATA)
    plt.close(fig)


def save_estimation_figure(rows: Sequence[SummaryRow], task: QueryKind, path: str) -> None:
    """Mean error against dimension, one line per method, with error bars."""
    if not rows:
        raise DomainError("no summary rows to plot")
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    methods = sorted({row.method for row in rows})
    for method in methods:
        series = sorted((r for r in rows if r.method == method), key=lambda r: r.d)
        ax.errorbar(
            [r.d for r in series],
            [r.mean_error for r in series],
            yerr=[r.stderr for r in series],
            marker="o",
            capsize=3,
            label=method,
        )
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("dimension $d$")
    metric = "L2" if task is QueryKind.MEAN else "L1"
    ax.set_ylabel(f"mean {metric} error")
    ax.legend(fontsize="small")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata=_PNG_METADATA)
    plt.close(fig)
