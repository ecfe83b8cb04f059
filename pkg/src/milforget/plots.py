"""Figure rendering for benchmark results.

Renders the two standard curves (percentage of tasks solved and mean
learning time against corpus size, one line per strategy, standard-error
bars over repetitions) plus a per-depth profile for single runs.  Figures
are written to files next to the CSV output; the CSV stays the primary
product.
"""

from __future__ import annotations

import math
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

STRATEGY_STYLE = {
    "syn": dict(color="tab:blue", marker="s"),
    "stat": dict(color="tab:orange", marker="o"),
    "none": dict(color="tab:green", marker="D"),
    "single": dict(color="tab:red", marker="^"),
}


def _series(rows, value):
    """strategy -> (counts, means, standard errors) over repetitions."""
    grouped = defaultdict(lambda: defaultdict(list))
    for r in rows:
        grouped[r.strategy][r.n_tasks].append(value(r))
    out = {}
    for strategy, by_count in grouped.items():
        counts = sorted(by_count)
        means, errs = [], []
        for c in counts:
            vals = by_count[c]
            mean = sum(vals) / len(vals)
            if len(vals) > 1:
                var = sum((v - mean) ** 2 for v in vals) / (len(vals) - 1)
                err = math.sqrt(var / len(vals))
            else:
                err = 0.0
            means.append(mean)
            errs.append(err)
        out[strategy] = (counts, means, errs)
    return out


def _curve(rows, value, ylabel: str, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    for strategy, (counts, means, errs) in _series(rows, value).items():
        style = STRATEGY_STYLE.get(strategy, {})
        ax.errorbar(counts, means, yerr=errs, capsize=3, label=strategy, **style)
    ax.set_xlabel("# tasks")
    ax.set_ylabel(ylabel)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_solved(rows, path) -> None:
    _curve(rows, lambda r: r.pct_solved, "% tasks solved", path)


def plot_times(rows, path) -> None:
    _curve(rows, lambda r: r.mean_learn_time_s, "mean learning time (seconds)", path)


def plot_depth_profile(reports, n_tasks: int, path) -> None:
    """Cumulative solved percentage and signature size per depth for one run."""
    depths = [r.depth for r in reports]
    cumulative = []
    total = 0
    for r in reports:
        total += len(r.solved)
        cumulative.append(100.0 * total / n_tasks if n_tasks else 0.0)
    sig_sizes = [r.sig_after for r in reports]

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    ax1.plot(depths, cumulative, marker="o", color="tab:blue")
    ax1.set_xlabel("depth")
    ax1.set_ylabel("% tasks solved (cumulative)")
    ax1.set_ylim(0, 105)
    ax2.plot(depths, sig_sizes, marker="s", color="tab:green")
    ax2.set_xlabel("depth")
    ax2.set_ylabel("signature size")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
