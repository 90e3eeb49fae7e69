"""Figure rendering for the CLI report paths.

Figures are conveniences next to the CSV outputs, rendered headlessly to
SVG. The hash salt and suppressed date metadata keep reruns from
spuriously differing.
"""

from __future__ import annotations

import logging

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .model_selection import ElbowCurve  # noqa: E402

log = logging.getLogger(__name__)

plt.rcParams["svg.hashsalt"] = "stormclust"

_SVG_METADATA = {"Date": None}


def save_elbow_plot(curve: ElbowCurve, knee: int | None, path) -> None:
    """Plot SSE against k, marking the detected knee when present."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.plot(curve.ks, curve.sse, marker="o", color="#1f77b4")
    if knee is not None:
        ax.axvline(knee, color="#d62728", linestyle="--", label=f"knee at k={knee}")
        ax.legend()
    ax.set_xlabel("number of clusters k")
    ax.set_ylabel("sum of squared distances to medoid")
    ax.set_title(f"Elbow curve ({curve.seeds_per_k} restarts per k)")
    fig.tight_layout()
    fig.savefig(path, metadata=_SVG_METADATA)
    plt.close(fig)


def save_zscore_plot(profile, path) -> None:
    """Bar chart of one cluster's per-metric z-scores."""
    names = [name for name in profile.z if name not in profile.undefined]
    values = [profile.z[name] for name in names]
    fig, ax = plt.subplots(figsize=(max(6.0, 0.45 * len(names) + 2.0), 4.0))
    colors = ["#d62728" if v < 0 else "#1f77b4" for v in values]
    ax.bar(range(len(names)), values, color=colors)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=90, fontsize=8)
    ax.set_ylabel("z-score")
    ax.set_title(f"Cluster {profile.group}: average metric z-scores")
    fig.tight_layout()
    fig.savefig(path, metadata=_SVG_METADATA)
    plt.close(fig)
