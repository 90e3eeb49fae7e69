"""External clustering quality metrics and cluster-characterization
statistics: Rand index, homogeneity/completeness, chi-squared
independence, one-way ANOVA over event metrics, and per-cluster z-score
profiles.

Entropies use the natural log (the h/c ratios cancel the base); p-values
come from the in-house incomplete gamma/beta implementations.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ValidationError
from .events import EventMetricsTable
from .special import chi2_sf, f_sf

log = logging.getLogger(__name__)


def _label_sort_key(label: str):
    # numeric labels sort numerically so cluster "10" follows "9"
    text = str(label)
    stripped = text.lstrip("-")
    if stripped.isdigit():
        return (0, int(text), text)
    return (1, 0, text)


@dataclass(eq=False)
class ContingencyTable:
    """Cross-tabulation of cluster labels (rows) against class labels."""

    row_labels: list
    col_labels: list
    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=int)
        if counts.shape != (len(self.row_labels), len(self.col_labels)):
            raise ValidationError(
                f"counts shape {counts.shape} does not match the labels"
            )
        if np.any(counts < 0):
            raise ValidationError("contingency counts must be nonnegative")
        self.counts = counts

    @property
    def row_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_totals(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def from_labels(cls, rows: Sequence, cols: Sequence) -> "ContingencyTable":
        rows = [str(r) for r in rows]
        cols = [str(c) for c in cols]
        if len(rows) != len(cols):
            raise ValidationError("label sequences differ in length")
        row_labels = sorted(set(rows), key=_label_sort_key)
        col_labels = sorted(set(cols), key=_label_sort_key)
        row_pos = {lab: i for i, lab in enumerate(row_labels)}
        col_pos = {lab: i for i, lab in enumerate(col_labels)}
        counts = np.zeros((len(row_labels), len(col_labels)), dtype=int)
        for r, c in zip(rows, cols):
            counts[row_pos[r], col_pos[c]] += 1
        return cls(row_labels=row_labels, col_labels=col_labels, counts=counts)


@dataclass(eq=False)
class AnovaResult:
    """One-way ANOVA outcome for a single metric."""

    metric: str
    f_value: float
    p_value: float
    df_between: int
    df_within: int
    groups_used: int
    n_used: int


@dataclass(eq=False)
class ZScoreProfile:
    """Per-metric z-scores of one group against the global distribution."""

    group: str
    z: dict[str, float]
    undefined: list[str]


def rand_index(labels_a: Sequence, labels_b: Sequence) -> float:
    """Fraction of event pairs on which two labelings agree.

    A pair agrees when both labelings place it in one cluster or both
    split it. Symmetric and invariant under relabeling.
    """
    a = np.asarray([str(x) for x in labels_a])
    b = np.asarray([str(x) for x in labels_b])
    if len(a) != len(b):
        raise ValidationError(f"label sequences differ in length: {len(a)} vs {len(b)}")
    if len(a) < 2:
        raise ValidationError("rand_index needs at least 2 elements")
    same_a = a[:, None] == a[None, :]
    same_b = b[:, None] == b[None, :]
    iu = np.triu_indices(len(a), k=1)
    return float((same_a[iu] == same_b[iu]).mean())


def _entropy(counts: np.ndarray) -> float:
    total = counts.sum()
    if total <= 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log(p)).sum())


def homogeneity_completeness(truth: Sequence, predicted: Sequence) -> tuple[float, float]:
    """Entropy-based homogeneity and completeness of a clustering.

    h = 1 - H(C|K)/H(C) (1.0 when every cluster holds a single class),
    c = 1 - H(K|C)/H(K) (1.0 when every class sits in a single cluster);
    h is defined as 1 when H(C) = 0 and c as 1 when H(K) = 0.
    """
    table = ContingencyTable.from_labels(predicted, truth)
    if len(table.row_labels) == 0:
        raise ValidationError("homogeneity_completeness needs at least 1 element")
    counts = table.counts.astype(float)
    n = counts.sum()
    h_class = _entropy(table.col_totals)
    h_cluster = _entropy(table.row_totals)
    h_class_given_cluster = sum(
        counts[i].sum() / n * _entropy(counts[i]) for i in range(counts.shape[0])
    )
    h_cluster_given_class = sum(
        counts[:, j].sum() / n * _entropy(counts[:, j]) for j in range(counts.shape[1])
    )
    h = 1.0 if h_class == 0.0 else 1.0 - h_class_given_cluster / h_class
    c = 1.0 if h_cluster == 0.0 else 1.0 - h_cluster_given_class / h_cluster
    return float(h), float(c)


def chi_squared_independence(table: ContingencyTable) -> tuple[float, float, int]:
    """Chi-squared test of independence on a contingency table.

    Rows and columns with zero marginals are dropped first; the table
    must remain at least 2x2. Returns (statistic, p_value, df).
    """
    counts = table.counts.astype(float)
    counts = counts[table.row_totals > 0][:, table.col_totals > 0]
    r, c = counts.shape
    if r < 2 or c < 2:
        raise ValidationError(
            f"degenerate contingency table after dropping empty margins: {r}x{c}"
        )
    n = counts.sum()
    expected = np.outer(counts.sum(axis=1), counts.sum(axis=0)) / n
    statistic = float(((counts - expected) ** 2 / expected).sum())
    df = (r - 1) * (c - 1)
    return statistic, chi2_sf(statistic, df), df


def _anova_from_groups(groups: list[np.ndarray]) -> tuple[float, float, int, int, int]:
    n_used = sum(len(g) for g in groups)
    groups_used = len(groups)
    df_between = groups_used - 1
    df_within = n_used - groups_used
    grand = np.concatenate(groups).mean()
    ss_between = sum(len(g) * (g.mean() - grand) ** 2 for g in groups)
    ss_within = sum(float(((g - g.mean()) ** 2).sum()) for g in groups)
    if ss_within == 0.0:
        if ss_between == 0.0:
            return 0.0, 1.0, df_between, df_within, n_used
        return math.inf, 0.0, df_between, df_within, n_used
    f_value = (ss_between / df_between) / (ss_within / df_within)
    return float(f_value), f_sf(f_value, df_between, df_within), df_between, df_within, n_used


def anova_oneway(metrics: EventMetricsTable, metric: str, grouping: str) -> AnovaResult:
    """One-way ANOVA of a metric across the groups of a categorical column.

    Rows with a missing metric value or missing group are dropped; at
    least two nonempty groups and more observations than groups must
    remain. Zero within-group variance yields the documented sentinels
    (F = 0, p = 1 when the between-variance is zero too, else F = +inf,
    p = 0).
    """
    if metric not in metrics.numeric:
        raise ValidationError(f"metrics table has no numeric column '{metric}'")
    column = metrics.numeric[metric]
    group_col = metrics.group_column(grouping)
    buckets: dict[str, list[float]] = {}
    for value, group in zip(column, group_col):
        if group is None or math.isnan(value):
            continue
        buckets.setdefault(group, []).append(float(value))
    groups = [
        np.asarray(buckets[g]) for g in sorted(buckets, key=_label_sort_key)
    ]
    groups_used = len(groups)
    n_used = sum(len(g) for g in groups)
    if groups_used < 2:
        raise ValidationError(
            f"ANOVA on '{metric}' needs at least 2 groups, got {groups_used}"
        )
    if n_used <= groups_used:
        raise ValidationError(
            f"ANOVA on '{metric}' needs more observations than groups"
        )
    f_value, p_value, df_between, df_within, n_used = _anova_from_groups(groups)
    return AnovaResult(
        metric=metric,
        f_value=f_value,
        p_value=p_value,
        df_between=df_between,
        df_within=df_within,
        groups_used=groups_used,
        n_used=n_used,
    )


def zscore_profiles(
    metrics: EventMetricsTable, grouping: str = "cluster"
) -> list[ZScoreProfile]:
    """Average z-score of every metric within each group.

    For each metric the global mean and population standard deviation are
    taken over all non-missing cells; each group's profile is
    (group mean - global mean) / global std. Metrics with zero global
    std are flagged undefined (z = NaN). Rows without a group are
    ignored; if none remain the join is empty and an error is raised.
    """
    group_col = metrics.group_column(grouping)
    groups = sorted(
        {g for g in group_col if g is not None}, key=_label_sort_key
    )
    if not groups:
        raise ValidationError(f"no rows carry a '{grouping}' value")
    profiles = []
    names = metrics.metric_names()
    stats: dict[str, tuple[float, float]] = {}
    for name in names:
        col = metrics.numeric[name]
        valid = col[~np.isnan(col)]
        if len(valid) == 0:
            stats[name] = (math.nan, 0.0)
            continue
        stats[name] = (float(valid.mean()), float(valid.std()))
    for group in groups:
        mask = np.asarray([g == group for g in group_col])
        z: dict[str, float] = {}
        undefined: list[str] = []
        for name in names:
            mean, std = stats[name]
            if std == 0.0:
                z[name] = math.nan
                undefined.append(name)
                continue
            cells = metrics.numeric[name][mask]
            cells = cells[~np.isnan(cells)]
            if len(cells) == 0:
                z[name] = math.nan
                undefined.append(name)
                continue
            z[name] = float((cells.mean() - mean) / std)
        profiles.append(ZScoreProfile(group=group, z=z, undefined=undefined))
    return profiles


def attach_clusters(metrics: EventMetricsTable, assignments: Mapping[str, int]) -> None:
    """Fill the metrics table's cluster column from an event_id mapping.

    The mapping usually comes from a clustering document's assignments
    or from zip(dataset.event_ids, clustering.assignments). Every row of
    the table must be covered.
    """
    column: list[str | None] = []
    for event_id in metrics.event_ids:
        if event_id not in assignments:
            raise ValidationError(
                f"event_id '{event_id}' missing from the clustering assignments"
            )
        column.append(str(assignments[event_id]))
    metrics.categorical["cluster"] = column
