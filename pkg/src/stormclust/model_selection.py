"""Choosing k and testing clusterability: SSE-vs-k elbow curves, knee
detection on the curve, and the Hopkins statistic.

The knee detector scores every interior point of a decreasing curve by
the ratio of the drop into the point over the drop out of it and keeps
the largest ratio above 1 + sensitivity. The ratio form is exactly
invariant under positive affine rescaling of the y axis and pinpoints
where a steep descent turns into a plateau; a straight line has all
ratios at 1 and yields no knee.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .events import Dataset
from .kmedoids import kmedoids_restarts

log = logging.getLogger(__name__)


@dataclass(eq=False)
class ElbowCurve:
    """SSE of the best-of-restarts clustering per candidate k."""

    ks: np.ndarray
    sse: np.ndarray
    seeds_per_k: int

    def __post_init__(self) -> None:
        self.ks = np.asarray(self.ks, dtype=int)
        self.sse = np.asarray(self.sse, dtype=float)
        if len(self.ks) != len(self.sse):
            raise ValidationError("ks and sse differ in length")
        if len(self.ks) and np.any(np.diff(self.ks) <= 0):
            raise ValidationError("ks must be strictly ascending")
        if np.any(self.sse < 0.0):
            raise ValidationError("sse values must be nonnegative")


def elbow_curve(matrix, ks, seeds, max_iter: int = 100) -> ElbowCurve:
    """Build the elbow curve over candidate cluster counts.

    Args:
        matrix: DistanceMatrix or square ndarray.
        ks: Candidate k values; deduplicated and sorted ascending.
        seeds: Restart seeds used for every k.

    Returns:
        ElbowCurve with the sse of the lowest-cost restart per k.
    """
    values = getattr(matrix, "values", matrix)
    n = np.asarray(values).shape[0]
    ks = sorted(set(int(k) for k in ks))
    if not ks:
        raise ValidationError("elbow_curve needs at least one k")
    if ks[0] < 1:
        raise ValidationError(f"k must be positive, got {ks[0]}")
    if ks[-1] > n:
        raise ValidationError(f"k={ks[-1]} exceeds the {n} available events")
    seeds = list(seeds)
    sse = [kmedoids_restarts(matrix, k, seeds, max_iter).sse for k in ks]
    return ElbowCurve(ks=np.asarray(ks), sse=np.asarray(sse), seeds_per_k=len(seeds))


def find_knee(curve: ElbowCurve, sensitivity: float = 1.0) -> int | None:
    """Locate the knee of a decreasing curve, if one stands out.

    An interior point qualifies when the drop into it exceeds the drop
    out of it by the sensitivity margin: drop_in / drop_out >= 1 +
    sensitivity (a non-positive drop_out counts as an infinite ratio).
    The point with the largest ratio wins; ties go to the smallest k.

    Returns:
        The chosen k, or None when no point clears the margin.
    """
    if sensitivity <= 0.0:
        raise ValidationError(f"sensitivity must be positive, got {sensitivity}")
    ks = curve.ks
    y = curve.sse
    if len(ks) < 3:
        raise ValidationError(f"knee detection needs at least 3 points, got {len(ks)}")
    best_k: int | None = None
    best_ratio = -math.inf
    for i in range(1, len(ks) - 1):
        drop_in = y[i - 1] - y[i]
        if drop_in <= 0.0:
            continue
        drop_out = y[i] - y[i + 1]
        ratio = math.inf if drop_out <= 0.0 else drop_in / drop_out
        if ratio >= 1.0 + sensitivity and ratio > best_ratio:
            best_ratio = ratio
            best_k = int(ks[i])
    return best_k


def hopkins_from_vectors(
    X, sample_fraction: float = 0.1, seed: int = 0, repetitions: int = 10
) -> float:
    """Hopkins statistic of a point cloud in flat vector space.

    Each repetition samples m = ceil(sample_fraction * n) real points
    without replacement and m pseudo-points uniform over the per-dimension
    bounding box, then compares squared nearest-neighbor distances:
    H = sum(u^2) / (sum(u^2) + sum(w^2)), with u the pseudo-points'
    distances to the nearest real point and w the sampled reals'
    distances to the nearest other real point. Squaring sharpens the
    contrast clustered data produces while leaving uniform data at 1/2.
    Returns the mean over repetitions.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValidationError(f"expected a 2-D array of vectors, got shape {X.shape}")
    n = X.shape[0]
    if n < 10:
        raise ValidationError(f"hopkins needs at least 10 points, got {n}")
    if not 0.0 < sample_fraction <= 1.0:
        raise ValidationError(
            f"sample_fraction must be in (0, 1], got {sample_fraction}"
        )
    if repetitions < 1:
        raise ValidationError(f"repetitions must be positive, got {repetitions}")
    rng = np.random.default_rng(seed)
    m = math.ceil(sample_fraction * n)
    lo = X.min(axis=0)
    hi = X.max(axis=0)
    values = []
    for _ in range(repetitions):
        chosen: list[int] = []
        while len(chosen) < m:
            c = int(rng.integers(0, n))
            if c not in chosen:
                chosen.append(c)
        idx = np.asarray(chosen)
        U = rng.uniform(lo, hi, size=(m, X.shape[1]))
        u2 = ((U[:, None, :] - X[None, :, :]) ** 2).sum(axis=2).min(axis=1)
        w2 = ((X[idx][:, None, :] - X[None, :, :]) ** 2).sum(axis=2)
        w2[np.arange(m), idx] = np.inf
        w2 = w2.min(axis=1)
        denom = u2.sum() + w2.sum()
        # a collapsed bounding box gives no evidence either way
        values.append(0.5 if denom == 0.0 else float(u2.sum() / denom))
    return float(np.mean(values))


def hopkins_statistic(
    dataset: Dataset,
    sample_fraction: float = 0.1,
    seed: int = 0,
    repetitions: int = 10,
) -> float:
    """Hopkins statistic of a dataset of processed events.

    Events are flattened to vectors (discharge samples followed by
    concentration samples; 100-D under the default pipeline) and scored
    with :func:`hopkins_from_vectors`. Values near 1 indicate strong
    cluster structure, near 0.5 spatial uniformity.
    """
    if len(dataset) < 10:
        raise ValidationError(f"hopkins needs at least 10 events, got {len(dataset)}")
    X = np.stack(
        [np.concatenate([ev.discharge, ev.concentration]) for ev in dataset]
    )
    return hopkins_from_vectors(
        X, sample_fraction=sample_fraction, seed=seed, repetitions=repetitions
    )
