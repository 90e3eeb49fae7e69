"""Window-constrained dynamic time warping distances and the pairwise
distance matrix.

The dependent variant warps both variables along one shared path with the
squared multivariate Euclidean cell cost; the independent variant sums
per-variable warping distances; the Euclidean baseline is the forced
diagonal alignment. The DP runs over two rolling rows of band width
2W + 1 with +inf outside the band, anchored at a virtual D[0,0] = 0, and
returns the square root of the terminal cell.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numba as nb
import numpy as np

from .errors import ValidationError
from .events import Dataset

log = logging.getLogger(__name__)

VARIANTS = ("dependent", "independent", "euclidean")


@dataclass(frozen=True)
class DtwConfig:
    """Distance configuration: band fraction and variant.

    The band half-width for a pair of series is
    ceil(window_fraction * max(n1, n2)).
    """

    window_fraction: float = 0.10
    variant: str = "dependent"

    def __post_init__(self) -> None:
        if not 0.0 <= self.window_fraction <= 1.0:
            raise ValidationError(
                f"window_fraction must be in [0, 1], got {self.window_fraction}"
            )
        if self.variant not in VARIANTS:
            raise ValidationError(
                f"variant must be one of {VARIANTS}, got '{self.variant}'"
            )

    def window_for(self, n1: int, n2: int) -> int:
        return math.ceil(self.window_fraction * max(n1, n2))


@dataclass(eq=False)
class DistanceMatrix:
    """Symmetric nonnegative pairwise distances with zero diagonal."""

    n: int
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.n, self.n):
            raise ValidationError(f"expected a {self.n}x{self.n} matrix, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("distance matrix contains non-finite values")
        if np.any(v < 0.0):
            raise ValidationError("distance matrix contains negative values")
        if np.any(np.diagonal(v) != 0.0):
            raise ValidationError("distance matrix diagonal must be zero")
        if not np.array_equal(v, v.T):
            raise ValidationError("distance matrix must be symmetric")
        self.values = v


@nb.njit(cache=True)
def _dtw_banded(x, y, w):  # pragma: no cover - exercised through wrappers
    n = x.shape[0]
    m = y.shape[0]
    width = 2 * w + 1
    prev = np.full(width, np.inf)
    cur = np.full(width, np.inf)
    # row i stores column j at offset j - i + w; virtual D[0,0] sits at w
    prev[w] = 0.0
    for i in range(1, n + 1):
        for idx in range(width):
            cur[idx] = np.inf
        jlo = i - w
        if jlo < 1:
            jlo = 1
        jhi = i + w
        if jhi > m:
            jhi = m
        for j in range(jlo, jhi + 1):
            idx = j - i + w
            cost = 0.0
            for ch in range(x.shape[1]):
                diff = x[i - 1, ch] - y[j - 1, ch]
                cost += diff * diff
            best = np.inf
            if idx + 1 < width:
                best = prev[idx + 1]
            if prev[idx] < best:
                best = prev[idx]
            if idx - 1 >= 0 and cur[idx - 1] < best:
                best = cur[idx - 1]
            cur[idx] = cost + best
        tmp = prev
        prev = cur
        cur = tmp
    return math.sqrt(prev[m - n + w])


@nb.njit(cache=True)
def _dtw_banded_sum(x, y, w):  # pragma: no cover - exercised through wrappers
    total = 0.0
    for ch in range(x.shape[1]):
        total += _dtw_banded(x[:, ch : ch + 1], y[:, ch : ch + 1], w)
    return total


@nb.njit(parallel=True, cache=True)
def _pairwise(X, w, independent):  # pragma: no cover - exercised through wrappers
    n = X.shape[0]
    D = np.zeros((n, n))
    total = n * (n - 1) // 2
    for p in nb.prange(total):
        # invert the triangular flat index; integer loops fix float sqrt error
        i = int((2 * n - 1 - math.sqrt((2 * n - 1) ** 2 - 8.0 * p)) * 0.5)
        if i < 0:
            i = 0
        while i * (2 * n - i - 1) // 2 > p:
            i -= 1
        while (i + 1) * (2 * n - i - 2) // 2 <= p:
            i += 1
        j = i + 1 + (p - i * (2 * n - i - 1) // 2)
        if independent:
            d = _dtw_banded_sum(X[i], X[j], w)
        else:
            d = _dtw_banded(X[i], X[j], w)
        D[i, j] = d
        D[j, i] = d
    return D


def _as_series(t) -> np.ndarray:
    if hasattr(t, "as_matrix"):
        arr = t.as_matrix()
    else:
        arr = np.asarray(t, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValidationError(f"series must be 1-D or 2-D, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValidationError("empty series")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("series contains non-finite values")
    return np.ascontiguousarray(arr, dtype=float)


def _effective_window(window: int, n1: int, n2: int) -> int:
    if window < 0:
        raise ValidationError(f"window must be nonnegative, got {window}")
    gap = abs(n1 - n2)
    if window < gap:
        log.warning(
            "window %d below length difference %d, raised to keep a feasible path",
            window,
            gap,
        )
        window = gap
    # clipping to the longer length never removes a reachable cell
    return min(window, max(n1, n2))


def dtw_dependent(t1, t2, window: int) -> float:
    """Dependent multivariate DTW distance under a band constraint.

    Args:
        t1: First series, shape (n1, m) or 1-D, or a ProcessedEvent.
        t2: Second series with the same number of variables.
        window: Band half-width W; alignment cells satisfy |i - j| <= W.
            Raised to |n1 - n2| with a logged warning when smaller, since
            no path exists below that.

    Returns:
        sqrt of the minimal path sum of squared multivariate Euclidean
        sample costs over monotone boundary-anchored banded paths.
    """
    x = _as_series(t1)
    y = _as_series(t2)
    if x.shape[1] != y.shape[1]:
        raise ValidationError(
            f"variable counts differ: {x.shape[1]} vs {y.shape[1]}"
        )
    w = _effective_window(int(window), x.shape[0], y.shape[0])
    return float(_dtw_banded(x, y, w))


def dtw_independent(t1, t2, window: int) -> float:
    """Independent multivariate DTW: per-variable distances, summed."""
    x = _as_series(t1)
    y = _as_series(t2)
    if x.shape[1] != y.shape[1]:
        raise ValidationError(
            f"variable counts differ: {x.shape[1]} vs {y.shape[1]}"
        )
    w = _effective_window(int(window), x.shape[0], y.shape[0])
    return float(_dtw_banded_sum(x, y, w))


def euclidean(t1, t2) -> float:
    """One-to-one Euclidean distance between equal-length series."""
    x = _as_series(t1)
    y = _as_series(t2)
    if x.shape != y.shape:
        raise ValidationError(f"shapes differ: {x.shape} vs {y.shape}")
    return float(math.sqrt(((x - y) ** 2).sum()))


def distance_matrix(
    dataset: Dataset, config: DtwConfig | None = None, parallel: bool = True
) -> DistanceMatrix:
    """Pairwise distances between all processed events of a dataset.

    All events must share one series length. The parallel fill computes
    each (i, j) cell independently with the same kernel as the sequential
    path, so results are identical regardless of parallelism.
    """
    if config is None:
        config = DtwConfig()
    n = len(dataset)
    if n == 0:
        raise ValidationError("distance_matrix needs a nonempty dataset")
    lengths = {len(ev) for ev in dataset}
    if len(lengths) != 1:
        raise ValidationError(
            f"events must share one processed length, got lengths {sorted(lengths)}"
        )
    length = lengths.pop()
    X = np.ascontiguousarray(
        np.stack([ev.as_matrix() for ev in dataset]), dtype=float
    )
    if config.variant == "euclidean":
        w = 0
    else:
        w = _effective_window(config.window_for(length, length), length, length)
    independent = config.variant == "independent"
    if parallel:
        values = _pairwise(X, w, independent)
    else:
        values = np.zeros((n, n))
        kernel = _dtw_banded_sum if independent else _dtw_banded
        for i in range(n):
            for j in range(i + 1, n):
                d = kernel(X[i], X[j], w)
                values[i, j] = d
                values[j, i] = d
    return DistanceMatrix(n=n, values=values)


def save_distance_matrix(matrix: DistanceMatrix, path, event_ids=None) -> None:
    """Dump a distance matrix as CSV, optionally labeled by event ids."""
    ids = list(event_ids) if event_ids is not None else None
    if ids is not None and len(ids) != matrix.n:
        raise ValidationError(
            f"{len(ids)} event ids for a {matrix.n}x{matrix.n} matrix"
        )
    with open(path, "w", encoding="utf-8", newline="") as f:
        if ids is not None:
            f.write("event_id," + ",".join(ids) + "\n")
        for i in range(matrix.n):
            row = ",".join(repr(float(v)) for v in matrix.values[i])
            if ids is not None:
                row = ids[i] + "," + row
            f.write(row + "\n")
