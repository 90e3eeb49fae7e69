"""K-medoids clustering over a precomputed distance matrix.

The iteration alternates assignment (each event to its nearest medoid,
ties to the lower medoid index) with update (each cluster's medoid moves
to the member minimizing the intra-cluster distance sum, ties to the
lower event index) until the medoid set is stable or max_iter is reached.
Initial medoids are seeded by distance-weighted random selection: the
first uniformly, each next drawn with probability proportional to its
squared distance to the already chosen set. Uniform seeding routinely
starts sibling shapes under one medoid and the swap iteration cannot
split them, so the weighted start is what makes restarts recover
well-separated ground truth; it still selects k actual data points at
random.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

log = logging.getLogger(__name__)


@dataclass(eq=False)
class Clustering:
    """A converged clustering: medoids, assignments, and cost terms.

    cost is the sum of distances of events to their medoid; sse the sum
    of squared distances. cost_history records the cost after every
    assignment phase and is non-increasing.
    """

    k: int
    medoids: np.ndarray
    assignments: np.ndarray
    cost: float
    sse: float
    iterations: int
    seed: int
    cost_history: list[float] = field(default_factory=list, repr=False)


def _matrix_values(matrix) -> np.ndarray:
    values = getattr(matrix, "values", matrix)
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValidationError(f"expected a square distance matrix, got {values.shape}")
    return values


def _weighted_init(D: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = D.shape[0]
    chosen = [int(rng.integers(0, n))]
    dmin = D[chosen[0]].copy()
    for _ in range(k - 1):
        weights = dmin * dmin
        total = weights.sum()
        if total <= 0.0:
            # all remaining points coincide with a chosen medoid
            pool = [i for i in range(n) if i not in chosen]
            nxt = pool[int(rng.integers(0, len(pool)))]
        else:
            r = rng.random() * total
            nxt = int(np.searchsorted(np.cumsum(weights), r, side="right"))
            if nxt > n - 1:
                nxt = n - 1
        chosen.append(nxt)
        dmin = np.minimum(dmin, D[nxt])
    return np.sort(np.asarray(chosen))


def _assign_with_repair(
    D: np.ndarray, medoids: np.ndarray
) -> tuple[np.ndarray, np.ndarray, bool]:
    """Assign events to nearest medoids, repairing captured medoids.

    A cluster goes empty only when its medoid ties at distance zero with a
    lower-indexed medoid (exact duplicates). The repair reseeds that slot
    with the worst-served event, which strictly lowers the cost, so the
    loop terminates; if every event is already at distance zero the empty
    clusters just take their own medoids back.
    """
    n = D.shape[0]
    medoids = medoids.copy()
    repaired = False
    while True:
        assignments = np.argmin(D[:, medoids], axis=1)
        counts = np.bincount(assignments, minlength=len(medoids))
        empty = np.flatnonzero(counts == 0)
        if len(empty) == 0:
            return assignments, medoids, repaired
        repaired = True
        served = D[np.arange(n), medoids[assignments]].copy()
        served[medoids] = -1.0
        candidate = int(np.argmax(served))
        if served[candidate] <= 0.0:
            for c in empty:
                assignments[medoids[c]] = c
            return assignments, medoids, repaired
        medoids[int(empty[0])] = candidate
        medoids = np.sort(medoids)


def _update_medoids(
    D: np.ndarray, assignments: np.ndarray, medoids: np.ndarray, k: int
) -> np.ndarray:
    new = medoids.copy()
    for c in range(k):
        members = np.flatnonzero(assignments == c)
        sub = D[np.ix_(members, members)].sum(axis=1)
        new[c] = members[int(np.argmin(sub))]
    return np.sort(new)


def kmedoids(matrix, k: int, seed: int, max_iter: int = 100) -> Clustering:
    """Cluster a distance matrix into k medoid-centered groups.

    Args:
        matrix: DistanceMatrix or a square ndarray of pairwise distances.
        k: Number of clusters, 1 <= k <= n.
        seed: Seed for the PCG64 generator driving initialization.
        max_iter: Cap on update phases.

    Returns:
        Clustering with sorted medoid indices; deterministic given
        (matrix, k, seed, max_iter).
    """
    D = _matrix_values(matrix)
    n = D.shape[0]
    if k < 1:
        raise ValidationError(f"k must be positive, got {k}")
    if k > n:
        raise ValidationError(f"k={k} exceeds the {n} available events")
    if max_iter < 1:
        raise ValidationError(f"max_iter must be positive, got {max_iter}")
    rng = np.random.default_rng(seed)
    medoids = _weighted_init(D, k, rng)
    history: list[float] = []
    iterations = 0
    while True:
        assignments, medoids, repaired = _assign_with_repair(D, medoids)
        history.append(float(D[np.arange(n), medoids[assignments]].sum()))
        if iterations >= max_iter:
            break
        new_medoids = _update_medoids(D, assignments, medoids, k)
        iterations += 1
        if not repaired and np.array_equal(new_medoids, medoids):
            break
        medoids = new_medoids
    served = D[np.arange(n), medoids[assignments]]
    return Clustering(
        k=k,
        medoids=medoids,
        assignments=assignments,
        cost=float(served.sum()),
        sse=float((served**2).sum()),
        iterations=iterations,
        seed=seed,
        cost_history=history,
    )


def kmedoids_restarts(matrix, k: int, seeds, max_iter: int = 100) -> Clustering:
    """Run kmedoids once per seed and keep the lowest-cost result.

    Ties keep the earliest seed in the given order.
    """
    seeds = list(seeds)
    if not seeds:
        raise ValidationError("kmedoids_restarts needs at least one seed")
    best: Clustering | None = None
    for seed in seeds:
        result = kmedoids(matrix, k, seed, max_iter)
        if best is None or result.cost < best.cost:
            best = result
    return best
