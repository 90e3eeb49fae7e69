import numpy as np
import pytest

from stormclust import (
    ElbowCurve,
    elbow_curve,
    find_knee,
    hopkins_from_vectors,
    hopkins_statistic,
    kmedoids,
)
from stormclust.errors import ValidationError

# a curve with a clear bend at k=4: the drop into 4 is 28, out of it 2.5
BENT_KS = np.arange(2, 13)
BENT_SSE = np.array(
    [100.0, 58.0, 30.0, 27.5, 25.6, 24.2, 23.1, 22.2, 21.5, 20.9, 20.4]
)


def test_knee_on_reciprocal_curve():
    ks = np.arange(1, 11)
    curve = ElbowCurve(ks=ks, sse=1.0 / ks, seeds_per_k=1)
    assert find_knee(curve) == 2


def test_knee_on_bent_curve():
    curve = ElbowCurve(ks=BENT_KS, sse=BENT_SSE, seeds_per_k=1)
    assert find_knee(curve) == 4


def test_straight_line_has_no_knee():
    ks = np.arange(2, 12)
    curve = ElbowCurve(ks=ks, sse=1000.0 - 40.0 * ks, seeds_per_k=1)
    assert find_knee(curve) is None


def test_increasing_curve_has_no_knee():
    curve = ElbowCurve(ks=[2, 3, 4, 5], sse=[1.0, 2.0, 3.0, 4.0], seeds_per_k=1)
    assert find_knee(curve) is None


def test_knee_is_affine_invariant():
    base = ElbowCurve(ks=BENT_KS, sse=BENT_SSE, seeds_per_k=1)
    scaled = ElbowCurve(ks=BENT_KS, sse=7.3 * BENT_SSE + 11.0, seeds_per_k=1)
    assert find_knee(scaled) == find_knee(base)


def test_knee_sensitivity_raises_the_bar():
    curve = ElbowCurve(ks=BENT_KS, sse=BENT_SSE, seeds_per_k=1)
    # drop ratio at the bend is 11.2, so it survives S = 10 but not S = 11
    assert find_knee(curve, sensitivity=10.0) == 4
    assert find_knee(curve, sensitivity=11.0) is None


def test_knee_tie_goes_to_smallest_k():
    # k=2 and k=4 both have an exact drop ratio of 4.0
    sse = np.array([96.0, 32.0, 16.0, 8.0, 6.0])
    curve = ElbowCurve(ks=np.arange(1, 6), sse=sse, seeds_per_k=1)
    assert (96.0 - 32.0) / (32.0 - 16.0) == (16.0 - 8.0) / (8.0 - 6.0)
    assert find_knee(curve) == 2


def test_knee_input_validation():
    with pytest.raises(ValidationError):
        find_knee(ElbowCurve(ks=[1, 2], sse=[2.0, 1.0], seeds_per_k=1))
    curve = ElbowCurve(ks=BENT_KS, sse=BENT_SSE, seeds_per_k=1)
    with pytest.raises(ValidationError):
        find_knee(curve, sensitivity=0.0)
    with pytest.raises(ValidationError):
        find_knee(curve, sensitivity=-1.0)


def test_elbow_curve_validation():
    with pytest.raises(ValidationError):
        ElbowCurve(ks=[2, 2, 3], sse=[3.0, 2.0, 1.0], seeds_per_k=1)
    with pytest.raises(ValidationError):
        ElbowCurve(ks=[2, 3], sse=[3.0, 2.0, 1.0], seeds_per_k=1)
    with pytest.raises(ValidationError):
        ElbowCurve(ks=[2, 3], sse=[3.0, -2.0], seeds_per_k=1)


def test_elbow_curve_on_small_dataset(small_matrix):
    n = small_matrix.n
    curve = elbow_curve(small_matrix, [1, n, 4, 4, 8], range(3))
    assert curve.ks.tolist() == [1, 4, 8, n]
    assert curve.seeds_per_k == 3
    assert curve.sse[-1] == 0.0
    assert curve.sse[0] >= curve.sse[-1]
    one = kmedoids(small_matrix, 1, seed=0)
    assert curve.sse[0] == one.sse


def test_elbow_curve_bounds(small_matrix):
    with pytest.raises(ValidationError):
        elbow_curve(small_matrix, [0, 2], range(2))
    with pytest.raises(ValidationError):
        elbow_curve(small_matrix, [2, small_matrix.n + 1], range(2))
    with pytest.raises(ValidationError):
        elbow_curve(small_matrix, [], range(2))


def test_hopkins_high_for_clustered_data(small_processed):
    assert hopkins_statistic(small_processed) >= 0.9


def test_hopkins_near_half_for_uniform_data():
    for seed in range(3):
        gen = np.random.default_rng(1000 + seed)
        X = gen.uniform(0.0, 1.0, (200, 10))
        value = hopkins_from_vectors(X, seed=seed)
        assert 0.4 <= value <= 0.6


def test_hopkins_exactly_one_for_pure_duplicates():
    # every sampled real point has a zero-distance twin
    X = np.repeat(np.array([[0.0, 0.0], [10.0, 10.0]]), 8, axis=0)
    assert hopkins_from_vectors(X, seed=0) == 1.0


def test_hopkins_half_when_box_collapses():
    X = np.zeros((12, 3))
    assert hopkins_from_vectors(X, seed=0) == 0.5


def test_hopkins_deterministic(small_processed):
    a = hopkins_statistic(small_processed, seed=4)
    b = hopkins_statistic(small_processed, seed=4)
    assert a == b


def test_hopkins_validation(small_processed):
    with pytest.raises(ValidationError):
        hopkins_from_vectors(np.zeros((5, 2)))
    with pytest.raises(ValidationError):
        hopkins_from_vectors(np.zeros(20))
    with pytest.raises(ValidationError):
        hopkins_from_vectors(np.zeros((20, 2)), sample_fraction=0.0)
    with pytest.raises(ValidationError):
        hopkins_from_vectors(np.zeros((20, 2)), sample_fraction=1.5)
    with pytest.raises(ValidationError):
        hopkins_from_vectors(np.zeros((20, 2)), repetitions=0)
    with pytest.raises(ValidationError):
        hopkins_statistic(type(small_processed)(list(small_processed)[:4]))
