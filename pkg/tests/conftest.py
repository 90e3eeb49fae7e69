import numpy as np
import pytest

from stormclust import (
    SynthConfig,
    distance_matrix,
    generate_dataset,
    preprocess_dataset,
)


@pytest.fixture(scope="session")
def small_dataset():
    """32 noisy events, 2 per combined type, fixed seed."""
    return generate_dataset(SynthConfig(events_per_type=2, seed=1))


@pytest.fixture(scope="session")
def small_processed(small_dataset):
    return preprocess_dataset(small_dataset)


@pytest.fixture(scope="session")
def small_matrix(small_processed):
    return distance_matrix(small_processed)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
