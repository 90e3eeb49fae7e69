import logging

import numpy as np
import pytest

from stormclust import (
    PreprocessConfig,
    RawEvent,
    SmoothingConfig,
    normalize_unit,
    preprocess_dataset,
    preprocess_event,
    resample_spline,
    savitzky_golay,
)
from stormclust.errors import ValidationError


@pytest.mark.parametrize("order", [2, 3, 4])
@pytest.mark.parametrize("window", [5, 13, 21])
def test_savgol_reproduces_polynomials(order, window):
    x = np.linspace(-2.0, 3.0, 40)
    gen = np.random.default_rng(order * 100 + window)
    coeffs = gen.uniform(-2.0, 2.0, order + 1)
    y = np.polynomial.polynomial.polyval(x, coeffs)
    smoothed = savitzky_golay(y, SmoothingConfig(order=order, window=window))
    assert np.max(np.abs(smoothed - y)) < 1e-9


def test_savgol_preserves_constants():
    y = np.full(30, 4.25)
    out = savitzky_golay(y, SmoothingConfig(order=3, window=7))
    assert np.max(np.abs(out - 4.25)) < 1e-12


def test_savgol_reduces_noise():
    gen = np.random.default_rng(7)
    x = np.linspace(0.0, 2.0 * np.pi, 200)
    clean = np.sin(x)
    noisy = clean + gen.normal(0.0, 0.2, x.size)
    smoothed = savitzky_golay(noisy, SmoothingConfig(order=3, window=21))
    assert np.mean((smoothed - clean) ** 2) < 0.25 * np.mean((noisy - clean) ** 2)


def test_savgol_length_preserved():
    y = np.arange(25.0) ** 2
    assert len(savitzky_golay(y, SmoothingConfig())) == 25


def test_savgol_input_validation():
    with pytest.raises(ValidationError):
        savitzky_golay(np.zeros((5, 2)), SmoothingConfig(order=2, window=5))
    with pytest.raises(ValidationError):
        savitzky_golay(np.zeros(10), SmoothingConfig(order=3, window=21))


def test_smoothing_config_validation():
    with pytest.raises(ValidationError):
        SmoothingConfig(order=0)
    with pytest.raises(ValidationError):
        SmoothingConfig(window=20)
    with pytest.raises(ValidationError):
        SmoothingConfig(order=5, window=5)


def test_preprocess_config_validation():
    with pytest.raises(ValidationError):
        PreprocessConfig(target_length=1)


def test_spline_reproduces_linear_data():
    t = np.array([0.0, 1.0, 2.5, 4.0, 7.0, 9.0])
    y = 3.0 * t - 1.5
    out = resample_spline(t, y, 37)
    tq = np.linspace(0.0, 9.0, 37)
    assert np.max(np.abs(out - (3.0 * tq - 1.5))) < 1e-9


def test_spline_reproduces_constants():
    t = np.linspace(0.0, 5.0, 8)
    out = resample_spline(t, np.full(8, 2.0), 20)
    assert np.max(np.abs(out - 2.0)) < 1e-12


def test_spline_tracks_smooth_curve():
    t = np.linspace(0.0, 2.0 * np.pi, 60)
    out = resample_spline(t, np.sin(t), 200)
    tq = np.linspace(0.0, 2.0 * np.pi, 200)
    assert np.max(np.abs(out - np.sin(tq))) < 1e-3


def test_spline_interpolates_input_grid():
    # querying on the input grid returns the input values
    t = np.linspace(0.0, 1.0, 50)
    gen = np.random.default_rng(3)
    y = gen.uniform(0.0, 1.0, 50)
    out = resample_spline(t, y, 50)
    assert np.max(np.abs(out - y)) < 1e-9


def test_spline_endpoints_exact():
    t = np.array([0.0, 0.3, 1.1, 2.0, 5.0])
    y = np.array([4.0, -1.0, 2.0, 0.5, 3.0])
    out = resample_spline(t, y, 11)
    assert out[0] == 4.0
    assert out[-1] == 3.0


def test_spline_handles_irregular_spacing():
    t = np.array([0.0, 0.1, 0.15, 2.0, 8.0, 8.5, 9.0])
    y = 2.0 * t + 1.0
    out = resample_spline(t, y, 25)
    tq = np.linspace(0.0, 9.0, 25)
    assert np.max(np.abs(out - (2.0 * tq + 1.0))) < 1e-9


def test_spline_input_validation():
    with pytest.raises(ValidationError):
        resample_spline([0.0, 1, 2], [1.0, 2, 3], 10)
    with pytest.raises(ValidationError):
        resample_spline([0.0, 1, 1, 2], [1.0] * 4, 10)
    with pytest.raises(ValidationError):
        resample_spline([0.0, 1, 2, 3], [1.0] * 3, 10)
    with pytest.raises(ValidationError):
        resample_spline([0.0, 1, 2, 3], [1.0] * 4, 1)


def test_normalize_unit_range():
    y = np.array([2.0, 6.0, 4.0])
    out = normalize_unit(y)
    assert out.min() == 0.0
    assert out.max() == 1.0
    assert np.array_equal(out, [0.0, 1.0, 0.5])


def test_normalize_constant_gives_zeros():
    assert np.array_equal(normalize_unit(np.full(5, 3.3)), np.zeros(5))


def test_normalize_idempotent():
    gen = np.random.default_rng(11)
    y = gen.uniform(-5.0, 5.0, 64)
    once = normalize_unit(y)
    assert np.array_equal(normalize_unit(once), once)


def _event(n, seed=0):
    gen = np.random.default_rng(seed)
    return RawEvent(
        event_id=f"e{seed}",
        site_id="s",
        time_s=np.cumsum(gen.uniform(0.5, 2.0, n)),
        discharge=gen.uniform(0.0, 10.0, n),
        concentration=gen.uniform(0.0, 100.0, n),
        label=None,
    )


def test_preprocess_event_shape_and_range():
    out = preprocess_event(_event(80), PreprocessConfig())
    assert len(out) == 50
    for series in (out.discharge, out.concentration):
        assert series.min() == 0.0
        assert series.max() == 1.0


def test_preprocess_short_event_skips_smoothing(caplog):
    ev = _event(10, seed=2)
    with caplog.at_level(logging.WARNING):
        out = preprocess_event(ev, PreprocessConfig())
    assert "smoothing skipped" in caplog.text
    expected = normalize_unit(resample_spline(ev.time_s, ev.discharge, 50))
    assert np.max(np.abs(out.discharge - expected)) < 1e-12


def test_preprocess_normalize_disabled():
    ev = _event(60, seed=4)
    cfg = PreprocessConfig(normalize=False)
    out = preprocess_event(ev, cfg)
    sg = savitzky_golay(ev.discharge, cfg.smoothing)
    expected = resample_spline(ev.time_s, sg, 50)
    assert np.max(np.abs(out.discharge - expected)) < 1e-12


def test_preprocess_dataset_preserves_order_and_labels(small_dataset):
    processed = preprocess_dataset(small_dataset)
    assert processed.event_ids == small_dataset.event_ids
    assert processed.labels == small_dataset.labels
    for ev in processed:
        assert len(ev) == 50
        assert 0.0 <= ev.discharge.min() and ev.discharge.max() <= 1.0
        assert 0.0 <= ev.concentration.min() and ev.concentration.max() <= 1.0
