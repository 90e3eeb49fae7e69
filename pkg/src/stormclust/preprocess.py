"""Event preprocessing: Savitzky-Golay smoothing, natural cubic spline
resampling to a common length, and unit-range normalization, applied in
that order to each variable independently.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ValidationError
from .events import Dataset, ProcessedEvent, RawEvent

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SmoothingConfig:
    """Savitzky-Golay parameters: polynomial order and odd window length."""

    order: int = 3
    window: int = 21

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ValidationError(f"smoothing order must be positive, got {self.order}")
        if self.window % 2 == 0:
            raise ValidationError(f"smoothing window must be odd, got {self.window}")
        if self.window <= self.order:
            raise ValidationError(
                f"smoothing window {self.window} must exceed order {self.order}"
            )


@dataclass(frozen=True)
class PreprocessConfig:
    """Full preprocessing configuration.

    target_length is the common series length after resampling;
    normalization can be disabled for diagnostic runs.
    """

    smoothing: SmoothingConfig = field(default_factory=SmoothingConfig)
    target_length: int = 50
    normalize: bool = True

    def __post_init__(self) -> None:
        if self.target_length < 2:
            raise ValidationError(
                f"target_length must be at least 2, got {self.target_length}"
            )


@lru_cache(maxsize=32)
def _sg_projection(order: int, window: int) -> np.ndarray:
    """Projection matrix onto degree-`order` polynomials over the window.

    Row r evaluates the least-squares polynomial at window offset r, so the
    center row yields the classic SG convolution coefficients and the
    outer rows handle the boundaries.
    """
    half = window // 2
    offsets = np.arange(window, dtype=float) - half
    design = np.vander(offsets, order + 1, increasing=True)
    proj = design @ np.linalg.solve(design.T @ design, design.T)
    proj.flags.writeable = False
    return proj


def savitzky_golay(series, config: SmoothingConfig) -> np.ndarray:
    """Smooth a series with a Savitzky-Golay filter.

    Interior samples take the value of the window's least-squares
    polynomial at its center; the first and last half-window samples take
    the polynomial fitted over the first/last full window evaluated at
    their positions, preserving length and polynomial reproduction.

    Args:
        series: 1-D sequence of finite reals, length >= config.window.
        config: Filter order and window.

    Returns:
        Smoothed array of the same length.
    """
    y = np.asarray(series, dtype=float)
    if y.ndim != 1:
        raise ValidationError("savitzky_golay expects a 1-D series")
    if len(y) < config.window:
        raise ValidationError(
            f"series length {len(y)} is shorter than smoothing window {config.window}"
        )
    proj = _sg_projection(config.order, config.window)
    half = config.window // 2
    out = np.convolve(y, proj[half][::-1], mode="same")
    out[:half] = proj[:half] @ y[: config.window]
    out[-half:] = proj[half + 1 :] @ y[-config.window :]
    return out


def resample_spline(times, values, target_length: int) -> np.ndarray:
    """Resample a series to a uniform grid with a natural cubic spline.

    The spline interpolates the input points (second derivative zero at
    both ends) and is evaluated at target_length times uniformly spaced
    from the first to the last timestamp inclusive; endpoint values are
    taken from the input exactly.

    Args:
        times: Strictly increasing sample times, length >= 4.
        values: Sample values, same length as times.
        target_length: Number of output samples, >= 2.

    Returns:
        Array of target_length resampled values.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    n = len(t)
    if len(y) != n:
        raise ValidationError("times and values differ in length")
    if n < 4:
        raise ValidationError(f"resampling needs at least 4 points, got {n}")
    if target_length < 2:
        raise ValidationError(f"target_length must be at least 2, got {target_length}")
    h = np.diff(t)
    if np.any(h <= 0):
        raise ValidationError("sample times must be strictly increasing")

    # tridiagonal system for interior second derivatives, natural ends
    rhs = 6.0 * ((y[2:] - y[1:-1]) / h[1:] - (y[1:-1] - y[:-2]) / h[:-1])
    sub = h[:-1].copy()
    diag = 2.0 * (h[:-1] + h[1:])
    sup = h[1:].copy()
    d = rhs.copy()
    for i in range(1, len(diag)):
        w = sub[i] / diag[i - 1]
        diag[i] -= w * sup[i - 1]
        d[i] -= w * d[i - 1]
    m_inner = np.zeros(len(diag))
    m_inner[-1] = d[-1] / diag[-1]
    for i in range(len(diag) - 2, -1, -1):
        m_inner[i] = (d[i] - sup[i] * m_inner[i + 1]) / diag[i]
    m = np.zeros(n)
    m[1:-1] = m_inner

    tq = np.linspace(t[0], t[-1], target_length)
    k = np.clip(np.searchsorted(t, tq) - 1, 0, n - 2)
    u = tq - t[k]
    hk = h[k]
    out = (
        (m[k] * (t[k + 1] - tq) ** 3 + m[k + 1] * u**3) / (6.0 * hk)
        + (y[k] / hk - m[k] * hk / 6.0) * (t[k + 1] - tq)
        + (y[k + 1] / hk - m[k + 1] * hk / 6.0) * u
    )
    out[0] = y[0]
    out[-1] = y[-1]
    return out


def normalize_unit(series) -> np.ndarray:
    """Scale a series to [0, 1]; a constant series maps to all zeros."""
    y = np.asarray(series, dtype=float)
    lo = y.min()
    hi = y.max()
    if hi == lo:
        return np.zeros_like(y)
    return (y - lo) / (hi - lo)


def preprocess_event(event: RawEvent, config: PreprocessConfig) -> ProcessedEvent:
    """Run the smooth -> resample -> normalize pipeline on one event.

    Events shorter than the smoothing window skip the smoothing stage with
    a logged warning rather than failing.
    """
    q = np.asarray(event.discharge, dtype=float)
    c = np.asarray(event.concentration, dtype=float)
    if len(event) < config.smoothing.window:
        log.warning(
            "event '%s': %d samples < smoothing window %d, smoothing skipped",
            event.event_id,
            len(event),
            config.smoothing.window,
        )
    else:
        q = savitzky_golay(q, config.smoothing)
        c = savitzky_golay(c, config.smoothing)
    q = resample_spline(event.time_s, q, config.target_length)
    c = resample_spline(event.time_s, c, config.target_length)
    if config.normalize:
        q = normalize_unit(q)
        c = normalize_unit(c)
    return ProcessedEvent(
        event_id=event.event_id,
        site_id=event.site_id,
        discharge=q,
        concentration=c,
        label=event.label,
    )


def preprocess_dataset(dataset: Dataset, config: PreprocessConfig | None = None) -> Dataset:
    """Preprocess every event in a dataset, preserving order."""
    if config is None:
        config = PreprocessConfig()
    return Dataset([preprocess_event(ev, config) for ev in dataset])
