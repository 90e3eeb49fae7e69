"""Labeled synthetic hydrograph/sedigraph generator.

Sixteen event types arise from eight hydrograph shapes crossed with two
concentration shapes. Each shape is a raised-cosine pulse controlled by
four parameters: onset (when the curve leaves base level), duration of
the active window, time-to-peak within that window, and the recess level
the curve settles at afterwards. Breakpoints snap to sample indices so
the noiseless curves hit 1.0 at the peak and the recess value at the end
exactly. Gaussian noise is added per sample without clipping; the
preprocessing pipeline re-ranges values later.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .events import Dataset, RawEvent

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ShapeParams:
    """Raised-cosine pulse parameters, all on normalized time [0, 1]."""

    duration_of_peak: float
    time_to_peak: float
    onset: float = 0.0
    recess: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.duration_of_peak <= 1.0:
            raise ValidationError(
                f"duration_of_peak must be in [0, 1], got {self.duration_of_peak}"
            )
        if not 0.0 < self.time_to_peak < 1.0:
            raise ValidationError(
                f"time_to_peak must be in (0, 1), got {self.time_to_peak}"
            )
        if not 0.0 <= self.onset < 1.0:
            raise ValidationError(f"onset must be in [0, 1), got {self.onset}")
        if not 0.0 <= self.recess <= 1.0:
            raise ValidationError(f"recess must be in [0, 1], got {self.recess}")


#: The eight hydrograph types: flashy, early, mid, and delayed peaks,
#: each with complete (0) and incomplete (0.4) recess.
HYDROGRAPH_TYPES: tuple[tuple[str, ShapeParams], ...] = (
    ("flashy-complete", ShapeParams(0.4, 0.5, 0.0, 0.0)),
    ("flashy-incomplete", ShapeParams(0.4, 0.5, 0.0, 0.4)),
    ("early-complete", ShapeParams(0.8, 0.2, 0.0, 0.0)),
    ("early-incomplete", ShapeParams(0.8, 0.2, 0.0, 0.4)),
    ("mid-complete", ShapeParams(0.8, 0.5, 0.0, 0.0)),
    ("mid-incomplete", ShapeParams(0.8, 0.5, 0.0, 0.4)),
    ("delayed-complete", ShapeParams(0.8, 0.8, 0.0, 0.0)),
    ("delayed-incomplete", ShapeParams(0.8, 0.8, 0.0, 0.4)),
)

#: The two concentration-graph types.
CONCENTRATION_TYPES: tuple[tuple[str, ShapeParams], ...] = (
    ("early-peak", ShapeParams(0.5, 0.5, 0.0, 0.0)),
    ("late-peak", ShapeParams(0.5, 0.5, 0.5, 0.0)),
)


@dataclass(frozen=True)
class SynthLabel:
    """Ground-truth type of a synthetic event."""

    hydro_type: str
    conc_type: str
    combined: int

    @classmethod
    def from_indices(cls, hydro_index: int, conc_index: int) -> "SynthLabel":
        return cls(
            hydro_type=HYDROGRAPH_TYPES[hydro_index][0],
            conc_type=CONCENTRATION_TYPES[conc_index][0],
            combined=2 * hydro_index + conc_index,
        )


@dataclass(frozen=True)
class SynthConfig:
    """Generator configuration; defaults produce 800 events of length 100."""

    events_per_type: int = 50
    raw_length: int = 100
    noise_std: float = 0.05
    noise_mean: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.events_per_type < 1:
            raise ValidationError(
                f"events_per_type must be positive, got {self.events_per_type}"
            )
        if self.raw_length < 4:
            raise ValidationError(
                f"raw_length must be at least 4, got {self.raw_length}"
            )
        if self.noise_std < 0.0:
            raise ValidationError(f"noise_std must be nonnegative, got {self.noise_std}")


def _snap(x: float) -> int:
    return int(math.floor(x + 0.5))


def shape_curve(params: ShapeParams, length: int) -> np.ndarray:
    """Evaluate a noiseless pulse on `length` uniform samples of [0, 1].

    Zero before onset, a raised-cosine rise to exactly 1 at the peak, a
    raised-cosine fall to exactly the recess level at the end of the
    active window (clipped to 1.0 of normalized time), and constant
    recess afterwards.
    """
    if length < 2:
        raise ValidationError(f"shape_curve needs length >= 2, got {length}")
    steps = length - 1
    i_on = _snap(params.onset * steps)
    window = min(params.duration_of_peak, 1.0 - params.onset)
    i_end = _snap((params.onset + window) * steps)
    i_pk = i_on + _snap(params.time_to_peak * (i_end - i_on))
    v = np.zeros(length)
    if i_pk > i_on:
        j = np.arange(i_on, i_pk + 1)
        v[j] = 0.5 * (1.0 - np.cos(np.pi * (j - i_on) / (i_pk - i_on)))
    v[i_pk] = 1.0
    if i_end > i_pk:
        j = np.arange(i_pk, i_end + 1)
        v[j] = params.recess + (1.0 - params.recess) * 0.5 * (
            1.0 + np.cos(np.pi * (j - i_pk) / (i_end - i_pk))
        )
        v[i_pk] = 1.0
    v[i_end + 1 :] = params.recess
    return v


def generate_dataset(config: SynthConfig) -> Dataset:
    """Generate the labeled synthetic dataset.

    Events are ordered by (hydrograph type, concentration type, replicate)
    and labeled with the combined type index 0..15. Each event draws its
    noise from an RNG stream spawned from the dataset seed and the event
    index, so the dataset is byte-identical per seed and independent of
    generation order.
    """
    length = config.raw_length
    times = np.arange(length, dtype=float)
    total = 16 * config.events_per_type
    width = len(str(total - 1))
    children = np.random.SeedSequence(config.seed).spawn(total)
    events = []
    index = 0
    for h, (_, hydro_params) in enumerate(HYDROGRAPH_TYPES):
        hydro_base = shape_curve(hydro_params, length)
        for c, (_, conc_params) in enumerate(CONCENTRATION_TYPES):
            conc_base = shape_curve(conc_params, length)
            label = str(2 * h + c)
            for _ in range(config.events_per_type):
                rng = np.random.default_rng(children[index])
                discharge = hydro_base + rng.normal(
                    config.noise_mean, config.noise_std, length
                )
                concentration = conc_base + rng.normal(
                    config.noise_mean, config.noise_std, length
                )
                events.append(
                    RawEvent(
                        event_id=f"synth-{index:0{width}d}",
                        site_id="synthetic",
                        time_s=times,
                        discharge=discharge,
                        concentration=concentration,
                        label=label,
                    )
                )
                index += 1
    return Dataset(events)
