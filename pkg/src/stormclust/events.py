"""Domain types for storm events and the file formats the package reads
and writes.

The canonical raw format is a long CSV, one sample per row, with header
``event_id,site_id,time_s,discharge,concentration[,label]``. Metric tables
arrive as one row per event with any subset of the known metric columns.
Clusterings are persisted as deterministic JSON documents.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import ParseError, SchemaError, ValidationError

log = logging.getLogger(__name__)

EVENT_COLUMNS = ("event_id", "site_id", "time_s", "discharge", "concentration")
LABEL_COLUMN = "label"

#: Numeric metric columns accepted in a metrics table. Everything else
#: (besides event_id and the categorical columns) is rejected as unknown.
METRIC_NAMES = (
    "T_Q",
    "T_SSC",
    "T_QSSC",
    "Q_Recess",
    "SSC_Recess",
    "HI",
    "T_LASTP",
    "A3P",
    "A14P",
    "SM_SHALLOW",
    "SM_DEEP",
    "BF_NORM",
    "P",
    "P_max",
    "D_P",
    "T_PSSC",
    "BL",
    "Q_NORM",
    "LogQ_NORM",
    "D_Q",
    "FI",
    "SSC",
    "SSL_NORM",
    "FLUX_NORM",
)

CATEGORICAL_COLUMNS = ("site", "hysteresis_class", "cluster")

MIN_SAMPLES = 4


def _freeze(values, dtype=float) -> np.ndarray:
    # copy so freezing never flips writeable on a caller-owned array
    arr = np.array(values, dtype=dtype)
    arr.flags.writeable = False
    return arr


@dataclass(eq=False)
class RawEvent:
    """One storm event as ingested: discharge and concentration over time.

    Invariants enforced at construction: at least :data:`MIN_SAMPLES`
    samples, strictly ascending timestamps, finite values.
    """

    event_id: str
    site_id: str
    time_s: np.ndarray
    discharge: np.ndarray
    concentration: np.ndarray
    label: str | None = None

    def __post_init__(self) -> None:
        self.time_s = _freeze(self.time_s)
        self.discharge = _freeze(self.discharge)
        self.concentration = _freeze(self.concentration)
        n = len(self.time_s)
        if len(self.discharge) != n or len(self.concentration) != n:
            raise ValidationError(
                f"event '{self.event_id}': sample arrays differ in length"
            )
        if n < MIN_SAMPLES:
            raise ValidationError(
                f"event '{self.event_id}' has {n} samples, need at least {MIN_SAMPLES}"
            )
        if not np.all(np.diff(self.time_s) > 0):
            raise ValidationError(
                f"event '{self.event_id}': timestamps must be strictly ascending"
            )
        if not (
            np.all(np.isfinite(self.time_s))
            and np.all(np.isfinite(self.discharge))
            and np.all(np.isfinite(self.concentration))
        ):
            raise ValidationError(f"event '{self.event_id}' contains non-finite values")

    def __len__(self) -> int:
        return len(self.time_s)


@dataclass(eq=False)
class ProcessedEvent:
    """A preprocessed event: both variables resampled to a common length.

    Under the default pipeline both series have length 50 and span [0, 1]
    (all zeros when the raw series was constant).
    """

    event_id: str
    site_id: str
    discharge: np.ndarray
    concentration: np.ndarray
    label: str | None = None

    def __post_init__(self) -> None:
        self.discharge = _freeze(self.discharge)
        self.concentration = _freeze(self.concentration)
        if len(self.discharge) != len(self.concentration):
            raise ValidationError(
                f"event '{self.event_id}': variable lengths differ"
            )
        if len(self.discharge) < 2:
            raise ValidationError(
                f"event '{self.event_id}': processed series too short"
            )
        if not (
            np.all(np.isfinite(self.discharge))
            and np.all(np.isfinite(self.concentration))
        ):
            raise ValidationError(f"event '{self.event_id}' contains non-finite values")

    def __len__(self) -> int:
        return len(self.discharge)

    def as_matrix(self) -> np.ndarray:
        """Stack the two variables into an (n, 2) array, discharge first."""
        return np.column_stack((self.discharge, self.concentration))


class Dataset:
    """An ordered collection of events with unique ids.

    Order is first-appearance order and is stable across runs; clustering
    seeds index into this order.
    """

    def __init__(self, events: Sequence) -> None:
        self.events = list(events)
        self.index: dict[str, int] = {}
        for pos, ev in enumerate(self.events):
            if ev.event_id in self.index:
                raise ValidationError(f"duplicate event_id '{ev.event_id}'")
            self.index[ev.event_id] = pos

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator:
        return iter(self.events)

    def __getitem__(self, pos: int):
        return self.events[pos]

    def get(self, event_id: str):
        try:
            return self.events[self.index[event_id]]
        except KeyError:
            raise ValidationError(f"unknown event_id '{event_id}'") from None

    @property
    def event_ids(self) -> list[str]:
        return [ev.event_id for ev in self.events]

    @property
    def labels(self) -> list[str | None]:
        return [ev.label for ev in self.events]


@dataclass(eq=False)
class EventMetricsTable:
    """Per-event metric values plus optional categorical columns.

    Numeric cells use NaN for explicitly missing values; categorical cells
    use None. Column sets are fixed at load time, except ``cluster`` which
    is filled in after clustering.
    """

    event_ids: list[str]
    numeric: dict[str, np.ndarray]
    categorical: dict[str, list[str | None]]
    _row_index: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        n = len(self.event_ids)
        for name, col in self.numeric.items():
            if len(col) != n:
                raise ValidationError(f"metric column '{name}' length mismatch")
        for name, col in self.categorical.items():
            if len(col) != n:
                raise ValidationError(f"categorical column '{name}' length mismatch")
        self._row_index = {}
        for pos, event_id in enumerate(self.event_ids):
            if event_id in self._row_index:
                raise ValidationError(f"duplicate event_id '{event_id}' in metrics table")
            self._row_index[event_id] = pos

    def __len__(self) -> int:
        return len(self.event_ids)

    def row_of(self, event_id: str) -> int:
        try:
            return self._row_index[event_id]
        except KeyError:
            raise ValidationError(
                f"event_id '{event_id}' not present in metrics table"
            ) from None

    def metric_names(self) -> list[str]:
        return list(self.numeric)

    def group_column(self, name: str) -> list[str | None]:
        """Return a categorical column usable as an ANOVA/z-score grouping."""
        if name not in self.categorical:
            raise ValidationError(f"metrics table has no categorical column '{name}'")
        return self.categorical[name]


def load_events(path, fmt: str = "long-csv") -> Dataset:
    """Load a dataset of RawEvents from a long CSV.

    Args:
        path: CSV file with header
            ``event_id,site_id,time_s,discharge,concentration[,label]``.
        fmt: Only ``"long-csv"`` is supported.

    Returns:
        Dataset of RawEvents, ordered by first appearance, samples sorted
        by time within each event.
    """
    if fmt != "long-csv":
        raise ValidationError(f"unsupported format '{fmt}'")
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected a header row") from None
        col = {name: i for i, name in enumerate(header)}
        for name in EVENT_COLUMNS:
            if name not in col:
                raise SchemaError(f"{path}: missing column '{name}'")
        has_label = LABEL_COLUMN in col
        # per event: [times, discharges, concentrations, site_id, label]
        acc: dict[str, list] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            event_id = row[col["event_id"]]
            try:
                t = float(row[col["time_s"]])
                q = float(row[col["discharge"]])
                c = float(row[col["concentration"]])
            except (ValueError, IndexError) as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}") from None
            if not (math.isfinite(t) and math.isfinite(q) and math.isfinite(c)):
                raise ParseError(f"{path}: line {lineno}: non-finite value")
            site = row[col["site_id"]]
            label = row[col[LABEL_COLUMN]] if has_label else ""
            entry = acc.get(event_id)
            if entry is None:
                acc[event_id] = [[t], [q], [c], site, label]
            else:
                entry[0].append(t)
                entry[1].append(q)
                entry[2].append(c)
                if entry[3] != site:
                    raise ValidationError(
                        f"event '{event_id}': inconsistent site_id values"
                    )
                if entry[4] != label:
                    raise ValidationError(
                        f"event '{event_id}': inconsistent label values"
                    )
    events = []
    for event_id, (ts, qs, cs, site, label) in acc.items():
        t = np.asarray(ts, dtype=float)
        order = np.argsort(t, kind="stable")
        events.append(
            RawEvent(
                event_id=event_id,
                site_id=site,
                time_s=t[order],
                discharge=np.asarray(qs, dtype=float)[order],
                concentration=np.asarray(cs, dtype=float)[order],
                label=label or None,
            )
        )
    return Dataset(events)


def save_events(dataset: Dataset, path) -> None:
    """Write a dataset (raw or processed) as a long CSV.

    Processed events carry no timestamps, so their sample index is written
    as ``time_s``. The ``label`` column appears only when at least one
    event is labeled. Floats use ``repr`` so a round-trip reproduces the
    values exactly.
    """
    with_label = any(ev.label is not None for ev in dataset)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        header = list(EVENT_COLUMNS) + ([LABEL_COLUMN] if with_label else [])
        writer.writerow(header)
        for ev in dataset:
            times = getattr(ev, "time_s", None)
            if times is None:
                times = np.arange(len(ev), dtype=float)
            for i in range(len(ev)):
                row = [
                    ev.event_id,
                    ev.site_id,
                    repr(float(times[i])),
                    repr(float(ev.discharge[i])),
                    repr(float(ev.concentration[i])),
                ]
                if with_label:
                    row.append(ev.label if ev.label is not None else "")
                writer.writerow(row)


def load_metrics(path) -> EventMetricsTable:
    """Load a per-event metrics table.

    The header must contain ``event_id`` plus any subset of the known
    metric names (:data:`METRIC_NAMES`) and categorical columns
    (:data:`CATEGORICAL_COLUMNS`). Unknown columns are rejected. Empty
    cells are explicitly missing (NaN for numerics, None for categoricals).
    """
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected a header row") from None
        if "event_id" not in header:
            raise SchemaError(f"{path}: missing column 'event_id'")
        numeric_cols: list[str] = []
        categorical_cols: list[str] = []
        for name in header:
            if name == "event_id":
                continue
            if name in METRIC_NAMES:
                numeric_cols.append(name)
            elif name in CATEGORICAL_COLUMNS:
                categorical_cols.append(name)
            else:
                raise SchemaError(f"{path}: unknown column '{name}'")
        col = {name: i for i, name in enumerate(header)}
        event_ids: list[str] = []
        numeric: dict[str, list[float]] = {name: [] for name in numeric_cols}
        categorical: dict[str, list[str | None]] = {name: [] for name in categorical_cols}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            event_ids.append(row[col["event_id"]])
            for name in numeric_cols:
                cell = row[col[name]].strip()
                if cell == "":
                    numeric[name].append(math.nan)
                    continue
                try:
                    value = float(cell)
                except ValueError as exc:
                    raise ParseError(f"{path}: line {lineno}: {exc}") from None
                if not math.isfinite(value):
                    raise ParseError(
                        f"{path}: line {lineno}: non-finite value in '{name}'"
                    )
                numeric[name].append(value)
            for name in categorical_cols:
                cell = row[col[name]]
                categorical[name].append(cell if cell != "" else None)
    return EventMetricsTable(
        event_ids=event_ids,
        numeric={name: np.asarray(vals, dtype=float) for name, vals in numeric.items()},
        categorical=categorical,
    )


def save_metrics(table: EventMetricsTable, path) -> None:
    """Write a metrics table back to CSV with missing cells left empty."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        header = ["event_id"] + list(table.numeric) + list(table.categorical)
        writer.writerow(header)
        for i, event_id in enumerate(table.event_ids):
            row: list[str] = [event_id]
            for name in table.numeric:
                value = table.numeric[name][i]
                row.append("" if math.isnan(value) else repr(float(value)))
            for name in table.categorical:
                cell = table.categorical[name][i]
                row.append(cell if cell is not None else "")
            writer.writerow(row)


def save_clustering(clustering, dataset: Dataset, path) -> None:
    """Persist a clustering as a deterministic JSON document.

    Field order and float formatting are fixed, so identical inputs write
    byte-identical files.
    """
    n = len(dataset)
    if len(clustering.assignments) != n:
        raise ValidationError(
            f"clustering covers {len(clustering.assignments)} events, dataset has {n}"
        )
    ids = dataset.event_ids
    doc = {
        "k": int(clustering.k),
        "seed": int(clustering.seed),
        "medoid_event_ids": [ids[m] for m in clustering.medoids],
        "assignments": {
            ids[i]: int(clustering.assignments[i]) for i in range(n)
        },
        "cost": float(clustering.cost),
        "sse": float(clustering.sse),
    }
    with open(path, "w", encoding="utf-8", newline="") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")


def load_clustering(path) -> dict:
    """Read a clustering JSON document back as a dict.

    Returns the raw document after checking the required fields are
    present; ``assignments`` maps event_id to cluster index.
    """
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON: {exc}") from None
    for key in ("k", "seed", "medoid_event_ids", "assignments", "cost", "sse"):
        if key not in doc:
            raise SchemaError(f"{path}: missing field '{key}'")
    return doc
