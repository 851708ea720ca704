"""Precipitation-record ingestion: binarization, day filtering, and
missing-data handling for station networks."""

from __future__ import annotations

import csv
import datetime
from dataclasses import dataclass

import numpy as np

from .ising import SampleMatrix
from .metrics import StationLayout


@dataclass(frozen=True)
class WeatherRecord:
    station: str
    latitude: float
    longitude: float
    date: datetime.date
    precipitation: float

    def __post_init__(self) -> None:
        if self.precipitation < 0:
            raise ValueError("precipitation must be nonnegative")
        if abs(self.latitude) > 90 or abs(self.longitude) > 180:
            raise ValueError("coordinates out of range")


@dataclass(frozen=True, eq=False)
class WeatherDataset:
    """Binary wet/dry matrix with station and date bookkeeping."""

    samples: SampleMatrix
    station_ids: tuple[str, ...]
    layout: StationLayout
    dates: tuple[datetime.date, ...]
    dropped_stations: tuple[str, ...]
    dropped_dates: int


def read_weather_csv(path) -> list[WeatherRecord]:
    """Parse 'station,lat,lon,date,prcp' rows (ISO dates); errors carry line numbers."""
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expected = ["station", "lat", "lon", "date", "prcp"]
        if header is None or [h.strip() for h in header] != expected:
            raise ValueError(f"{path}: header must be 'station,lat,lon,date,prcp'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise ValueError(f"{path}:{lineno}: expected 5 columns")
            try:
                rec = WeatherRecord(
                    row[0].strip(),
                    float(row[1]),
                    float(row[2]),
                    datetime.date.fromisoformat(row[3].strip()),
                    float(row[4]),
                )
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
            records.append(rec)
    if not records:
        raise ValueError(f"{path}: no records")
    return records


def build_weather_dataset(
    records,
    day_filter: tuple[int, ...] = (1, 16),
    completeness: float = 0.9,
    trace_sentinel: float | None = None,
    trace_as_dry: bool = False,
) -> WeatherDataset:
    """Assemble the binary observation matrix from raw records.

    Keeps only calendar days in ``day_filter`` (1st and 16th by default, to
    damp temporal dependence), drops stations observed on less than
    ``completeness`` of the retained dates, then drops dates still missing
    any remaining station.  An entry is +1 when precipitation is strictly
    positive; a ``trace_sentinel`` amount counts as wet unless
    ``trace_as_dry`` is set.
    """
    recs = [r for r in records if r.date.day in day_filter]
    if not recs:
        raise ValueError("no records remain after the day-of-month filter")

    coords: dict[str, tuple[float, float]] = {}
    for r in recs:
        key = (r.latitude, r.longitude)
        if coords.setdefault(r.station, key) != key:
            raise ValueError(f"station {r.station!r} has inconsistent coordinates")

    stations = sorted(coords)
    dates = sorted({r.date for r in recs})
    s_index = {s: i for i, s in enumerate(stations)}
    d_index = {d: i for i, d in enumerate(dates)}
    grid = np.full((len(dates), len(stations)), np.nan)
    for r in recs:
        wet = r.precipitation > 0.0
        if trace_sentinel is not None and trace_as_dry and r.precipitation == trace_sentinel:
            wet = False
        grid[d_index[r.date], s_index[r.station]] = 1.0 if wet else -1.0

    present = ~np.isnan(grid)
    frac = present.mean(axis=0)
    keep = frac >= completeness
    dropped_stations = tuple(s for s, k in zip(stations, keep) if not k)
    if not keep.any():
        raise ValueError("every station falls below the completeness threshold")
    grid = grid[:, keep]
    stations = [s for s, k in zip(stations, keep) if k]

    full_days = ~np.isnan(grid).any(axis=1)
    dropped_dates = int((~full_days).sum())
    grid = grid[full_days]
    dates = [d for d, k in zip(dates, full_days) if k]
    if grid.shape[0] == 0:
        raise ValueError("no complete observation days remain after filtering")

    layout = StationLayout(np.array([coords[s] for s in stations]))
    return WeatherDataset(
        SampleMatrix(grid.astype(np.int8)),
        tuple(stations),
        layout,
        tuple(dates),
        dropped_stations,
        dropped_dates,
    )


def align_to_layout(dataset: WeatherDataset, layout_ids, layout: StationLayout) -> SampleMatrix:
    """Reorder the dataset's columns to match an externally supplied layout.

    The surviving station set must equal the layout's station set; node
    indices then follow layout-file order, matching the truth graph.
    """
    if set(dataset.station_ids) != set(layout_ids):
        missing = sorted(set(layout_ids) - set(dataset.station_ids))
        extra = sorted(set(dataset.station_ids) - set(layout_ids))
        raise ValueError(
            "stations surviving ingestion do not match the layout file "
            f"(missing from data: {missing}; absent from layout: {extra})"
        )
    order = [dataset.station_ids.index(s) for s in layout_ids]
    return SampleMatrix(dataset.samples.values[:, order])
