import datetime

import numpy as np
import pytest

from ising_ebic.weather import (
    WeatherRecord,
    align_to_layout,
    build_weather_dataset,
    read_weather_csv,
)
from ising_ebic.fileio import read_layout_csv
from ising_ebic.metrics import StationLayout


def rec(station, day, prcp, month=1, lat=40.0, lon=-90.0):
    return WeatherRecord(station, lat + hash(station) % 3, lon, datetime.date(2001, month, day), prcp)


def full_records(stations, n_months=6, wet=lambda s, d, m: (d + m) % 2 == 0):
    out = []
    for m in range(1, n_months + 1):
        for d in (1, 16):
            for s in stations:
                out.append(rec(s, d, 0.3 if wet(s, d, m) else 0.0, month=m))
    return out


class TestRecords:
    def test_negative_precipitation_rejected(self):
        with pytest.raises(ValueError):
            WeatherRecord("A", 40.0, -90.0, datetime.date(2001, 1, 1), -0.1)

    def test_csv_error_carries_line_number(self, tmp_path):
        path = tmp_path / "w.csv"
        path.write_text("station,lat,lon,date,prcp\nA,40,-90,2001-01-01,0.0\nA,40,-90,bad,0.1\n")
        with pytest.raises(ValueError, match=":3"):
            read_weather_csv(path)

    def test_csv_round_trip(self, tmp_path):
        path = tmp_path / "w.csv"
        path.write_text("station,lat,lon,date,prcp\nA,40,-90,2001-01-16,0.25\n")
        records = read_weather_csv(path)
        assert records[0].station == "A"
        assert records[0].date == datetime.date(2001, 1, 16)
        assert records[0].precipitation == 0.25


class TestBuildDataset:
    def test_binarization_threshold(self):
        records = [rec("A", 1, 0.0), rec("A", 16, 0.01), rec("B", 1, 1.5), rec("B", 16, 0.0)]
        ds = build_weather_dataset(records, completeness=0.0)
        a, b = ds.station_ids.index("A"), ds.station_ids.index("B")
        assert ds.samples.values[0, a] == -1  # day 1: 0.0 -> dry
        assert ds.samples.values[1, a] == 1  # day 16: 0.01 -> wet
        assert ds.samples.values[0, b] == 1

    def test_day_filter_keeps_1_and_16(self):
        records = full_records(["A", "B"]) + [rec("A", 5, 9.0), rec("B", 12, 9.0)]
        ds = build_weather_dataset(records)
        assert all(d.day in (1, 16) for d in ds.dates)

    def test_stations_dropped_before_days(self):
        # station C observed on only 1 of 4 dates: dropped first, after which
        # all dates are complete for A and B
        records = full_records(["A", "B"], n_months=2)
        records.append(rec("C", 1, 0.5))
        ds = build_weather_dataset(records, completeness=0.9)
        assert ds.dropped_stations == ("C",)
        assert ds.dropped_dates == 0
        assert len(ds.dates) == 4

    def test_incomplete_days_dropped_after(self):
        records = full_records(["A", "B"], n_months=2)
        # remove one A observation: that day is dropped, A survives (3/4 = 75%)
        records = [r for r in records if not (r.station == "A" and r.date.day == 1 and r.date.month == 1)]
        ds = build_weather_dataset(records, completeness=0.7)
        assert ds.dropped_stations == ()
        assert ds.dropped_dates == 1
        assert len(ds.dates) == 3

    def test_trace_sentinel_wet_by_default_dry_on_flag(self):
        records = [rec("A", 1, 0.001), rec("A", 16, 0.3)]
        wet = build_weather_dataset(records, completeness=0.0, trace_sentinel=0.001)
        assert wet.samples.values[0, 0] == 1
        dry = build_weather_dataset(
            records, completeness=0.0, trace_sentinel=0.001, trace_as_dry=True
        )
        assert dry.samples.values[0, 0] == -1

    def test_conflicting_coordinates_rejected(self):
        records = [
            WeatherRecord("A", 40.0, -90.0, datetime.date(2001, 1, 1), 0.0),
            WeatherRecord("A", 41.0, -90.0, datetime.date(2001, 1, 16), 0.0),
        ]
        with pytest.raises(ValueError, match="inconsistent"):
            build_weather_dataset(records)

    def test_empty_after_filter_rejected(self):
        with pytest.raises(ValueError, match="day-of-month"):
            build_weather_dataset([rec("A", 7, 0.1)])

    def test_all_stations_below_threshold_rejected(self):
        # disjoint observation dates: each station covers half the universe
        records = [rec("A", 1, 0.1, month=1), rec("A", 16, 0.1, month=1),
                   rec("B", 1, 0.1, month=2), rec("B", 16, 0.1, month=2)]
        with pytest.raises(ValueError, match="completeness"):
            build_weather_dataset(records, completeness=0.9)


class TestAlign:
    def test_reorders_to_layout(self):
        records = full_records(["N1", "N2"], n_months=3)
        ds = build_weather_dataset(records)
        layout_ids = ["N2", "N1"]
        layout = StationLayout(np.array([[40.0, -90.0], [41.0, -90.0]]))
        samples = align_to_layout(ds, layout_ids, layout)
        i1, i2 = ds.station_ids.index("N1"), ds.station_ids.index("N2")
        assert np.array_equal(samples.values[:, 0], ds.samples.values[:, i2])
        assert np.array_equal(samples.values[:, 1], ds.samples.values[:, i1])

    def test_mismatch_is_explicit(self):
        ds = build_weather_dataset(full_records(["A", "B"], n_months=3))
        layout = StationLayout(np.array([[40.0, -90.0], [41.0, -90.0]]))
        with pytest.raises(ValueError, match="layout"):
            align_to_layout(ds, ["A", "C"], layout)
