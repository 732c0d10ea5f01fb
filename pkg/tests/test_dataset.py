import pytest

from yieldcast.dataset import parse_dataset, serialize_dataset, slice_season
from yieldcast.dekads import DekadIndex, SeasonWindow
from yieldcast.errors import (
    CoverageGap,
    DuplicateSample,
    MalformedRow,
    TooFewYears,
    UnknownUnit,
)
from yieldcast.synth import ScenarioSpec, generate

UNITS_CSV = "unit_id,name,production_weight_t\nA1,Alpha,1000\nB2,Beta,2500\n"


def timeseries_csv(units=("A1", "B2"), variables=("NDVI", "Rain"),
                   years=(2001, 2002, 2003), dekads=range(1, 37)):
    lines = ["unit_id,variable,year,dekad,value"]
    for u in units:
        for v in variables:
            for y in years:
                for d in dekads:
                    value = 0.5 if v == "NDVI" else 10.0
                    lines.append(f"{u},{v},{y},{d},{value}")
    return "\n".join(lines) + "\n"


def yields_csv(rows):
    lines = ["unit_id,crop,year,yield_t_ha"]
    lines += [f"{u},wheat,{y},{v}" for u, y, v in rows]
    return "\n".join(lines) + "\n"


def test_parse_counts():
    ds = parse_dataset(
        timeseries_csv(),
        yields_csv([("A1", 2001, 1.0), ("A1", 2002, 1.5), ("A1", 2003, 1.2),
                    ("B2", 2001, 2.0), ("B2", 2002, 2.5), ("B2", 2003, 2.2)]),
        UNITS_CSV,
    )
    assert len(ds.series) == 4  # 2 units x 2 variables
    assert len(ds.yields.records) == 6
    assert ds.unit_ids() == ["A1", "B2"]


def test_unknown_unit_in_yields():
    with pytest.raises(UnknownUnit):
        parse_dataset(
            timeseries_csv(),
            yields_csv([("Z99", 2001, 1.0), ("Z99", 2002, 1.0), ("Z99", 2003, 1.0)]),
            UNITS_CSV,
        )


def test_ndvi_range_violation_reports_line():
    bad = (
        "unit_id,variable,year,dekad,value\n"
        "A1,NDVI,2001,1,0.5\n"
        "A1,NDVI,2001,2,1.7\n"
    )
    with pytest.raises(MalformedRow) as err:
        parse_dataset(
            bad,
            yields_csv([("A1", 2001, 1.0), ("A1", 2002, 1.0), ("A1", 2003, 1.0)]),
            UNITS_CSV,
        )
    assert err.value.line == 3


def test_unknown_variable_rejected():
    bad = "unit_id,variable,year,dekad,value\nA1,SoilMoisture,2001,1,0.5\n"
    with pytest.raises(MalformedRow):
        parse_dataset(bad, yields_csv([("A1", 2001, 1.0), ("A1", 2002, 1.0),
                                       ("A1", 2003, 1.0)]), UNITS_CSV)


def test_duplicate_sample_rejected():
    bad = (
        "unit_id,variable,year,dekad,value\n"
        "A1,NDVI,2001,1,0.5\n"
        "A1,NDVI,2001,1,0.6\n"
    )
    with pytest.raises(DuplicateSample):
        parse_dataset(bad, yields_csv([("A1", 2001, 1.0), ("A1", 2002, 1.0),
                                       ("A1", 2003, 1.0)]), UNITS_CSV)


def test_negative_yield_rejected():
    with pytest.raises(MalformedRow):
        parse_dataset(
            timeseries_csv(),
            yields_csv([("A1", 2001, -1.0), ("A1", 2002, 1.0), ("A1", 2003, 1.0)]),
            UNITS_CSV,
        )


def test_too_few_yield_years_rejected():
    with pytest.raises(TooFewYears):
        parse_dataset(
            timeseries_csv(),
            yields_csv([("A1", 2001, 1.0), ("A1", 2002, 1.0)]),
            UNITS_CSV,
        )


def test_season_coverage_gap_detected():
    # NDVI misses one dekad inside the window months of harvest 2002
    full = timeseries_csv(units=("A1",), variables=("NDVI", "Rain", "T", "Tmin",
                                                    "Tmax", "Rad"))
    lines = [l for l in full.splitlines() if l != "A1,NDVI,2002,3,0.5"]
    units = "unit_id,name,production_weight_t\nA1,Alpha,1000\n"
    ds = parse_dataset(
        "\n".join(lines) + "\n",
        yields_csv([("A1", 2001, 1.0), ("A1", 2002, 1.0), ("A1", 2003, 1.0)]),
        units,
    )
    with pytest.raises(CoverageGap):
        ds.with_season(SeasonWindow(32, 17))


def test_round_trip_is_identity():
    ds, _ = generate(ScenarioSpec(n_units=2, start_year=2001, end_year=2004, seed=7))
    ts, ys, us = serialize_dataset(ds)
    ds2 = parse_dataset(ts, ys, us, season=ds.season)
    assert serialize_dataset(ds2) == (ts, ys, us)


def test_slice_season_window_crossing_year():
    ds = parse_dataset(
        timeseries_csv(units=("A1",), variables=("NDVI",)),
        yields_csv([("A1", 2001, 1.0), ("A1", 2002, 1.0), ("A1", 2003, 1.0)]),
        "unit_id,name,production_weight_t\nA1,Alpha,1000\n",
    )
    series = ds.get_series("A1", "NDVI")
    values = slice_season(series, 2003, SeasonWindow(32, 17))
    assert len(values) == 22  # dekads 32-36 of 2002 plus 1-17 of 2003

    inside = slice_season(series, 2002, SeasonWindow(10, 21))
    assert len(inside) == 12


def test_slice_season_missing_dekad():
    ds = parse_dataset(
        timeseries_csv(units=("A1",), variables=("NDVI",), years=(2001, 2002)),
        yields_csv([("A1", 2001, 1.0), ("A1", 2002, 1.0), ("A1", 2001 + 2, 1.0)]),
        "unit_id,name,production_weight_t\nA1,Alpha,1000\n",
    )
    series = ds.get_series("A1", "NDVI")
    with pytest.raises(CoverageGap):
        slice_season(series, 2004, SeasonWindow(32, 17))


def test_slice_season_length_independent_of_year():
    ds = parse_dataset(
        timeseries_csv(units=("A1",), variables=("NDVI",)),
        yields_csv([("A1", 2001, 1.0), ("A1", 2002, 1.0), ("A1", 2003, 1.0)]),
        "unit_id,name,production_weight_t\nA1,Alpha,1000\n",
    )
    series = ds.get_series("A1", "NDVI")
    for sos in range(1, 37, 5):
        for eos in range(1, 37, 5):
            try:
                window = SeasonWindow(sos, eos)
            except Exception:
                continue
            a = slice_season(series, 2002, window)
            b = slice_season(series, 2003, window)
            assert len(a) == len(b) == window.n_dekads
