"""Data model and CSV ingestion for dekadal predictors and yearly yields.

Three comma-delimited files with mandatory headers describe a dataset:

    timeseries.csv  unit_id,variable,year,dekad,value
    yields.csv      unit_id,crop,year,yield_t_ha
    units.csv       unit_id,name,production_weight_t

All values are validated on ingestion; a row that violates a range or
referential-integrity rule is reported with its line number. Parsed
objects are immutable and safe to share across parallel workers.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace

from .dekads import DekadIndex, SeasonWindow
from .errors import (
    CoverageGap,
    DuplicateSample,
    MalformedRow,
    TooFewYears,
    UnknownUnit,
)

VARIABLES = ("NDVI", "Rain", "T", "Tmin", "Tmax", "Rad")

NDVI_RANGE = (-0.2, 1.0)


@dataclass(frozen=True)
class AdminUnit:
    id: str
    name: str
    production_weight: float  # tonnes, multi-year average production

    def __post_init__(self):
        if self.production_weight < 0:
            raise ValueError("production_weight must be nonnegative")


@dataclass(frozen=True)
class DekadalSeries:
    """One variable of one admin unit on the dekad calendar."""

    unit: str
    variable: str
    samples: dict[DekadIndex, float]

    def value(self, idx: DekadIndex) -> float:
        return self.samples[idx]

    def has(self, idx: DekadIndex) -> bool:
        return idx in self.samples


@dataclass(frozen=True)
class YieldTable:
    crop: str
    records: dict[tuple[str, int], float]  # (unit id, harvest year) -> t/ha

    def years_of(self, unit: str) -> list[int]:
        return sorted(y for (u, y) in self.records if u == unit)

    def all_years(self) -> list[int]:
        return sorted({y for (_, y) in self.records})

    def units(self) -> list[str]:
        return sorted({u for (u, _) in self.records})

    def mean_yield(self) -> float:
        vals = list(self.records.values())
        return sum(vals) / len(vals)


@dataclass(frozen=True)
class Dataset:
    units: tuple[AdminUnit, ...]
    series: tuple[DekadalSeries, ...]
    yields: YieldTable
    season: SeasonWindow | None = None
    _index: dict[tuple[str, str], DekadalSeries] = field(
        default=None, repr=False, compare=False
    )

    def __post_init__(self):
        index = {(s.unit, s.variable): s for s in self.series}
        object.__setattr__(self, "_index", index)

    def unit_ids(self) -> list[str]:
        return [u.id for u in self.units]

    def unit(self, unit_id: str) -> AdminUnit:
        for u in self.units:
            if u.id == unit_id:
                return u
        raise UnknownUnit(f"unit {unit_id!r} not in dataset")

    def get_series(self, unit_id: str, variable: str) -> DekadalSeries:
        try:
            return self._index[(unit_id, variable)]
        except KeyError:
            raise CoverageGap(f"no {variable} series for unit {unit_id!r}") from None

    def with_season(self, season: SeasonWindow) -> "Dataset":
        """Attach a season window and check predictor coverage under it."""
        ds = replace(self, season=season)
        ds.validate_season_coverage()
        return ds

    def validate_season_coverage(self):
        """Every yield record needs all six variables on every dekad of
        the season-window months of its harvest year."""
        if self.season is None:
            return
        for (unit_id, year) in sorted(self.yields.records):
            wanted = self.season.month_dekad_indices(year)
            for var in VARIABLES:
                series = self.get_series(unit_id, var)
                missing = [i for i in wanted if not series.has(i)]
                if missing:
                    m = missing[0]
                    raise CoverageGap(
                        f"unit {unit_id!r} {var} missing dekad ({m.year}, {m.dekad}) "
                        f"inside the season window of harvest {year} "
                        f"({len(missing)} dekads missing)"
                    )


def slice_season(series: DekadalSeries, harvest_year: int, window: SeasonWindow) -> list[float]:
    """Window values in chronological order for one harvest year.

    A wrapping window takes dekads >= sos from harvest_year - 1 and the
    rest from harvest_year.
    """
    out = []
    for idx in window.dekad_indices(harvest_year):
        if not series.has(idx):
            raise CoverageGap(
                f"unit {series.unit!r} {series.variable} missing dekad "
                f"({idx.year}, {idx.dekad}) in season window of harvest {harvest_year}"
            )
        out.append(series.value(idx))
    return out


# --- CSV parsing ---------------------------------------------------------

def _rows(text: str, expected_header: list[str], what: str):
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedRow(f"{what}: empty file", line=1) from None
    if [h.strip() for h in header] != expected_header:
        raise MalformedRow(
            f"{what}: header must be {','.join(expected_header)}", line=1
        )
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(expected_header):
            raise MalformedRow(
                f"{what}: expected {len(expected_header)} fields, got {len(row)}",
                line=lineno,
            )
        yield lineno, [c.strip() for c in row]


def _parse_float(value: str, what: str, lineno: int) -> float:
    try:
        x = float(value)
    except ValueError:
        raise MalformedRow(f"{what}: not a number: {value!r}", line=lineno) from None
    if x != x or x in (float("inf"), float("-inf")):
        raise MalformedRow(f"{what}: non-finite value {value!r}", line=lineno)
    return x


def _parse_int(value: str, what: str, lineno: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise MalformedRow(f"{what}: not an integer: {value!r}", line=lineno) from None


def parse_units(units_csv: str) -> tuple[AdminUnit, ...]:
    units = []
    seen = set()
    for lineno, (uid, name, weight) in _rows(
        units_csv, ["unit_id", "name", "production_weight_t"], "units"
    ):
        if uid in seen:
            raise DuplicateSample(f"units: duplicate unit id {uid!r} at line {lineno}")
        seen.add(uid)
        w = _parse_float(weight, "units: production_weight_t", lineno)
        if w < 0:
            raise MalformedRow(f"units: negative production weight {w}", line=lineno)
        units.append(AdminUnit(uid, name, w))
    return tuple(units)


def parse_timeseries(timeseries_csv: str, known_units: set[str]) -> tuple[DekadalSeries, ...]:
    samples: dict[tuple[str, str], dict[DekadIndex, float]] = {}
    for lineno, (uid, var, year, dekad, value) in _rows(
        timeseries_csv, ["unit_id", "variable", "year", "dekad", "value"], "timeseries"
    ):
        if uid not in known_units:
            raise UnknownUnit(
                f"timeseries line {lineno}: unit {uid!r} not in units.csv"
            )
        if var not in VARIABLES:
            raise MalformedRow(
                f"timeseries: unknown variable {var!r} "
                f"(expected one of {', '.join(VARIABLES)})",
                line=lineno,
            )
        y = _parse_int(year, "timeseries: year", lineno)
        d = _parse_int(dekad, "timeseries: dekad", lineno)
        if not 1 <= d <= 36:
            raise MalformedRow(f"timeseries: dekad {d} outside [1, 36]", line=lineno)
        v = _parse_float(value, "timeseries: value", lineno)
        if var == "NDVI" and not NDVI_RANGE[0] <= v <= NDVI_RANGE[1]:
            raise MalformedRow(
                f"timeseries: NDVI value {v} outside [-0.2, 1]", line=lineno
            )
        if var in ("Rain", "Rad") and v < 0:
            raise MalformedRow(f"timeseries: negative {var} value {v}", line=lineno)
        key = (uid, var)
        idx = DekadIndex(y, d)
        bucket = samples.setdefault(key, {})
        if idx in bucket:
            raise DuplicateSample(
                f"timeseries line {lineno}: duplicate sample for "
                f"{uid}/{var} at ({y}, {d})"
            )
        bucket[idx] = v
    return tuple(
        DekadalSeries(unit=u, variable=v, samples=s)
        for (u, v), s in sorted(samples.items())
    )


def parse_yields(yields_csv: str, known_units: set[str]) -> YieldTable:
    records: dict[tuple[str, int], float] = {}
    crop = None
    for lineno, (uid, crop_name, year, value) in _rows(
        yields_csv, ["unit_id", "crop", "year", "yield_t_ha"], "yields"
    ):
        if uid not in known_units:
            raise UnknownUnit(f"yields line {lineno}: unit {uid!r} not in units.csv")
        if crop is None:
            crop = crop_name
        elif crop_name != crop:
            raise MalformedRow(
                f"yields: mixed crops {crop!r} and {crop_name!r} "
                "(one crop per file)",
                line=lineno,
            )
        y = _parse_int(year, "yields: year", lineno)
        v = _parse_float(value, "yields: yield_t_ha", lineno)
        if v <= 0:
            raise MalformedRow(f"yields: yield must be > 0, got {v}", line=lineno)
        if (uid, y) in records:
            raise DuplicateSample(
                f"yields line {lineno}: duplicate record for ({uid}, {y})"
            )
        records[(uid, y)] = v
    if crop is None:
        raise MalformedRow("yields: no records", line=2)
    table = YieldTable(crop=crop, records=records)
    for unit in table.units():
        n = len(table.years_of(unit))
        if n < 3:
            raise TooFewYears(
                f"unit {unit!r} has {n} yield years; at least 3 required"
            )
    return table


def parse_dataset(
    timeseries_csv: str,
    yields_csv: str,
    units_csv: str,
    season: SeasonWindow | None = None,
) -> Dataset:
    """Parse and cross-validate the three input files.

    When a season window is already known it is attached and predictor
    coverage is checked immediately; otherwise attach one later with
    :meth:`Dataset.with_season`.
    """
    units = parse_units(units_csv)
    known = {u.id for u in units}
    series = parse_timeseries(timeseries_csv, known)
    yields = parse_yields(yields_csv, known)
    ds = Dataset(units=units, series=series, yields=yields, season=season)
    ds.validate_season_coverage()
    return ds


# --- CSV serialization ---------------------------------------------------

def _fmt(x: float) -> str:
    """Decimal with 6 significant digits; idempotent under re-parsing."""
    return format(x, ".6g")


def serialize_dataset(ds: Dataset) -> tuple[str, str, str]:
    """Emit (timeseries_csv, yields_csv, units_csv) in canonical order."""
    ts = io.StringIO()
    w = csv.writer(ts, lineterminator="\n")
    w.writerow(["unit_id", "variable", "year", "dekad", "value"])
    for s in sorted(ds.series, key=lambda s: (s.unit, s.variable)):
        for idx in sorted(s.samples):
            w.writerow([s.unit, s.variable, idx.year, idx.dekad, _fmt(s.samples[idx])])

    ys = io.StringIO()
    w = csv.writer(ys, lineterminator="\n")
    w.writerow(["unit_id", "crop", "year", "yield_t_ha"])
    for (uid, year) in sorted(ds.yields.records):
        w.writerow([uid, ds.yields.crop, year, _fmt(ds.yields.records[(uid, year)])])

    us = io.StringIO()
    w = csv.writer(us, lineterminator="\n")
    w.writerow(["unit_id", "name", "production_weight_t"])
    for u in sorted(ds.units, key=lambda u: u.id):
        w.writerow([u.id, u.name, _fmt(u.production_weight)])

    return ts.getvalue(), ys.getvalue(), us.getvalue()
