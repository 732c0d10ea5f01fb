"""Shared builders for handmade datasets."""

from __future__ import annotations

import numpy as np
import pytest

from yieldcast.dataset import AdminUnit, Dataset, DekadalSeries, YieldTable
from yieldcast.dekads import DekadIndex, SeasonWindow


def fill_series(unit_ids, years, rng, window=None):
    """Random but seeded samples for all six variables, covering every
    dekad of [min(years) - 1, max(years)]."""
    samples = {}
    for uid in unit_ids:
        for var in ("NDVI", "Rain", "T", "Tmin", "Tmax", "Rad"):
            data = {}
            for year in range(min(years) - 1, max(years) + 1):
                for dekad in range(1, 37):
                    idx = DekadIndex(year, dekad)
                    if var == "NDVI":
                        data[idx] = float(rng.uniform(0.05, 0.9))
                    elif var in ("Rain", "Rad"):
                        data[idx] = float(rng.uniform(0.0, 50.0))
                    else:
                        data[idx] = float(rng.uniform(-5.0, 30.0))
            samples[(uid, var)] = data
    return samples


def build_dataset(unit_ids, years, yield_fn, seed=0, window=None, crop="toycrop"):
    """Dataset whose yields come from ``yield_fn(samples, unit, year)``,
    so tests can impose exact generative laws on the raw dekad values."""
    window = window or SeasonWindow(32, 17)
    rng = np.random.default_rng(seed)
    samples = fill_series(unit_ids, years, rng, window)
    units = tuple(
        AdminUnit(uid, f"Unit {uid}", float(rng.uniform(100, 1000)))
        for uid in unit_ids
    )
    records = {}
    for uid in unit_ids:
        for year in years:
            records[(uid, year)] = float(yield_fn(samples, uid, year))
    series = tuple(
        DekadalSeries(unit=u, variable=v, samples=s)
        for (u, v), s in sorted(samples.items())
    )
    ds = Dataset(
        units=units,
        series=series,
        yields=YieldTable(crop=crop, records=records),
        season=window,
    )
    ds.validate_season_coverage()
    return ds


def monthly_value(samples, uid, year, variable, month_index, window=None, op="sum"):
    """Aggregate one variable over one window month, mirroring the
    production operators only where a test needs a law to depend on
    monthly features."""
    window = window or SeasonWindow(32, 17)
    idxs = window.month_dekad_indices(year, months=month_index)[-3:]
    vals = [samples[(uid, variable)][i] for i in idxs]
    if op == "sum":
        return sum(vals)
    if op == "avg":
        return sum(vals) / len(vals)
    if op == "max":
        return max(vals)
    if op == "min":
        return min(vals)
    raise ValueError(op)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
