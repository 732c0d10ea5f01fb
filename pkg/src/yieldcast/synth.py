"""Seeded synthetic datasets with a known generative law.

Three laws mirror the situations the pipeline must detect: PEAK_LINEAR
ties yield linearly to the observed seasonal NDVI maximum (the peak-NDVI
benchmark's exact model), METEO_MODULATED mixes the peak with spring
rainfall and a strong per-unit offset that only one-hot unit features
can express, and PURE_NOISE carries no signal at all. The emitted CSVs
parse and validate like any real dataset, and truth.json records the
law so tests can check recovery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import AdminUnit, Dataset, DekadalSeries, YieldTable
from .dekads import DEKADS_PER_YEAR, DekadIndex, SeasonWindow, month_of_dekad
from .errors import InfeasibleSpec

LAWS = ("PEAK_LINEAR", "METEO_MODULATED", "PURE_NOISE")

# season-axis geometry: trajectories are generated on a July-June axis
_AXIS_START = 19


@dataclass(frozen=True)
class ScenarioSpec:
    n_units: int = 5
    start_year: int = 2002
    end_year: int = 2018
    law: str = "PEAK_LINEAR"
    noise_sd: float = 0.05          # yield noise, t/ha
    ndvi_noise: float = 0.01        # bounded uniform NDVI noise
    unit_offset: float = 0.8        # half-range of METEO unit offsets, t/ha
    peak_slope: float = 2.5         # PEAK_LINEAR: yield = slope * peak + intercept
    peak_intercept: float = 0.3
    crop: str = "synthwheat"
    season: SeasonWindow = field(default_factory=lambda: SeasonWindow(32, 17))
    seed: int = 0

    def __post_init__(self):
        if self.law not in LAWS:
            raise InfeasibleSpec(f"unknown generative law {self.law!r}")
        if self.n_units < 1 or self.end_year - self.start_year + 1 < 3:
            raise InfeasibleSpec("need >= 1 unit and >= 3 years")
        if self.noise_sd < 0 or self.ndvi_noise < 0:
            raise InfeasibleSpec("noise levels must be nonnegative")

    @property
    def years(self) -> list[int]:
        return list(range(self.start_year, self.end_year + 1))


def _axis_dekads(harvest_year: int) -> list[DekadIndex]:
    return [
        DekadIndex(harvest_year - 1, d) for d in range(_AXIS_START, DEKADS_PER_YEAR + 1)
    ] + [DekadIndex(harvest_year, d) for d in range(1, _AXIS_START)]


def _double_logistic(t, v_base, v_amp, s1, m1, s2, m2):
    up = 1.0 / (1.0 + np.exp(-m1 * (t - s1)))
    down = 1.0 / (1.0 + np.exp(m2 * (t - s2)))
    return v_base + v_amp * (up + down - 1.0)


def generate(spec: ScenarioSpec) -> tuple[Dataset, dict]:
    """Deterministic dataset + ground-truth record for a scenario."""
    rng = np.random.default_rng(spec.seed)
    unit_ids = [f"U{k + 1:02d}" for k in range(spec.n_units)]
    units = tuple(
        AdminUnit(uid, f"Province {k + 1}", float(rng.uniform(500.0, 5000.0)))
        for k, uid in enumerate(unit_ids)
    )

    # per-unit character
    base_ndvi = {u: float(rng.uniform(0.14, 0.22)) for u in unit_ids}
    rain_scale = {u: float(rng.uniform(0.8, 1.3)) for u in unit_ids}
    offsets = {
        u: float(rng.uniform(-spec.unit_offset, spec.unit_offset))
        for u in unit_ids
    }

    samples: dict[tuple[str, str], dict[DekadIndex, float]] = {
        (u, v): {} for u in unit_ids
        for v in ("NDVI", "Rain", "T", "Tmin", "Tmax", "Rad")
    }
    peaks: dict[tuple[str, int], float] = {}
    spring_rain: dict[tuple[str, int], float] = {}

    season_dekads = set(spec.season.dekads())
    window_months = spec.season.months()
    spring_months = set(window_months[4:7])  # window months 5-7

    years_axis = list(range(spec.start_year, spec.end_year + 1))
    for uid in unit_ids:
        for year in years_axis:
            idxs = _axis_dekads(year)
            t = np.arange(1, len(idxs) + 1, dtype=float)
            v_amp = float(rng.uniform(0.25, 0.55))
            s1 = float(rng.normal(16.0, 0.5))
            s2 = float(rng.normal(32.5, 0.5))
            m1 = float(rng.uniform(0.55, 0.85))
            m2 = float(rng.uniform(0.45, 0.70))
            clean = _double_logistic(t, base_ndvi[uid], v_amp, s1, m1, s2, m2)
            noise = rng.uniform(-spec.ndvi_noise, spec.ndvi_noise, size=len(idxs))
            ndvi = np.clip(clean + noise, -0.2, 1.0)

            season_max = -np.inf
            rain_acc = 0.0
            for pos, idx in enumerate(idxs):
                month = month_of_dekad(idx.dekad)
                phase = 2.0 * math.pi * (idx.dekad - 10.0) / DEKADS_PER_YEAR
                temp = 16.0 + 9.0 * math.sin(phase) + float(rng.normal(0.0, 0.8))
                rain_level = rain_scale[uid] * (
                    14.0 + 11.0 * math.cos(2.0 * math.pi * (idx.dekad - 2.0) / 36.0)
                )
                rain = float(rng.gamma(2.0, max(rain_level, 0.5) / 2.0))
                rad = 520.0 + 300.0 * math.sin(phase) + float(rng.normal(0.0, 12.0))
                samples[(uid, "NDVI")][idx] = float(ndvi[pos])
                samples[(uid, "Rain")][idx] = rain
                samples[(uid, "T")][idx] = temp
                samples[(uid, "Tmin")][idx] = temp - float(rng.uniform(3.0, 6.0))
                samples[(uid, "Tmax")][idx] = temp + float(rng.uniform(3.0, 6.0))
                samples[(uid, "Rad")][idx] = max(rad, 0.0)
                if idx.dekad in season_dekads:
                    season_max = max(season_max, float(ndvi[pos]))
                    if month in spring_months:
                        rain_acc += rain
            peaks[(uid, year)] = season_max
            spring_rain[(uid, year)] = rain_acc

    yields: dict[tuple[str, int], float] = {}
    for uid in unit_ids:
        for year in spec.years:
            if spec.law == "PEAK_LINEAR":
                base = spec.peak_slope * peaks[(uid, year)] + spec.peak_intercept
            elif spec.law == "METEO_MODULATED":
                base = (
                    1.0
                    + 1.2 * peaks[(uid, year)]
                    + 0.012 * spring_rain[(uid, year)]
                    + offsets[uid]
                )
            else:  # PURE_NOISE
                base = 1.8
            noise_sd = spec.noise_sd if spec.law != "PURE_NOISE" else max(
                spec.noise_sd, 0.35
            )
            value = base + float(rng.normal(0.0, noise_sd))
            attempts = 0
            while value <= 0.0:
                value = base + float(rng.normal(0.0, noise_sd))
                attempts += 1
                if attempts > 1000:
                    raise InfeasibleSpec(
                        f"cannot draw a positive yield for ({uid}, {year}); "
                        "the law's mean is too close to zero"
                    )
            yields[(uid, year)] = value

    series = tuple(
        DekadalSeries(unit=u, variable=v, samples=s)
        for (u, v), s in sorted(samples.items())
    )
    dataset = Dataset(
        units=units,
        series=series,
        yields=YieldTable(crop=spec.crop, records=yields),
        season=spec.season,
    )
    dataset.validate_season_coverage()

    truth = {
        "law": spec.law,
        "seed": spec.seed,
        "n_units": spec.n_units,
        "years": [spec.start_year, spec.end_year],
        "noise_sd": spec.noise_sd,
        "ndvi_noise": spec.ndvi_noise,
        "season": {"sos": spec.season.sos, "eos": spec.season.eos},
        "crop": spec.crop,
    }
    if spec.law == "PEAK_LINEAR":
        truth["peak_slope"] = spec.peak_slope
        truth["peak_intercept"] = spec.peak_intercept
    if spec.law == "METEO_MODULATED":
        truth["unit_offsets"] = {u: offsets[u] for u in unit_ids}
        truth["coefficients"] = {"intercept": 1.0, "peak": 1.2, "spring_rain": 0.012}
    return dataset, truth
