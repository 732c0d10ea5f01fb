"""Season timing from NDVI trajectories.

A symmetric-sum double logistic is fitted per unit and season; start and
end of season are where the fitted ascending (descending) branch crosses
20% of the seasonal amplitude. Per-unit-year windows are averaged on the
36-dekad circle to fix one common feature axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .dekads import (
    DEKADS_PER_YEAR,
    DekadIndex,
    SeasonWindow,
    circular_mean_dekad,
    round_half_up,
)
from .defaults import defaults
from .errors import CoverageGap, DegenerateSeason, NonConvergence, NoSeasonality

_CFG = defaults()["phenology"]

AMPLITUDE_FLOOR = float(_CFG["amplitude_floor"])
THRESHOLD = float(_CFG["threshold"])
MAX_NFEV = int(_CFG["max_nfev"])
STEP_TOL = float(_CFG["step_tol"])
BOUNDS_AMP = (float(_CFG["v_amp_min"]), float(_CFG["v_amp_max"]))
BOUNDS_SLOPE = (float(_CFG["slope_min"]), float(_CFG["slope_max"]))

# Axis on which seasonal trajectories are fitted: dekad 19 (early July)
# of the year before harvest through dekad 18 of the harvest year, so a
# boreal-winter season sits mid-axis.
FIT_AXIS_START_DEKAD = int(_CFG["fit_axis_start_dekad"])


@dataclass(frozen=True)
class DoubleLogisticParams:
    v_base: float   # background NDVI
    v_amp: float    # seasonal amplitude
    s1: float       # ascending inflection (fractional dekad on the axis)
    m1: float       # ascending slope
    s2: float       # descending inflection
    m2: float       # descending slope

    def __post_init__(self):
        if self.v_amp <= 0:
            raise ValueError("v_amp must be > 0")
        if self.m1 <= 0 or self.m2 <= 0:
            raise ValueError("slopes must be > 0")
        if not self.s1 < self.s2:
            raise ValueError("s1 must precede s2")

    def as_array(self) -> np.ndarray:
        return np.array([self.v_base, self.v_amp, self.s1, self.m1, self.s2, self.m2])


def eval_double_logistic(p: DoubleLogisticParams, t) -> np.ndarray | float:
    """v_base + v_amp * (sigma(m1 (t-s1)) + sigma(-m2 (t-s2)) - 1)."""
    t = np.asarray(t, dtype=float)
    up = _sigmoid(p.m1 * (t - p.s1))
    down = _sigmoid(-p.m2 * (t - p.s2))
    out = p.v_base + p.v_amp * (up + down - 1.0)
    return float(out) if out.ndim == 0 else out


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-np.clip(x, -500, 500)))


def _model(theta: np.ndarray, t: np.ndarray) -> np.ndarray:
    v_base, v_amp, s1, m1, s2, m2 = theta
    return v_base + v_amp * (
        _sigmoid(m1 * (t - s1)) + _sigmoid(-m2 * (t - s2)) - 1.0
    )


def _initial_guess(ndvi: np.ndarray, t: np.ndarray) -> np.ndarray:
    v_base = float(np.percentile(ndvi, 10))
    v_amp = float(ndvi.max() - ndvi.min())
    half = v_base + 0.5 * v_amp
    above = np.nonzero(ndvi >= half)[0]
    if above.size:
        s1, s2 = float(t[above[0]]), float(t[above[-1]])
    else:
        s1, s2 = float(t[0]), float(t[-1])
    if s2 - s1 < 1.0:
        mid = 0.5 * (s1 + s2)
        s1, s2 = mid - 1.0, mid + 1.0
    return np.array([v_base, v_amp, s1, 1.0, s2, 1.0])


def fit_double_logistic(
    ndvi, t_axis, amplitude_floor: float = AMPLITUDE_FLOOR
) -> tuple[DoubleLogisticParams, float]:
    """Least-squares double-logistic fit; returns (params, fit RMSE).

    Deterministic given inputs. Raises NoSeasonality when the raw range
    is below ``amplitude_floor`` and NonConvergence when the solver
    exhausts its iteration budget without satisfying the step tolerance.
    """
    ndvi = np.asarray(ndvi, dtype=float)
    t = np.asarray(t_axis, dtype=float)
    if ndvi.shape != t.shape or ndvi.ndim != 1:
        raise ValueError("ndvi and t_axis must be 1-d arrays of equal length")
    if ndvi.size < 12:
        raise ValueError("need at least 12 samples spanning rise and fall")
    if not np.isfinite(ndvi).all():
        raise ValueError("ndvi contains non-finite values")
    if ndvi.max() - ndvi.min() < amplitude_floor:
        raise NoSeasonality(
            f"raw amplitude {ndvi.max() - ndvi.min():.4f} below floor {amplitude_floor}"
        )

    theta0 = _initial_guess(ndvi, t)
    span = float(t[-1] - t[0])
    lo = np.array([-0.5, BOUNDS_AMP[0], t[0] - span, BOUNDS_SLOPE[0],
                   t[0] - span, BOUNDS_SLOPE[0]])
    hi = np.array([1.5, BOUNDS_AMP[1], t[-1] + span, BOUNDS_SLOPE[1],
                   t[-1] + span, BOUNDS_SLOPE[1]])
    theta0 = np.clip(theta0, lo, hi)

    res = least_squares(
        lambda th: _model(th, t) - ndvi,
        theta0,
        bounds=(lo, hi),
        method="trf",
        xtol=STEP_TOL,
        ftol=STEP_TOL,
        gtol=STEP_TOL,
        max_nfev=MAX_NFEV,
    )
    if not res.success:
        raise NonConvergence(f"double-logistic fit failed: {res.message}")
    v_base, v_amp, s1, m1, s2, m2 = res.x
    if s1 > s2:  # solver may swap branches; normalize
        s1, s2 = s2, s1
        m1, m2 = m2, m1
    rmse = float(np.sqrt(np.mean(res.fun**2)))
    return DoubleLogisticParams(v_base, v_amp, s1, m1, s2, m2), rmse


def extract_sos_eos(
    p: DoubleLogisticParams, threshold: float = THRESHOLD
) -> tuple[float, float]:
    """Threshold crossings of the two logistic branches (closed form).

    sos solves sigma(m1 (t-s1)) = threshold on the ascending branch and
    eos solves sigma(-m2 (t-s2)) = threshold on the descending one.
    """
    if not 0.0 < threshold < 0.5:
        raise ValueError("threshold must lie in (0, 0.5)")
    if p.s2 - p.s1 < 1.0 / p.m1 + 1.0 / p.m2:
        raise DegenerateSeason(
            f"branches at {p.s1:.2f} and {p.s2:.2f} too close to separate"
        )
    offset = math.log(threshold / (1.0 - threshold))
    sos = p.s1 + offset / p.m1
    eos = p.s2 - offset / p.m2
    return sos, eos


def average_season(windows: list[tuple[float, float]]) -> SeasonWindow:
    """Circular mean of per-unit-year (sos, eos) dekads-of-year, rounded
    to whole dekads; spreads are circular standard deviations."""
    if not windows:
        raise ValueError("no windows to average")
    sos_mean, sos_sd = circular_mean_dekad([w[0] for w in windows])
    eos_mean, eos_sd = circular_mean_dekad([w[1] for w in windows])
    sos = round_half_up(sos_mean) or DEKADS_PER_YEAR
    eos = round_half_up(eos_mean) or DEKADS_PER_YEAR
    if sos > DEKADS_PER_YEAR:
        sos -= DEKADS_PER_YEAR
    if eos > DEKADS_PER_YEAR:
        eos -= DEKADS_PER_YEAR
    return SeasonWindow(sos=sos, eos=eos, sos_sd=sos_sd, eos_sd=eos_sd)


# --- per-dataset driver ----------------------------------------------------

@dataclass(frozen=True)
class SeasonFit:
    unit: str
    harvest_year: int
    sos_dekad: float  # fractional dekad of year
    eos_dekad: float
    fit_rmse: float


def axis_dekad_to_doy(axis_pos: float) -> float:
    """Fractional dekad-of-year for a position on the fitting axis."""
    doy = (FIT_AXIS_START_DEKAD - 1 + axis_pos - 1) % DEKADS_PER_YEAR + 1
    return doy


def fit_dataset_seasons(dataset, threshold: float = THRESHOLD):
    """Fit every (unit, harvest year) NDVI season with full axis coverage.

    Returns (list of SeasonFit, list of (what, reason) skips).
    """
    fits: list[SeasonFit] = []
    skipped: list[tuple[str, str]] = []
    start = FIT_AXIS_START_DEKAD
    for (unit_id, year) in sorted(dataset.yields.records):
        try:
            series = dataset.get_series(unit_id, "NDVI")
        except CoverageGap:
            skipped.append((f"{unit_id}/{year}", "no NDVI series"))
            continue
        idxs = [
            DekadIndex(year - 1, d) for d in range(start, DEKADS_PER_YEAR + 1)
        ] + [DekadIndex(year, d) for d in range(1, start)]
        if not all(series.has(i) for i in idxs):
            skipped.append((f"{unit_id}/{year}", "incomplete NDVI season axis"))
            continue
        values = [series.value(i) for i in idxs]
        t = np.arange(1, len(values) + 1, dtype=float)
        try:
            params, rmse = fit_double_logistic(values, t)
            sos_axis, eos_axis = extract_sos_eos(params, threshold)
        except (NoSeasonality, NonConvergence, DegenerateSeason) as exc:
            skipped.append((f"{unit_id}/{year}", exc.code))
            continue
        fits.append(
            SeasonFit(
                unit=unit_id,
                harvest_year=year,
                sos_dekad=axis_dekad_to_doy(sos_axis),
                eos_dekad=axis_dekad_to_doy(eos_axis),
                fit_rmse=rmse,
            )
        )
    return fits, skipped


def season_from_fits(fits: list[SeasonFit]) -> SeasonWindow:
    if not fits:
        raise NoSeasonality("no season could be fitted on any unit-year")
    return average_season([(f.sos_dekad, f.eos_dekad) for f in fits])
