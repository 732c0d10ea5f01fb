"""Accuracy statistics at fold, provincial and national level.

All relative errors are normalized by one global constant: the mean of
every observed yield of the crop, so configurations stay comparable.
Fold metrics are computed within a held-out year across units; the
provincial summary is their unweighted time average plus a temporal R2
(per unit across years, then averaged). National series are
production-weighted means, renormalized over the units reporting in
each year. Low-yield analysis restricts the national series to years at
or below the 25th percentile (linear-interpolation definition) of the
observed distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFold, MissingWeight, TooFewYears


@dataclass(frozen=True)
class PredictionRecord:
    unit: str
    year: int
    y_obs: float
    y_pred: float


@dataclass(frozen=True)
class FoldMetrics:
    year: int
    n_units: int
    rmse: float
    rrmse: float
    me: float
    r2: float | None  # None when the fold's observed yields are constant


@dataclass(frozen=True)
class MetricsReport:
    n_records: int
    crop_mean: float
    folds: tuple[FoldMetrics, ...]
    # provincial level: unweighted time averages of the fold metrics
    r2_foldavg: float | None
    rmse_p: float
    rrmse_p: float
    me_p: float
    r2_temporal: float | None
    # national level: production-weighted yearly series
    r2_nat: float | None
    rmse_nat: float
    rrmse_nat: float
    me_nat: float
    # first-quartile (low-yield) national years
    rmse_fq: float
    rrmse_fq: float
    d_rrmse_fq: float


def _rmse(obs: np.ndarray, pred: np.ndarray) -> float:
    return float(np.sqrt(np.mean((pred - obs) ** 2)))


def _r2(obs: np.ndarray, pred: np.ndarray) -> float | None:
    ss_tot = float(np.sum((obs - obs.mean()) ** 2))
    if ss_tot <= 0.0:
        return None
    ss_res = float(np.sum((pred - obs) ** 2))
    return 1.0 - ss_res / ss_tot


def fold_metrics(records: list[PredictionRecord], crop_mean: float) -> FoldMetrics:
    """Metrics across units within one held-out year."""
    years = {r.year for r in records}
    if len(years) != 1:
        raise ValueError(f"fold records span {len(years)} years")
    if crop_mean <= 0.0:
        raise DegenerateFold("crop mean yield must be positive")
    obs = np.array([r.y_obs for r in records])
    pred = np.array([r.y_pred for r in records])
    rmse = _rmse(obs, pred)
    return FoldMetrics(
        year=next(iter(years)),
        n_units=len(records),
        rmse=rmse,
        rrmse=100.0 * rmse / crop_mean,
        me=float(np.mean(pred - obs)),
        r2=_r2(obs, pred) if len(records) >= 2 else None,
    )


def _mean_or_none(values: list[float]) -> float | None:
    return sum(values) / len(values) if values else None


def provincial_metrics(
    records: list[PredictionRecord], crop_mean: float
) -> tuple[tuple[FoldMetrics, ...], float | None, float, float, float, float | None]:
    """(folds, fold-averaged R2, RMSE_p, rRMSE_p, ME_p, temporal R2)."""
    by_year: dict[int, list[PredictionRecord]] = {}
    for r in records:
        by_year.setdefault(r.year, []).append(r)
    folds = tuple(
        fold_metrics(by_year[y], crop_mean) for y in sorted(by_year)
    )
    r2_avg = _mean_or_none([f.r2 for f in folds if f.r2 is not None])
    rmse_p = float(np.mean([f.rmse for f in folds]))
    rrmse_p = float(np.mean([f.rrmse for f in folds]))
    me_p = float(np.mean([f.me for f in folds]))

    by_unit: dict[str, list[PredictionRecord]] = {}
    for r in records:
        by_unit.setdefault(r.unit, []).append(r)
    temporal = []
    for unit in sorted(by_unit):
        rs = by_unit[unit]
        if len(rs) < 2:
            continue
        r2 = _r2(np.array([r.y_obs for r in rs]), np.array([r.y_pred for r in rs]))
        if r2 is not None:
            temporal.append(r2)
    return folds, r2_avg, rmse_p, rrmse_p, me_p, _mean_or_none(temporal)


def national_series(
    records: list[PredictionRecord], weights: dict[str, float]
) -> tuple[list[int], np.ndarray, np.ndarray]:
    """Production-weighted yearly (observed, predicted) national yields.

    Weights renormalize over the units reporting in each year; both
    series use the same weights.
    """
    by_year: dict[int, list[PredictionRecord]] = {}
    for r in records:
        if r.unit not in weights:
            raise MissingWeight(f"no production weight for unit {r.unit!r}")
        by_year.setdefault(r.year, []).append(r)
    years = sorted(by_year)
    obs = np.empty(len(years))
    pred = np.empty(len(years))
    for k, year in enumerate(years):
        rs = by_year[year]
        w = np.array([weights[r.unit] for r in rs])
        total = w.sum()
        if total <= 0.0:
            raise MissingWeight(f"total production weight is zero in {year}")
        obs[k] = float(np.dot(w, [r.y_obs for r in rs]) / total)
        pred[k] = float(np.dot(w, [r.y_pred for r in rs]) / total)
    return years, obs, pred


def percentile_linear(values: np.ndarray, p: float) -> float:
    """Linear-interpolation percentile: h = (n-1) p + 1 on sorted data."""
    xs = np.sort(np.asarray(values, dtype=float))
    n = xs.size
    if n == 0:
        raise ValueError("empty sample")
    h = (n - 1) * p
    lo = int(math.floor(h))
    hi = min(lo + 1, n - 1)
    return float(xs[lo] + (h - lo) * (xs[hi] - xs[lo]))


def low_yield_metrics(
    years: list[int], obs: np.ndarray, pred: np.ndarray, crop_mean: float
) -> tuple[float, float, float, list[int]]:
    """National errors over first-quartile (low-yield) years.

    Returns (RMSE_FQ, rRMSE_FQ, rRMSE_FQ - rRMSE_all, FQ years). Years
    tied with the 25th-percentile threshold are included.
    """
    if len(years) < 4:
        raise TooFewYears(f"first-quartile analysis needs >= 4 years, got {len(years)}")
    threshold = percentile_linear(obs, 0.25)
    mask = obs <= threshold
    rmse_fq = _rmse(obs[mask], pred[mask])
    rrmse_fq = 100.0 * rmse_fq / crop_mean
    rrmse_all = 100.0 * _rmse(obs, pred) / crop_mean
    fq_years = [y for y, m in zip(years, mask) if m]
    return rmse_fq, rrmse_fq, rrmse_fq - rrmse_all, fq_years


def compute_report(
    records: list[PredictionRecord],
    weights: dict[str, float],
    crop_mean: float,
) -> MetricsReport:
    """Full Table-5-shaped metrics block for one configuration's records."""
    if not records:
        raise ValueError("no prediction records")
    folds, r2_avg, rmse_p, rrmse_p, me_p, r2_temporal = provincial_metrics(
        records, crop_mean
    )
    years, obs, pred = national_series(records, weights)
    rmse_nat = _rmse(obs, pred)
    report_args = dict(
        n_records=len(records),
        crop_mean=crop_mean,
        folds=folds,
        r2_foldavg=r2_avg,
        rmse_p=rmse_p,
        rrmse_p=rrmse_p,
        me_p=me_p,
        r2_temporal=r2_temporal,
        r2_nat=_r2(obs, pred),
        rmse_nat=rmse_nat,
        rrmse_nat=100.0 * rmse_nat / crop_mean,
        me_nat=float(np.mean(pred - obs)),
    )
    if len(years) >= 4:
        rmse_fq, rrmse_fq, d_rrmse, _ = low_yield_metrics(years, obs, pred, crop_mean)
    else:
        rmse_fq = rrmse_fq = d_rrmse = float("nan")
    return MetricsReport(rmse_fq=rmse_fq, rrmse_fq=rrmse_fq, d_rrmse_fq=d_rrmse,
                         **report_args)


def fold_rrmse_series(
    records: list[PredictionRecord], crop_mean: float
) -> dict[int, float]:
    """Per-year fold rRMSE_p, the statistic compared across models."""
    by_year: dict[int, list[PredictionRecord]] = {}
    for r in records:
        by_year.setdefault(r.year, []).append(r)
    return {
        y: fold_metrics(rs, crop_mean).rrmse for y, rs in sorted(by_year.items())
    }
