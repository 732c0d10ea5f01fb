"""Nested leave-one-year-out hindcasting over the configuration lattice.

Each outer fold holds one year out for testing; the remaining years run
an inner leave-one-year-out loop that scores every hyperparameter
assignment (times every retained-feature fraction when mRMR is active)
by RMSE over the pooled inner predictions. The winner is refitted on
all n-1 years (scaler and mRMR refitted too) to predict the held-out
year. Benchmarks (NULL, PEAK_NDVI) have no hyperparameters and use the
simple, non-nested leave-one-year-out loop.

Work units are (configuration x outer fold) and are embarrassingly
parallel; every unit's seed derives from (global seed, config id, test
year) so results do not depend on scheduling or worker count.
"""

from __future__ import annotations

import hashlib
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import models
from .dataset import Dataset, slice_season
from .dekads import month_of_dekad
from .errors import AllGridPointsFailed, TooFewYears, YieldcastError
from .features import (
    FEATURE_SET_ORDER,
    MRMR_FRACTIONS,
    FeatureMatrix,
    ScalerParams,
    build_feature_matrix,
    fraction_to_count,
    mrmr_order,
    zscore_apply,
    zscore_fit,
)
from .metrics import PredictionRecord, compute_report
from .models import benchmarks
from .models.grids import BENCHMARK_ALGORITHMS, ML_ALGORITHMS, enumerate_grid

FORECAST_MONTHS = (1, 2, 3, 4, 5, 6, 7, 8)


@dataclass(frozen=True)
class ModelConfiguration:
    """(algorithm, feature set, mRMR on/off, OHE on/off).

    Benchmarks ignore the feature options; their config id is just the
    algorithm name.
    """

    algorithm: str
    feature_set: str | None = None
    mrmr: bool = False
    ohe: bool = False

    def __post_init__(self):
        if self.algorithm in BENCHMARK_ALGORITHMS:
            if self.feature_set is not None or self.mrmr or self.ohe:
                raise ValueError(f"{self.algorithm} takes no feature options")
        elif self.feature_set is None:
            raise ValueError(f"{self.algorithm} needs a feature set")

    @property
    def config_id(self) -> str:
        if self.algorithm in BENCHMARK_ALGORITHMS:
            return self.algorithm
        return (
            f"{self.algorithm}.{self.feature_set}"
            f".mrmr{int(self.mrmr)}.ohe{int(self.ohe)}"
        )

    @property
    def is_benchmark(self) -> bool:
        return self.algorithm in BENCHMARK_ALGORITHMS


def enumerate_configurations(
    algorithms=ML_ALGORITHMS,
    sets=FEATURE_SET_ORDER,
    mrmr_options=(False, True),
    ohe_options=(False, True),
) -> list[ModelConfiguration]:
    """Cartesian product in deterministic order; benchmarks collapse to
    a single configuration each."""
    out = []
    for algo in algorithms:
        if algo in BENCHMARK_ALGORITHMS:
            out.append(ModelConfiguration(algorithm=algo))
            continue
        for s in sets:
            for m in mrmr_options:
                for o in ohe_options:
                    out.append(ModelConfiguration(algo, s, m, o))
    return out


def expanded_combination_count(
    sets=FEATURE_SET_ORDER,
    mrmr_options=(False, True),
    ohe_options=(False, True),
    fractions=MRMR_FRACTIONS,
) -> int:
    """Input-side combinations with the mRMR fractions enumerated
    (6 sets x (off + 6 fractions) x 2 OHE options = 84 by default)."""
    per_mrmr = (1 if False in mrmr_options else 0) + (
        len(fractions) if True in mrmr_options else 0
    )
    return len(sets) * per_mrmr * len(ohe_options)


@dataclass(frozen=True)
class FoldPlan:
    years: tuple[int, ...]
    outer: tuple[tuple[int, tuple[int, ...]], ...]  # (test year, train years)

    def inner(self, test_year: int) -> list[tuple[int, tuple[int, ...]]]:
        train = dict(self.outer)[test_year]
        return [
            (val, tuple(y for y in train if y != val))
            for val in train
        ]


def plan_nested_loyo(years) -> FoldPlan:
    ys = tuple(sorted(set(years)))
    if len(ys) < 3:
        raise TooFewYears(f"nested cross-validation needs >= 3 years, got {len(ys)}")
    outer = tuple(
        (test, tuple(y for y in ys if y != test)) for test in ys
    )
    return FoldPlan(years=ys, outer=outer)


@dataclass(frozen=True)
class FoldDetail:
    """What the outer fold chose: hyperparameters, mRMR fraction and the
    feature names the refitted model actually saw."""

    test_year: int
    hyperparams: dict
    mrmr_fraction: int | None
    n_selected: int | None
    n_continuous: int | None
    selected_features: tuple[str, ...]
    inner_rmse: float | None
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class RunResult:
    crop: str
    forecast_month: int
    config: ModelConfiguration
    records: tuple[PredictionRecord, ...]
    fold_details: tuple[FoldDetail, ...]
    skipped_grid_points: tuple[tuple[int, int | None, str], ...]
    wall_time: float
    seed: int

    @property
    def config_id(self) -> str:
        return self.config.config_id


def derive_seed(*parts) -> int:
    payload = "|".join(str(p) for p in parts).encode()
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "big")


# --- peak-NDVI inputs -------------------------------------------------------

def peak_ndvi_table(ds: Dataset, forecast_month: int) -> dict[tuple[str, int], float]:
    """Seasonal maximum NDVI per (unit, year) over the season-window
    dekads that fall in the first ``forecast_month`` window months."""
    window = ds.season
    allowed_months = set(window.months()[:forecast_month])
    positions = [
        k for k, d in enumerate(window.dekads())
        if month_of_dekad(d) in allowed_months
    ]
    out = {}
    for (unit, year) in ds.yields.records:
        values = slice_season(ds.get_series(unit, "NDVI"), year, window)
        out[(unit, year)] = max(values[k] for k in positions)
    return out


# --- work items -------------------------------------------------------------

@dataclass(frozen=True)
class _MLWork:
    config: ModelConfiguration
    test_year: int
    train_years: tuple[int, ...]
    fm: FeatureMatrix
    grid: tuple[tuple[int, dict], ...]  # (grid index, assignment)
    fractions: tuple[int | None, ...]
    seed: int
    global_scaler: ScalerParams | None  # set when scaler_mode == "global"


@dataclass(frozen=True)
class _BenchmarkWork:
    config: ModelConfiguration
    test_year: int
    train_years: tuple[int, ...]
    yields: dict[tuple[str, int], float]
    peaks: dict[tuple[str, int], float] | None
    seed: int


def _scale_for(fm: FeatureMatrix, rows: np.ndarray,
               global_scaler: ScalerParams | None) -> ScalerParams:
    if global_scaler is not None:
        return global_scaler
    return zscore_fit(fm.X[rows], fm.n_continuous)


def _model_columns(fm: FeatureMatrix, selected: list[int] | None) -> np.ndarray:
    onehot = np.arange(fm.n_continuous, len(fm.columns))
    if selected is None:
        return np.concatenate([np.arange(fm.n_continuous), onehot])
    return np.concatenate([np.asarray(selected, dtype=int), onehot])


def _run_ml_item(work: _MLWork):
    fm = work.fm
    test_year = work.test_year
    assert test_year not in work.train_years, "leakage: test year in outer train set"

    # inner leave-one-year-out folds, precomputed per-fold state
    inner = [
        (val, tuple(y for y in work.train_years if y != val))
        for val in work.train_years
    ]
    fold_state = []
    for val_year, fit_years in inner:
        assert test_year != val_year and test_year not in fit_years, \
            "leakage: test year inside inner fold"
        rows_fit = fm.rows_for_years(fit_years)
        rows_val = fm.rows_for_years([val_year])
        scaler = _scale_for(fm, rows_fit, work.global_scaler)
        X_fit = zscore_apply(scaler, fm.X[rows_fit])
        X_val = zscore_apply(scaler, fm.X[rows_val])
        order = (
            mrmr_order(X_fit[:, : fm.n_continuous], fm.y[rows_fit])
            if work.config.mrmr
            else None
        )
        fold_state.append((X_fit, fm.y[rows_fit], X_val, fm.y[rows_val], order))

    # score every (assignment, fraction) by pooled inner RMSE
    candidates = []
    skipped = []
    order_idx = 0
    for g_idx, assignment in work.grid:
        for fraction in work.fractions:
            seed_g = derive_seed(work.seed, g_idx, fraction)
            preds, obs = [], []
            try:
                for X_fit, y_fit, X_val, y_val, order in fold_state:
                    if fraction is None:
                        cols = _model_columns(fm, None)
                    else:
                        k = fraction_to_count(fraction, fm.n_continuous)
                        cols = _model_columns(fm, order[:k])
                    model = models.fit(
                        work.config.algorithm, assignment,
                        X_fit[:, cols], y_fit, seed_g,
                    )
                    preds.append(model.predict(X_val[:, cols]))
                    obs.append(y_val)
            except YieldcastError as exc:
                skipped.append((g_idx, fraction, exc.code))
                order_idx += 1
                continue
            pooled = np.concatenate(preds)
            rmse = float(np.sqrt(np.mean((pooled - np.concatenate(obs)) ** 2)))
            candidates.append((rmse, order_idx, g_idx, assignment, fraction))
            order_idx += 1
    if not candidates:
        raise AllGridPointsFailed(
            f"{work.config.config_id}: every grid point failed for "
            f"test year {test_year}"
        )
    best = min(candidates, key=lambda c: (c[0], c[1]))
    inner_rmse, _, best_g, best_assignment, best_fraction = best

    # refit on all n-1 train years with the chosen assignment
    rows_train = fm.rows_for_years(work.train_years)
    rows_test = fm.rows_for_years([test_year])
    scaler = _scale_for(fm, rows_train, work.global_scaler)
    X_train = zscore_apply(scaler, fm.X[rows_train])
    X_test = zscore_apply(scaler, fm.X[rows_test])
    if best_fraction is None:
        cols = _model_columns(fm, None)
    else:
        order = mrmr_order(X_train[:, : fm.n_continuous], fm.y[rows_train])
        k = fraction_to_count(best_fraction, fm.n_continuous)
        cols = _model_columns(fm, order[:k])
    model = models.fit(
        work.config.algorithm, best_assignment,
        X_train[:, cols], fm.y[rows_train], derive_seed(work.seed, "refit"),
    )
    y_hat = model.predict(X_test[:, cols])

    records = [
        PredictionRecord(unit=u, year=y, y_obs=float(fm.y[r]), y_pred=float(p))
        for r, (u, y), p in zip(
            rows_test, (fm.row_keys[r] for r in rows_test), y_hat
        )
    ]
    n_cont_selected = (
        fm.n_continuous if best_fraction is None
        else fraction_to_count(best_fraction, fm.n_continuous)
    )
    detail = FoldDetail(
        test_year=test_year,
        hyperparams=best_assignment,
        mrmr_fraction=best_fraction,
        n_selected=n_cont_selected,
        n_continuous=fm.n_continuous,
        selected_features=tuple(fm.columns[c] for c in cols),
        inner_rmse=inner_rmse,
        warnings=model.warnings,
    )
    return work.config.config_id, test_year, records, detail, tuple(skipped)


def _run_benchmark_item(work: _BenchmarkWork):
    test_year = work.test_year
    assert test_year not in work.train_years
    units = sorted({u for (u, _) in work.yields})
    test_records = []
    warnings = []
    if work.config.algorithm == "NULL":
        train = {
            u: [work.yields[(u, y)] for y in work.train_years if (u, y) in work.yields]
            for u in units
        }
        means = benchmarks.fit_null({u: v for u, v in train.items() if v})
        for u in units:
            if (u, test_year) not in work.yields:
                continue
            test_records.append(
                PredictionRecord(
                    unit=u, year=test_year,
                    y_obs=work.yields[(u, test_year)],
                    y_pred=benchmarks.predict_null(means, u),
                )
            )
    else:  # PEAK_NDVI
        for u in units:
            if (u, test_year) not in work.yields:
                continue
            xs = [work.peaks[(u, y)] for y in work.train_years if (u, y) in work.yields]
            ys = [work.yields[(u, y)] for y in work.train_years if (u, y) in work.yields]
            a, b, degenerate = benchmarks.fit_peak_ndvi(xs, ys)
            if degenerate:
                warnings.append(f"{u}: constant peaks, fell back to unit mean")
            test_records.append(
                PredictionRecord(
                    unit=u, year=test_year,
                    y_obs=work.yields[(u, test_year)],
                    y_pred=benchmarks.predict_peak_ndvi(
                        a, b, work.peaks[(u, test_year)]
                    ),
                )
            )
    detail = FoldDetail(
        test_year=test_year,
        hyperparams={},
        mrmr_fraction=None,
        n_selected=None,
        n_continuous=None,
        selected_features=(),
        inner_rmse=None,
        warnings=tuple(warnings),
    )
    return work.config.config_id, test_year, test_records, detail, ()


def _run_item(work):
    if isinstance(work, _BenchmarkWork):
        return _run_benchmark_item(work)
    return _run_ml_item(work)


# --- driver -----------------------------------------------------------------

def _strided_grid(grid: list[dict], max_points: int | None) -> tuple[tuple[int, dict], ...]:
    indexed = list(enumerate(grid))
    if max_points is None or max_points >= len(grid):
        return tuple(indexed)
    pos = np.unique(np.linspace(0, len(grid) - 1, num=max_points).round().astype(int))
    return tuple(indexed[p] for p in pos)


def run_hindcast(
    dataset: Dataset,
    forecast_month: int,
    configs: list[ModelConfiguration],
    seed: int = 0,
    workers: int = 1,
    max_grid_points: int | None = None,
    gbr_grid: str = "full",
    scaler_mode: str = "per-fold",
) -> list[RunResult]:
    """Out-of-sample prediction records for every configuration.

    Deterministic given (dataset, configs, seed); the worker count only
    changes wall time.
    """
    if dataset.season is None:
        raise ValueError("dataset has no season window; run phenology first")
    if scaler_mode not in ("per-fold", "global"):
        raise ValueError(f"unknown scaler mode {scaler_mode!r}")
    plan = plan_nested_loyo(dataset.yields.all_years())

    fm_cache: dict[tuple[str, bool], FeatureMatrix] = {}
    peaks = None
    work_items = []
    for config in sorted(configs, key=lambda c: c.config_id):
        if config.is_benchmark:
            if config.algorithm == "PEAK_NDVI" and peaks is None:
                peaks = peak_ndvi_table(dataset, forecast_month)
            for test_year, train_years in plan.outer:
                work_items.append(
                    _BenchmarkWork(
                        config=config,
                        test_year=test_year,
                        train_years=train_years,
                        yields=dict(dataset.yields.records),
                        peaks=peaks if config.algorithm == "PEAK_NDVI" else None,
                        seed=derive_seed(seed, config.config_id, test_year),
                    )
                )
            continue
        key = (config.feature_set, config.ohe)
        if key not in fm_cache:
            fm_cache[key] = build_feature_matrix(
                dataset, config.feature_set, forecast_month, config.ohe
            )
        fm = fm_cache[key]
        grid = _strided_grid(enumerate_grid(config.algorithm, gbr_grid), max_grid_points)
        fractions = tuple(MRMR_FRACTIONS) if config.mrmr else (None,)
        global_scaler = (
            zscore_fit(fm.X, fm.n_continuous) if scaler_mode == "global" else None
        )
        for test_year, train_years in plan.outer:
            work_items.append(
                _MLWork(
                    config=config,
                    test_year=test_year,
                    train_years=train_years,
                    fm=fm,
                    grid=grid,
                    fractions=fractions,
                    seed=derive_seed(seed, config.config_id, test_year),
                    global_scaler=global_scaler,
                )
            )

    t0 = {}
    started = time.perf_counter()
    if workers <= 1:
        outputs = [_run_item(w) for w in work_items]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_run_item, work_items, chunksize=1))
    elapsed = time.perf_counter() - started

    grouped: dict[str, dict] = {}
    for config in configs:
        grouped[config.config_id] = {
            "config": config, "records": [], "details": [], "skipped": []
        }
    for config_id, test_year, records, detail, skipped in outputs:
        g = grouped[config_id]
        g["records"].extend(records)
        g["details"].append(detail)
        g["skipped"].extend(skipped)
    t0["per_config"] = elapsed / max(1, len(configs))

    results = []
    expected_keys = set(dataset.yields.records)
    for config in sorted(configs, key=lambda c: c.config_id):
        g = grouped[config.config_id]
        records = sorted(g["records"], key=lambda r: (r.unit, r.year))
        got = {(r.unit, r.year) for r in records}
        if got != expected_keys:
            missing = sorted(expected_keys - got)[:3]
            raise YieldcastError(
                f"{config.config_id}: prediction records incomplete "
                f"(missing e.g. {missing})"
            )
        results.append(
            RunResult(
                crop=dataset.yields.crop,
                forecast_month=forecast_month,
                config=config,
                records=tuple(records),
                fold_details=tuple(sorted(g["details"], key=lambda d: d.test_year)),
                skipped_grid_points=tuple(sorted(set(g["skipped"]))),
                wall_time=t0["per_config"],
                seed=seed,
            )
        )
    return results


def select_best_configuration(results: list[RunResult], dataset: Dataset) -> str:
    """Config id minimizing fold-averaged provincial rRMSE_p; ties break
    by config id."""
    if not results:
        raise ValueError("no results to select from")
    crops = {r.crop for r in results}
    months = {r.forecast_month for r in results}
    if len(crops) > 1 or len(months) > 1:
        raise ValueError("results must share crop and forecast month")
    crop_mean = dataset.yields.mean_yield()
    weights = {u.id: u.production_weight for u in dataset.units}
    scored = [
        (compute_report(list(r.records), weights, crop_mean).rrmse_p, r.config_id)
        for r in results
    ]
    return min(scored)[1]
