"""Monthly feature engineering, scaling and mRMR selection.

Monthly aggregates follow fixed per-variable operators (ND = mean NDVI,
ND_max = max NDVI, Rad/Rain = sums, T = mean, T_min/T_max = extremes of
the corresponding series). Month 1 is the first calendar month of the
season window; a forecast issued at the start of season month i+1 sees
months 1..i.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .dekads import SeasonWindow
from .errors import CoverageGap, DegenerateColumn

# feature variable -> (source series, aggregation)
FEATURE_VARIABLES = {
    "ND": ("NDVI", "avg"),
    "ND_max": ("NDVI", "max"),
    "Rad": ("Rad", "sum"),
    "Rain": ("Rain", "sum"),
    "T": ("T", "avg"),
    "T_min": ("Tmin", "min"),
    "T_max": ("Tmax", "max"),
}

# manually engineered feature sets
FEATURE_SETS = {
    "RS&Met": ("ND", "ND_max", "Rad", "Rain", "T", "T_min", "T_max"),
    "RS": ("ND", "ND_max"),
    "Met": ("Rad", "Rain", "T", "T_min", "T_max"),
    "RS&Met-": ("ND", "Rain", "T"),
    "RS-": ("ND",),
    "Met-": ("Rad", "Rain", "T"),
}

FEATURE_SET_ORDER = ("RS&Met", "RS", "Met", "RS&Met-", "RS-", "Met-")

MRMR_FRACTIONS = (5, 10, 25, 50, 75, 100)  # percent of input features

ONEHOT_PREFIX = "unit:"


def _aggregate(values: list[float], op: str) -> float:
    if op == "avg":
        return float(np.mean(values))
    if op == "max":
        return float(np.max(values))
    if op == "min":
        return float(np.min(values))
    if op == "sum":
        return float(np.sum(values))
    raise ValueError(f"unknown aggregation {op!r}")


def aggregate_monthly(
    ds: Dataset,
    unit_id: str,
    harvest_year: int,
    months: int,
    window: SeasonWindow | None = None,
) -> dict[tuple[str, int], float]:
    """Monthly feature values for season months 1..months.

    Keys are (feature variable, month index). A month is its three
    calendar dekads; any missing dekad raises CoverageGap.
    """
    window = window or ds.season
    if window is None:
        raise ValueError("dataset has no season window")
    month_count = window.n_months
    if not 1 <= months <= month_count:
        raise CoverageGap(
            f"requested {months} months but the season window has {month_count}"
        )
    per_month = {}
    for m in range(1, months + 1):
        idxs = window.month_dekad_indices(harvest_year, months=m)[-3:]
        per_month[m] = idxs
    out: dict[tuple[str, int], float] = {}
    for feat, (series_var, op) in FEATURE_VARIABLES.items():
        series = ds.get_series(unit_id, series_var)
        for m, idxs in per_month.items():
            vals = []
            for idx in idxs:
                if not series.has(idx):
                    raise CoverageGap(
                        f"unit {unit_id!r} {series_var} missing dekad "
                        f"({idx.year}, {idx.dekad}) for harvest {harvest_year}"
                    )
                vals.append(series.value(idx))
            out[(feat, m)] = _aggregate(vals, op)
    return out


@dataclass(frozen=True)
class FeatureMatrix:
    """Design matrix for one (feature set, forecast month, ohe) shape.

    Rows are (unit id, harvest year) sorted lexicographically; the
    continuous block comes first, one-hot admin columns (if any) after.
    """

    row_keys: tuple[tuple[str, int], ...]
    columns: tuple[str, ...]
    n_continuous: int
    X: np.ndarray
    y: np.ndarray

    @property
    def n_onehot(self) -> int:
        return len(self.columns) - self.n_continuous

    def continuous(self, X: np.ndarray | None = None) -> np.ndarray:
        X = self.X if X is None else X
        return X[:, : self.n_continuous]

    def rows_for_years(self, years) -> np.ndarray:
        wanted = set(years)
        return np.array(
            [i for i, (_, y) in enumerate(self.row_keys) if y in wanted], dtype=int
        )


def build_feature_matrix(
    ds: Dataset,
    feature_set: str,
    forecast_month: int,
    ohe: bool,
    window: SeasonWindow | None = None,
) -> FeatureMatrix:
    """Assemble X/y for a feature set at a forecast month.

    ``forecast_month`` i makes season months 1..i available (i=1 is the
    forecast issued after the first season month closed). Continuous
    columns are ordered variable-major then month; one-hot columns (one
    per admin unit, in unit order) follow when ``ohe`` is set.
    """
    window = window or ds.season
    if window is None:
        raise ValueError("dataset has no season window")
    variables = FEATURE_SETS[feature_set]
    months = forecast_month
    row_keys = tuple(sorted(ds.yields.records))
    unit_ids = ds.unit_ids()

    col_names = [f"{v}_m{m}" for v in variables for m in range(1, months + 1)]
    n_cont = len(col_names)
    if ohe:
        col_names += [f"{ONEHOT_PREFIX}{u}" for u in unit_ids]

    X = np.zeros((len(row_keys), len(col_names)))
    y = np.zeros(len(row_keys))
    unit_pos = {u: k for k, u in enumerate(unit_ids)}
    for r, (unit_id, year) in enumerate(row_keys):
        feats = aggregate_monthly(ds, unit_id, year, months, window)
        X[r, :n_cont] = [feats[(v, m)] for v in variables for m in range(1, months + 1)]
        if ohe:
            X[r, n_cont + unit_pos[unit_id]] = 1.0
        y[r] = ds.yields.records[(unit_id, year)]
    return FeatureMatrix(
        row_keys=row_keys,
        columns=tuple(col_names),
        n_continuous=n_cont,
        X=X,
        y=y,
    )


# --- standard-score scaling ------------------------------------------------

@dataclass(frozen=True)
class ScalerParams:
    """Per-column mean and population standard deviation of the
    continuous block; one-hot columns pass through untouched."""

    mean: np.ndarray
    sd: np.ndarray
    n_continuous: int


def zscore_fit(X: np.ndarray, n_continuous: int) -> ScalerParams:
    if X.shape[0] < 2:
        raise DegenerateColumn("need at least 2 training rows to fit a scaler")
    block = X[:, :n_continuous]
    mean = block.mean(axis=0)
    sd = block.std(axis=0)  # population sd
    bad = np.nonzero(sd < 1e-12)[0]
    if bad.size:
        raise DegenerateColumn(
            f"constant training column(s) at continuous index {bad.tolist()}"
        )
    return ScalerParams(mean=mean, sd=sd, n_continuous=n_continuous)


def zscore_apply(params: ScalerParams, X: np.ndarray) -> np.ndarray:
    out = np.array(X, dtype=float, copy=True)
    k = params.n_continuous
    out[:, :k] = (out[:, :k] - params.mean) / params.sd
    return out


def zscore_invert(params: ScalerParams, X: np.ndarray) -> np.ndarray:
    out = np.array(X, dtype=float, copy=True)
    k = params.n_continuous
    out[:, :k] = out[:, :k] * params.sd + params.mean
    return out


# --- mRMR selection ----------------------------------------------------------

def _abs_pearson(a: np.ndarray, b: np.ndarray) -> float:
    a = a - a.mean()
    b = b - b.mean()
    denom = np.sqrt((a @ a) * (b @ b))
    if denom < 1e-300:
        return 0.0
    return abs(float((a @ b) / denom))


def mrmr_order(X: np.ndarray, y: np.ndarray) -> list[int]:
    """Full greedy mRMR ordering of the columns of X.

    MID criterion with |Pearson r| for both relevance and redundancy:
    the first pick maximizes relevance to y, each later pick maximizes
    relevance minus mean redundancy against the picks so far. Ties break
    toward the lower column index, so the order is deterministic. The
    selection for any k is the first k entries.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    d = X.shape[1]
    Xc = X - X.mean(axis=0)
    norms = np.sqrt(np.einsum("ij,ij->j", Xc, Xc))
    Z = Xc / np.where(norms < 1e-300, 1.0, norms)  # constant columns -> 0
    yc = y - y.mean()
    ynorm = np.sqrt(yc @ yc)
    relevance = np.abs(Z.T @ (yc / ynorm)) if ynorm >= 1e-300 else np.zeros(d)

    selected: list[int] = []
    remaining = list(range(d))
    redundancy_sum = np.zeros(d)
    while remaining:
        rem = np.array(remaining)
        if not selected:
            scores = relevance[rem]
        else:
            scores = relevance[rem] - redundancy_sum[rem] / len(selected)
        pick = remaining.pop(int(np.argmax(scores)))
        selected.append(pick)
        if remaining:
            redundancy_sum += np.abs(Z.T @ Z[:, pick])
    return selected


def mrmr_select(X: np.ndarray, y: np.ndarray, k: int) -> list[int]:
    """First k picks of the greedy mRMR ordering (k clamped to [1, d])."""
    d = X.shape[1]
    k = max(1, min(k, d))
    return mrmr_order(X, y)[:k]


def fraction_to_count(fraction_percent: int, n_columns: int) -> int:
    """Feature count for a retained-percentage option.

    Round-half-up with a floor of one feature.
    """
    if n_columns < 1:
        raise ValueError("n_columns must be >= 1")
    k = int(np.floor(fraction_percent / 100.0 * n_columns + 0.5))
    return max(1, min(k, n_columns))
