"""The two benchmark models: per-unit mean (null) and peak-NDVI line."""

from __future__ import annotations

import numpy as np

from ..errors import UnknownUnit

# incremented per fit call; tests use these to verify the benchmarks run
# the simple (non-nested) leave-one-year-out loop
NULL_FIT_COUNT = 0
PEAK_FIT_COUNT = 0


def fit_null(train_yields: dict[str, list[float]]) -> dict[str, float]:
    """Per-unit mean of the training years' yields."""
    global NULL_FIT_COUNT
    NULL_FIT_COUNT += 1
    means = {}
    for unit, values in train_yields.items():
        if not values:
            raise UnknownUnit(f"no training yields for unit {unit!r}")
        means[unit] = float(np.mean(values))
    return means


def predict_null(means: dict[str, float], unit: str) -> float:
    try:
        return means[unit]
    except KeyError:
        raise UnknownUnit(f"unit {unit!r} was not in the null-model training set") from None


def fit_peak_ndvi(peaks, yields) -> tuple[float, float, bool]:
    """Per-unit least-squares line yield = a * peak + b.

    When all training peaks coincide the slope is undefined; the model
    degrades to the unit's mean yield and the flag marks the fallback.
    """
    global PEAK_FIT_COUNT
    PEAK_FIT_COUNT += 1
    x = np.asarray(peaks, dtype=float)
    y = np.asarray(yields, dtype=float)
    if x.size < 2:
        raise ValueError("need at least 2 training years per unit")
    if np.ptp(x) < 1e-12:
        return 0.0, float(y.mean()), True
    x_mean = x.mean()
    y_mean = y.mean()
    a = float(((x - x_mean) @ (y - y_mean)) / ((x - x_mean) @ (x - x_mean)))
    b = float(y_mean - a * x_mean)
    return a, b, False


def predict_peak_ndvi(a: float, b: float, peak: float) -> float:
    return a * peak + b
