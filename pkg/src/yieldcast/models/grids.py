"""Hyperparameter grids for the exhaustive search.

Grid sizes per algorithm: LASSO 13, RF 252, SVR_lin 392, SVR_rbf 392,
MLP 600, GBR 162 (the GBR value lists multiply to 162, not the
published 54; ``gbr_grid="paper-n"`` restricts the min-split fractions
to their two endpoints, giving 54, for sensitivity runs). Assignments
are emitted in a fixed order: the cartesian product of the value lists
as written below.
"""

from __future__ import annotations

import itertools

import numpy as np

ML_ALGORITHMS = ("LASSO", "RF", "SVR_lin", "SVR_rbf", "GBR", "MLP")
BENCHMARK_ALGORITHMS = ("NULL", "PEAK_NDVI")
ALL_ALGORITHMS = ML_ALGORITHMS + BENCHMARK_ALGORITHMS

_LASSO_ALPHAS = [float(a) for a in np.logspace(-5, 0, 13)]

_RF_DEPTHS = [10, 15, 20, 25, 30, 35, 40]
_RF_MAX_FEATURES = ["all", "sqrt"]
_RF_TREES = [100, 250, 500]
# six equally spaced fractions spanning [0.2, 0.8]
_RF_MIN_SPLIT = [round(f, 2) for f in np.linspace(0.2, 0.8, 6)]

_SVR_GAMMAS = [float(g) for g in np.logspace(-2, 2, 7)]
_SVR_EPSILONS = [float(e) for e in np.logspace(-6, 0.5, 7)]
_SVR_CS = [float(c) for c in np.logspace(-5, 2, 8)]

_GBR_LEARNING_RATES = [0.01, 0.05, 0.1]
_GBR_DEPTHS = [10, 20, 40]
_GBR_STAGES = [100, 250, 500]
# step 0.14 from 0.1: {0.10, 0.24, 0.38, 0.52, 0.66, 0.80}
_GBR_MIN_SPLIT = [round(0.1 + 0.14 * i, 2) for i in range(6)]
_GBR_MIN_SPLIT_PAPER_N = [_GBR_MIN_SPLIT[0], _GBR_MIN_SPLIT[-1]]

_MLP_ALPHAS = [float(a) for a in np.logspace(-5, -1, 6)]
_MLP_ACTIVATIONS = ["relu", "tanh"]
_MLP_LEARNING_RATES = ["constant", "adaptive"]
_MLP_HIDDEN = [
    (a, b) for a, b in itertools.product([16, 32, 48, 64], repeat=2)
] + [
    (16, 32, 16), (16, 48, 16), (32, 48, 32), (32, 64, 32), (48, 64, 48),
    (32, 32, 32), (48, 48, 48), (64, 64, 64), (16, 16, 16),
]


def _product(**named_lists) -> list[dict]:
    names = list(named_lists)
    return [
        dict(zip(names, combo))
        for combo in itertools.product(*(named_lists[n] for n in names))
    ]


def enumerate_grid(algorithm: str, gbr_grid: str = "full") -> list[dict]:
    """All hyperparameter assignments for one ML algorithm, in the fixed
    cartesian-product order. Benchmarks have an empty grid."""
    if algorithm == "LASSO":
        return _product(alpha=_LASSO_ALPHAS)
    if algorithm == "RF":
        return _product(
            max_depth=_RF_DEPTHS,
            max_features=_RF_MAX_FEATURES,
            n_trees=_RF_TREES,
            min_split_fraction=_RF_MIN_SPLIT,
        )
    if algorithm in ("SVR_lin", "SVR_rbf"):
        # gamma is enumerated for both kernels to keep the grid size at
        # 392, but the linear kernel ignores it
        return _product(gamma=_SVR_GAMMAS, epsilon=_SVR_EPSILONS, C=_SVR_CS)
    if algorithm == "GBR":
        min_split = _GBR_MIN_SPLIT_PAPER_N if gbr_grid == "paper-n" else _GBR_MIN_SPLIT
        return _product(
            learning_rate=_GBR_LEARNING_RATES,
            max_depth=_GBR_DEPTHS,
            n_stages=_GBR_STAGES,
            min_split_fraction=min_split,
        )
    if algorithm == "MLP":
        return _product(
            alpha=_MLP_ALPHAS,
            activation=_MLP_ACTIVATIONS,
            learning_rate=_MLP_LEARNING_RATES,
            hidden=_MLP_HIDDEN,
        )
    if algorithm in BENCHMARK_ALGORITHMS:
        return [{}]
    raise ValueError(f"unknown algorithm {algorithm!r}")


def grid_sizes(gbr_grid: str = "full") -> dict[str, int]:
    return {a: len(enumerate_grid(a, gbr_grid)) for a in ML_ALGORITHMS}


def min_split_rows(fraction: float, n_train: int) -> int:
    """Convert a min-split fraction of the training size to a row count."""
    return max(2, int(np.floor(fraction * n_train + 0.5)))
