"""One train/predict contract over the six ML regressors.

``fit`` dispatches on the algorithm id, seeds anything stochastic, and
returns an immutable TrainedModel whose ``predict`` checks the column
layout. Benchmarks (NULL, PEAK_NDVI) have their own closed forms in
``benchmarks`` and do not flow through this interface.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import SchemaMismatch, SingularFit
from . import benchmarks  # noqa: F401  (re-exported)
from .grids import (  # noqa: F401
    ALL_ALGORITHMS,
    BENCHMARK_ALGORITHMS,
    ML_ALGORITHMS,
    enumerate_grid,
    grid_sizes,
)
from .linear import Lasso
from .mlp import MLP
from .svr import SVR
from .trees import GradientBoosting, RandomForest

# incremented on every successful fit; tests use it for fit accounting
FIT_COUNT = 0


@dataclass(frozen=True)
class TrainedModel:
    algorithm: str
    hyperparams: dict
    n_features: int
    seed: int
    warnings: tuple[str, ...] = ()
    _impl: object = field(default=None, repr=False)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise SchemaMismatch(
                f"model trained on {self.n_features} columns, "
                f"got {X.shape[1] if X.ndim == 2 else X.ndim}"
            )
        pred = np.asarray(self._impl.predict(X), dtype=np.float64)
        if not np.isfinite(pred).all():
            raise SingularFit(f"{self.algorithm} produced non-finite predictions")
        return pred


def fit(algorithm: str, hyperparams: dict, X: np.ndarray, y: np.ndarray,
        seed: int = 0) -> TrainedModel:
    global FIT_COUNT
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise SchemaMismatch("X must be (n, d) and y (n,) with matching n")
    if X.shape[0] < 2:
        raise SingularFit("need at least 2 training rows")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise SingularFit("training data contains non-finite values")

    warnings: list[str] = []
    if algorithm == "LASSO":
        impl = Lasso(alpha=hyperparams["alpha"]).fit(X, y)
        if not impl.converged_:
            warnings.append("coordinate descent hit the sweep cap")
    elif algorithm == "RF":
        impl = RandomForest(
            n_trees=hyperparams["n_trees"],
            max_depth=hyperparams["max_depth"],
            max_features=hyperparams["max_features"],
            min_split_fraction=hyperparams["min_split_fraction"],
        ).fit(X, y, seed)
    elif algorithm == "GBR":
        impl = GradientBoosting(
            learning_rate=hyperparams["learning_rate"],
            max_depth=hyperparams["max_depth"],
            n_stages=hyperparams["n_stages"],
            min_split_fraction=hyperparams["min_split_fraction"],
        ).fit(X, y)
    elif algorithm in ("SVR_lin", "SVR_rbf"):
        impl = SVR(
            kernel="linear" if algorithm == "SVR_lin" else "rbf",
            C=hyperparams["C"],
            epsilon=hyperparams["epsilon"],
            gamma=hyperparams["gamma"],
        ).fit(X, y)
        if not impl.converged_:
            warnings.append("SMO hit the iteration cap")
    elif algorithm == "MLP":
        impl = MLP(
            hidden=hyperparams["hidden"],
            activation=hyperparams["activation"],
            alpha=hyperparams["alpha"],
            learning_rate=hyperparams["learning_rate"],
        ).fit(X, y, seed)
        if not impl.converged_:
            warnings.append("epoch cap reached without early stop")
    else:
        raise ValueError(f"unknown ML algorithm {algorithm!r}")

    FIT_COUNT += 1
    return TrainedModel(
        algorithm=algorithm,
        hyperparams=dict(hyperparams),
        n_features=X.shape[1],
        seed=seed,
        warnings=tuple(warnings),
        _impl=impl,
    )
