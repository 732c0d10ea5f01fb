"""L1-regularized linear regression via cyclic coordinate descent."""

from __future__ import annotations

import numpy as np

from ..defaults import defaults
from ..kernels import lasso_cd

_CFG = defaults()["lasso"]
MAX_SWEEPS = int(_CFG["max_sweeps"])
TOL = float(_CFG["tol"])


class Lasso:
    """Minimizes 1/(2n) ||y - Xw - b||^2 + alpha ||w||_1.

    The intercept is unpenalized and handled by centering, so X may mix
    scaled continuous columns with raw one-hot indicators.
    """

    def __init__(self, alpha: float):
        self.alpha = float(alpha)
        self.coef_ = None
        self.intercept_ = 0.0
        self.converged_ = True

    def fit(self, X: np.ndarray, y: np.ndarray) -> "Lasso":
        x_mean = X.mean(axis=0)
        y_mean = float(y.mean())
        w, _, converged = lasso_cd(
            X - x_mean, y - y_mean, self.alpha, MAX_SWEEPS, TOL
        )
        self.coef_ = np.asarray(w)
        self.intercept_ = y_mean - float(x_mean @ self.coef_)
        self.converged_ = bool(converged)
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        return X @ self.coef_ + self.intercept_
