"""Epsilon-insensitive support vector regression (linear and RBF kernels).

The dual is solved by the SMO kernel. The full training set is kept as
the support basis; prediction sums beta-weighted kernel evaluations.
"""

from __future__ import annotations

import numpy as np

from ..defaults import defaults
from ..kernels import svr_smo

_CFG = defaults()["svr"]
TOL = float(_CFG["tol"])
MAX_ITER = int(_CFG["max_iter"])


def _kernel_matrix(kind: str, gamma: float, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if kind == "linear":
        return A @ B.T
    if kind == "rbf":
        sq = (
            np.sum(A * A, axis=1)[:, None]
            + np.sum(B * B, axis=1)[None, :]
            - 2.0 * (A @ B.T)
        )
        np.maximum(sq, 0.0, out=sq)
        return np.exp(-gamma * sq)
    raise ValueError(f"unknown kernel {kind!r}")


class SVR:
    """SVR with margin epsilon and box constraint C.

    ``gamma`` only affects the RBF kernel; it is accepted (and ignored)
    for the linear kernel so both share one grid shape.
    """

    def __init__(self, kernel: str, C: float, epsilon: float, gamma: float = 1.0):
        if kernel not in ("linear", "rbf"):
            raise ValueError(f"unknown kernel {kernel!r}")
        self.kernel = kernel
        self.C = float(C)
        self.epsilon = float(epsilon)
        self.gamma = float(gamma)
        self.beta_ = None
        self.bias_ = 0.0
        self.X_ = None
        self.converged_ = True

    def fit(self, X: np.ndarray, y: np.ndarray) -> "SVR":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        K = _kernel_matrix(self.kernel, self.gamma, X, X)
        beta, bias, _, converged = svr_smo(
            K, y, self.C, self.epsilon, TOL, MAX_ITER
        )
        self.beta_ = np.asarray(beta)
        self.bias_ = float(bias)
        self.X_ = X
        self.converged_ = bool(converged)
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        K = _kernel_matrix(self.kernel, self.gamma, X, self.X_)
        return K @ self.beta_ + self.bias_
