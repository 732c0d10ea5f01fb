"""Feed-forward network trained by seeded mini-batch gradient descent.

The training contract is pinned in defaults.cfg: squared loss / 2 plus
an L2 weight penalty, uniform fan-in initialization, at most 500 epochs
with early stopping after 20 non-improving epochs, and (in adaptive
mode) learning-rate halving after 10 non-improving epochs.
"""

from __future__ import annotations

import numpy as np

from ..defaults import defaults

_CFG = defaults()["mlp"]
BATCH_SIZE = int(_CFG["batch_size"])
MAX_EPOCHS = int(_CFG["max_epochs"])
IMPROVEMENT_TOL = float(_CFG["improvement_tol"])
EARLY_STOP_PATIENCE = int(_CFG["early_stop_patience"])
ADAPTIVE_PATIENCE = int(_CFG["adaptive_patience"])
INITIAL_LR = float(_CFG["initial_learning_rate"])


def _activate(name: str, z: np.ndarray) -> np.ndarray:
    if name == "relu":
        return np.maximum(z, 0.0)
    return np.tanh(z)


def _activate_grad(name: str, a: np.ndarray) -> np.ndarray:
    # gradients expressed through the activation output a
    if name == "relu":
        return (a > 0.0).astype(a.dtype)
    return 1.0 - a * a


class MLP:
    def __init__(self, hidden: tuple[int, ...], activation: str, alpha: float,
                 learning_rate: str):
        if learning_rate not in ("constant", "adaptive"):
            raise ValueError(f"unknown learning-rate mode {learning_rate!r}")
        self.hidden = tuple(hidden)
        self.activation = activation
        self.alpha = float(alpha)
        self.learning_rate = learning_rate
        self.weights_: list[np.ndarray] = []
        self.biases_: list[np.ndarray] = []
        self.converged_ = True

    def _init_params(self, d: int, rng: np.random.Generator):
        sizes = (d, *self.hidden, 1)
        self.weights_ = []
        self.biases_ = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            self.weights_.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            self.biases_.append(np.zeros(fan_out))

    def _forward(self, X: np.ndarray) -> list[np.ndarray]:
        acts = [X]
        a = X
        last = len(self.weights_) - 1
        for l, (W, b) in enumerate(zip(self.weights_, self.biases_)):
            z = a @ W + b
            a = z if l == last else _activate(self.activation, z)
            acts.append(a)
        return acts

    def _loss(self, X: np.ndarray, y: np.ndarray, n_train: int) -> float:
        pred = self._forward(X)[-1][:, 0]
        penalty = sum(float(np.sum(W * W)) for W in self.weights_)
        return 0.5 * float(np.mean((pred - y) ** 2)) + (
            0.5 * self.alpha * penalty / n_train
        )

    def fit(self, X: np.ndarray, y: np.ndarray, seed: int) -> "MLP":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        n, d = X.shape
        rng = np.random.default_rng(seed)
        self._init_params(d, rng)
        lr = INITIAL_LR
        batch = min(BATCH_SIZE, n)
        best = np.inf
        no_improve = 0
        adaptive_no_improve = 0
        self.converged_ = False
        for _ in range(MAX_EPOCHS):
            order = rng.permutation(n)
            for start in range(0, n, batch):
                rows = order[start : start + batch]
                self._step(X[rows], y[rows], lr, n)
            loss = self._loss(X, y, n)
            if best - loss > IMPROVEMENT_TOL:
                best = loss
                no_improve = 0
                adaptive_no_improve = 0
            else:
                no_improve += 1
                adaptive_no_improve += 1
            if self.learning_rate == "adaptive" and adaptive_no_improve >= ADAPTIVE_PATIENCE:
                lr *= 0.5
                adaptive_no_improve = 0
            if no_improve >= EARLY_STOP_PATIENCE:
                self.converged_ = True
                break
        return self

    def _step(self, Xb: np.ndarray, yb: np.ndarray, lr: float, n_train: int):
        acts = self._forward(Xb)
        m = Xb.shape[0]
        delta = (acts[-1][:, 0] - yb)[:, None] / m  # d(loss)/d(output)
        for l in range(len(self.weights_) - 1, -1, -1):
            grad_W = acts[l].T @ delta + (self.alpha / n_train) * self.weights_[l]
            grad_b = delta.sum(axis=0)
            if l > 0:
                delta = (delta @ self.weights_[l].T) * _activate_grad(
                    self.activation, acts[l]
                )
            self.weights_[l] -= lr * grad_W
            self.biases_[l] -= lr * grad_b

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self._forward(np.asarray(X, dtype=np.float64))[-1][:, 0]
