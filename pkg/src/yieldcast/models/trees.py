"""CART-style regression trees, bagged forests and gradient boosting.

Split search (variance reduction over midpoint thresholds) is delegated
to the kernels backend; growth, bagging and boosting logic live here.
"""

from __future__ import annotations

import numpy as np

from ..defaults import defaults
from ..kernels import best_split
from .grids import min_split_rows

_MIN_LEAF = int(defaults()["tree"]["min_samples_leaf"])


class RegressionTree:
    """Binary tree minimizing within-node variance.

    ``max_features`` is the number of candidate features drawn (without
    replacement, indices re-sorted so tie-breaks stay canonical) at each
    node; None means all.
    """

    def __init__(self, max_depth: int, min_samples_split: int,
                 max_features: int | None = None):
        self.max_depth = max_depth
        self.min_samples_split = max(2, min_samples_split)
        self.max_features = max_features
        # parallel node arrays; leaves have feature -1
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def fit(self, X: np.ndarray, y: np.ndarray, rng: np.random.Generator | None = None):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        n, d = X.shape
        use_subset = self.max_features is not None and self.max_features < d
        if use_subset and rng is None:
            raise ValueError("feature subsampling needs an rng")

        stack = [(np.arange(n), 0, -1, False)]  # rows, depth, parent, is_right
        while stack:
            rows, depth, parent, is_right = stack.pop()
            node_id = len(self.feature)
            if parent >= 0:
                if is_right:
                    self.right[parent] = node_id
                else:
                    self.left[parent] = node_id
            yn = y[rows]
            mean = float(yn.mean())
            self.feature.append(-1)
            self.threshold.append(0.0)
            self.left.append(-1)
            self.right.append(-1)
            self.value.append(mean)

            if (
                rows.size < self.min_samples_split
                or depth >= self.max_depth
                or np.ptp(yn) == 0.0
            ):
                continue
            if use_subset:
                feats = np.sort(rng.choice(d, size=self.max_features, replace=False))
            else:
                feats = np.arange(d)
            local, thr, gain = best_split(X[np.ix_(rows, feats)], yn, _MIN_LEAF)
            if local < 0 or gain <= 0.0:
                continue
            feat = int(feats[local])
            go_left = X[rows, feat] <= thr
            left_rows = rows[go_left]
            right_rows = rows[~go_left]
            if left_rows.size == 0 or right_rows.size == 0:
                continue
            self.feature[node_id] = feat
            self.threshold[node_id] = float(thr)
            # push right first so the left child is grown (and numbered) first
            stack.append((right_rows, depth + 1, node_id, True))
            stack.append((left_rows, depth + 1, node_id, False))
        self._freeze()
        return self

    def _freeze(self):
        self.feature = np.asarray(self.feature, dtype=np.int64)
        self.threshold = np.asarray(self.threshold, dtype=np.float64)
        self.left = np.asarray(self.left, dtype=np.int64)
        self.right = np.asarray(self.right, dtype=np.int64)
        self.value = np.asarray(self.value, dtype=np.float64)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        idx = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            feats = self.feature[idx]
            internal = feats >= 0
            if not internal.any():
                break
            rows = np.nonzero(internal)[0]
            cur = idx[rows]
            go_left = X[rows, self.feature[cur]] <= self.threshold[cur]
            idx[rows] = np.where(go_left, self.left[cur], self.right[cur])
        return self.value[idx]


class RandomForest:
    """Mean of bootstrap-bagged regression trees."""

    def __init__(self, n_trees: int, max_depth: int, max_features: str,
                 min_split_fraction: float):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.max_features = max_features
        self.min_split_fraction = min_split_fraction
        self.trees: list[RegressionTree] = []

    def fit(self, X: np.ndarray, y: np.ndarray, seed: int) -> "RandomForest":
        n, d = X.shape
        min_split = min_split_rows(self.min_split_fraction, n)
        n_feats = d if self.max_features == "all" else max(1, int(np.sqrt(d)))
        rng = np.random.default_rng(seed)
        self.trees = []
        for _ in range(self.n_trees):
            rows = rng.integers(0, n, size=n)
            tree = RegressionTree(
                max_depth=self.max_depth,
                min_samples_split=min_split,
                max_features=n_feats if n_feats < d else None,
            )
            tree.fit(X[rows], y[rows], rng)
            self.trees.append(tree)
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        acc = np.zeros(X.shape[0])
        for tree in self.trees:
            acc += tree.predict(X)
        return acc / len(self.trees)


class GradientBoosting:
    """Sequential shallow-tree residual fitting from a mean baseline.

    Deterministic: no row or feature subsampling (see defaults.cfg).
    """

    def __init__(self, learning_rate: float, max_depth: int, n_stages: int,
                 min_split_fraction: float):
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.n_stages = n_stages
        self.min_split_fraction = min_split_fraction
        self.base_ = 0.0
        self.trees: list[RegressionTree] = []

    def fit(self, X: np.ndarray, y: np.ndarray) -> "GradientBoosting":
        n = X.shape[0]
        min_split = min_split_rows(self.min_split_fraction, n)
        self.base_ = float(y.mean())
        residual = y - self.base_
        self.trees = []
        for _ in range(self.n_stages):
            tree = RegressionTree(max_depth=self.max_depth,
                                  min_samples_split=min_split)
            tree.fit(X, residual)
            step = tree.predict(X)
            residual = residual - self.learning_rate * step
            self.trees.append(tree)
            if np.max(np.abs(residual)) < 1e-12:
                break
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        out = np.full(X.shape[0], self.base_)
        for tree in self.trees:
            out += self.learning_rate * tree.predict(X)
        return out
