"""Isolation forest (Liu, Ting & Zhou) for small anomaly-detection windows.

Windows here hold a dozen or so points, so trees are grown and walked with
plain Python scalars; numpy per-node overhead would dominate otherwise.
"""

from __future__ import annotations

import math

import numpy as np

EULER_GAMMA = 0.5772156649015329


def average_path_length(n: int) -> float:
    """Mean unsuccessful-search depth of a BST built on ``n`` points."""
    if n <= 1:
        return 0.0
    if n == 2:
        return 1.0
    return 2.0 * (math.log(n - 1.0) + EULER_GAMMA) - 2.0 * (n - 1.0) / n


class IsolationTree:
    """One random isolation tree stored as flat node lists.

    ``feature[i] == -1`` marks an external node; ``size[i]`` is the number of
    training points that ended there. Points with ``x[feature] < threshold``
    go left.
    """

    def __init__(self, points: list[tuple[float, ...]], height_limit: int, rng: np.random.Generator):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.size: list[int] = []
        self._grow(points, 0, height_limit, rng)

    def _grow(self, points, depth, limit, rng) -> int:
        node = len(self.size)
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.size.append(len(points))
        if depth >= limit or len(points) <= 1:
            return node
        q = int(rng.integers(len(points[0])))
        col = [p[q] for p in points]
        lo, hi = min(col), max(col)
        if lo == hi:
            return node
        split = float(rng.uniform(lo, hi))
        self.feature[node] = q
        self.threshold[node] = split
        self.left[node] = self._grow([p for p in points if p[q] < split], depth + 1, limit, rng)
        self.right[node] = self._grow([p for p in points if p[q] >= split], depth + 1, limit, rng)
        return node

    def path_length(self, x: tuple[float, ...]) -> float:
        node, depth = 0, 0
        while self.feature[node] >= 0:
            q = self.feature[node]
            node = self.left[node] if x[q] < self.threshold[node] else self.right[node]
            depth += 1
        return depth + average_path_length(self.size[node])


class IsolationForest:
    """Isolation forest with a contamination-quantile outlier threshold.

    ``score`` is the usual anomaly score ``2 ** (-E[h(x)] / c(psi))``. After
    ``fit``, points scoring above the ``1 - contamination`` quantile of the
    training scores are outliers.
    """

    def __init__(self, n_trees=100, max_samples=256, contamination=0.01, seed=0):
        if not 0.0 < contamination < 0.5:
            raise ValueError("contamination must be in (0, 0.5)")
        self.n_trees = n_trees
        self.max_samples = max_samples
        self.contamination = contamination
        self.seed = seed

    def fit(self, X):
        pts = _points(X)
        n = len(pts)
        if n < 1:
            raise ValueError("cannot fit on an empty window")
        rng = np.random.default_rng(self.seed)
        self.psi_ = min(n, self.max_samples)
        limit = math.ceil(math.log2(self.psi_)) if self.psi_ > 1 else 0
        self.subsamples_ = []
        self.trees_ = []
        for _ in range(self.n_trees):
            idx = np.sort(rng.choice(n, self.psi_, replace=False))
            sub = [pts[i] for i in idx]
            self.subsamples_.append(sub)
            self.trees_.append(IsolationTree(sub, limit, rng))
        self.train_scores_ = self.score(pts)
        self.threshold_ = float(np.quantile(self.train_scores_, 1.0 - self.contamination))
        return self

    def mean_path_length(self, X) -> np.ndarray:
        pts = _points(X)
        return np.array([sum(t.path_length(p) for t in self.trees_) / len(self.trees_) for p in pts])

    def score(self, X) -> np.ndarray:
        c = average_path_length(self.psi_)
        h = self.mean_path_length(X)
        if c == 0.0:
            return np.full(len(h), 0.5)
        return 2.0 ** (-h / c)

    def is_outlier(self, X) -> np.ndarray:
        return self.score(X) > self.threshold_


def _points(X) -> list[tuple[float, ...]]:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    return [tuple(row) for row in X.tolist()]
