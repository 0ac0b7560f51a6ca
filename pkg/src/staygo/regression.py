"""Event-probability estimators fit on experience entries.

Three regressors on {0, 1} targets (ordinary least squares, a CART
regression tree and conjugate Bayesian linear regression) plus the
feature encoding that maps (waypoint, hour) to a design row.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .world import HOURS, MissionPlan

KINDS = ("linear", "tree", "bayesian")
RIDGE_JITTER = 1e-8


class FeatureEncoder:
    """Encode (waypoint id, hour) as a feature row.

    ``mode="coords"`` gives (x_norm, y_norm, sin h, cos h, h/24) with the
    coordinates min-max scaled over the plan's bounding box. ``mode="id"``
    replaces the two coordinates with the waypoint's position in the plan,
    scaled to [0, 1].
    """

    def __init__(self, plan: MissionPlan, mode: str = "coords"):
        if mode not in ("coords", "id"):
            raise ValueError(f"unknown feature mode {mode!r}")
        self.mode = mode
        wps = plan.interior
        self.ids = np.array([w.id for w in wps])
        self._col = {w.id: i for i, w in enumerate(wps)}
        if mode == "coords":
            xy = np.array([(w.x, w.y) for w in wps], dtype=np.float64)
            lo, hi = xy.min(axis=0), xy.max(axis=0)
            span = np.where(hi > lo, hi - lo, 1.0)
            self._spatial = (xy - lo) / span
        else:
            n = len(wps)
            self._spatial = (np.arange(n, dtype=np.float64) / max(n - 1, 1))[:, None]

    @property
    def n_features(self) -> int:
        return self._spatial.shape[1] + 3

    def encode(self, wp_ids: Sequence[int], hours: Sequence[int]) -> np.ndarray:
        cols = np.array([self._col[w] for w in wp_ids], dtype=np.int64)
        h = np.asarray(hours, dtype=np.float64)
        angle = 2.0 * math.pi * h / HOURS
        hour_feats = np.column_stack([np.sin(angle), np.cos(angle), h / HOURS])
        return np.hstack([self._spatial[cols].reshape(len(cols), -1), hour_feats])

    def grid(self) -> np.ndarray:
        """Rows for every (interior waypoint, hour), waypoint-major."""
        ids = np.repeat(self.ids, HOURS)
        hours = np.tile(np.arange(HOURS), len(self.ids))
        return self.encode(ids, hours)


class NoKnowledge:
    """Stand-in estimator before any experience exists; predicts NaN."""

    kind = "none"
    known = False

    def predict(self, X) -> np.ndarray:
        return np.full(len(np.atleast_2d(X)), np.nan)


class _Estimator:
    kind = ""
    known = True

    def predict(self, X) -> np.ndarray:
        return np.clip(self.predict_raw(X), 0.0, 1.0)


def _design(X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    return np.hstack([np.ones((len(X), 1)), X])


def _solve_normal(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    if np.linalg.matrix_rank(A) < A.shape[0]:
        A = A + RIDGE_JITTER * np.eye(A.shape[0])
    return np.linalg.solve(A, b)


class LinearEstimator(_Estimator):
    """Ordinary least squares with an intercept."""

    kind = "linear"

    def fit(self, X, y):
        D = _design(X)
        y = np.asarray(y, dtype=np.float64)
        self.coef_ = _solve_normal(D.T @ D, D.T @ y)
        return self

    def predict_raw(self, X) -> np.ndarray:
        return _design(X) @ self.coef_


class BayesianEstimator(_Estimator):
    """Bayesian linear regression, normal-inverse-gamma conjugate prior.

    Prior: w | s2 ~ N(0, s2 * I / prior_strength), s2 ~ IG(a0, b0), with a
    flat prior on the intercept so a constant target is fit exactly. The
    prediction is the posterior predictive mean x . m_n; ``a_n``/``b_n`` set
    the predictive spread.
    """

    kind = "bayesian"

    def __init__(self, prior_strength: float = 1.0, a0: float = 1.0, b0: float = 1.0):
        self.prior_strength = prior_strength
        self.a0 = a0
        self.b0 = b0

    def fit(self, X, y):
        D = _design(X)
        y = np.asarray(y, dtype=np.float64)
        prior = self.prior_strength * np.eye(D.shape[1])
        prior[0, 0] = 0.0
        precision = D.T @ D + prior
        self.coef_ = _solve_normal(precision, D.T @ y)
        self.precision_ = precision
        self.a_n = self.a0 + len(y) / 2.0
        self.b_n = self.b0 + 0.5 * float(y @ y - self.coef_ @ precision @ self.coef_)
        return self

    def predict_raw(self, X) -> np.ndarray:
        return _design(X) @ self.coef_

    def predictive_variance(self, X) -> np.ndarray:
        D = _design(X)
        sol = np.linalg.solve(self.precision_, D.T)
        scale = self.b_n / self.a_n * (1.0 + np.einsum("ij,ji->i", D, sol))
        dof = 2.0 * self.a_n
        return scale * dof / (dof - 2.0) if dof > 2 else np.full(len(D), np.inf)


class TreeEstimator(_Estimator):
    """CART regression tree with squared-error (variance reduction) splits.

    Thresholds are midpoints between consecutive distinct values. Among
    equally good splits the lowest feature index wins, then the smallest
    threshold. Duplicate feature rows are merged into weighted rows before
    growing, which gives the same tree as the raw samples.
    """

    kind = "tree"

    def __init__(self, min_leaf: int = 5, max_depth: int = 12):
        self.min_leaf = min_leaf
        self.max_depth = max_depth

    def fit(self, X, y):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        y = np.asarray(y, dtype=np.float64)
        if len(X) == 0:
            raise ValueError("cannot fit a tree on no samples")
        rows, inverse = np.unique(X, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        w = np.bincount(inverse, minlength=len(rows)).astype(np.float64)
        s = np.bincount(inverse, weights=y, minlength=len(rows))
        self.feature_: list[int] = []
        self.threshold_: list[float] = []
        self.left_: list[int] = []
        self.right_: list[int] = []
        self.value_: list[float] = []
        self.n_samples_: list[float] = []
        order = np.argsort(rows, axis=0, kind="stable").T  # (n_features, n_rows)
        self._rows, self._w, self._s = rows, w, s
        self._grow(order, 0)
        del self._rows, self._w, self._s
        for name in ("feature_", "threshold_", "left_", "right_", "value_", "n_samples_"):
            setattr(self, name, np.array(getattr(self, name)))
        return self

    def _grow(self, order: np.ndarray, depth: int) -> int:
        # order: per-feature row indices of this node, each sorted by that feature
        idx = order[0]
        w_tot = self._w[idx].sum()
        s_tot = self._s[idx].sum()
        node = len(self.value_)
        self.feature_.append(-1)
        self.threshold_.append(np.nan)
        self.left_.append(-1)
        self.right_.append(-1)
        self.value_.append(s_tot / w_tot)
        self.n_samples_.append(w_tot)
        if depth >= self.max_depth or w_tot < 2 * self.min_leaf or len(idx) < 2:
            return node
        if s_tot == 0.0 or s_tot == w_tot:
            return node  # pure 0/1 node: no split can reduce the error
        split = self._best_split(order, w_tot, s_tot)
        if split is None:
            return node
        f, thr = split
        go_left = self._rows[:, f] <= thr
        mask = go_left[order]
        n_left = int(mask[0].sum())
        left = order[mask].reshape(len(order), n_left)
        right = order[~mask].reshape(len(order), len(idx) - n_left)
        self.feature_[node] = f
        self.threshold_[node] = thr
        self.left_[node] = self._grow(left, depth + 1)
        self.right_[node] = self._grow(right, depth + 1)
        return node

    def _best_split(self, order, w_tot, s_tot):
        n_feat = order.shape[0]
        xs = self._rows[order, np.arange(n_feat)[:, None]]
        cw = np.cumsum(self._w[order], axis=1)[:, :-1]
        cs = np.cumsum(self._s[order], axis=1)[:, :-1]
        valid = (
            (xs[:, :-1] < xs[:, 1:])
            & (cw >= self.min_leaf)
            & (w_tot - cw >= self.min_leaf)
        )
        cand = np.flatnonzero(valid)  # (feature, position) order
        if cand.size == 0:
            return None
        cw, cs = cw.ravel()[cand], cs.ravel()[cand]
        score = cs**2 / cw + (s_tot - cs) ** 2 / (w_tot - cw)
        best = score.max()
        gain = best - s_tot**2 / w_tot
        tol = 1e-12 * max(1.0, abs(best))
        if not gain > tol:
            return None
        # first candidate within rounding of the max
        first = cand[np.flatnonzero(score >= best - tol)[0]]
        f, pos = divmod(int(first), valid.shape[1])
        thr = 0.5 * (xs[f, pos] + xs[f, pos + 1])
        return int(f), float(thr)

    def apply(self, X) -> np.ndarray:
        """Leaf index reached by each row."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        node = np.zeros(len(X), dtype=np.int64)
        while True:
            f = self.feature_[node]
            inner = f >= 0
            if not inner.any():
                return node
            i = np.flatnonzero(inner)
            n = node[i]
            left = X[i, f[inner]] <= self.threshold_[n]
            node[i] = np.where(left, self.left_[n], self.right_[n])

    def predict_raw(self, X) -> np.ndarray:
        return self.value_[self.apply(X)]


def make_estimator(kind: str, **params):
    if kind == "linear":
        return LinearEstimator(**params)
    if kind == "tree":
        return TreeEstimator(**params)
    if kind == "bayesian":
        return BayesianEstimator(**params)
    raise ValueError(f"unknown estimator kind {kind!r}; expected one of {KINDS}")


def fit(kind: str, X, y, **params):
    """Fit an estimator of ``kind``; no samples gives :class:`NoKnowledge`."""
    X = np.asarray(X, dtype=np.float64)
    if X.size == 0 or len(X) == 0:
        make_estimator(kind, **params)  # validate kind even when empty
        return NoKnowledge()
    return make_estimator(kind, **params).fit(X, y)
