"""Clustering and dimensionality-reduction estimators.

Small, exact implementations sized for pixel features (d <= 3). They follow
the scikit-learn estimator protocol so they compose with pipelines and
``get_params``/``set_params``, but keep the determinism guarantees the
segmentation stage relies on: a fixed ``seed`` gives bit-identical output.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .validation import check_features

# relative slack for the Lloyd monotonicity check (float summation order)
_INERTIA_RTOL = 1e-9


def _sq_distances(X: np.ndarray, centers: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - centers[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def _kmeans_plusplus(X, weights, k, rng) -> np.ndarray:
    n = X.shape[0]
    first = rng.choice(n, p=weights / weights.sum())
    centers = [X[first]]
    closest = _sq_distances(X, X[first][None, :])[:, 0]
    for _ in range(1, k):
        mass = weights * closest
        total = mass.sum()
        if total > 0:
            idx = rng.choice(n, p=mass / total)
        else:
            # every point coincides with a chosen center
            idx = rng.choice(n, p=weights / weights.sum())
        centers.append(X[idx])
        closest = np.minimum(closest, _sq_distances(X, X[idx][None, :])[:, 0])
    return np.array(centers)


class KMeans(ClusterMixin, BaseEstimator):
    """Lloyd's k-means with k-means++ seeding.

    Parameters
    ----------
    n_clusters : int
        Number of clusters ``k``; must not exceed the sample count.
    seed : int
        Seed for the k-means++ initialisation.
    max_iter : int
        Upper bound on Lloyd iterations. Iteration stops earlier once the
        assignments no longer change.

    Attributes
    ----------
    cluster_centers_ : ndarray of shape (k, d)
    labels_ : ndarray of shape (n,)
        Index of the nearest center for every sample (ties go to the lowest
        index).
    inertia_ : float
        Weighted sum of squared distances to the assigned centers.
    inertia_history_ : list of float
        Inertia after every assignment step; non-increasing.
    n_iter_ : int
    """

    def __init__(self, n_clusters: int = 5, seed: int = 0, max_iter: int = 100):
        self.n_clusters = n_clusters
        self.seed = seed
        self.max_iter = max_iter

    def fit(self, X, y=None, sample_weight=None):
        X = check_features(X, name="X")
        n = X.shape[0]
        k = int(self.n_clusters)
        if k < 1:
            raise ValueError("n_clusters must be >= 1")
        if k > n:
            raise ValueError(f"n_clusters={k} exceeds number of samples {n}")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if sample_weight is None:
            weights = np.ones(n)
        else:
            weights = np.asarray(sample_weight, dtype=np.float64)
            if weights.shape != (n,) or np.any(weights <= 0):
                raise ValueError("sample_weight must be positive with one entry per sample")

        rng = np.random.default_rng(self.seed)
        centers = _kmeans_plusplus(X, weights, k, rng)
        dist = _sq_distances(X, centers)
        labels = np.argmin(dist, axis=1)
        history = [float(np.sum(weights * dist[np.arange(n), labels]))]

        n_iter = 0
        for n_iter in range(1, self.max_iter + 1):
            centers, labels = self._update(X, weights, labels, centers, k)
            dist = _sq_distances(X, centers)
            new_labels = np.argmin(dist, axis=1)
            inertia = float(np.sum(weights * dist[np.arange(n), new_labels]))
            assert inertia <= history[-1] * (1 + _INERTIA_RTOL) + 1e-12, "k-means inertia increased"
            history.append(inertia)
            converged = np.array_equal(new_labels, labels)
            labels = new_labels
            if converged:
                break

        self.cluster_centers_ = centers
        self.labels_ = labels
        self.inertia_ = history[-1]
        self.inertia_history_ = history
        self.n_iter_ = n_iter
        return self

    @staticmethod
    def _update(X, weights, labels, centers, k):
        """Weighted means per cluster, refilling empty clusters first.

        An empty cluster takes over the sample farthest from its current
        center; donor clusters must keep at least one member. Samples that
        already sit on their center are never moved, so data with fewer
        distinct points than ``k`` leaves the surplus clusters empty.
        """
        labels = labels.copy()
        counts = np.bincount(labels, minlength=k)
        if np.any(counts == 0):
            own = _sq_distances(X, centers)[np.arange(X.shape[0]), labels]
            for j in np.flatnonzero(counts == 0):
                candidates = np.flatnonzero((counts[labels] > 1) & (own > 0))
                if candidates.size == 0:
                    break
                p = candidates[np.argmax(own[candidates])]
                counts[labels[p]] -= 1
                labels[p] = j
                counts[j] += 1
                own[p] = 0.0
        new_centers = centers.copy()
        wsum = np.bincount(labels, weights=weights, minlength=k)
        for dim in range(X.shape[1]):
            acc = np.bincount(labels, weights=weights * X[:, dim], minlength=k)
            nonempty = wsum > 0
            new_centers[nonempty, dim] = acc[nonempty] / wsum[nonempty]
        return new_centers, labels

    def predict(self, X):
        check_is_fitted(self, "cluster_centers_")
        X = check_features(X, name="X")
        if X.shape[1] != self.cluster_centers_.shape[1]:
            raise ValueError("feature dimension does not match the fitted centers")
        return np.argmin(_sq_distances(X, self.cluster_centers_), axis=1)


class PCA(TransformerMixin, BaseEstimator):
    """Principal component analysis keeping a target share of the variance.

    Components come from a dense eigendecomposition of the covariance
    matrix. The smallest number of components whose cumulative explained
    variance ratio reaches ``variance_target`` is retained (at least one).
    Constant data keeps a single component with ratio 1.
    """

    def __init__(self, variance_target: float = 0.95):
        self.variance_target = variance_target

    def fit(self, X, y=None):
        if not 0 < self.variance_target <= 1:
            raise ValueError("variance_target must lie in (0, 1]")
        X = check_features(X, min_samples=2, name="X")
        n, d = X.shape
        self.mean_ = X.mean(axis=0)
        centered = X - self.mean_
        cov = centered.T @ centered / (n - 1)
        eigvals, eigvecs = np.linalg.eigh(cov)
        order = np.argsort(eigvals, kind="stable")[::-1]
        eigvals = np.clip(eigvals[order], 0.0, None)
        eigvecs = eigvecs[:, order].T
        # deterministic sign: largest-magnitude loading is positive
        pivots = np.argmax(np.abs(eigvecs), axis=1)
        eigvecs *= np.sign(eigvecs[np.arange(d), pivots])[:, None]

        total = eigvals.sum()
        if total <= 0:
            ratios = np.zeros(d)
            ratios[0] = 1.0
        else:
            ratios = eigvals / total
        cumulative = np.cumsum(ratios)
        m = int(np.searchsorted(cumulative, self.variance_target - 1e-12) + 1)
        m = min(max(m, 1), d)

        self.components_ = eigvecs[:m]
        self.explained_variance_ = eigvals[:m]
        self.explained_variance_ratio_ = ratios[:m]
        self.full_explained_variance_ratio_ = ratios
        self.n_components_ = m
        self.n_features_in_ = d
        return self

    def transform(self, X):
        check_is_fitted(self, "components_")
        X = check_features(X, name="X")
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return (X - self.mean_) @ self.components_.T

    def inverse_transform(self, X):
        check_is_fitted(self, "components_")
        X = check_features(X, name="X")
        if X.shape[1] != self.n_components_:
            raise ValueError(f"expected {self.n_components_} components, got {X.shape[1]}")
        return X @ self.components_ + self.mean_


class MinMaxScaler(TransformerMixin, BaseEstimator):
    """Per-feature affine map of the observed ``[min, max]`` onto ``[0, 1]``.

    A constant feature maps to 0 and inverts back to its constant value.
    """

    def fit(self, X, y=None):
        X = check_features(X, name="X")
        self.data_min_ = X.min(axis=0)
        self.data_max_ = X.max(axis=0)
        self.data_range_ = self.data_max_ - self.data_min_
        self.n_features_in_ = X.shape[1]
        return self

    def _check(self, X):
        check_is_fitted(self, "data_min_")
        X = check_features(X, name="X")
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return X

    def transform(self, X):
        X = self._check(X)
        live = self.data_range_ > 0
        out = np.zeros_like(X)
        out[:, live] = (X[:, live] - self.data_min_[live]) / self.data_range_[live]
        return out

    def inverse_transform(self, X):
        X = self._check(X)
        return X * self.data_range_ + self.data_min_


def coordinatewise_median(points) -> np.ndarray:
    """Per-dimension median; an even count averages the two middle values."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("coordinatewise_median needs a non-empty (n, d) matrix")
    return np.median(pts, axis=0)
