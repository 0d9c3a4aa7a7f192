"""Centroid clustering driven by any optimizer in the package.

A candidate solution is a flattened ``k x d`` centroid matrix; its fitness is
the sum of squared Euclidean distances from each point to its nearest
centroid. Data is min-max normalized to ``[0, 1]`` first, so the search box
is the unit hypercube.
"""

import csv
import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .baselines import OPTIMIZERS, make_optimizer
from .core import SearchSpace
from .rng import check_rng

__all__ = [
    "Dataset",
    "load_csv",
    "normalize_minmax",
    "synthetic_blobs",
    "encode",
    "decode",
    "sse_fitness",
    "assign",
    "SSEObjective",
    "ClusteringResult",
    "cluster_optimize",
    "kmeans_baseline",
    "accuracy",
    "CentroidClustering",
]


@dataclass
class Dataset:
    points: np.ndarray
    labels: Optional[np.ndarray] = None
    feature_names: Optional[list] = None

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.points.shape[0] < 1:
            raise ValueError("dataset must contain at least one point")
        if not np.all(np.isfinite(self.points)):
            raise ValueError("all features must be finite")
        if self.labels is not None:
            self.labels = np.asarray(self.labels)
            if self.labels.shape[0] != self.points.shape[0]:
                raise ValueError("labels and points differ in length")

    @property
    def n_points(self):
        return self.points.shape[0]

    @property
    def n_features(self):
        return self.points.shape[1]


def load_csv(path):
    """Read a header-first CSV; a final column named ``label`` becomes the labels."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        has_label = header[-1].lower() == "label"
        names = header[:-1] if has_label else header
        if not names:
            raise ValueError(f"{path}: no feature columns")
        rows, labels = [], []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise ValueError(
                    f"{path}, line {line_no}: expected {len(header)} fields, got {len(row)}"
                )
            try:
                rows.append([float(cell) for cell in row[: len(names)]])
            except ValueError:
                raise ValueError(f"{path}, line {line_no}: non-numeric feature value") from None
            if not all(np.isfinite(rows[-1])):
                raise ValueError(f"{path}, line {line_no}: non-finite feature value")
            if has_label:
                labels.append(row[-1].strip())
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return Dataset(np.array(rows), np.array(labels) if has_label else None, names)


def normalize_minmax(dataset):
    """Scale every column to ``[0, 1]``; constant columns become 0."""
    z = dataset.points
    low = z.min(axis=0)
    span = z.max(axis=0) - low
    safe = np.where(span > 0, span, 1.0)
    scaled = np.where(span > 0, (z - low) / safe, 0.0)
    return Dataset(scaled, dataset.labels, dataset.feature_names)


def synthetic_blobs(k=2, n=6000, d=11, spread=0.05, seed=0):
    """Labelled isotropic Gaussian blobs with centers in ``[0.2, 0.8]^d``.

    Points are split as evenly as possible across the ``k`` blobs.
    """
    rng = np.random.default_rng(seed)
    centers = 0.2 + 0.6 * rng.random((k, d))
    sizes = np.full(k, n // k)
    sizes[: n % k] += 1
    labels = np.repeat(np.arange(k), sizes)
    points = centers[labels] + spread * rng.standard_normal((n, d))
    names = [f"f{j + 1}" for j in range(d)]
    return Dataset(points, labels, names), centers


def encode(centroids):
    """Row-major flattening of a ``k x d`` centroid matrix."""
    return np.asarray(centroids, dtype=float).reshape(-1).copy()


def decode(fsv, k, d):
    fsv = np.asarray(fsv, dtype=float)
    if fsv.shape[-1] != k * d:
        raise ValueError(f"expected a vector of length k*d = {k * d}, got {fsv.shape[-1]}")
    return fsv.reshape(fsv.shape[:-1] + (k, d))


def _squared_distances(points, centroids):
    """``(..., N, k)`` squared distances for centroid stacks of shape ``(..., k, d)``."""
    diff = points[..., :, None, :] - centroids[..., None, :, :]
    return np.sum(diff * diff, axis=-1)


def sse_fitness(points, centroids):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    centroids = np.atleast_2d(np.asarray(centroids, dtype=float))
    if points.shape[0] == 0:
        raise ValueError("empty dataset")
    if points.shape[1] != centroids.shape[1]:
        raise ValueError("points and centroids differ in dimension")
    return float(np.sum(_squared_distances(points, centroids).min(axis=1)))


def assign(points, centroids):
    """Index of the nearest centroid per point; ties go to the lowest index."""
    return np.argmin(_squared_distances(np.asarray(points, float), np.asarray(centroids, float)),
                     axis=1)


class SSEObjective:
    """Vectorized clustering objective over flattened centroid sets."""

    vectorized = True

    def __init__(self, points, k):
        self.points = np.asarray(points, dtype=float)
        self.k = k
        self.d = self.points.shape[1]
        self._norms = np.sum(self.points**2, axis=1)

    def __call__(self, fsv):
        fsv = np.asarray(fsv, dtype=float)
        single = fsv.ndim == 1
        centroids = decode(np.atleast_2d(fsv), self.k, self.d)
        # |x - c|^2 = |x|^2 - 2 x.c + |c|^2, one matrix product for all centroids
        cross = np.einsum("nd,Nkd->Nnk", self.points, centroids, optimize=True)
        dist = self._norms[None, :, None] - 2.0 * cross + np.sum(centroids**2, axis=-1)[:, None, :]
        best = np.maximum(dist.min(axis=-1), 0.0)
        values = best.sum(axis=-1)
        return float(values[0]) if single else values


@dataclass
class ClusteringResult:
    centroids: np.ndarray
    labels: np.ndarray
    fitness: float
    history: np.ndarray


def _check_k(k, n):
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > n:
        raise ValueError(f"k = {k} exceeds the number of points ({n})")


def cluster_optimize(dataset, k, optimizer_name="mdbo", params=None, random_state=None):
    """Minimize the SSE over centroid sets in ``[0, 1]^(k*d)`` with a metaheuristic.

    ``dataset`` is expected to be normalized already.
    """
    points = dataset.points if isinstance(dataset, Dataset) else np.asarray(dataset, float)
    _check_k(k, points.shape[0])
    optimizer = make_optimizer(optimizer_name, random_state=random_state, **(params or {}))
    objective = SSEObjective(points, k)
    trace = optimizer.minimize(objective, SearchSpace.box(k * points.shape[1], 0.0, 1.0))
    centroids = decode(trace.best_fsv, k, points.shape[1])
    return ClusteringResult(centroids, assign(points, centroids), trace.best_mdsi,
                            trace.best_per_iteration)


def kmeans_baseline(dataset, k, random_state=None, max_iters=300, init=None):
    """Lloyd's algorithm from ``k`` distinct random points (or ``init``).

    A cluster left empty is reseeded at the point farthest from its current
    centroid. ``history`` holds the SSE after every assignment step.
    """
    points = dataset.points if isinstance(dataset, Dataset) else np.asarray(dataset, float)
    n = points.shape[0]
    _check_k(k, n)
    rng = check_rng(random_state)
    if init is None:
        centroids = points[np.argsort(rng.uniform(n))[:k]].copy()
    else:
        centroids = np.array(init, dtype=float, copy=True)

    labels = None
    history = []
    for _ in range(max(max_iters, 1)):
        dist = _squared_distances(points, centroids)
        new_labels = np.argmin(dist, axis=1)
        history.append(float(dist[np.arange(n), new_labels].sum()))
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            members = labels == j
            if members.any():
                centroids[j] = points[members].mean(axis=0)
            else:
                far = int(np.argmax(dist[np.arange(n), labels]))
                centroids[j] = points[far]
                labels[far] = j
                dist[far] = 0.0
    labels = assign(points, centroids)
    return ClusteringResult(centroids, labels, sse_fitness(points, centroids), np.array(history))


def _contingency(assignment, labels):
    clusters, cluster_idx = np.unique(assignment, return_inverse=True)
    classes, class_idx = np.unique(labels, return_inverse=True)
    table = np.zeros((clusters.size, classes.size), dtype=np.int64)
    np.add.at(table, (cluster_idx, class_idx), 1)
    return table


def accuracy(assignment, labels, max_exhaustive=8):
    """Fraction of points whose cluster maps to their true label.

    With at most ``max_exhaustive`` clusters and classes, clusters map
    one-to-one onto labels through the best of all permutations; beyond that
    each cluster takes its majority label.
    """
    if labels is None:
        raise ValueError("accuracy needs ground-truth labels")
    assignment = np.asarray(assignment)
    labels = np.asarray(labels)
    if assignment.shape != labels.shape:
        raise ValueError("assignment and labels differ in length")
    table = _contingency(assignment, labels)
    n_clusters, n_classes = table.shape
    if max(n_clusters, n_classes) > max_exhaustive:
        return float(table.max(axis=1).sum() / labels.size)
    size = max(n_clusters, n_classes)
    square = np.zeros((size, size), dtype=np.int64)
    square[:n_clusters, :n_classes] = table
    rows = np.arange(size)
    best = max(square[rows, list(perm)].sum() for perm in itertools.permutations(range(size)))
    return float(best / labels.size)


class CentroidClustering(ClusterMixin, TransformerMixin, BaseEstimator):
    """Scikit-learn style clusterer minimizing the SSE.

    Parameters
    ----------
    n_clusters : int, default=2
    optimizer : str, default="mdbo"
        Any registered optimizer name, or ``"kmeans"`` for Lloyd's algorithm.
    optimizer_params : dict, optional
        Extra keyword arguments for the optimizer.
    normalize : bool, default=True
        Min-max scale features with the statistics of the training data.
    random_state : int or None

    Attributes
    ----------
    cluster_centers_ : ndarray of shape (n_clusters, n_features)
        Centers in the (possibly normalized) feature space.
    labels_ : ndarray of shape (n_samples,)
    inertia_ : float
        SSE of the training data.
    history_ : ndarray
        Best SSE per iteration.
    """

    def __init__(self, n_clusters=2, optimizer="mdbo", optimizer_params=None, normalize=True,
                 random_state=None):
        self.n_clusters = n_clusters
        self.optimizer = optimizer
        self.optimizer_params = optimizer_params
        self.normalize = normalize
        self.random_state = random_state

    def _scale(self, X):
        if not self.normalize:
            return X
        return np.where(self.scale_ > 0, (X - self.min_) / np.where(self.scale_ > 0, self.scale_, 1),
                        0.0)

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        self.n_features_in_ = X.shape[1]
        self.min_ = X.min(axis=0)
        self.scale_ = X.max(axis=0) - self.min_
        Z = self._scale(X)
        if self.optimizer == "kmeans":
            result = kmeans_baseline(Z, self.n_clusters, random_state=self.random_state)
        elif self.optimizer in OPTIMIZERS:
            result = cluster_optimize(Z, self.n_clusters, self.optimizer,
                                      self.optimizer_params, self.random_state)
        else:
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        self.cluster_centers_ = result.centroids
        self.labels_ = result.labels
        self.inertia_ = result.fitness
        self.history_ = result.history
        return self

    def predict(self, X):
        check_is_fitted(self, "cluster_centers_")
        X = check_array(X, dtype=float)
        return assign(self._scale(X), self.cluster_centers_)

    def transform(self, X):
        """Euclidean distance of every sample to every center."""
        check_is_fitted(self, "cluster_centers_")
        X = check_array(X, dtype=float)
        return np.sqrt(_squared_distances(self._scale(X), self.cluster_centers_))
