"""Cluster validity: silhouette score, ink-count sweep, label agreement."""
from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist, pdist, squareform

from .kmeans import _as_samples, kmeans


class UndefinedScoreError(ValueError):
    pass


def silhouette(X, labels, chunk: int = 1024) -> float:
    """Mean silhouette over samples.

    a = mean distance to the rest of the own cluster, b = smallest mean
    distance to another cluster, s = (b - a) / max(a, b). Samples in
    singleton clusters, and samples with a == b == 0, contribute 0.
    """
    X = _as_samples(X)
    labels = np.asarray(labels)
    if len(labels) != len(X):
        raise ValueError("labels and samples differ in length")
    parts = [
        _silhouette_parts(cdist(X[start : start + chunk], X, "euclidean"), labels, start)
        for start in range(0, len(X), chunk)
    ]
    return float(np.concatenate(parts).mean())


def silhouette_from_distances(D: np.ndarray, labels) -> float:
    """Silhouette from a precomputed (n, n) Euclidean distance matrix."""
    return float(_silhouette_parts(np.asarray(D), np.asarray(labels), 0).mean())


def _silhouette_parts(D: np.ndarray, labels: np.ndarray, offset: int) -> np.ndarray:
    """Per-sample silhouette for rows ``offset .. offset + len(D)``."""
    uniq, lab = np.unique(labels, return_inverse=True)
    if len(uniq) < 2:
        raise UndefinedScoreError("silhouette needs at least two clusters")
    k = len(uniq)
    n = len(labels)
    counts = np.bincount(lab, minlength=k).astype(np.float64)
    onehot = np.zeros((n, k))
    onehot[np.arange(n), lab] = 1.0

    # einsum keeps the reduction off BLAS (thread-count independent)
    sums = np.einsum("ij,jk->ik", D, onehot)
    own = lab[offset : offset + len(D)]
    idx = np.arange(len(D))
    own_n = counts[own]
    with np.errstate(divide="ignore", invalid="ignore"):
        a = sums[idx, own] / (own_n - 1)
        means = sums / counts
    means[idx, own] = np.inf
    b = means.min(axis=1)
    denom = np.maximum(a, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        part = np.where(denom > 0, (b - a) / denom, 0.0)
    part[own_n == 1] = 0.0
    return part


def estimate_ink_count(
    X,
    k_min: int = 2,
    k_max: int = 10,
    seed: int = 0,
    n_init: int = 10,
    sample_size: int | None = 4000,
    max_iter: int = 300,
    tol: float = 1e-6,
) -> tuple[int, dict[int, float]]:
    """Choose k in [k_min, k_max] by the silhouette of a k-means partition.

    k-means always runs on every sample; the silhouette is scored on a seeded
    uniform subsample of ``sample_size`` points when there are more (it is
    quadratic in n). A partition that collapses to one cluster scores 0.
    Ties go to the smallest k.
    """
    X = _as_samples(X)
    n = len(X)
    if not 2 <= k_min <= k_max <= n - 1:
        raise ValueError(f"need 2 <= k_min <= k_max <= n - 1 = {n - 1}, got [{k_min}, {k_max}]")
    rng = np.random.default_rng(seed)
    if sample_size is not None and n > sample_size:
        subset = np.sort(rng.choice(n, size=sample_size, replace=False))
    else:
        subset = np.arange(n)

    D = squareform(pdist(X[subset], "euclidean"))
    scores: dict[int, float] = {}
    for k in range(k_min, k_max + 1):
        result = kmeans(X, k, seed=seed, n_init=n_init, max_iter=max_iter, tol=tol)
        lab = result.labels[subset]
        if len(np.unique(lab)) < 2:
            scores[k] = 0.0
        else:
            scores[k] = silhouette_from_distances(D, lab)
    best = max(scores.values())
    k_best = min(k for k, v in scores.items() if v == best)
    return k_best, scores


def label_agreement(predicted, truth) -> float:
    """Fraction of matching labels under the best one-to-one relabeling."""
    predicted = np.asarray(predicted).ravel()
    truth = np.asarray(truth).ravel()
    if predicted.shape != truth.shape:
        raise ValueError("label arrays differ in size")
    if predicted.size == 0:
        return 1.0
    p_vals, p = np.unique(predicted, return_inverse=True)
    t_vals, t = np.unique(truth, return_inverse=True)
    confusion = np.zeros((len(p_vals), len(t_vals)), dtype=np.int64)
    np.add.at(confusion, (p, t), 1)
    rows, cols = linear_sum_assignment(-confusion)
    return float(confusion[rows, cols].sum() / predicted.size)


def nearest_centroid_labels(X, centroids) -> np.ndarray:
    X = _as_samples(X)
    return np.argmin(cdist(X, np.asarray(centroids, dtype=np.float64), "sqeuclidean"), axis=1)


def cluster_centroids(X, labels, k: int) -> np.ndarray:
    X = _as_samples(X)
    labels = np.asarray(labels)
    C = np.zeros((k, X.shape[1]))
    np.add.at(C, labels, X)
    counts = np.bincount(labels, minlength=k)
    return C / np.maximum(counts, 1)[:, None]
