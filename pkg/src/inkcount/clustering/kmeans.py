"""Lloyd's k-means with k-means++ seeding and seeded restarts."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.spatial.distance import cdist


class InvalidKError(ValueError):
    pass


@dataclass
class HardClusterResult:
    k: int
    centroids: np.ndarray
    labels: np.ndarray
    objective: float
    iterations: int
    converged: bool
    trace: list[float] = field(default_factory=list)


def _as_samples(X) -> np.ndarray:
    X = np.asarray(getattr(X, "values", X), dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("samples must be a non-empty 2-D array")
    if not np.isfinite(X).all():
        raise ValueError("samples contain NaN or Inf")
    return X


def sq_distances(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    # cdist sums (x - c)^2 in a fixed sequential order: deterministic, no BLAS
    return cdist(X, C, "sqeuclidean")


def assign(X: np.ndarray, C: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest-centroid labels (ties -> lowest index) and squared distances."""
    d2 = sq_distances(X, C)
    labels = np.argmin(d2, axis=1)
    return labels, d2[np.arange(len(X)), labels]


def objective(X: np.ndarray, C: np.ndarray, labels: np.ndarray) -> float:
    diff = X - C[labels]
    return float(np.einsum("ij,ij->", diff, diff))


def kmeans_plusplus(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(X)
    chosen = [int(rng.integers(n))]
    closest = sq_distances(X, X[chosen]).ravel()
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
            # guard against landing on a zero-weight point through rounding
            while closest[idx] == 0:
                idx = (idx + 1) % n
        else:
            unused = np.setdiff1d(np.arange(n), chosen)
            idx = int(unused[0]) if len(unused) else int(rng.integers(n))
        chosen.append(idx)
        closest = np.minimum(closest, sq_distances(X, X[idx : idx + 1]).ravel())
    return X[chosen].copy()


def cluster_sums(X: np.ndarray, labels: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-cluster coordinate sums and counts."""
    n = len(X)
    onehot = sparse.csr_matrix((np.ones(n), (labels, np.arange(n))), shape=(k, n))
    return np.asarray(onehot @ X), np.bincount(labels, minlength=k)


def _update(X, labels, k, point_d2):
    C, counts = cluster_sums(X, labels, k)
    nonempty = counts > 0
    C[nonempty] /= counts[nonempty, None]
    empty = np.flatnonzero(~nonempty)
    if len(empty):
        # re-seed each empty cluster at the point farthest from its centroid
        order = np.argsort(-point_d2, kind="stable")
        for j, idx in zip(empty, order):
            C[j] = X[idx]
    return C


def lloyd(X: np.ndarray, C: np.ndarray, max_iter: int = 300, tol: float = 1e-6) -> HardClusterResult:
    """Run Lloyd iterations from initial centroids ``C``.

    ``trace[t]`` is the objective of the t-th labeling against the centroids
    updated from it, so the trace is non-increasing.
    """
    k = len(C)
    rows = np.arange(len(X))
    d2 = sq_distances(X, C)
    labels = np.argmin(d2, axis=1)
    trace = []
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        new_C = _update(X, labels, k, d2[rows, labels])
        d2 = sq_distances(X, new_C)
        trace.append(float(d2[rows, labels].sum()))
        shift = np.sqrt(((new_C - C) ** 2).sum(axis=1)).max()
        C = new_C
        labels = np.argmin(d2, axis=1)
        if shift <= tol:
            converged = True
            break
    return HardClusterResult(
        k=k,
        centroids=C,
        labels=labels,
        objective=float(d2[rows, labels].sum()),
        iterations=it,
        converged=converged,
        trace=trace,
    )


def kmeans(
    X,
    k: int,
    seed: int = 0,
    max_iter: int = 300,
    tol: float = 1e-6,
    n_init: int = 10,
) -> HardClusterResult:
    """Best-of-``n_init`` k-means; the lowest objective wins (first on ties)."""
    X = _as_samples(X)
    n = len(X)
    if not 1 <= k <= n:
        raise InvalidKError(f"k must be in [1, {n}], got {k}")
    if max_iter < 1 or tol < 0 or n_init < 1:
        raise ValueError("need max_iter >= 1, tol >= 0, n_init >= 1")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(n_init):
        result = lloyd(X, kmeans_plusplus(X, k, rng), max_iter=max_iter, tol=tol)
        if best is None or result.objective < best.objective:
            best = result
    return best
