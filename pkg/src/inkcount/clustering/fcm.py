"""Fuzzy c-means by alternating membership / centroid updates."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .kmeans import InvalidKError, _as_samples, sq_distances


@dataclass
class FuzzyClusterResult:
    k: int
    centroids: np.ndarray
    memberships: np.ndarray
    m: float
    objective: float
    iterations: int
    converged: bool
    trace: list[float] = field(default_factory=list)

    @property
    def labels(self) -> np.ndarray:
        """Hard labels: the cluster of highest membership (lowest index on ties)."""
        return np.argmax(self.memberships, axis=1)


def memberships(d2: np.ndarray, m: float) -> np.ndarray:
    """u_ij = 1 / sum_l (d_ij / d_il)^(2/(m-1)), from squared distances.

    A sample lying on a centroid (d == 0) belongs fully to the first such
    centroid.
    """
    d2 = np.asarray(d2, dtype=np.float64)
    u = np.zeros_like(d2)
    zero = d2 == 0
    hit = zero.any(axis=1)
    if hit.any():
        u[np.flatnonzero(hit), np.argmax(zero[hit], axis=1)] = 1.0
    rest = ~hit
    if rest.any():
        # scale each row by its minimum so the powers stay in (0, 1]
        r = d2[rest] / d2[rest].min(axis=1, keepdims=True)
        inv = r ** (-1.0 / (m - 1.0))
        u[rest] = inv / inv.sum(axis=1, keepdims=True)
    return u


def centroids(X: np.ndarray, u: np.ndarray, m: float) -> np.ndarray:
    w = u**m
    # einsum without optimize stays off BLAS, so results do not depend on thread count
    return np.einsum("ij,ik->jk", w, X) / w.sum(axis=0)[:, None]


def fcm_objective(d2: np.ndarray, u: np.ndarray, m: float) -> float:
    return float(((u**m) * d2).sum())


def fcm(
    X,
    k: int,
    m: float = 2.0,
    seed: int = 0,
    max_iter: int = 300,
    tol: float = 1e-5,
    callback: Callable[[int, np.ndarray, np.ndarray], None] | None = None,
) -> FuzzyClusterResult:
    """Fuzzy c-means from a seeded random membership matrix.

    Each iteration computes centroids from the current memberships, then new
    memberships from those centroids; ``trace`` holds the objective at each
    new (memberships, centroids) pair and is non-increasing. Stops when the
    largest membership change is <= ``tol``. ``callback(it, u, C)`` sees every
    iterate.
    """
    X = _as_samples(X)
    n = len(X)
    if not 1 <= k <= n:
        raise InvalidKError(f"k must be in [1, {n}], got {k}")
    if not m > 1:
        raise ValueError(f"fuzziness m must be > 1, got {m}")
    if max_iter < 1 or tol < 0:
        raise ValueError("need max_iter >= 1 and tol >= 0")

    rng = np.random.default_rng(seed)
    u = rng.random((n, k))
    u /= u.sum(axis=1, keepdims=True)

    trace = []
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        C = centroids(X, u, m)
        d2 = sq_distances(X, C)
        new_u = memberships(d2, m)
        trace.append(fcm_objective(d2, new_u, m))
        if callback is not None:
            callback(it, new_u, C)
        change = np.abs(new_u - u).max()
        u = new_u
        if change <= tol:
            converged = True
            break

    return FuzzyClusterResult(
        k=k, centroids=C, memberships=u, m=m, objective=trace[-1],
        iterations=it, converged=converged, trace=trace,
    )
