"""Agglomerative clustering with single, complete and average linkage."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .kmeans import InvalidKError, _as_samples

LINKAGES = ("single", "complete", "average")

# candidate merges this close (relative) to the minimum count as tied; exact
# float equality is not meaningful once average-linkage sums are reordered
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class Merge:
    a: int
    b: int
    distance: float
    size: int


@dataclass(frozen=True)
class Dendrogram:
    """Merge history. Leaves are ids 0..n-1; merge i creates id n+i.

    Each merge stores ``a < b``.
    """

    n_samples: int
    merges: tuple[Merge, ...]
    linkage: str

    def as_array(self) -> np.ndarray:
        """(n-1, 4) array in the scipy ``linkage`` layout."""
        return np.array([[m.a, m.b, m.distance, m.size] for m in self.merges], dtype=np.float64).reshape(-1, 4)


def agglomerative(X, linkage: str = "average") -> Dendrogram:
    """Greedy bottom-up merging of the closest pair of clusters.

    Distances are Euclidean; pairs within ``TIE_RTOL`` of the minimum are
    tied and go to the lexicographically smallest (id_a, id_b). Each active
    cluster caches its nearest neighbour, which only has to be refreshed
    when that neighbour takes part in a merge (all three linkages are
    reducible), giving roughly O(n^2) work.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}; expected one of {LINKAGES}")
    X = _as_samples(X)
    n = len(X)
    if n == 1:
        return Dendrogram(1, (), linkage)

    # for average linkage M holds sums of pairwise distances, not means
    M = squareform(pdist(X, "euclidean"))
    np.fill_diagonal(M, np.inf)
    size = np.ones(n, dtype=np.int64)
    cid = np.arange(n)
    active = np.ones(n, dtype=bool)
    average = linkage == "average"

    def row(i):
        return M[i] / (size[i] * size) if average else M[i]

    def refresh(i):
        r = row(i)
        d = r.min()
        cand = np.flatnonzero(r == d)
        nn[i] = cand[np.argmin(cid[cand])]
        dmin[i] = d

    nn = np.argmin(M, axis=1)
    dmin = M[np.arange(n), nn]

    merges = []
    for step in range(n - 1):
        limit = dmin.min() * (1.0 + TIE_RTOL)
        key = None
        for i in np.flatnonzero(dmin <= limit):
            r = row(i)
            for j in np.flatnonzero(r <= limit):
                cand = (min(cid[i], cid[j]), max(cid[i], cid[j]), r[j], i, j)
                if key is None or cand[:2] < key[:2]:
                    key = cand
        id_a, id_b, dist, a, b = key
        a, b = int(a), int(b)
        merges.append(Merge(int(id_a), int(id_b), float(dist), int(size[a] + size[b])))

        if linkage == "single":
            M[a] = np.minimum(M[a], M[b])
        elif linkage == "complete":
            M[a] = np.maximum(M[a], M[b])
        else:
            M[a] = M[a] + M[b]
        M[a, a] = np.inf
        M[b, :] = np.inf
        M[:, b] = np.inf
        M[:, a] = M[a]
        size[a] += size[b]
        cid[a] = n + step
        dmin[b] = np.inf
        active[b] = False

        if step == n - 2:
            break
        for i in np.flatnonzero(active & ((nn == a) | (nn == b))):
            refresh(i)
        refresh(a)
        # rounding can put the merged cluster a hair closer than a cached minimum
        col = row(a)
        closer = col < dmin
        closer[a] = False
        nn[closer] = a
        dmin[closer] = col[closer]

    return Dendrogram(n, tuple(merges), linkage)


def cut_dendrogram(dendrogram: Dendrogram, k: int) -> np.ndarray:
    """Flat labels after undoing the last k-1 merges.

    Labels are numbered 0..k-1 in order of first appearance over samples.
    """
    n = dendrogram.n_samples
    if not 1 <= k <= n:
        raise InvalidKError(f"k must be in [1, {n}], got {k}")
    parent = list(range(2 * n - 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for step, merge in enumerate(dendrogram.merges[: n - k]):
        new = n + step
        parent[find(merge.a)] = new
        parent[find(merge.b)] = new

    roots = [find(i) for i in range(n)]
    relabel: dict[int, int] = {}
    return np.array([relabel.setdefault(r, len(relabel)) for r in roots], dtype=np.int64)
