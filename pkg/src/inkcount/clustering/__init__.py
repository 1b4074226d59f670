from .fcm import FuzzyClusterResult, fcm
from .hierarchical import LINKAGES, Dendrogram, Merge, agglomerative, cut_dendrogram
from .kmeans import HardClusterResult, InvalidKError, kmeans, kmeans_plusplus, lloyd
from .validity import (
    UndefinedScoreError,
    cluster_centroids,
    estimate_ink_count,
    label_agreement,
    nearest_centroid_labels,
    silhouette,
    silhouette_from_distances,
)

__all__ = [
    "Dendrogram",
    "FuzzyClusterResult",
    "HardClusterResult",
    "InvalidKError",
    "LINKAGES",
    "Merge",
    "UndefinedScoreError",
    "agglomerative",
    "cluster_centroids",
    "cut_dendrogram",
    "estimate_ink_count",
    "fcm",
    "kmeans",
    "kmeans_plusplus",
    "label_agreement",
    "lloyd",
    "nearest_centroid_labels",
    "silhouette",
    "silhouette_from_distances",
]
