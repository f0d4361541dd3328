from .state import ClusteringResult, CvReport, GeometryChoice, KMeansConfig, KnnConfig
from .geometry import EuclideanGeometry, Geometry, RiemannianGeometry, get_geometry
from .knn import knn_classify, knn_from_distances
from .kmeans import class_centroids, kmeans_plus_plus, lloyd, supervised_kmeans, unsupervised_kmeans
from .metrics import accuracy, clustering_accuracy
from .validation import cross_validate, knn_k_sweep, stratified_splits

__all__ = [
    # Types
    "ClusteringResult",
    "CvReport",
    "GeometryChoice",
    "KMeansConfig",
    "KnnConfig",
    # Geometries
    "EuclideanGeometry",
    "Geometry",
    "RiemannianGeometry",
    "get_geometry",
    # Classification
    "knn_classify",
    "knn_from_distances",
    "supervised_kmeans",
    "class_centroids",
    # Clustering
    "kmeans_plus_plus",
    "lloyd",
    "unsupervised_kmeans",
    # Evaluation
    "accuracy",
    "clustering_accuracy",
    "cross_validate",
    "knn_k_sweep",
    "stratified_splits",
]
