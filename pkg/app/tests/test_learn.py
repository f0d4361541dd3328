"""
Unit tests for classification, clustering and cross-validation on fitted
cohorts. scikit-learn's KNeighborsClassifier and KMeans are the Euclidean
references.
"""

from collections import Counter

import numpy as np
import pytest
from pydantic import ValidationError
from sklearn.cluster import KMeans
from sklearn.neighbors import KNeighborsClassifier

from app.core.errors import ArgumentError
from app.fit.state import FittedCohort, FittedSubject
from app.geometry import BetaPoint
from app.learn import (
    CvReport,
    EuclideanGeometry,
    GeometryChoice,
    KMeansConfig,
    KnnConfig,
    accuracy,
    clustering_accuracy,
    cross_validate,
    kmeans_plus_plus,
    knn_classify,
    knn_k_sweep,
    lloyd,
    supervised_kmeans,
    unsupervised_kmeans,
)
from app.learn.geometry import Geometry, RiemannianGeometry, get_geometry
from app.learn.knn import vote
from app.stats import frechet_mean, frechet_variance

EUCLIDEAN = GeometryChoice.EUCLIDEAN
RIEMANNIAN = GeometryChoice.RIEMANNIAN


def make_cohort(points, labels):
    return FittedCohort(entries=[
        FittedSubject(f"s{i}", label, BetaPoint(x, y)) for i, ((x, y), label) in enumerate(zip(points, labels))
    ])


@pytest.fixture
def toy_cohort():
    return make_cohort(
        [(1.0, 4.0), (1.2, 5.0), (0.9, 3.5), (4.0, 1.0), (5.0, 1.3), (3.6, 0.8)],
        ["a", "a", "a", "b", "b", "b"],
    )


# ============================================================================
# KNN
# ============================================================================

class TestKnn:

    @pytest.mark.parametrize("geometry", [EUCLIDEAN, RIEMANNIAN])
    def test_identical_point_takes_its_label(self, toy_cohort, geometry):
        cfg = KnnConfig(k=1, geometry=geometry)
        assert knn_classify(toy_cohort, [BetaPoint(5.0, 1.3)], cfg) == ["b"]

    def test_training_set_with_k1_is_perfect(self, toy_cohort):
        predicted = knn_classify(toy_cohort, toy_cohort.points, KnnConfig(k=1, geometry=EUCLIDEAN))
        assert accuracy(predicted, toy_cohort.labels) == 1.0

    def test_k_larger_than_training_set(self, toy_cohort):
        with pytest.raises(ArgumentError):
            knn_classify(toy_cohort, [BetaPoint(1.0, 1.0)], KnnConfig(k=7, geometry=EUCLIDEAN))

    @pytest.mark.parametrize("k", [0, 2, -3])
    def test_k_must_be_positive_and_odd(self, k):
        with pytest.raises(ValidationError):
            KnnConfig(k=k)

    def test_default_k(self):
        assert KnnConfig().k == 7

    def test_distance_ties_go_to_smaller_index(self):
        cohort = make_cohort([(1.0, 2.0), (3.0, 2.0)], ["left", "right"])
        assert knn_classify(cohort, [BetaPoint(2.0, 2.0)], KnnConfig(k=1, geometry=EUCLIDEAN)) == ["left"]

    def test_vote_ties_go_to_nearest_label(self):
        assert vote(["b", "a", "a", "b"]) == "b"
        assert vote(["c", "a", "a"]) == "a"

    def test_training_order_does_not_matter(self, separated_cohort, rng):
        order = rng.permutation(len(separated_cohort))
        shuffled = separated_cohort.subset(order)
        test = [BetaPoint(3.0, 3.5), BetaPoint(6.0, 2.5), BetaPoint(2.5, 7.0)]
        cfg = KnnConfig(k=7, geometry=EUCLIDEAN)
        assert knn_classify(separated_cohort, test, cfg) == knn_classify(shuffled, test, cfg)

    def test_matches_sklearn(self, separated_cohort, rng):
        X = separated_cohort.points_array()
        y = np.array(separated_cohort.labels)
        test = rng.uniform(0.5, 10.0, size=(40, 2))
        reference = KNeighborsClassifier(n_neighbors=7, algorithm="brute").fit(X, y).predict(test)
        ours = knn_classify(separated_cohort, [BetaPoint(*p) for p in test], KnnConfig(k=7, geometry=EUCLIDEAN))
        assert ours == list(reference)


# ============================================================================
# SUPERVISED K-MEANS
# ============================================================================

class TestSupervisedKMeans:

    @pytest.mark.parametrize("geometry", [EUCLIDEAN, RIEMANNIAN])
    def test_single_point_classes(self, geometry):
        cohort = make_cohort([(1.0, 3.0), (3.0, 1.0)], ["a", "b"])
        predicted = supervised_kmeans(cohort, [BetaPoint(1.0, 3.0), BetaPoint(3.0, 1.0), BetaPoint(1.1, 2.5)], geometry)
        assert predicted == ["a", "b", "a"]

    def test_centroid_point_gets_its_class(self, toy_cohort):
        class_a = [e.point for e in toy_cohort.entries if e.label == "a"]
        centroid = frechet_mean(class_a).mean
        assert supervised_kmeans(toy_cohort, [centroid], RIEMANNIAN) == ["a"]

    def test_empty_training_cohort(self):
        with pytest.raises(ArgumentError):
            supervised_kmeans(FittedCohort(), [BetaPoint(1.0, 1.0)], EUCLIDEAN)


# ============================================================================
# UNSUPERVISED K-MEANS
# ============================================================================

class TestUnsupervisedKMeans:

    @pytest.mark.parametrize("geometry", [EUCLIDEAN, RIEMANNIAN])
    def test_one_cluster_is_the_mean(self, toy_cohort, geometry):
        result = unsupervised_kmeans(toy_cohort.points, KMeansConfig(n_clusters=1, geometry=geometry, seed=0, n_init=2))
        assert result.assignments == [0] * 6
        if geometry is RIEMANNIAN:
            mean = frechet_mean(toy_cohort.points).mean
            assert result.centroids[0].x == pytest.approx(mean.x, abs=1e-4)
            assert result.inertia == pytest.approx(6 * frechet_variance(toy_cohort.points, mean), rel=1e-4)
        else:
            np.testing.assert_allclose(result.centroids[0].as_array(), toy_cohort.points_array().mean(axis=0))

    @pytest.mark.parametrize("geometry", [EUCLIDEAN, RIEMANNIAN])
    def test_identical_copies_recovered(self, geometry):
        sites = [BetaPoint(1.0, 5.0), BetaPoint(5.0, 1.0), BetaPoint(3.0, 3.0)]
        points = [p for p in sites for _ in range(4)]
        result = unsupervised_kmeans(points, KMeansConfig(n_clusters=3, geometry=geometry, seed=1, n_init=3))
        assert result.inertia == pytest.approx(0.0, abs=1e-12)
        assert clustering_accuracy(result.assignments, [i // 4 for i in range(12)]) == 1.0

    @pytest.mark.parametrize("geometry", [EUCLIDEAN, RIEMANNIAN])
    def test_inertia_non_increasing(self, small_cohort, geometry):
        result = unsupervised_kmeans(small_cohort.points, KMeansConfig(n_clusters=3, geometry=geometry, seed=4, n_init=2))
        history = result.inertia_history
        assert all(b <= a + 1e-9 for a, b in zip(history, history[1:]))

    def test_too_many_clusters(self, toy_cohort):
        with pytest.raises(ArgumentError):
            unsupervised_kmeans(toy_cohort.points, KMeansConfig(n_clusters=7, seed=0))

    def test_deterministic(self, small_cohort):
        cfg = KMeansConfig(n_clusters=2, geometry=EUCLIDEAN, seed=12, n_init=4)
        a = unsupervised_kmeans(small_cohort.points, cfg)
        b = unsupervised_kmeans(small_cohort.points, cfg)
        assert a.to_dict() == b.to_dict()

    def test_parallel_restarts_match_sequential(self, small_cohort, monkeypatch):
        from app.core.config import reset_settings
        cfg = KMeansConfig(n_clusters=2, geometry=EUCLIDEAN, seed=12, n_init=4)
        sequential = unsupervised_kmeans(small_cohort.points, cfg)
        monkeypatch.setenv("BETAGEO_MAX_WORKERS", "4")
        reset_settings()
        parallel = unsupervised_kmeans(small_cohort.points, cfg)
        assert sequential.to_dict() == parallel.to_dict()

    def test_empty_cluster_is_reseeded(self):
        points = np.array([[1.0, 1.0], [1.1, 1.0], [5.0, 5.0], [5.2, 5.0]])
        init = np.array([[3.0, 3.0], [50.0, 50.0]])
        result = lloyd(points, init, EuclideanGeometry())
        assert sorted(set(result.assignments)) == [0, 1]

    def test_kmeans_plus_plus_picks_distinct_sites(self, rng):
        points = np.array([[1.0, 1.0]] * 5 + [[9.0, 9.0]] * 5)
        chosen = kmeans_plus_plus(points, 2, EuclideanGeometry(), rng)
        assert {tuple(points[i]) for i in chosen} == {(1.0, 1.0), (9.0, 9.0)}

    def test_lloyd_matches_sklearn(self, separated_cohort):
        X = separated_cohort.points_array()
        init = X[[0, 60, 30]]
        ours = lloyd(X, init, EuclideanGeometry(), max_iterations=100)
        reference = KMeans(n_clusters=3, init=init, n_init=1, max_iter=100, tol=0.0, algorithm="lloyd").fit(X)
        assert ours.assignments == list(reference.labels_)
        np.testing.assert_allclose(
            np.array([c.as_array() for c in ours.centroids]), reference.cluster_centers_, rtol=1e-10
        )
        assert ours.inertia == pytest.approx(reference.inertia_, rel=1e-9)


# ============================================================================
# METRICS
# ============================================================================

class TestClusteringAccuracy:

    def test_identity(self):
        assert clustering_accuracy([0, 0, 1, 1], ["a", "a", "b", "b"]) == 1.0

    def test_swapped_clusters(self):
        assert clustering_accuracy([1, 1, 0, 0], ["a", "a", "b", "b"]) == 1.0

    def test_relabeling_invariance(self, rng):
        assignments = rng.integers(0, 4, size=60)
        labels = rng.integers(0, 3, size=60)
        relabel = rng.permutation(4)
        assert clustering_accuracy(assignments, labels) == clustering_accuracy(relabel[assignments], labels)

    def test_random_assignments_near_half(self):
        rng = np.random.default_rng(77)
        labels = np.repeat([0, 1], 500)
        scores = [clustering_accuracy(rng.integers(0, 2, size=1000), labels) for _ in range(20)]
        assert np.mean(scores) == pytest.approx(0.5, abs=0.05)

    def test_one_cluster_scores_majority_share(self):
        labels = ["a"] * 7 + ["b"] * 3
        assert clustering_accuracy([0] * 10, labels) == pytest.approx(0.7)

    def test_many_clusters_use_assignment_solver(self, rng):
        labels = np.repeat(np.arange(8), 5)
        assignments = (labels + 3) % 8
        assert clustering_accuracy(assignments, labels) == 1.0

    def test_length_mismatch(self):
        with pytest.raises(ArgumentError):
            clustering_accuracy([0, 1], ["a"])


# ============================================================================
# GEOMETRY STRATEGIES
# ============================================================================

class TestGeometryStrategies:

    def test_incomplete_strategy_cannot_be_instantiated(self):
        class DistanceOnly(Geometry):
            def pairwise(self, A, B=None):
                return np.zeros((len(A), len(A if B is None else B)))

        with pytest.raises(TypeError):
            DistanceOnly()

    def test_lookup_by_choice(self):
        assert isinstance(get_geometry("euclidean"), EuclideanGeometry)
        assert isinstance(get_geometry(RIEMANNIAN), RiemannianGeometry)


# ============================================================================
# CROSS-VALIDATION
# ============================================================================

class TestCrossValidation:

    def test_folds_partition_the_cohort(self, small_cohort):
        report = cross_validate(small_cohort, "knn", KnnConfig(k=3, geometry=EUCLIDEAN), folds=5, seed=0)
        assert set(report.fold_assignments) == set(small_cohort.ids)
        sizes = Counter(report.fold_assignments.values())
        assert max(sizes.values()) - min(sizes.values()) <= 1
        assert len(report.per_fold_accuracy) == 5

    def test_folds_are_stratified(self, small_cohort):
        report = cross_validate(small_cohort, "knn", KnnConfig(k=3, geometry=EUCLIDEAN), folds=5, seed=0)
        label_of = dict(zip(small_cohort.ids, small_cohort.labels))
        for fold in range(5):
            members = [label_of[i] for i, f in report.fold_assignments.items() if f == fold]
            counts = Counter(members)
            assert abs(counts["diseased"] - counts["control"]) <= 1

    def test_deterministic(self, small_cohort):
        cfg = KnnConfig(k=3, geometry=EUCLIDEAN)
        assert cross_validate(small_cohort, "skm", cfg, folds=4, seed=8) == \
            cross_validate(small_cohort, "skm", cfg, folds=4, seed=8)

    def test_std_is_population_std(self, small_cohort):
        report = cross_validate(small_cohort, "knn", KnnConfig(k=1, geometry=EUCLIDEAN), folds=5, seed=2)
        assert report.std_accuracy == pytest.approx(np.std(report.per_fold_accuracy, ddof=0))

    def test_class_smaller_than_folds(self, toy_cohort):
        with pytest.raises(ArgumentError, match="fewer than 5 folds"):
            cross_validate(toy_cohort, "knn", KnnConfig(k=1, geometry=EUCLIDEAN), folds=5, seed=0)

    def test_k_larger_than_training_fold(self, toy_cohort):
        with pytest.raises(ArgumentError, match="smallest training fold"):
            cross_validate(toy_cohort, "knn", KnnConfig(k=5, geometry=EUCLIDEAN), folds=3, seed=0)

    def test_unknown_model(self, small_cohort):
        with pytest.raises(ArgumentError):
            cross_validate(small_cohort, "svm", KnnConfig(k=3), folds=5, seed=0)

    def test_k_sweep_agrees_with_cross_validate(self, small_cohort):
        sweep = knn_k_sweep(small_cohort, [1, 3, 5], EUCLIDEAN, folds=5, seed=3)
        report = cross_validate(small_cohort, "knn", KnnConfig(k=3, geometry=EUCLIDEAN), folds=5, seed=3)
        assert sorted(sweep) == [1, 3, 5]
        assert sweep[3] == (report.mean_accuracy, report.std_accuracy)

    def test_inconsistent_report_rejected(self):
        with pytest.raises(ValidationError):
            CvReport(
                model="knn", geometry=EUCLIDEAN, k=3, folds=2, seed=0,
                per_fold_accuracy=[0.5, 1.0], mean_accuracy=0.9, std_accuracy=0.25,
            )


# ============================================================================
# SEPARATED SYNTHETIC COHORT
# ============================================================================

class TestSeparatedCohort:

    @pytest.mark.parametrize("geometry", [EUCLIDEAN, RIEMANNIAN])
    def test_knn(self, separated_cohort, geometry):
        report = cross_validate(separated_cohort, "knn", KnnConfig(k=7, geometry=geometry), folds=5, seed=0)
        assert report.mean_accuracy >= 0.95

    @pytest.mark.parametrize("geometry", [EUCLIDEAN, RIEMANNIAN])
    def test_skm(self, separated_cohort, geometry):
        report = cross_validate(separated_cohort, "skm", KnnConfig(geometry=geometry), folds=5, seed=0)
        assert report.mean_accuracy >= 0.95

    def test_ukm_euclidean(self, separated_cohort):
        result = unsupervised_kmeans(separated_cohort.points, KMeansConfig(n_clusters=2, geometry=EUCLIDEAN, seed=0))
        assert clustering_accuracy(result.assignments, separated_cohort.labels) >= 0.95

    @pytest.mark.slow
    def test_ukm_riemannian(self, separated_cohort):
        result = unsupervised_kmeans(separated_cohort.points, KMeansConfig(n_clusters=2, geometry=RIEMANNIAN, seed=0))
        assert clustering_accuracy(result.assignments, separated_cohort.labels) >= 0.95
