import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.base import clone

from mdbo.clustering import (
    CentroidClustering,
    Dataset,
    SSEObjective,
    accuracy,
    assign,
    cluster_optimize,
    decode,
    encode,
    kmeans_baseline,
    load_csv,
    normalize_minmax,
    sse_fitness,
    synthetic_blobs,
)


def min_two_partition_sse(points):
    """Exhaustive lower bound: best SSE over every split into two non-empty groups."""
    n = len(points)
    best = np.inf
    for mask in itertools.product([0, 1], repeat=n - 1):
        labels = np.array((0,) + mask)
        if labels.all() or not labels.any():
            continue
        sse = sum(((points[labels == g] - points[labels == g].mean(axis=0)) ** 2).sum()
                  for g in (0, 1))
        best = min(best, sse)
    return best


def two_blobs_2d(seed=0):
    rng = np.random.default_rng(seed)
    centers = np.array([[0.1, 0.1], [0.9, 0.9]])
    labels = np.repeat([0, 1], 100)
    return Dataset(centers[labels] + 0.01 * rng.standard_normal((200, 2)), labels), centers


class TestNormalize:
    def test_scaling(self):
        out = normalize_minmax(Dataset([[0.0, 3.0], [5.0, 3.0], [10.0, 3.0]]))
        np.testing.assert_array_equal(out.points, [[0, 0], [0.5, 0], [1, 0]])

    def test_unit_column_unchanged(self):
        out = normalize_minmax(Dataset([[0.0], [0.25], [1.0]]))
        np.testing.assert_array_equal(out.points[:, 0], [0, 0.25, 1])

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            Dataset([[np.nan, 1.0]])


class TestEncoding:
    def test_row_major(self):
        np.testing.assert_array_equal(encode([[1, 2], [3, 4]]), [1, 2, 3, 4])

    def test_round_trip(self):
        c = np.random.default_rng(1).random((3, 5))
        np.testing.assert_array_equal(decode(encode(c), 3, 5), c)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            decode(np.zeros(5), 2, 2)


class TestSSE:
    def test_examples(self):
        assert sse_fitness([[1.0, 2.0]], [[1.0, 2.0]]) == 0.0
        assert sse_fitness([[0, 0], [2, 0]], [[0, 0], [2, 0]]) == 0.0
        assert sse_fitness([[0, 0], [1, 0]], [[0, 0]]) == 1.0

    def test_tie_goes_to_lowest_index(self):
        np.testing.assert_array_equal(assign([[1.0, 0.0]], [[0, 0], [2, 0]]), [0])

    def test_empty(self):
        with pytest.raises(ValueError):
            sse_fitness(np.empty((0, 2)), [[0, 0]])

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 10_000), k=st.integers(1, 4))
    def test_centroid_permutation_invariance(self, seed, k):
        rng = np.random.default_rng(seed)
        points, c = rng.random((20, 3)), rng.random((k, 3))
        perm = rng.permutation(k)
        assert sse_fitness(points, c[perm]) == pytest.approx(sse_fitness(points, c), rel=1e-12)

    def test_vectorized_objective_matches(self):
        rng = np.random.default_rng(2)
        points, fsvs = rng.random((50, 3)), rng.random((6, 6))
        got = SSEObjective(points, 2)(fsvs)
        want = [sse_fitness(points, decode(f, 2, 3)) for f in fsvs]
        np.testing.assert_allclose(got, want, rtol=1e-12)


class TestAccuracy:
    def test_perfect(self):
        assert accuracy([1, 1, 0, 0], ["a", "a", "b", "b"]) == 1.0

    def test_single_cluster(self):
        assert accuracy([0, 0, 0, 0], [0, 1, 0, 1]) == 0.5

    def test_confusion_matrix(self):
        assignment = np.repeat([0, 0, 1, 1], [40, 10, 5, 45])
        labels = np.repeat([0, 1, 0, 1], [40, 10, 5, 45])
        assert accuracy(assignment, labels) == pytest.approx(0.85)

    def test_relabel_invariance(self):
        rng = np.random.default_rng(5)
        assignment, labels = rng.integers(0, 3, 60), rng.integers(0, 3, 60)
        assert accuracy(assignment, labels) == accuracy((assignment + 1) % 3, labels)

    def test_majority_rule_beyond_limit(self):
        assignment = np.arange(20) % 10
        assert accuracy(assignment, assignment % 2) == 1.0

    def test_needs_labels(self):
        with pytest.raises(ValueError):
            accuracy([0, 1], None)


class TestKMeans:
    def test_recovers_blob_centers(self):
        data, centers = two_blobs_2d()
        result = kmeans_baseline(data, 2, random_state=0)
        order = np.argsort(result.centroids[:, 0])
        np.testing.assert_allclose(result.centroids[order], centers, atol=0.05)

    def test_history_non_increasing(self):
        data, _ = synthetic_blobs(k=4, n=400, d=3, spread=0.2, seed=1)
        history = kmeans_baseline(data, 4, random_state=3).history
        assert np.all(np.diff(history) <= 1e-12)

    def test_k_equals_n(self):
        points = np.random.default_rng(0).random((6, 2))
        assert kmeans_baseline(points, 6, random_state=0).fitness == 0.0

    def test_k_too_large(self):
        with pytest.raises(ValueError):
            kmeans_baseline(np.zeros((3, 2)), 4)

    def test_deterministic(self):
        data, _ = synthetic_blobs(k=3, n=300, d=4, spread=0.2, seed=2)
        a = kmeans_baseline(data, 3, random_state=9)
        b = kmeans_baseline(data, 3, random_state=9)
        np.testing.assert_array_equal(a.centroids, b.centroids)


class TestClusterOptimize:
    @pytest.mark.xfail(strict=True, reason="MDBO with default parameters collapses onto its "
                       "loudest dog before refining the centroids; see the decisions ledger")
    def test_two_blobs_within_five_percent_of_kmeans(self):
        data, centers = two_blobs_2d()
        reference = kmeans_baseline(data, 2, init=centers).fitness
        result = cluster_optimize(data, 2, "mdbo", random_state=0)
        assert result.fitness <= 1.05 * reference

    def test_single_cluster_finds_mean(self):
        data = normalize_minmax(Dataset(np.random.default_rng(4).random((60, 3))))
        result = cluster_optimize(data, 1, "mdbo", random_state=0)
        np.testing.assert_allclose(result.centroids[0], data.points.mean(axis=0), atol=1e-3)

    def test_never_worse_than_initial_best(self):
        data, _ = two_blobs_2d(1)
        result = cluster_optimize(data, 2, "mdbo", {"m": 10, "iterations": 30}, random_state=1)
        assert result.fitness <= result.history[0]
        assert np.all(np.diff(result.history) <= 0)

    def test_deterministic(self):
        data, _ = two_blobs_2d(2)
        params = {"m": 8, "iterations": 20}
        a = cluster_optimize(data, 2, "mdbo", params, random_state=5)
        b = cluster_optimize(data, 2, "mdbo", params, random_state=5)
        np.testing.assert_array_equal(a.centroids, b.centroids)

    def test_errors(self):
        with pytest.raises(ValueError):
            cluster_optimize(np.zeros((2, 2)), 3)
        with pytest.raises(KeyError):
            cluster_optimize(np.zeros((4, 2)), 2, "sa")

    @pytest.mark.parametrize("name", ["mdbo", "pso", "ga", "pbil", "es"])
    def test_not_below_partition_lower_bound(self, name):
        points = np.random.default_rng(11).random((10, 2))
        bound = min_two_partition_sse(points)
        result = cluster_optimize(points, 2, name, {"m": 10, "iterations": 40}, random_state=0)
        assert result.fitness >= bound - 1e-12


class TestLoadCsv:
    def test_with_labels(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("a,b,label\n1,2,x\n3,4,y\n")
        data = load_csv(path)
        np.testing.assert_array_equal(data.points, [[1, 2], [3, 4]])
        assert list(data.labels) == ["x", "y"]
        assert data.feature_names == ["a", "b"]

    def test_without_labels(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("a,b\n1,2\n")
        assert load_csv(path).labels is None

    def test_bad_value_names_line(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("a,b\n1,2\n3,oops\n")
        with pytest.raises(ValueError, match="line 3"):
            load_csv(path)


class TestEstimator:
    def test_fit_predict_transform(self):
        data, _ = two_blobs_2d()
        model = CentroidClustering(optimizer="kmeans", random_state=0).fit(data.points)
        assert model.cluster_centers_.shape == (2, 2)
        np.testing.assert_array_equal(model.predict(data.points), model.labels_)
        assert model.transform(data.points).shape == (200, 2)
        assert accuracy(model.labels_, data.labels) == 1.0

    def test_clone(self):
        model = CentroidClustering(n_clusters=3, optimizer="pso", optimizer_params={"m": 5})
        assert clone(model).get_params() == model.get_params()

    def test_unfitted(self):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            CentroidClustering().predict([[0.0, 0.0]])

    def test_unknown_optimizer(self):
        with pytest.raises(ValueError):
            CentroidClustering(optimizer="sa").fit([[0.0], [1.0]])
