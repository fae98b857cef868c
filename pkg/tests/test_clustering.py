from FacetLM.clustering import (
    Cluster, FingerprintMismatchError, build_clusters, load_clusters, nearest_neighbors, save_clusters,
)
from FacetLM.data import FormatError
from FacetLM.reprs import SmoothingSpec
from helpers import counts_of, make_index, random_texts
from oracle import Oracle
import numpy as np
import pytest


class TestNearestNeighbors:
    def test_hand_corpus(self, three_doc_index, tiny_spec):
        basis = three_doc_index.document("d1")
        assert nearest_neighbors(basis, three_doc_index, tiny_spec, 2) == ["d2", "d3"]

    def test_zero(self, three_doc_index, tiny_spec):
        assert nearest_neighbors(three_doc_index.document("d1"), three_doc_index, tiny_spec, 0) == []

    def test_duplicate_is_nearest(self, tiny_spec):
        index = make_index({"d1": "a b b c", "d1x": "a b b c", "d2": "a a", "d3": "c c d"})
        assert nearest_neighbors(index.document("d1"), index, tiny_spec, 1) == ["d1x"]

    def test_count_out_of_range(self, three_doc_index, tiny_spec):
        with pytest.raises(ValueError):
            nearest_neighbors(three_doc_index.document("d1"), three_doc_index, tiny_spec, 3)

    def test_ties_by_id(self, tiny_spec):
        index = make_index({"b": "x", "a": "y", "c": "y", "z": "x x"})
        assert nearest_neighbors(index.document("z"), index, tiny_spec, 3) == ["b", "a", "c"]


class TestBuildClusters:
    def test_singletons(self, three_doc_index, tiny_spec):
        clusters = build_clusters(three_doc_index, 1, tiny_spec, show_progress=False)
        assert [cluster.member_ids for cluster in clusters] == [("d1",), ("d2",), ("d3",)]

    def test_exhaustive(self, three_doc_index, tiny_spec):
        clusters = build_clusters(three_doc_index, 3, tiny_spec, show_progress=False)
        assert all(set(cluster.member_ids) == {"d1", "d2", "d3"} for cluster in clusters)
        assert all(cluster.member_ids[0] == cluster.basis_id for cluster in clusters)

    def test_k_larger_than_corpus(self, three_doc_index, tiny_spec):
        clusters = build_clusters(three_doc_index, 40, tiny_spec, show_progress=False)
        assert all(len(cluster) == 3 for cluster in clusters)

    def test_invalid_k(self, three_doc_index, tiny_spec):
        with pytest.raises(ValueError):
            build_clusters(three_doc_index, 0, tiny_spec, show_progress=False)

    def test_overlap(self, tiny_spec):
        index = make_index({"d1": "a a b", "d2": "a a b", "d3": "a b b", "d4": "c c", "d5": "c d"})
        clusters = build_clusters(index, 2, tiny_spec, show_progress=False)
        appearances = {doc_id: sum(doc_id in cluster for cluster in clusters) for doc_id in index.doc_ids}
        assert max(appearances.values()) >= 2
        assert min(appearances.values()) >= 1

    def test_deterministic(self, tiny_spec):
        index = make_index(random_texts(np.random.default_rng(2), 20, 10))
        assert build_clusters(index, 4, tiny_spec, show_progress=False) == build_clusters(index, 4, tiny_spec, show_progress=False)

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_exhaustive_oracle(self, seed):
        rng = np.random.default_rng(seed)
        texts = random_texts(rng, int(rng.integers(5, 31)), int(rng.integers(5, 31)))
        index = make_index(texts)
        spec = SmoothingSpec(mu=10.0)
        oracle = Oracle(counts_of(texts), mu=10.0)
        for k in (1, 2, 5):
            clusters = build_clusters(index, k, spec, show_progress=False)
            assert [list(cluster.member_ids) for cluster in clusters] == oracle.clusters(k)


class TestClusterFile:
    def test_round_trip(self, three_doc_index, tiny_spec, tmp_path):
        clusters = build_clusters(three_doc_index, 2, tiny_spec, show_progress=False)
        path = save_clusters(clusters, str(tmp_path / "clusters.tsv"))
        loaded = load_clusters(path, three_doc_index)
        assert loaded == clusters
        again = save_clusters(loaded, str(tmp_path / "again.tsv"))
        with open(path, "rb") as a, open(again, "rb") as b:
            assert a.read() == b.read()

    def test_format(self, three_doc_index, tiny_spec, tmp_path):
        clusters = build_clusters(three_doc_index, 1, tiny_spec, show_progress=False)
        path = save_clusters(clusters, str(tmp_path / "clusters.tsv"))
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
        assert lines[0] == f"#facetlm-clusters k=1 fingerprint={three_doc_index.fingerprint}"
        assert lines[2:] == ["d1\td1", "d2\td2", "d3\td3"]

    def test_other_corpus(self, three_doc_index, tiny_spec, tmp_path):
        clusters = build_clusters(three_doc_index, 2, tiny_spec, show_progress=False)
        path = save_clusters(clusters, str(tmp_path / "clusters.tsv"))
        other = make_index({"d1": "a a", "d2": "a b"})
        with pytest.raises(FingerprintMismatchError):
            load_clusters(path, other)

    def test_truncated(self, three_doc_index, tiny_spec, tmp_path):
        clusters = build_clusters(three_doc_index, 2, tiny_spec, show_progress=False)
        path = save_clusters(clusters, str(tmp_path / "clusters.tsv"))
        with open(path, encoding="utf-8") as f:
            lines = f.readlines()
        with open(path, "w", encoding="utf-8") as f:
            f.writelines(lines[:-1])
        with pytest.raises(FormatError, match="line 5") as e:
            load_clusters(path, three_doc_index)
        assert e.value.line_number == 5

    def test_wrong_member_count(self, three_doc_index, tiny_spec, tmp_path):
        path = tmp_path / "clusters.tsv"
        path.write_text(f"#facetlm-clusters k=2 fingerprint={three_doc_index.fingerprint}\nd1\td1\nd2\td2,d1\nd3\td3,d2\n", encoding="utf-8")
        with pytest.raises(FormatError, match="line 2"):
            load_clusters(str(path), three_doc_index)

    def test_unknown_member(self, three_doc_index, tmp_path):
        path = tmp_path / "clusters.tsv"
        path.write_text(f"#facetlm-clusters k=2 fingerprint={three_doc_index.fingerprint}\nd1\td1,d9\n", encoding="utf-8")
        with pytest.raises(FingerprintMismatchError, match="d9"):
            load_clusters(str(path), three_doc_index)

    def test_missing_header(self, three_doc_index, tmp_path):
        path = tmp_path / "clusters.tsv"
        path.write_text("d1\td1\n", encoding="utf-8")
        with pytest.raises(FormatError, match="header"):
            load_clusters(str(path), three_doc_index)

    def test_basis_first(self):
        with pytest.raises(ValueError):
            Cluster("d1", ["d2", "d1"])
        with pytest.raises(ValueError):
            Cluster("d1", ["d1", "d1"])
