from .data import FormatError, read_cluster_file, write_cluster_file
from .reprs import SmoothingSpec, kl_divergences, ml_distribution
from dataclasses import dataclass
import logging
import numpy as np
from scipy import sparse
from tqdm import tqdm


logger = logging.getLogger(__name__)


class FingerprintMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Cluster:
    basis_id: str
    member_ids: tuple

    def __post_init__(self):
        object.__setattr__(self, "member_ids", tuple(self.member_ids))
        if len(self.member_ids) == 0 or self.member_ids[0] != self.basis_id:
            raise ValueError(f"Cluster of {self.basis_id!r} must list its basis first")
        if len(set(self.member_ids)) != len(self.member_ids):
            raise ValueError(f"Cluster of {self.basis_id!r} has duplicate members")

    def __len__(self):
        return len(self.member_ids)

    def __contains__(self, doc_id):
        return doc_id in self.member_ids


@dataclass(frozen=True)
class ClusterSet:
    """One nearest-neighbor cluster per document, in index (basis id) order."""

    clusters: tuple
    k: int
    fingerprint: str
    smoothing: SmoothingSpec

    def __post_init__(self):
        object.__setattr__(self, "clusters", tuple(self.clusters))

    def __len__(self):
        return len(self.clusters)

    def __getitem__(self, position):
        return self.clusters[position]

    def __iter__(self):
        return iter(self.clusters)

    def check_index(self, index):
        if self.fingerprint != index.fingerprint:
            raise FingerprintMismatchError(
                f"Clusters were built for index {self.fingerprint[:12]}, not {index.fingerprint[:12]}; rebuild them"
            )

    def member_rows(self, index):
        return [np.array([index.row_of(doc_id) for doc_id in cluster.member_ids], dtype=np.int64) for cluster in self.clusters]

    def membership_matrix(self, index):
        rows = self.member_rows(index)
        indptr = np.concatenate([[0], np.cumsum([len(r) for r in rows])])
        indices = np.concatenate(rows)
        data = np.ones(len(indices), dtype=np.int64)
        return sparse.csr_matrix((data, indices, indptr), shape=(len(rows), len(index)))


def neighbor_divergences(basis, index, spec):
    # D(ML of basis restricted to the vocabulary || smoothed LM of every document)
    term_ids, counts, _ = index.term_vector(basis.term_counts)
    if len(term_ids) == 0:
        return np.zeros(len(index))
    probs = ml_distribution(counts)
    return kl_divergences(index.counts_by_term, index.doc_lengths, index.unique_terms, term_ids, probs, index.stats.collection_probs, spec)


def nearest_neighbors(basis, index, spec, count):
    candidates = len(index) - (1 if basis.id in index else 0)
    if count < 0 or count > candidates:
        raise ValueError(f"count must lie in [0, {candidates}], got {count}")
    if count == 0:
        return []
    divergences = neighbor_divergences(basis, index, spec)
    rows = np.arange(len(index))
    if basis.id in index:
        keep = rows != index.row_of(basis.id)
        rows, divergences = rows[keep], divergences[keep]
    # rows follow lexicographic id order, so lexsort breaks ties by id
    order = np.lexsort((rows, divergences))[:count]
    return [index.doc_ids[row] for row in rows[order]]


def build_clusters(index, k, spec, show_progress=True):
    if k < 1:
        raise ValueError(f"Cluster size k must be >= 1, got {k}")
    count = min(k, len(index)) - 1
    clusters = []
    for row in tqdm(range(len(index)), desc="Clustering", disable=not show_progress):
        basis = index[row]
        clusters.append(Cluster(basis.id, [basis.id] + nearest_neighbors(basis, index, spec, count)))
    return ClusterSet(clusters, k, index.fingerprint, spec)


def save_clusters(cluster_set, path):
    rows = [(cluster.basis_id, cluster.member_ids) for cluster in cluster_set]
    return write_cluster_file(path, cluster_set.k, cluster_set.fingerprint, cluster_set.smoothing.describe(), rows)


def load_clusters(path, index):
    header, provenance, rows = read_cluster_file(path)
    k = header["k"]
    if header["fingerprint"] != index.fingerprint:
        raise FingerprintMismatchError(
            f"{path} was built for index {header['fingerprint'][:12]}, not {index.fingerprint[:12]}; rebuild the clusters"
        )
    expected_size = min(k, len(index))
    clusters = {}
    for line_number, basis_id, member_ids in rows:
        if len(member_ids) != expected_size:
            raise FormatError(path, line_number, f"cluster of {basis_id!r} has {len(member_ids)} members, expected {expected_size}")
        unknown = [doc_id for doc_id in member_ids if doc_id not in index]
        if unknown:
            raise FingerprintMismatchError(f"{path}, line {line_number}: unknown document id(s) {', '.join(unknown)}")
        if basis_id in clusters:
            raise FormatError(path, line_number, f"duplicate cluster for basis {basis_id!r}")
        try:
            clusters[basis_id] = Cluster(basis_id, member_ids)
        except ValueError as e:
            raise FormatError(path, line_number, str(e)) from None
    if len(clusters) != len(index):
        last_line = rows[-1][0] if rows else 1
        missing = len(index) - len(clusters)
        raise FormatError(path, last_line + 1, f"file is truncated: {missing} cluster(s) missing")
    smoothing = SmoothingSpec.from_description(provenance) if provenance is not None else SmoothingSpec()
    return ClusterSet([clusters[doc_id] for doc_id in index.doc_ids], k, index.fingerprint, smoothing)
