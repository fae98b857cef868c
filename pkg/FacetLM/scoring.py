from .reprs import SmoothingSpec, kl_divergences, log_smoothed, ml_distribution, tfidf_weights
import numpy as np
from scipy.special import xlogy


class QueryTerms:
    def __init__(self, index, query):
        self.query_id = query.id
        self.term_ids, self.counts, self.dropped = index.term_vector(query.term_counts)

    def __len__(self):
        return len(self.term_ids)


class LanguageModelScorer:
    """exp(-KL) scores of documents and clusters, shared by every runner.

    Cluster language models are induced from the summed member counts.
    p_c(d) for the members of a cluster is query independent and cached.
    """

    representation = "lm"

    def __init__(self, index, clusters=None, smoothing=None):
        self.index = index
        self.clusters = clusters
        self.smoothing = smoothing if smoothing is not None else SmoothingSpec()
        self.collection_probs = index.stats.collection_probs
        self.affinity_cache = {}
        if clusters is not None:
            self.member_rows = clusters.member_rows(index)
            membership = clusters.membership_matrix(index)
            self.cluster_counts = (membership @ index.counts).tocsr()
            self.cluster_counts.sort_indices()
            self.cluster_counts_by_term = self.cluster_counts.tocsc()
            self.cluster_lengths = np.asarray(self.cluster_counts.sum(axis=1)).ravel()
            self.cluster_unique_terms = np.diff(self.cluster_counts.indptr)

    def query_terms(self, query):
        return QueryTerms(self.index, query)

    def kernel(self, matrix, lengths, unique_terms, terms):
        if len(terms) == 0:
            return np.zeros(matrix.shape[0])
        probs = ml_distribution(terms.counts)
        divergences = kl_divergences(matrix, lengths, unique_terms, terms.term_ids, probs, self.collection_probs, self.smoothing)
        return np.exp(-divergences)

    def score_documents(self, terms):
        return self.kernel(self.index.counts_by_term, self.index.doc_lengths, self.index.unique_terms, terms)

    def score_clusters(self, terms):
        return self.kernel(self.cluster_counts_by_term, self.cluster_lengths, self.cluster_unique_terms, terms)

    def member_items(self, position):
        # term ids / counts of every member, concatenated, with the cluster counts for the same terms
        rows = self.member_rows[position]
        members = self.index.counts[rows]
        start, end = self.cluster_counts.indptr[position], self.cluster_counts.indptr[position + 1]
        cluster_terms = self.cluster_counts.indices[start:end]
        cluster_values = self.cluster_counts.data[start:end]
        cluster_counts = cluster_values[np.searchsorted(cluster_terms, members.indices)]
        return rows, members, cluster_counts

    def member_affinities(self, position):
        if position not in self.affinity_cache:
            rows, members, cluster_counts = self.member_items(position)
            doc_probs = members.data / np.repeat(self.index.doc_lengths[rows], np.diff(members.indptr))
            log_models = log_smoothed(
                cluster_counts,
                self.cluster_lengths[position],
                self.cluster_unique_terms[position],
                self.collection_probs[members.indices],
                self.smoothing,
            )
            terms = xlogy(doc_probs, doc_probs) - doc_probs * log_models
            divergences = np.add.reduceat(terms, members.indptr[:-1])
            self.affinity_cache[position] = np.exp(-divergences)
        return self.affinity_cache[position]


class TfIdfScorer(LanguageModelScorer):
    """Inner products of ln(1 + tf) * ln(N / df) vectors; clusters are concatenated documents."""

    representation = "tfidf"

    def kernel(self, matrix, lengths, unique_terms, terms):
        if len(terms) == 0:
            return np.zeros(matrix.shape[0])
        idf = self.index.stats.idf[terms.term_ids]
        query_weights = np.log1p(terms.counts) * idf
        item_weights = np.log1p(matrix[:, terms.term_ids].toarray()) * idf
        return (item_weights * query_weights).sum(axis=1)

    def member_affinities(self, position):
        if position not in self.affinity_cache:
            rows, members, cluster_counts = self.member_items(position)
            doc_freq = self.index.stats.doc_freq_counts[members.indices]
            num_docs = self.index.stats.num_docs
            products = tfidf_weights(members.data, doc_freq, num_docs) * tfidf_weights(cluster_counts, doc_freq, num_docs)
            self.affinity_cache[position] = np.add.reduceat(products, members.indptr[:-1])
        return self.affinity_cache[position]


SCORERS = {"lm": LanguageModelScorer, "tfidf": TfIdfScorer}


def build_scorer(representation, index, clusters=None, smoothing=None):
    if representation not in SCORERS:
        raise ValueError(f"Unknown representation {representation!r}; expected one of {sorted(SCORERS)}")
    return SCORERS[representation](index, clusters=clusters, smoothing=smoothing)


class FacetSet:
    """Facets(d, q, C): the ranked clusters that may speak for each candidate.

    `positions` are cluster positions in rank order; with `basis_only` a
    cluster speaks only for its basis document.
    """

    def __init__(self, positions, member_rows, basis_only=False):
        self.positions = [int(position) for position in positions]
        self.member_rows = member_rows
        self.basis_only = basis_only

    def __len__(self):
        return len(self.positions)

    def rows(self):
        if len(self.positions) == 0:
            return np.zeros(0, dtype=np.int64)
        if self.basis_only:
            return np.unique([self.member_rows[position][0] for position in self.positions])
        return np.unique(np.concatenate([self.member_rows[position] for position in self.positions]))

    def multiplicity(self, num_docs):
        if len(self.positions) == 0:
            return np.zeros(num_docs, dtype=np.int64)
        return np.bincount(np.concatenate([self.member_rows[position] for position in self.positions]), minlength=num_docs)

    def of(self, row):
        if self.basis_only:
            return [position for position in self.positions if self.member_rows[position][0] == row]
        return [position for position in self.positions if row in self.member_rows[position]]


class SearchContext:
    def __init__(self, scorer, query, algorithm):
        self.scorer = scorer
        self.query = query
        self.algorithm = algorithm
        self.terms = scorer.query_terms(query)
        self._doc_scores = None
        self._cluster_scores = None
        self._cluster_order = None

    @property
    def num_docs(self):
        return len(self.scorer.index)

    @property
    def member_rows(self):
        return self.scorer.member_rows

    @property
    def doc_scores(self):
        if self._doc_scores is None:
            self._doc_scores = self.scorer.score_documents(self.terms)
        return self._doc_scores

    @property
    def cluster_scores(self):
        if self._cluster_scores is None:
            self._cluster_scores = self.scorer.score_clusters(self.terms)
        return self._cluster_scores

    def top_clusters(self, m):
        # TopClusters(m): descending score, ties by basis id (= position)
        if self._cluster_order is None:
            scores = self.cluster_scores
            self._cluster_order = np.lexsort((np.arange(len(scores)), -scores))
        return self._cluster_order[:m]
