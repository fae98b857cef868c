from dataclasses import dataclass
from types import MappingProxyType
import logging
import numpy as np
from scipy.special import rel_entr, xlogy


logger = logging.getLogger(__name__)

SMOOTHING_METHODS = ("dirichlet", "jelinek_mercer", "absolute_discounting")
SMOOTHING_ALIASES = {"dirichlet": "dirichlet", "jm": "jelinek_mercer", "ad": "absolute_discounting"}


@dataclass(frozen=True)
class SmoothingSpec:
    method: str = "dirichlet"
    mu: float = 2000.0
    lambda_jm: float = 0.7
    delta_ad: float = 0.7

    def __post_init__(self):
        method = SMOOTHING_ALIASES.get(self.method, self.method)
        if method not in SMOOTHING_METHODS:
            raise ValueError(f"Unknown smoothing method {self.method!r}")
        object.__setattr__(self, "method", method)
        if not self.mu > 0:
            raise ValueError(f"mu must be > 0, got {self.mu}")
        if not 0.0 <= self.lambda_jm <= 1.0:
            raise ValueError(f"lambda_jm must lie in [0, 1], got {self.lambda_jm}")
        if not 0.0 < self.delta_ad < 1.0:
            raise ValueError(f"delta_ad must lie in (0, 1), got {self.delta_ad}")

    def describe(self):
        return f"method={self.method} mu={self.mu!r} lambda_jm={self.lambda_jm!r} delta_ad={self.delta_ad!r}"

    @classmethod
    def from_description(cls, values):
        return cls(
            method=values.get("method", "dirichlet"),
            mu=float(values.get("mu", 2000.0)),
            lambda_jm=float(values.get("lambda_jm", 0.7)),
            delta_ad=float(values.get("delta_ad", 0.7)),
        )


def log_smoothed(counts, lengths, unique_terms, collection_probs, spec):
    """Natural-log smoothed term probabilities; all arguments broadcast."""
    counts = np.asarray(counts, dtype=np.float64)
    lengths = np.asarray(lengths, dtype=np.float64)
    with np.errstate(divide="ignore"):
        if spec.method == "dirichlet":
            return np.log(counts + spec.mu * collection_probs) - np.log(lengths + spec.mu)
        if spec.method == "jelinek_mercer":
            return np.log(spec.lambda_jm * counts / lengths + (1.0 - spec.lambda_jm) * collection_probs)
        discounted = np.maximum(counts - spec.delta_ad, 0.0) / lengths
        return np.log(discounted + spec.delta_ad * np.asarray(unique_terms, dtype=np.float64) / lengths * collection_probs)


def ml_distribution(counts):
    # renormalized over the surviving (in-vocabulary) terms
    total = counts.sum()
    return counts / total if total > 0 else counts


def kl_divergences(matrix, lengths, unique_terms, term_ids, probs, collection_probs, spec):
    """D(p || smoothed model of each row) for a sparse count matrix.

    `probs` is an ML distribution over `term_ids`; only those columns matter
    since terms with p = 0 contribute nothing.
    """
    columns = matrix[:, term_ids].toarray()
    log_models = log_smoothed(columns, lengths[:, None], unique_terms[:, None], collection_probs[term_ids], spec)
    cross = (log_models * probs).sum(axis=1)
    return xlogy(probs, probs).sum() - cross


@dataclass(frozen=True, eq=False)
class UnigramLM:
    term_ids: np.ndarray
    counts: np.ndarray
    source_length: int
    smoothing: SmoothingSpec
    stats: object

    @property
    def unique_terms(self):
        return len(self.term_ids)

    @property
    def source_counts(self):
        return MappingProxyType({self.stats.vocabulary[t]: int(c) for t, c in zip(self.term_ids, self.counts)})

    def counts_of(self, term_ids):
        positions = np.searchsorted(self.term_ids, term_ids)
        positions = np.minimum(positions, len(self.term_ids) - 1)
        return np.where(self.term_ids[positions] == term_ids, self.counts[positions], 0.0)

    def log_prob(self, term_ids):
        term_ids = np.asarray(term_ids, dtype=np.int64)
        return log_smoothed(self.counts_of(term_ids), self.source_length, self.unique_terms, self.stats.collection_probs[term_ids], self.smoothing)

    def distribution(self):
        return np.exp(self.log_prob(np.arange(len(self.stats.vocabulary))))


def smoothed_prob(lm, term):
    term_id = lm.stats.term_index.get(term)
    if term_id is None:
        raise KeyError(f"Term {term!r} is outside the corpus vocabulary")
    return float(np.exp(lm.log_prob([term_id])[0]))


def lm_from_counts(term_ids, counts, stats, spec):
    order = np.argsort(term_ids, kind="stable")
    term_ids = np.asarray(term_ids, dtype=np.int64)[order]
    counts = np.asarray(counts, dtype=np.float64)[order]
    return UnigramLM(term_ids, counts, int(counts.sum()), spec, stats)


def induce_doc_lm(doc, stats, spec):
    term_index = stats.term_index
    unknown = [term for term in doc.term_counts if term not in term_index]
    if unknown:
        raise KeyError(f"Terms outside the corpus vocabulary: {', '.join(sorted(unknown))}")
    term_ids = [term_index[term] for term in doc.term_counts]
    return lm_from_counts(term_ids, list(doc.term_counts.values()), stats, spec)


def induce_cluster_lm(cluster, index, spec):
    rows = [index.row_of(doc_id) for doc_id in cluster.member_ids]
    summed = index.counts[rows].sum(axis=0).A1
    term_ids = np.flatnonzero(summed)
    return lm_from_counts(term_ids, summed[term_ids], index.stats, spec)


def kl_score_with_flag(target, lm):
    """exp(-D(ML of target || lm)) and whether every target term was out of vocabulary.

    Out-of-vocabulary target terms are dropped; an all-OOV target scores 0.
    """
    term_index = lm.stats.term_index
    known = [(term_index[term], count) for term, count in target.term_counts.items() if term in term_index]
    if len(known) == 0:
        logger.debug("%s has no in-vocabulary terms; score is 0", target.id)
        return 0.0, True
    term_ids = np.array([term_id for term_id, _ in known], dtype=np.int64)
    probs = ml_distribution(np.array([count for _, count in known], dtype=np.float64))
    divergence = xlogy(probs, probs).sum() - (probs * lm.log_prob(term_ids)).sum()
    return float(np.exp(-divergence)), False


def kl_score(target, lm):
    return kl_score_with_flag(target, lm)[0]


def kl_divergence(p, q_dist):
    p = np.asarray(p, dtype=np.float64)
    q_dist = np.asarray(q_dist, dtype=np.float64)
    if p.shape != q_dist.shape:
        raise ValueError(f"Distributions differ in shape: {p.shape} vs {q_dist.shape}")
    if np.any((p > 0) & (q_dist <= 0)):
        raise ValueError("q_dist has zero mass on the support of p")
    return float(rel_entr(p, q_dist).sum())


@dataclass(frozen=True)
class TfIdfVector:
    weights: MappingProxyType

    def __post_init__(self):
        object.__setattr__(self, "weights", MappingProxyType(dict(self.weights)))


def tfidf_weights(counts, doc_freq, num_docs):
    return np.log1p(counts) * np.log(num_docs / doc_freq)


def tfidf_vector(term_counts, stats):
    term_index = stats.term_index
    weights = {}
    for term, count in term_counts.items():
        if count > 0 and term in term_index:
            term_id = term_index[term]
            weights[term] = float(tfidf_weights(count, stats.doc_freq_counts[term_id], stats.num_docs))
    return TfIdfVector(weights)


def tfidf_score(query_vec, item_vec):
    small, large = sorted((query_vec.weights, item_vec.weights), key=len)
    return float(sum(weight * large[term] for term, weight in small.items() if term in large))
