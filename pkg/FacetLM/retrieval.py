from .runners import (
    LanguageModelRunner,
    BasisSelectRunner,
    SetSelectRunner,
    BagSelectRunner,
    UniformAspectRunner,
    AspectRunner,
    InterpolationRunner,
)
from .scoring import FacetSet, SearchContext, build_scorer
from .clustering import FingerprintMismatchError
from dataclasses import dataclass, field
import logging
import numpy as np
from tqdm import tqdm


logger = logging.getLogger(__name__)

RUNNERS = {
    "lm": LanguageModelRunner,
    "basis_select": BasisSelectRunner,
    "set_select": SetSelectRunner,
    "bag_select": BagSelectRunner,
    "uniform_aspect_x": UniformAspectRunner,
    "aspect_x": AspectRunner,
    "interpolation": InterpolationRunner,
}
ALGORITHMS = tuple(RUNNERS)
SELECTION_ALGORITHMS = ("basis_select", "set_select", "bag_select")
# "Re-rank by p_d(q)?" per algorithm
RERANK_DEFAULTS = {
    "lm": False,
    "basis_select": False,
    "set_select": False,
    "bag_select": True,
    "uniform_aspect_x": True,
    "aspect_x": True,
    "interpolation": False,
}
REPRESENTATIONS = ("lm", "tfidf")


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str = "lm"
    m: int = None
    n: int = 1000
    lam: float = 0.6
    rerank: bool = None
    representation: str = "lm"
    doc_term: bool = True
    normalize_cluster_posteriors: bool = False

    def __post_init__(self):
        if self.name not in RUNNERS:
            raise ValueError(f"Unknown algorithm {self.name!r}; expected one of {', '.join(ALGORITHMS)}")
        if self.representation not in REPRESENTATIONS:
            raise ValueError(f"Unknown representation {self.representation!r}")
        if self.m is None:
            object.__setattr__(self, "m", 1000 if self.name in SELECTION_ALGORITHMS else 10000)
        if self.rerank is None:
            object.__setattr__(self, "rerank", RERANK_DEFAULTS[self.name])
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.n < 1:
            raise ValueError(f"N must be >= 1, got {self.n}")
        if self.name == "interpolation" and not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must lie in [0, 1], got {self.lam}")

    @property
    def uses_clusters(self):
        return self.name != "lm"

    def to_dict(self):
        return {
            "name": self.name,
            "m": self.m,
            "n": self.n,
            "lam": self.lam,
            "rerank": self.rerank,
            "representation": self.representation,
            "doc_term": self.doc_term,
            "normalize_cluster_posteriors": self.normalize_cluster_posteriors,
        }


@dataclass(frozen=True)
class RankedEntry:
    doc_id: str
    score: float
    rank: int


@dataclass(frozen=True)
class RankedList:
    query_id: str
    entries: tuple = ()
    note: str = None
    facets: FacetSet = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def doc_ids(self):
        return [entry.doc_id for entry in self.entries]

    @classmethod
    def from_rows(cls, query_id, index, rows, scores, **kwargs):
        entries = [RankedEntry(index.doc_ids[row], float(score), rank) for rank, (row, score) in enumerate(zip(rows, scores), start=1)]
        return cls(query_id, entries, **kwargs)


@dataclass
class RunReport:
    algorithm: str
    num_queries: int = 0
    empty_queries: list = field(default_factory=list)
    dropped_terms: dict = field(default_factory=dict)

    def summary(self):
        message = f"{self.algorithm}: {self.num_queries} queries"
        if self.empty_queries:
            message += f", {len(self.empty_queries)} empty ({', '.join(self.empty_queries)})"
        if self.dropped_terms:
            message += f", {len(self.dropped_terms)} with out-of-vocabulary terms"
        return message


def order_rows(rows, scores):
    # descending score, ties by ascending id (= row)
    order = np.lexsort((rows, -scores))
    return rows[order], scores[order]


def check_clusters(algo, index, clusters):
    if not algo.uses_clusters:
        return
    if clusters is None:
        raise ValueError(f"Algorithm {algo.name} needs a cluster set")
    if clusters.fingerprint != index.fingerprint:
        raise FingerprintMismatchError(
            f"Clusters were built for index {clusters.fingerprint[:12]}, not {index.fingerprint[:12]}; rebuild them"
        )


def rank_clusters(query, clusters, spec, m, index, representation="lm", scorer=None):
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    clusters.check_index(index)
    if scorer is None:
        scorer = build_scorer(representation, index, clusters, spec)
    context = SearchContext(scorer, query, None)
    if len(context.terms) == 0:
        logger.warning("Query %s has no in-vocabulary terms; no clusters ranked", query.id)
        return []
    return [clusters[position] for position in context.top_clusters(m)]


def search(context, index):
    algo = context.algorithm
    query = context.query
    if len(context.terms) == 0:
        return RankedList(query.id, (), note="empty query")
    rows, scores, facets = RUNNERS[algo.name]().run(context)
    rows = np.asarray(rows, dtype=np.int64)
    scores = np.asarray(scores, dtype=np.float64)
    keep = scores > 0
    rows, scores = order_rows(rows[keep], scores[keep])
    rows, scores = rows[:algo.n], scores[:algo.n]
    if algo.rerank:
        rows, scores = order_rows(rows, context.doc_scores[rows])
    return RankedList.from_rows(query.id, index, rows, scores, facets=facets)


def run_algorithm(algo, query, index, clusters, spec, scorer=None):
    check_clusters(algo, index, clusters)
    if scorer is None:
        scorer = build_scorer(algo.representation, index, clusters if algo.uses_clusters else None, spec)
    return search(SearchContext(scorer, query, algo), index)


def rerank_by_doc_lm(ranked, query, index, spec, representation="lm", scorer=None):
    if scorer is None:
        scorer = build_scorer(representation, index, None, spec)
    doc_scores = scorer.score_documents(scorer.query_terms(query))
    rows = np.array([index.row_of(entry.doc_id) for entry in ranked.entries], dtype=np.int64)
    rows, scores = order_rows(rows, doc_scores[rows])
    return RankedList.from_rows(ranked.query_id, index, rows, scores, note=ranked.note, facets=ranked.facets)


def batch_search(algo, queries, index, clusters, spec, show_progress=True):
    check_clusters(algo, index, clusters)
    scorer = build_scorer(algo.representation, index, clusters if algo.uses_clusters else None, spec)
    report = RunReport(algo.name)
    ranked_lists = []
    for query in tqdm(queries, desc="Searching", disable=not show_progress):
        context = SearchContext(scorer, query, algo)
        if context.terms.dropped:
            report.dropped_terms[query.id] = context.terms.dropped
        if len(context.terms) == 0:
            report.empty_queries.append(query.id)
            logger.warning("Query %s has no in-vocabulary terms; it retrieves nothing", query.id)
        ranked_lists.append(search(context, index))
        report.num_queries += 1
    return ranked_lists, report
