from .data import read_qrels, read_run_file, write_tsv
from .retrieval import RankedEntry, RankedList
from dataclasses import dataclass, field
import logging
import numpy as np
from scipy import stats


logger = logging.getLogger(__name__)

RECALL_LEVELS = tuple(i / 10 for i in range(11))
RECALL_TOLERANCE = 1e-12
EXACT_WILCOXON_LIMIT = 25
SIGNIFICANCE_LEVEL = 0.05
# report row label -> per-query attribute
METRICS = {"Avg. Prec.": "average_precision", "Prec. at 0": "precision_at_0", "Recall": "recall"}


class Qrels:
    def __init__(self, judgments):
        self.judgments = {query_id: dict(docs) for query_id, docs in judgments.items()}

    @classmethod
    def from_file(cls, path):
        return cls(read_qrels(path))

    def __contains__(self, query_id):
        return query_id in self.judgments

    def relevant(self, query_id):
        if query_id not in self.judgments:
            raise KeyError(f"Query {query_id} has no judgments")
        return {doc_id for doc_id, relevance in self.judgments[query_id].items() if relevance > 0}

    def num_relevant(self, query_id):
        return len(self.relevant(query_id)) if query_id in self.judgments else 0

    def judged_queries(self):
        # queries with at least one relevant document, in id order
        return [query_id for query_id in sorted(self.judgments) if self.num_relevant(query_id) > 0]


def ranking_of(ranked):
    if isinstance(ranked, RankedList):
        return ranked.doc_ids
    return list(ranked)


def relevant_for(qrels, query_id):
    relevant = qrels.relevant(query_id)
    if len(relevant) == 0:
        raise ValueError(f"Query {query_id} has no relevant documents")
    return relevant


def hits_of(ranked, relevant):
    return np.array([doc_id in relevant for doc_id in ranking_of(ranked)], dtype=bool)


def average_precision(ranked, qrels, query_id):
    relevant = relevant_for(qrels, query_id)
    hits = hits_of(ranked, relevant)
    if not hits.any():
        return 0.0
    ranks = np.flatnonzero(hits) + 1
    return float((np.arange(1, len(ranks) + 1) / ranks).sum() / len(relevant))


def interpolated_precision(ranked, qrels, query_id, levels=RECALL_LEVELS):
    relevant = relevant_for(qrels, query_id)
    hits = hits_of(ranked, relevant)
    if len(hits) == 0:
        return [0.0] * len(levels)
    found = np.cumsum(hits)
    precision = found / np.arange(1, len(hits) + 1)
    recall = found / len(relevant)
    values = []
    for level in levels:
        reached = recall >= level - RECALL_TOLERANCE
        values.append(float(precision[reached].max()) if reached.any() else 0.0)
    return values


def recall_at_n(ranked, qrels, query_id):
    relevant = relevant_for(qrels, query_id)
    return float(hits_of(ranked, relevant).sum() / len(relevant))


@dataclass(frozen=True)
class QueryMetrics:
    query_id: str
    average_precision: float
    curve: tuple
    recall: float
    relevant_retrieved: int
    num_relevant: int

    @property
    def precision_at_0(self):
        return self.curve[0]


@dataclass
class EvalReport:
    name: str
    per_query: dict = field(default_factory=dict)
    excluded: list = field(default_factory=list)

    def __len__(self):
        return len(self.per_query)

    def values(self, attribute):
        return np.array([getattr(metrics, attribute) for metrics in self.per_query.values()], dtype=np.float64)

    def mean(self, attribute):
        return float(self.values(attribute).mean()) if self.per_query else 0.0

    @property
    def mean_average_precision(self):
        return self.mean("average_precision")

    @property
    def mean_precision_at_0(self):
        return self.mean("precision_at_0")

    @property
    def mean_recall(self):
        return self.mean("recall")

    @property
    def relevant_retrieved(self):
        return sum(metrics.relevant_retrieved for metrics in self.per_query.values())

    @property
    def num_relevant(self):
        return sum(metrics.num_relevant for metrics in self.per_query.values())

    def mean_curve(self):
        if not self.per_query:
            return [0.0] * len(RECALL_LEVELS)
        return np.mean([metrics.curve for metrics in self.per_query.values()], axis=0).tolist()


def evaluate_query(ranked, qrels, query_id):
    relevant = relevant_for(qrels, query_id)
    return QueryMetrics(
        query_id=query_id,
        average_precision=average_precision(ranked, qrels, query_id),
        curve=tuple(interpolated_precision(ranked, qrels, query_id)),
        recall=recall_at_n(ranked, qrels, query_id),
        relevant_retrieved=int(hits_of(ranked, relevant).sum()),
        num_relevant=len(relevant),
    )


def evaluate_run(ranked_lists, qrels, name="run"):
    """Per-query metrics over every judged query with at least one relevant document.

    A judged query missing from the run counts as an empty ranking, so a run
    file (which has no lines for empty rankings) scores the same as the
    in-memory lists it was written from. Run queries without relevant
    documents are listed in `excluded`.
    """
    report = EvalReport(name)
    by_query = {ranked.query_id: ranked for ranked in ranked_lists}
    report.excluded = [query_id for query_id in by_query if qrels.num_relevant(query_id) == 0]
    missing = []
    for query_id in qrels.judged_queries():
        ranked = by_query.get(query_id)
        if ranked is None:
            missing.append(query_id)
            ranked = RankedList(query_id, ())
        report.per_query[query_id] = evaluate_query(ranked, qrels, query_id)
    if report.excluded:
        logger.warning("%s: %d query(ies) without relevant documents excluded: %s", name, len(report.excluded), ", ".join(report.excluded))
    if missing:
        logger.info("%s: %d judged query(ies) retrieved nothing: %s", name, len(missing), ", ".join(missing))
    return report


def load_run(path):
    run = read_run_file(path)
    return [
        RankedList(query_id, [RankedEntry(doc_id, score, rank) for doc_id, rank, score in entries])
        for query_id, entries in run.items()
    ]


@dataclass(frozen=True)
class WilcoxonResult:
    p_value: float
    statistic: float
    num_nonzero: int
    exact: bool
    all_zero: bool = False


def signed_rank_distribution(doubled_ranks):
    # counts[s] = number of sign assignments whose doubled positive rank sum is s
    counts = np.zeros(int(doubled_ranks.sum()) + 1, dtype=np.float64)
    counts[0] = 1.0
    for rank in doubled_ranks:
        shifted = np.zeros_like(counts)
        shifted[rank:] = counts[:len(counts) - rank]
        counts = counts + shifted
    return counts


def wilcoxon_signed_rank(paired):
    """Two-sided Wilcoxon signed-rank test on (a, b) pairs.

    Zero differences are dropped and tied |differences| share their average
    rank. Up to 25 non-zero pairs the null distribution is enumerated exactly;
    above that the normal approximation with continuity and tie corrections
    is used.
    """
    paired = list(paired)
    if len(paired) == 0:
        raise ValueError("Wilcoxon test needs at least one pair")
    differences = np.array([a - b for a, b in paired], dtype=np.float64)
    differences = differences[differences != 0]
    n = len(differences)
    if n == 0:
        logger.warning("All paired differences are zero; p = 1")
        return WilcoxonResult(1.0, 0.0, 0, True, all_zero=True)
    ranks = stats.rankdata(np.abs(differences))
    statistic = float(ranks[differences > 0].sum())
    if n <= EXACT_WILCOXON_LIMIT:
        # average ranks are multiples of 1/2
        doubled = np.rint(2 * ranks).astype(np.int64)
        total = int(doubled.sum())
        observed = int(doubled[differences > 0].sum())
        counts = signed_rank_distribution(doubled)
        sums = np.arange(total + 1)
        extreme = np.abs(2 * sums - total) >= abs(2 * observed - total)
        p_value = float(counts[extreme].sum() / counts.sum())
        return WilcoxonResult(min(p_value, 1.0), statistic, n, True)
    mean = n * (n + 1) / 4
    _, tie_counts = np.unique(ranks, return_counts=True)
    variance = n * (n + 1) * (2 * n + 1) / 24 - (tie_counts ** 3 - tie_counts).sum() / 48
    z = max(abs(statistic - mean) - 0.5, 0.0) / np.sqrt(variance)
    return WilcoxonResult(float(min(2 * stats.norm.sf(z), 1.0)), statistic, n, False)


def wilcoxon_two_sided(paired):
    return wilcoxon_signed_rank(paired).p_value


@dataclass
class Comparison:
    baseline: EvalReport
    other: EvalReport
    p_values: dict = field(default_factory=dict)

    def significant(self, label):
        return self.p_values[label] < SIGNIFICANCE_LEVEL


def compare_reports(baseline, other):
    if set(baseline.per_query) != set(other.per_query):
        difference = sorted(set(baseline.per_query) ^ set(other.per_query))
        raise ValueError(f"Runs cover different queries: {', '.join(difference)}")
    comparison = Comparison(baseline, other)
    query_ids = sorted(baseline.per_query)
    for label, attribute in METRICS.items():
        paired = [(getattr(other.per_query[q], attribute), getattr(baseline.per_query[q], attribute)) for q in query_ids]
        comparison.p_values[label] = wilcoxon_two_sided(paired) if paired else 1.0
    return comparison


def compare_runs(run_a, run_b, qrels, names=("baseline", "run")):
    queries_a = {ranked.query_id for ranked in run_a}
    queries_b = {ranked.query_id for ranked in run_b}
    if queries_a != queries_b:
        raise ValueError(f"Runs cover different queries: {', '.join(sorted(queries_a ^ queries_b))}")
    return compare_reports(evaluate_run(run_a, qrels, names[0]), evaluate_run(run_b, qrels, names[1]))


def format_report(reports, comparisons=None):
    """Tab-separated table: one column per run, a p-value column per compared run.

    `comparisons` maps a report name to its Comparison against the first report.
    """
    comparisons = comparisons or {}
    header = ["Metric"]
    for report in reports:
        header.append(report.name)
        if report.name in comparisons:
            header.append(f"{report.name} p-value")
    rows = []
    for label, attribute in METRICS.items():
        row = [label]
        for report in reports:
            cell = "%.2f%%" % (100 * report.mean(attribute))
            if report.name in comparisons:
                comparison = comparisons[report.name]
                row.append(cell + ("*" if comparison.significant(label) else ""))
                row.append("%.4f" % comparison.p_values[label])
            else:
                row.append(cell)
        rows.append(row)
    row = ["RelRet"]
    for report in reports:
        row.append(f"{report.relevant_retrieved}/{report.num_relevant}")
        if report.name in comparisons:
            row.append("")
    rows.append(row)
    lines = ["\t".join(header)] + ["\t".join(row) for row in rows]
    return "\n".join(lines) + "\n"


def write_report(path, reports, comparisons=None):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(format_report(reports, comparisons))
    return path


def write_curve(path, curve):
    return write_tsv(path, [("%.1f" % level, "%.4f" % value) for level, value in zip(RECALL_LEVELS, curve)])
