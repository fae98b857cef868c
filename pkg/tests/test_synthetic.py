from FacetLM.clustering import build_clusters
from FacetLM.corpus import CorpusIndex, Document, Query, TokenizationConfig
from FacetLM.evaluation import Qrels, evaluate_run
from FacetLM.reprs import SmoothingSpec
from FacetLM.retrieval import AlgorithmSpec, batch_search
from FacetLM.synthetic import planted_topics
import os
import pytest


SPEC = SmoothingSpec(mu=2000.0)
K, M, LAMBDA = 10, 100, 0.6


@pytest.fixture(scope="module")
def collection():
    planted = planted_topics(num_docs=500, num_topics=10, num_queries=20, seed=0)
    index = CorpusIndex.from_documents([Document.from_tokens(doc_id, text.split()) for doc_id, text in planted.documents], TokenizationConfig())
    queries = [Query.from_tokens(query_id, text.split()) for query_id, text in planted.queries]
    clusters = build_clusters(index, K, SPEC, show_progress=False)
    return planted, index, queries, clusters


def evaluate(collection, algorithm):
    planted, index, queries, clusters = collection
    ranked_lists, _ = batch_search(algorithm, queries, index, clusters, SPEC, show_progress=False)
    return ranked_lists, evaluate_run(ranked_lists, Qrels(planted.qrels), algorithm.name)


def test_planted_topics_shape():
    planted = planted_topics(num_docs=30, num_topics=3, num_queries=6, seed=1)
    assert len(planted.documents) == 30
    assert [query_id for query_id, _ in planted.queries] == [f"q{i:02d}" for i in range(1, 7)]
    assert all(len(docs) == 10 for docs in planted.qrels.values())
    assert planted_topics(num_docs=30, num_topics=3, num_queries=6, seed=1) == planted


def test_queries_use_top_topic_words():
    planted = planted_topics(num_docs=30, num_topics=3, num_queries=12, seed=2)
    for number, (_, text) in enumerate(planted.queries):
        words = text.split()
        assert len(set(words)) == 2
        assert all(word in {f"t{number % 3}w{j}" for j in range(3)} for word in words)


def test_query_longer_than_pool():
    with pytest.raises(ValueError):
        planted_topics(num_docs=10, query_length=4, query_pool=3)


def test_write(tmp_path):
    paths = planted_topics(num_docs=20, num_topics=2, num_queries=2).write(str(tmp_path))
    assert all(os.path.isfile(path) for path in paths.values())
    assert Qrels.from_file(paths["qrels"]).num_relevant("q01") == 10


@pytest.mark.slow
@pytest.mark.parametrize("n", [1000, 100])
def test_interpolation_matches_or_beats_baseline(collection, n):
    _, baseline = evaluate(collection, AlgorithmSpec("lm", n=n))
    _, blended = evaluate(collection, AlgorithmSpec("interpolation", m=M, lam=LAMBDA, n=n))
    assert len(blended) == len(baseline) == 20
    assert blended.mean_recall >= baseline.mean_recall
    assert blended.mean_average_precision >= baseline.mean_average_precision


@pytest.mark.slow
def test_rerank_helps_aspect(collection):
    plain, plain_report = evaluate(collection, AlgorithmSpec("aspect_x", m=M, rerank=False))
    reranked, reranked_report = evaluate(collection, AlgorithmSpec("aspect_x", m=M, rerank=True))
    for a, b in zip(plain, reranked):
        assert sorted(a.doc_ids) == sorted(b.doc_ids)
    assert reranked_report.mean_average_precision >= plain_report.mean_average_precision
    assert plain_report.mean_recall == pytest.approx(reranked_report.mean_recall)
