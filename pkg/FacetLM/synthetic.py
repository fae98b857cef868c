from dataclasses import dataclass
import json, os
import numpy as np


@dataclass(frozen=True)
class PlantedTopics:
    """Planted-topic collection: every document and query is drawn from one topic.

    Topic words are `t<topic>w<j>`, shared background words `bg<j>`; both
    follow Zipf-like distributions. Queries pick distinct words among the
    `query_pool` most probable words of their topic, so nearly every
    relevant document holds a query term while documents of other topics
    never do.
    """

    documents: tuple
    queries: tuple
    qrels: dict
    topics: dict

    def write(self, folder):
        os.makedirs(folder, exist_ok=True)
        paths = {
            "corpus": os.path.join(folder, "corpus.jsonl"),
            "queries": os.path.join(folder, "queries.tsv"),
            "qrels": os.path.join(folder, "qrels.txt"),
        }
        with open(paths["corpus"], "w", encoding="utf-8", newline="\n") as f:
            for doc_id, text in self.documents:
                f.write(json.dumps({"id": doc_id, "text": text}) + "\n")
        with open(paths["queries"], "w", encoding="utf-8", newline="\n") as f:
            for query_id, text in self.queries:
                f.write(f"{query_id}\t{text}\n")
        with open(paths["qrels"], "w", encoding="utf-8", newline="\n") as f:
            for query_id in sorted(self.qrels):
                for doc_id in sorted(self.qrels[query_id]):
                    f.write(f"{query_id} 0 {doc_id} {self.qrels[query_id][doc_id]}\n")
        return paths


def zipf_weights(size, exponent=1.0):
    weights = 1.0 / np.arange(1, size + 1) ** exponent
    return weights / weights.sum()


def planted_topics(
    num_docs=500,
    num_topics=10,
    num_queries=20,
    topic_terms=60,
    background_terms=300,
    doc_length=(70, 90),
    topic_share=0.7,
    query_length=2,
    query_pool=3,
    seed=0,
):
    if query_length > query_pool:
        raise ValueError(f"query_length ({query_length}) exceeds query_pool ({query_pool})")
    rng = np.random.default_rng(seed)
    topic_probs = zipf_weights(topic_terms)
    background_probs = zipf_weights(background_terms, exponent=0.8)
    # queries use the topic's most probable words, weighted as in its documents
    pool_probs = topic_probs[:query_pool] / topic_probs[:query_pool].sum()
    width = len(str(num_docs))
    documents, topics = [], {}
    for number in range(num_docs):
        topic = number % num_topics
        doc_id = f"d{number:0{width}d}"
        length = int(rng.integers(doc_length[0], doc_length[1] + 1))
        from_topic = rng.random(length) < topic_share
        words = [
            f"t{topic}w{rng.choice(topic_terms, p=topic_probs)}" if use_topic else f"bg{rng.choice(background_terms, p=background_probs)}"
            for use_topic in from_topic
        ]
        documents.append((doc_id, " ".join(words)))
        topics[doc_id] = topic
    queries, qrels = [], {}
    for number in range(num_queries):
        topic = number % num_topics
        query_id = f"q{number + 1:02d}"
        picks = rng.choice(query_pool, size=query_length, replace=False, p=pool_probs)
        queries.append((query_id, " ".join(f"t{topic}w{j}" for j in sorted(picks))))
        qrels[query_id] = {doc_id: 1 for doc_id, doc_topic in topics.items() if doc_topic == topic}
    return PlantedTopics(tuple(documents), tuple(queries), qrels, topics)
