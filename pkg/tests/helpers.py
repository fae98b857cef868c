from FacetLM.corpus import CorpusIndex, Document, Query, TokenizationConfig
import numpy as np


def make_index(texts, config=None):
    config = config or TokenizationConfig()
    documents = [Document.from_tokens(doc_id, text.split()) for doc_id, text in texts.items()]
    return CorpusIndex.from_documents(documents, config)


def make_query(query_id, text):
    return Query.from_tokens(query_id, text.split())


def random_texts(rng, num_docs, vocab_size, min_len=2, max_len=12):
    vocabulary = [f"w{i}" for i in range(vocab_size)]
    weights = 1.0 / np.arange(1, vocab_size + 1)
    weights /= weights.sum()
    texts = {}
    for number in range(num_docs):
        length = int(rng.integers(min_len, max_len + 1))
        texts[f"d{number:02d}"] = " ".join(vocabulary[i] for i in rng.choice(vocab_size, size=length, p=weights))
    return texts


def counts_of(texts):
    from collections import Counter
    return {doc_id: Counter(text.split()) for doc_id, text in texts.items()}
