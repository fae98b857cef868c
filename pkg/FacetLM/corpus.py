from .data import FormatError, read_corpus_records, read_query_records, read_index_files, write_index_files
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from types import MappingProxyType
import hashlib, json, logging, re
import numpy as np
from scipy import sparse


logger = logging.getLogger(__name__)

TOKEN_PATTERN = re.compile(r"[^\W_]+")
STEMMERS = ("none", "porter")


@lru_cache(maxsize=1)
def porter_stemmer():
    from nltk.stem import PorterStemmer
    return PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)


@dataclass(frozen=True)
class TokenizationConfig:
    lowercase: bool = True
    min_token_len: int = 1
    stopwords: frozenset = None
    stem: str = "none"

    def __post_init__(self):
        if self.min_token_len < 1:
            raise ValueError(f"min_token_len must be >= 1, got {self.min_token_len}")
        if self.stem not in STEMMERS:
            raise ValueError(f"stem must be one of {STEMMERS}, got {self.stem!r}")
        if self.stopwords is not None:
            # stopwords are matched against tokens after case folding
            words = (word.lower() for word in self.stopwords) if self.lowercase else self.stopwords
            object.__setattr__(self, "stopwords", frozenset(words))

    def to_dict(self):
        return {
            "lowercase": self.lowercase,
            "min_token_len": self.min_token_len,
            "stopwords": None if self.stopwords is None else sorted(self.stopwords),
            "stem": self.stem,
        }

    @classmethod
    def from_dict(cls, values):
        stopwords = values.get("stopwords")
        return cls(
            lowercase=bool(values.get("lowercase", True)),
            min_token_len=int(values.get("min_token_len", 1)),
            stopwords=None if stopwords is None else frozenset(stopwords),
            stem=values.get("stem", "none"),
        )


def tokenize(text, config):
    tokens = TOKEN_PATTERN.findall(text)
    if config.lowercase:
        tokens = [token.lower() for token in tokens]
    if config.stopwords:
        tokens = [token for token in tokens if token not in config.stopwords]
    tokens = [token for token in tokens if len(token) >= config.min_token_len]
    if config.stem == "porter":
        stemmer = porter_stemmer()
        tokens = [stemmer.stem(token, to_lowercase=False) for token in tokens]
    return tokens


@dataclass(frozen=True)
class Query:
    id: str
    term_counts: MappingProxyType
    length: int = field(init=False)

    def __post_init__(self):
        if not self.id:
            raise ValueError("Query id must be non-empty")
        counts = dict(self.term_counts)
        if any(count < 1 for count in counts.values()):
            raise ValueError(f"Term counts of {self.id!r} must be positive")
        object.__setattr__(self, "term_counts", MappingProxyType(counts))
        object.__setattr__(self, "length", sum(counts.values()))

    @classmethod
    def from_tokens(cls, item_id, tokens):
        return cls(item_id, Counter(tokens))

    @property
    def is_empty(self):
        return self.length == 0


@dataclass(frozen=True)
class Document(Query):
    def __post_init__(self):
        super().__post_init__()
        if self.length < 1:
            raise ValueError(f"Document {self.id!r} is empty")


@dataclass(frozen=True, eq=False)
class CorpusStats:
    vocabulary: tuple
    collection_counts: np.ndarray
    doc_freq_counts: np.ndarray
    total_tokens: int
    num_docs: int

    @property
    def collection_term_counts(self):
        return dict(zip(self.vocabulary, self.collection_counts.tolist()))

    @property
    def doc_freq(self):
        return dict(zip(self.vocabulary, self.doc_freq_counts.tolist()))

    @cached_property
    def term_index(self):
        return {term: term_id for term_id, term in enumerate(self.vocabulary)}

    @cached_property
    def collection_probs(self):
        return self.collection_counts / self.total_tokens

    @cached_property
    def idf(self):
        return np.log(self.num_docs / self.doc_freq_counts)


class CorpusIndex:
    """Immutable bag-of-words index.

    Documents are kept in lexicographic id order and terms in lexicographic
    order, so document rows and term ids are stable for identical input.
    """

    def __init__(self, doc_ids, vocabulary, counts, config, skipped=0):
        self.doc_ids = tuple(doc_ids)
        self.vocabulary = tuple(vocabulary)
        self.config = config
        self.skipped = skipped
        self.doc_rows = {doc_id: row for row, doc_id in enumerate(self.doc_ids)}
        counts = sparse.csr_matrix(counts, shape=(len(self.doc_ids), len(self.vocabulary)), dtype=np.int64)
        counts.sum_duplicates()
        counts.sort_indices()
        self.counts = counts
        self.counts_by_term = counts.tocsc()
        self.doc_lengths = np.asarray(counts.sum(axis=1)).ravel()
        self.unique_terms = np.diff(counts.indptr)
        self.stats = CorpusStats(
            vocabulary=self.vocabulary,
            collection_counts=np.asarray(counts.sum(axis=0)).ravel(),
            doc_freq_counts=np.bincount(counts.indices, minlength=len(self.vocabulary)),
            total_tokens=int(self.doc_lengths.sum()),
            num_docs=len(self.doc_ids),
        )
        self.term_ids = self.stats.term_index
        self.fingerprint = hashlib.sha256(self.canonical_text().encode("utf-8")).hexdigest()

    @classmethod
    def from_documents(cls, documents, config, skipped=0):
        documents = sorted(documents, key=lambda document: document.id)
        if len(documents) == 0:
            raise ValueError("The corpus holds no non-empty documents")
        vocabulary = sorted({term for document in documents for term in document.term_counts})
        term_ids = {term: term_id for term_id, term in enumerate(vocabulary)}
        rows, cols, values = [], [], []
        for row, document in enumerate(documents):
            for term, count in document.term_counts.items():
                rows.append(row)
                cols.append(term_ids[term])
                values.append(count)
        counts = sparse.coo_matrix((values, (rows, cols)), shape=(len(documents), len(vocabulary)))
        return cls([document.id for document in documents], vocabulary, counts, config, skipped=skipped)

    def __len__(self):
        return len(self.doc_ids)

    def __contains__(self, doc_id):
        return doc_id in self.doc_rows

    def __getitem__(self, row):
        start, end = self.counts.indptr[row], self.counts.indptr[row + 1]
        terms = [self.vocabulary[term_id] for term_id in self.counts.indices[start:end]]
        return Document(self.doc_ids[row], dict(zip(terms, self.counts.data[start:end].tolist())))

    def document(self, doc_id):
        return self[self.doc_rows[doc_id]]

    def row_of(self, doc_id):
        if doc_id not in self.doc_rows:
            raise KeyError(f"Unknown document id: {doc_id}")
        return self.doc_rows[doc_id]

    def term_vector(self, term_counts):
        # in-vocabulary (term ids, counts) sorted by id, plus the dropped terms
        known = sorted((self.term_ids[term], count) for term, count in term_counts.items() if term in self.term_ids)
        dropped = sorted(term for term in term_counts if term not in self.term_ids)
        term_ids = np.array([term_id for term_id, _ in known], dtype=np.int64)
        counts = np.array([count for _, count in known], dtype=np.float64)
        return term_ids, counts, dropped

    def vocabulary_lines(self):
        for term_id, term in enumerate(self.vocabulary):
            yield f"{term_id}\t{term}\t{self.stats.collection_counts[term_id]}\t{self.stats.doc_freq_counts[term_id]}"

    def postings_lines(self):
        for row, doc_id in enumerate(self.doc_ids):
            start, end = self.counts.indptr[row], self.counts.indptr[row + 1]
            pairs = " ".join(f"{term_id}:{count}" for term_id, count in zip(self.counts.indices[start:end], self.counts.data[start:end]))
            yield f"{doc_id}\t{pairs}"

    def canonical_text(self):
        lines = [json.dumps(self.config.to_dict(), sort_keys=True)]
        lines.extend(self.vocabulary_lines())
        lines.extend(self.postings_lines())
        return "\n".join(lines)

    def summary(self):
        return f"docs={len(self)} tokens={self.stats.total_tokens} vocab={len(self.vocabulary)} skipped={self.skipped}"


def ingest_corpus(path, config):
    documents, first_seen, skipped = [], {}, 0
    for line_number, doc_id, text in read_corpus_records(path):
        if doc_id in first_seen:
            raise FormatError(path, line_number, f"duplicate document id {doc_id!r} (first seen on line {first_seen[doc_id]})")
        first_seen[doc_id] = line_number
        tokens = tokenize(text, config)
        if len(tokens) == 0:
            skipped += 1
            logger.debug("Document %s is empty after tokenization", doc_id)
            continue
        documents.append(Document.from_tokens(doc_id, tokens))
    if skipped > 0:
        logger.warning("Skipped %d document(s) that are empty after tokenization", skipped)
    return CorpusIndex.from_documents(documents, config, skipped=skipped)


def ingest_queries(path, config):
    queries, first_seen = [], {}
    for line_number, query_id, text in read_query_records(path):
        if query_id in first_seen:
            raise FormatError(path, line_number, f"duplicate query id {query_id!r} (first seen on line {first_seen[query_id]})")
        first_seen[query_id] = line_number
        query = Query.from_tokens(query_id, tokenize(text, config))
        if query.is_empty:
            logger.warning("Query %s is empty after tokenization and will retrieve nothing", query_id)
        queries.append(query)
    return queries


def save_index(index, folder):
    meta = {
        "format": "facetlm-index",
        "fingerprint": index.fingerprint,
        "num_docs": len(index),
        "total_tokens": index.stats.total_tokens,
        "vocabulary_size": len(index.vocabulary),
        "skipped": index.skipped,
        "tokenization": index.config.to_dict(),
    }
    return write_index_files(folder, meta, index.vocabulary_lines(), index.postings_lines())


def load_index(folder):
    meta, vocabulary, postings = read_index_files(folder)
    config = TokenizationConfig.from_dict(meta.get("tokenization", {}))
    rows, cols, values = [], [], []
    for row, (_, pairs) in enumerate(postings):
        for term_id, count in pairs:
            rows.append(row)
            cols.append(term_id)
            values.append(count)
    counts = sparse.coo_matrix((values, (rows, cols)), shape=(len(postings), len(vocabulary)))
    index = CorpusIndex([doc_id for doc_id, _ in postings], vocabulary, counts, config, skipped=meta.get("skipped", 0))
    if meta.get("fingerprint") != index.fingerprint:
        raise FormatError(folder, 1, "index files do not match the fingerprint recorded in meta.json")
    return index
