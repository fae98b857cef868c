from FacetLM.corpus import (
    CorpusIndex, Document, Query, TokenizationConfig, ingest_corpus, ingest_queries, load_index, save_index, tokenize,
)
from FacetLM.data import FormatError, read_stopwords
import os
import numpy as np
import pytest


class TestTokenize:
    def test_pipeline_order(self):
        config = TokenizationConfig(lowercase=True, min_token_len=2, stopwords={"the"})
        assert tokenize("The U.S. jets", config) == ["jets"]

    def test_stopwords_follow_case_folding(self, write_text):
        path = write_text("stop.txt", "The\nAND\n")
        config = TokenizationConfig(stopwords=read_stopwords(path))
        assert config.stopwords == frozenset({"the", "and"})
        assert tokenize("The cat and The Dog", config) == ["cat", "dog"]
        cased = TokenizationConfig(lowercase=False, stopwords={"The"})
        assert tokenize("The the", cased) == ["the"]

    def test_empty_text(self):
        assert tokenize("", TokenizationConfig()) == []

    def test_porter(self):
        assert tokenize("running runner", TokenizationConfig(stem="porter")) == ["run", "runner"]

    def test_stopwords_before_stemming(self):
        config = TokenizationConfig(stopwords={"running"}, stem="porter")
        assert tokenize("running runs", config) == ["run"]

    def test_keeps_case_when_asked(self):
        assert tokenize("Oil oil", TokenizationConfig(lowercase=False)) == ["Oil", "oil"]

    def test_underscore_splits(self):
        assert tokenize("snake_case x2", TokenizationConfig()) == ["snake", "case", "x2"]

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            TokenizationConfig(min_token_len=0)
        with pytest.raises(ValueError):
            TokenizationConfig(stem="krovetz")

    def test_config_round_trip(self):
        config = TokenizationConfig(min_token_len=2, stopwords={"b", "a"}, stem="porter")
        assert TokenizationConfig.from_dict(config.to_dict()) == config


class TestDocuments:
    def test_length(self):
        doc = Document.from_tokens("d1", ["a", "a", "b"])
        assert doc.length == 3
        assert dict(doc.term_counts) == {"a": 2, "b": 1}

    def test_empty_document_rejected(self):
        with pytest.raises(ValueError):
            Document.from_tokens("d1", [])

    def test_empty_query_allowed(self):
        assert Query.from_tokens("q1", []).is_empty


class TestIngestCorpus:
    def test_counts(self, write_corpus):
        path = write_corpus([{"id": "d1", "text": "a a b"}, {"id": "d2", "text": "b b"}])
        index = ingest_corpus(path, TokenizationConfig())
        assert len(index) == 2
        assert index.stats.total_tokens == 5
        assert index.stats.collection_term_counts == {"a": 2, "b": 3}
        assert index.stats.doc_freq == {"a": 1, "b": 2}
        assert index.summary().startswith("docs=2 tokens=5")

    def test_duplicate_id(self, write_corpus):
        path = write_corpus([{"id": "d1", "text": "a"}, {"id": "d1", "text": "b"}])
        with pytest.raises(FormatError, match="'d1'") as e:
            ingest_corpus(path, TokenizationConfig())
        assert e.value.line_number == 2

    def test_empty_document_skipped(self, write_corpus):
        path = write_corpus([{"id": "d1", "text": "a b"}, {"id": "d2", "text": "!!!"}])
        index = ingest_corpus(path, TokenizationConfig())
        assert len(index) == 1
        assert index.skipped == 1

    def test_malformed_line(self, write_corpus):
        path = write_corpus([{"id": "d1", "text": "a"}, "{not json"])
        with pytest.raises(FormatError, match="line 2"):
            ingest_corpus(path, TokenizationConfig())

    def test_missing_text(self, write_corpus):
        path = write_corpus([{"id": "d1"}])
        with pytest.raises(FormatError, match="line 1"):
            ingest_corpus(path, TokenizationConfig())

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="nothing.jsonl"):
            ingest_corpus(str(tmp_path / "nothing.jsonl"), TokenizationConfig())

    def test_all_empty(self, write_corpus):
        path = write_corpus([{"id": "d1", "text": "..."}])
        with pytest.raises(ValueError):
            ingest_corpus(path, TokenizationConfig())

    def test_rows_follow_id_order(self, write_corpus):
        path = write_corpus([{"id": "z", "text": "b"}, {"id": "a", "text": "c"}, {"id": "m", "text": "a"}])
        index = ingest_corpus(path, TokenizationConfig())
        assert index.doc_ids == ("a", "m", "z")
        assert index.vocabulary == ("a", "b", "c")

    def test_invariants(self, write_corpus):
        rng = np.random.default_rng(3)
        records = [{"id": f"d{i}", "text": " ".join(rng.choice(list("abcdefg"), size=5))} for i in range(30)]
        index = ingest_corpus(write_corpus(records), TokenizationConfig())
        stats = index.stats
        assert stats.collection_probs.sum() == pytest.approx(1.0, abs=1e-9)
        assert stats.total_tokens == index.doc_lengths.sum()
        assert np.all(stats.doc_freq_counts >= 1)
        assert np.all(stats.doc_freq_counts <= stats.num_docs)
        assert np.all(stats.collection_counts >= stats.doc_freq_counts)
        assert np.all(index.counts.max(axis=0).toarray().ravel() <= stats.collection_counts)

    def test_deterministic(self, write_corpus):
        path = write_corpus([{"id": "d2", "text": "x y z"}, {"id": "d1", "text": "y y"}])
        first = ingest_corpus(path, TokenizationConfig())
        second = ingest_corpus(path, TokenizationConfig())
        assert first.fingerprint == second.fingerprint
        assert first.canonical_text() == second.canonical_text()

    def test_fingerprint_depends_on_config(self, write_corpus):
        path = write_corpus([{"id": "d1", "text": "x y z"}])
        assert ingest_corpus(path, TokenizationConfig()).fingerprint != ingest_corpus(path, TokenizationConfig(min_token_len=2)).fingerprint


class TestIngestQueries:
    def test_parse(self, write_text):
        path = write_text("queries.tsv", "q1\tfalkland petroleum exploration\n")
        (query,) = ingest_queries(path, TokenizationConfig())
        assert query.id == "q1"
        assert query.length == 3

    def test_empty_query_kept(self, write_text):
        path = write_text("queries.tsv", "q2\tthe\n")
        (query,) = ingest_queries(path, TokenizationConfig(stopwords={"the"}))
        assert query.length == 0

    def test_file_order(self, write_text):
        path = write_text("queries.tsv", "q3\tc\nq1\ta\nq2\tb\n")
        assert [query.id for query in ingest_queries(path, TokenizationConfig())] == ["q3", "q1", "q2"]

    def test_missing_tab(self, write_text):
        path = write_text("queries.tsv", "q1 no tab\n")
        with pytest.raises(FormatError, match="line 1"):
            ingest_queries(path, TokenizationConfig())

    def test_duplicate_query(self, write_text):
        path = write_text("queries.tsv", "q1\ta\nq1\tb\n")
        with pytest.raises(FormatError, match="q1"):
            ingest_queries(path, TokenizationConfig())


class TestIndexFiles:
    def test_round_trip(self, write_corpus, tmp_path):
        path = write_corpus([{"id": "d1", "text": "a a b"}, {"id": "d2", "text": "b b c"}, {"id": "d3", "text": "!"}])
        config = TokenizationConfig(stem="porter", stopwords={"c"})
        index = ingest_corpus(path, config)
        folder = save_index(index, str(tmp_path / "index"))
        loaded = load_index(folder)
        assert loaded.fingerprint == index.fingerprint
        assert loaded.doc_ids == index.doc_ids
        assert loaded.vocabulary == index.vocabulary
        assert loaded.config == config
        assert loaded.skipped == 1
        assert (loaded.counts != index.counts).nnz == 0

    def test_tampered_postings(self, tmp_path):
        index = CorpusIndex.from_documents([Document.from_tokens("d1", ["a", "b"])], TokenizationConfig())
        folder = save_index(index, str(tmp_path / "index"))
        with open(os.path.join(folder, "postings.tsv"), "w", encoding="utf-8") as f:
            f.write("d1\t0:2 1:1\n")
        with pytest.raises(FormatError, match="fingerprint"):
            load_index(folder)

    def test_malformed_vocabulary(self, tmp_path):
        index = CorpusIndex.from_documents([Document.from_tokens("d1", ["a"])], TokenizationConfig())
        folder = save_index(index, str(tmp_path / "index"))
        with open(os.path.join(folder, "vocab.tsv"), "w", encoding="utf-8") as f:
            f.write("3\ta\t1\t1\n")
        with pytest.raises(FormatError, match="line 1"):
            load_index(folder)
