from FacetLM.reprs import SmoothingSpec
from helpers import make_index
import json
import pytest


@pytest.fixture
def two_doc_index():
    return make_index({"d1": "a a b", "d2": "b b"})


@pytest.fixture
def three_doc_index():
    return make_index({"d1": "a a", "d2": "a b", "d3": "b b"})


@pytest.fixture
def tiny_spec():
    return SmoothingSpec(mu=1.0)


@pytest.fixture
def write_corpus(tmp_path):
    def write(records, name="corpus.jsonl"):
        path = tmp_path / name
        with open(path, "w", encoding="utf-8") as f:
            for record in records:
                f.write((record if isinstance(record, str) else json.dumps(record)) + "\n")
        return str(path)
    return write


@pytest.fixture
def write_text(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return write
