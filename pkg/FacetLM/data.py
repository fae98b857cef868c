import json, os


class FormatError(ValueError):
    def __init__(self, path, line_number, message):
        super().__init__(f"{path}, line {line_number}: {message}")
        self.path = path
        self.line_number = line_number


def check_file(path):
    if path is None or not os.path.isfile(path):
        raise FileNotFoundError(f"No such file: {path}")
    return path


def read_lines(path):
    check_file(path)
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if line.strip() == "":
                continue
            yield line_number, line


def read_corpus_records(path):
    # {"id": "<string>", "text": "<string>"} per line
    for line_number, line in read_lines(path):
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise FormatError(path, line_number, f"invalid JSON ({e.msg})") from None
        if not isinstance(record, dict):
            raise FormatError(path, line_number, "record is not a JSON object")
        doc_id, text = record.get("id"), record.get("text")
        if not isinstance(doc_id, str) or doc_id == "":
            raise FormatError(path, line_number, "missing or empty \"id\"")
        if not isinstance(text, str):
            raise FormatError(path, line_number, "missing \"text\"")
        if "," in doc_id or any(c.isspace() for c in doc_id):
            raise FormatError(path, line_number, f"document id {doc_id!r} contains whitespace or a comma")
        yield line_number, doc_id, text


def read_query_records(path):
    # <qid><TAB><query text> per line
    for line_number, line in read_lines(path):
        if "\t" not in line:
            raise FormatError(path, line_number, "expected <qid><TAB><query text>")
        query_id, text = line.split("\t", 1)
        query_id = query_id.strip()
        if query_id == "" or any(c.isspace() for c in query_id):
            raise FormatError(path, line_number, f"invalid query id {query_id!r}")
        yield line_number, query_id, text


def read_stopwords(path):
    return frozenset(line.strip() for _, line in read_lines(path))


def read_qrels(path):
    # <qid> 0 <docid> <rel>; graded labels are binarized
    judgments = {}
    for line_number, line in read_lines(path):
        fields = line.split()
        if len(fields) != 4:
            raise FormatError(path, line_number, f"expected 4 fields, found {len(fields)}")
        query_id, _, doc_id, relevance = fields
        try:
            relevance = int(relevance)
        except ValueError:
            raise FormatError(path, line_number, f"relevance {relevance!r} is not an integer") from None
        judgments.setdefault(query_id, {})[doc_id] = 1 if relevance > 0 else 0
    return judgments


def format_run_line(query_id, doc_id, rank, score, run_tag):
    return "%s Q0 %s %d %.6f %s\n" % (query_id, doc_id, rank, score, run_tag)


def write_run_file(path, ranked_lists, run_tag):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for ranked_list in ranked_lists:
            for entry in ranked_list.entries:
                f.write(format_run_line(ranked_list.query_id, entry.doc_id, entry.rank, entry.score, run_tag))
    return path


def read_run_file(path):
    # query id -> [(doc_id, rank, score)], queries in file order
    run = {}
    for line_number, line in read_lines(path):
        fields = line.split()
        if len(fields) != 6:
            raise FormatError(path, line_number, f"expected 6 fields, found {len(fields)}")
        query_id, _, doc_id, rank, score, _ = fields
        try:
            rank, score = int(rank), float(score)
        except ValueError:
            raise FormatError(path, line_number, "rank or score is not numeric") from None
        run.setdefault(query_id, []).append((doc_id, rank, score))
    for query_id in run:
        run[query_id].sort(key=lambda item: item[1])
    return run


def write_cluster_file(path, k, fingerprint, provenance, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"#facetlm-clusters k={k} fingerprint={fingerprint}\n")
        f.write(f"#smoothing {provenance}\n")
        for basis_id, member_ids in rows:
            f.write(basis_id + "\t" + ",".join(member_ids) + "\n")
    return path


def parse_key_values(path, line_number, text):
    values = {}
    for item in text.split():
        if "=" not in item:
            raise FormatError(path, line_number, f"expected key=value, found {item!r}")
        key, value = item.split("=", 1)
        values[key] = value
    return values


def read_cluster_file(path):
    header, provenance, rows = None, None, []
    for line_number, line in read_lines(path):
        if header is None:
            if not line.startswith("#facetlm-clusters "):
                raise FormatError(path, line_number, "missing #facetlm-clusters header")
            header = parse_key_values(path, line_number, line[len("#facetlm-clusters "):])
            if "k" not in header or "fingerprint" not in header:
                raise FormatError(path, line_number, "header must carry k= and fingerprint=")
            try:
                header["k"] = int(header["k"])
            except ValueError:
                raise FormatError(path, line_number, f"k={header['k']!r} is not an integer") from None
            continue
        if line.startswith("#smoothing "):
            provenance = parse_key_values(path, line_number, line[len("#smoothing "):])
            continue
        if "\t" not in line:
            raise FormatError(path, line_number, "expected <basis_id><TAB><member ids>")
        basis_id, members = line.split("\t", 1)
        member_ids = [i for i in members.split(",")]
        if any(i == "" for i in member_ids):
            raise FormatError(path, line_number, "empty member id")
        rows.append((line_number, basis_id, member_ids))
    if header is None:
        raise FormatError(path, 1, "empty cluster file")
    return header, provenance, rows


def write_index_files(folder, meta, vocabulary_lines, postings_lines):
    os.makedirs(folder, exist_ok=True)
    with open(os.path.join(folder, "vocab.tsv"), "w", encoding="utf-8", newline="\n") as f:
        f.writelines(line + "\n" for line in vocabulary_lines)
    with open(os.path.join(folder, "postings.tsv"), "w", encoding="utf-8", newline="\n") as f:
        f.writelines(line + "\n" for line in postings_lines)
    with open(os.path.join(folder, "meta.json"), "w", encoding="utf-8", newline="\n") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
        f.write("\n")
    return folder


def read_index_files(folder):
    meta_path = check_file(os.path.join(folder, "meta.json"))
    with open(meta_path, "r", encoding="utf-8") as f:
        try:
            meta = json.load(f)
        except json.JSONDecodeError as e:
            raise FormatError(meta_path, e.lineno, f"invalid JSON ({e.msg})") from None
    vocab_path = os.path.join(folder, "vocab.tsv")
    vocabulary = []
    for line_number, line in read_lines(vocab_path):
        fields = line.split("\t")
        if len(fields) != 4 or not fields[0].isdigit() or int(fields[0]) != len(vocabulary):
            raise FormatError(vocab_path, line_number, "expected <term_id><TAB><term><TAB><cf><TAB><df> in term-id order")
        vocabulary.append(fields[1])
    postings_path = os.path.join(folder, "postings.tsv")
    postings = []
    for line_number, line in read_lines(postings_path):
        doc_id, _, items = line.partition("\t")
        try:
            pairs = [tuple(int(v) for v in item.split(":")) for item in items.split()]
        except ValueError:
            raise FormatError(postings_path, line_number, "expected <term_id>:<count> pairs") from None
        if doc_id == "" or len(pairs) == 0 or any(len(p) != 2 or p[0] >= len(vocabulary) or p[1] < 1 for p in pairs):
            raise FormatError(postings_path, line_number, "malformed postings")
        postings.append((doc_id, pairs))
    return meta, vocabulary, postings


def write_tsv(path, rows, header=None):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        if header is not None:
            f.write("\t".join(header) + "\n")
        for row in rows:
            f.write("\t".join(str(value) for value in row) + "\n")
    return path
