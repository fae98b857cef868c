from .corpus import TokenizationConfig, ingest_corpus, ingest_queries, save_index, load_index
from .clustering import build_clusters, save_clusters, load_clusters
from .data import check_file, read_stopwords, write_run_file, write_tsv
from .evaluation import Qrels, compare_runs, evaluate_run, format_report, load_run, write_curve, write_report
from .reprs import SmoothingSpec
from .retrieval import ALGORITHMS, AlgorithmSpec, batch_search
from dataclasses import dataclass, field, replace
import functools, logging, os
import gradio as gr
from tqdm import tqdm


logger = logging.getLogger(__name__)

DEFAULT_GRIDS = {
    "lambda": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.925, 0.95, 0.975, 0.98, 0.99, 1.0],
    "mu": [100.0, 250.0, 500.0, 1000.0, 1500.0, 2000.0, 3000.0, 5000.0],
    "k": [2, 5, 10, 20, 40],
    "m": [10, 50, 100, 500, 1000, 5000, 10000],
}
SWEEP_PARAMS = tuple(DEFAULT_GRIDS)
SMOOTHING_FLAGS = {"dirichlet": "dirichlet", "jm": "jelinek_mercer", "ad": "absolute_discounting"}


@dataclass(frozen=True)
class RunConfig:
    corpus: str = None
    queries: str = None
    qrels: str = None
    clusters: str = None
    out: str = "out"
    index: str = None
    run: str = None
    baseline: str = None
    run_tag: str = None
    tokenization: TokenizationConfig = field(default_factory=TokenizationConfig)
    smoothing: SmoothingSpec = field(default_factory=SmoothingSpec)
    algorithm: AlgorithmSpec = field(default_factory=AlgorithmSpec)
    k: int = 40
    param: str = "lambda"
    grid: tuple = None
    rerank_study: bool = False
    show_progress: bool = True

    @property
    def index_path(self):
        return self.index if self.index else os.path.join(self.out, "index")

    @property
    def cluster_path(self):
        return self.clusters if self.clusters else os.path.join(self.out, "clusters.tsv")

    @property
    def tag(self):
        return self.run_tag if self.run_tag else self.algorithm.name

    @classmethod
    def from_args(cls, args):
        stopwords = read_stopwords(args.stopwords) if args.stopwords else None
        tokenization = TokenizationConfig(
            lowercase=not args.no_lowercase,
            min_token_len=args.min_token_len,
            stopwords=stopwords,
            stem=args.stem,
        )
        smoothing = SmoothingSpec(
            method=SMOOTHING_FLAGS[args.smoothing],
            mu=args.mu,
            lambda_jm=args.lambda_jm,
            delta_ad=args.delta,
        )
        rerank = {"on": True, "off": False, "default": None}[args.rerank]
        algorithm = AlgorithmSpec(
            name=args.algo,
            m=args.m,
            n=args.n,
            lam=args.lam,
            rerank=rerank,
            representation=args.rep,
            doc_term=not args.no_doc_term,
            normalize_cluster_posteriors=args.normalize_cluster_posteriors,
        )
        grid = None
        if args.grid is not None:
            convert = int if args.param in ("k", "m") else float
            grid = tuple(convert(value) for value in args.grid.split(",") if value.strip() != "")
        return cls(
            corpus=args.corpus,
            queries=args.queries,
            qrels=args.qrels,
            clusters=args.clusters,
            out=args.out,
            index=args.index,
            run=args.run,
            baseline=args.baseline,
            run_tag=args.tag,
            tokenization=tokenization,
            smoothing=smoothing,
            algorithm=algorithm,
            k=args.k,
            param=args.param,
            grid=grid,
            rerank_study=args.rerank_study,
            show_progress=not args.no_progress,
        )


def prepare_output(config):
    if not os.path.exists(config.out):
        os.makedirs(config.out, exist_ok=True)
        print("Your results will be saved here:", config.out)
    return config.out


def cmd_index(config):
    check_file(config.corpus)
    prepare_output(config)
    index = ingest_corpus(config.corpus, config.tokenization)
    save_index(index, config.index_path)
    print(index.summary())
    print("Fingerprint:", index.fingerprint)
    print("Success!")
    print("Your index is here:", config.index_path)
    return index


def cmd_cluster(config):
    prepare_output(config)
    index = load_index(config.index_path)
    clusters = build_clusters(index, config.k, config.smoothing, show_progress=config.show_progress)
    save_clusters(clusters, config.cluster_path)
    print(f"clusters={len(clusters)} k={config.k}")
    print("Success!")
    print("Your clusters are here:", config.cluster_path)
    return config.cluster_path


def load_inputs(config, algorithm):
    index = load_index(config.index_path)
    # queries mirror the preprocessing the index was built with
    queries = ingest_queries(check_file(config.queries), index.config)
    clusters = None
    if algorithm.uses_clusters:
        clusters = load_clusters(check_file(config.cluster_path), index)
        if clusters.smoothing != config.smoothing:
            logger.info("Clusters were built with %s; scoring with %s", clusters.smoothing.describe(), config.smoothing.describe())
    return index, queries, clusters


def cmd_search(config):
    prepare_output(config)
    index, queries, clusters = load_inputs(config, config.algorithm)
    ranked_lists, report = batch_search(config.algorithm, queries, index, clusters, config.smoothing, show_progress=config.show_progress)
    path = write_run_file(os.path.join(config.out, f"{config.tag}.run"), ranked_lists, config.tag)
    print(report.summary())
    print("Success!")
    print("Your run file is here:", path)
    return path


def run_name(path):
    return os.path.splitext(os.path.basename(path))[0]


def cmd_eval(config):
    prepare_output(config)
    qrels = Qrels.from_file(check_file(config.qrels))
    run = load_run(check_file(config.run))
    name = run_name(config.run)
    comparisons = {}
    if config.baseline:
        baseline = load_run(check_file(config.baseline))
        baseline_name = run_name(config.baseline)
        if baseline_name == name:
            baseline_name = "baseline"
        comparison = compare_runs(baseline, run, qrels, names=(baseline_name, name))
        reports = [comparison.baseline, comparison.other]
        comparisons[name] = comparison
    else:
        reports = [evaluate_run(run, qrels, name)]
    for report in reports:
        write_curve(os.path.join(config.out, f"{report.name}.curve.tsv"), report.mean_curve())
    path = write_report(os.path.join(config.out, "report.tsv"), reports, comparisons)
    print(format_report(reports, comparisons), end="")
    print("Success!")
    print("Your report is here:", path)
    return path


def evaluate_algorithm(algorithm, queries, index, clusters, smoothing, qrels, show_progress=False):
    ranked_lists, _ = batch_search(algorithm, queries, index, clusters, smoothing, show_progress=show_progress)
    return evaluate_run(ranked_lists, qrels, algorithm.name)


def sweep_points(config, index, queries, clusters, qrels):
    """Yield (value, report, (without re-rank, with re-rank) or None) for every grid value."""
    for value in sweep_grid(config):
        smoothing = config.smoothing
        algorithm = config.algorithm
        current = clusters
        if config.param == "lambda":
            algorithm = replace(algorithm, name="interpolation", lam=float(value), rerank=False)
        elif config.param == "mu":
            smoothing = replace(smoothing, mu=float(value))
            algorithm = replace(algorithm, name="lm", rerank=False)
        elif config.param == "m":
            algorithm = replace(algorithm, m=int(value))
        else:
            current = build_clusters(index, int(value), smoothing, show_progress=False)
        if not config.rerank_study:
            yield value, evaluate_algorithm(algorithm, queries, index, current, smoothing, qrels), None
            continue
        without = evaluate_algorithm(replace(algorithm, rerank=False), queries, index, current, smoothing, qrels)
        with_rerank = evaluate_algorithm(replace(algorithm, rerank=True), queries, index, current, smoothing, qrels)
        yield value, with_rerank if algorithm.rerank else without, (without, with_rerank)


def sweep_grid(config):
    return config.grid if config.grid is not None else DEFAULT_GRIDS[config.param]


def cmd_sweep(config):
    if config.param not in SWEEP_PARAMS:
        raise ValueError(f"Unknown sweep parameter {config.param!r}; expected one of {', '.join(SWEEP_PARAMS)}")
    if config.grid is not None and len(config.grid) == 0:
        raise ValueError("The sweep grid is empty")
    if config.param in ("k", "m") and not config.algorithm.uses_clusters:
        raise ValueError(f"Sweeping {config.param} needs a cluster-based --algo")
    prepare_output(config)
    qrels = Qrels.from_file(check_file(config.qrels))
    if config.param == "k":
        index = load_index(config.index_path)
        queries = ingest_queries(check_file(config.queries), index.config)
        clusters = None
    else:
        algorithm = replace(config.algorithm, name={"lambda": "interpolation", "mu": "lm"}.get(config.param, config.algorithm.name))
        index, queries, clusters = load_inputs(config, algorithm)
    rows, deltas = [], []
    points = sweep_points(config, index, queries, clusters, qrels)
    for value, report, study in tqdm(points, total=len(sweep_grid(config)), desc=f"Sweeping {config.param}", disable=not config.show_progress):
        rows.append((f"{value:g}", "%.4f" % report.mean_recall, "%.4f" % report.mean_average_precision))
        if study is not None:
            without, with_rerank = study
            deltas.append((f"{value:g}", "%.4f" % (without.mean_average_precision - with_rerank.mean_average_precision)))
    path = write_tsv(os.path.join(config.out, f"sweep_{config.param}.tsv"), rows)
    if config.param == "mu":
        best = max(rows, key=lambda row: float(row[2]))
        print(f"Best mu={best[0]} (avg. prec. {best[2]})")
    if config.rerank_study:
        write_tsv(os.path.join(config.out, f"rerank_{config.param}.tsv"), deltas)
    print("Success!")
    print("Your sweep is here:", path)
    return rows


def build_config(
    corpus, queries, qrels, out, algo, rep, smoothing, mu, k, m, lam, n, stem, min_token_len, rerank, param, grid, rerank_study,
):
    grid_values = None
    if grid.strip() != "":
        convert = int if param in ("k", "m") else float
        grid_values = tuple(convert(value) for value in grid.split(","))
    return RunConfig(
        corpus=corpus or None,
        queries=queries or None,
        qrels=qrels or None,
        out=out or "out",
        run=os.path.join(out or "out", f"{algo}.run"),
        tokenization=TokenizationConfig(min_token_len=int(min_token_len), stem=stem),
        smoothing=SmoothingSpec(method=SMOOTHING_FLAGS[smoothing], mu=float(mu)),
        algorithm=AlgorithmSpec(
            name=algo,
            m=int(m) if m else None,
            n=int(n),
            lam=float(lam),
            rerank={"on": True, "off": False, "default": None}[rerank],
            representation=rep,
        ),
        k=int(k),
        param=param,
        grid=grid_values,
        rerank_study=rerank_study,
        show_progress=False,
    )


def run_pipeline(step, *args):
    config = build_config(*args)
    try:
        if step == "index":
            index = cmd_index(config)
            return index.summary()
        if step == "cluster":
            return f"Your clusters are here: {cmd_cluster(config)}"
        if step == "search":
            return f"Your run file is here: {cmd_search(config)}"
        if step == "eval":
            with open(cmd_eval(config), "r", encoding="utf-8") as f:
                return f.read()
        rows = cmd_sweep(config)
        return "\n".join("\t".join(row) for row in rows)
    except (OSError, ValueError) as e:
        return f"Error: {e}"


def on_ui_tabs():
    with gr.Blocks(analytics_enabled=False) as ui_component:
        gr.Markdown("""
# FacetLM

Cluster-based language-model retrieval. Build an index, build one nearest-neighbor cluster per document, then search and evaluate with any of the seven scoring algorithms. Every step reads and writes files in the output directory.
        """)
        with gr.Row():
            with gr.Column():
                corpus = gr.Textbox(label="Corpus (JSON lines)", value="")
                queries = gr.Textbox(label="Queries (<qid><TAB><text>)", value="")
                qrels = gr.Textbox(label="Relevance judgments (TREC qrels)", value="")
                out = gr.Textbox(label="Output directory", value="out")
            with gr.Column():
                algo = gr.Radio(list(ALGORITHMS), label="Algorithm", value="interpolation", interactive=True)
                rep = gr.Radio(["lm", "tfidf"], label="Representation", value="lm", interactive=True)
                rerank = gr.Radio(["default", "on", "off"], label="Re-rank by p_d(q)", value="default", interactive=True)
                smoothing = gr.Radio(list(SMOOTHING_FLAGS), label="Smoothing", value="dirichlet", interactive=True)
            with gr.Column():
                mu = gr.Slider(label="Dirichlet prior mu", value=2000, minimum=1, maximum=10000, step=1, interactive=True)
                k = gr.Slider(label="Cluster size k", value=40, minimum=1, maximum=200, step=1, interactive=True)
                m = gr.Textbox(label="Clusters retrieved m", value="", placeholder="Leave empty to use the algorithm default")
                lam = gr.Slider(label="Interpolation lambda", value=0.6, minimum=0.0, maximum=1.0, step=0.005, interactive=True)
                n = gr.Slider(label="Documents retrieved N", value=1000, minimum=1, maximum=10000, step=1, interactive=True)
        with gr.Row():
            stem = gr.Radio(["none", "porter"], label="Stemming", value="none", interactive=True)
            min_token_len = gr.Slider(label="Minimum token length", value=1, minimum=1, maximum=10, step=1, interactive=True)
            param = gr.Radio(list(SWEEP_PARAMS), label="Sweep parameter", value="lambda", interactive=True)
            grid = gr.Textbox(label="Sweep grid", value="", placeholder="Comma separated; leave empty for the default grid")
            rerank_study = gr.Checkbox(label="Re-rank study", value=False)
        inputs = [corpus, queries, qrels, out, algo, rep, smoothing, mu, k, m, lam, n, stem, min_token_len, rerank, param, grid, rerank_study]
        output = gr.Textbox(label="Output", value="", lines=12, max_lines=24, interactive=False)
        with gr.Row():
            for step, label in [("index", "Index"), ("cluster", "Cluster"), ("search", "Search"), ("eval", "Evaluate"), ("sweep", "Sweep")]:
                btn = gr.Button(value=label)
                btn.click(functools.partial(run_pipeline, step), inputs=inputs, outputs=output)
        return [(ui_component, "FacetLM", "FacetLM_ui")]
