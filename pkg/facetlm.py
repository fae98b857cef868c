from FacetLM.api import RunConfig, SMOOTHING_FLAGS, SWEEP_PARAMS, cmd_index, cmd_cluster, cmd_search, cmd_eval, cmd_sweep
from FacetLM.clustering import FingerprintMismatchError
from FacetLM.data import FormatError
from FacetLM.retrieval import ALGORITHMS
import argparse, logging, sys


COMMANDS = {
    "index": cmd_index,
    "cluster": cmd_cluster,
    "search": cmd_search,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    paths = common.add_argument_group("paths")
    paths.add_argument("--corpus", help="JSON-lines corpus, one {\"id\", \"text\"} object per line")
    paths.add_argument("--queries", help="<qid><TAB><query text> per line")
    paths.add_argument("--qrels", help="TREC qrels file")
    paths.add_argument("--clusters", help="cluster file (default: <out>/clusters.tsv)")
    paths.add_argument("--index", help="index directory (default: <out>/index)")
    paths.add_argument("--run", help="run file to evaluate")
    paths.add_argument("--baseline", help="baseline run file for significance tests")
    paths.add_argument("--out", default="out", help="output directory")
    paths.add_argument("--tag", help="run tag (default: the algorithm name)")
    tokens = common.add_argument_group("tokenization")
    tokens.add_argument("--stem", choices=["none", "porter"], default="none")
    tokens.add_argument("--stopwords", help="file with one stopword per line")
    tokens.add_argument("--min-token-len", type=int, default=1)
    tokens.add_argument("--no-lowercase", action="store_true")
    models = common.add_argument_group("language models")
    models.add_argument("--smoothing", choices=list(SMOOTHING_FLAGS), default="dirichlet")
    models.add_argument("--mu", type=float, default=2000.0)
    models.add_argument("--lambda-jm", type=float, default=0.7)
    models.add_argument("--delta", type=float, default=0.7)
    search = common.add_argument_group("retrieval")
    search.add_argument("--algo", choices=list(ALGORITHMS), default="lm")
    search.add_argument("--rep", choices=["lm", "tfidf"], default="lm")
    search.add_argument("--k", type=int, default=40)
    search.add_argument("--m", type=int, default=None, help="clusters retrieved (default: 1000 for selection, 10000 otherwise)")
    search.add_argument("--lambda", dest="lam", type=float, default=0.6)
    search.add_argument("--n", type=int, default=1000)
    search.add_argument("--rerank", choices=["on", "off", "default"], default="default")
    search.add_argument("--no-doc-term", action="store_true", help="score selected documents by their cluster alone")
    search.add_argument("--normalize-cluster-posteriors", action="store_true")
    sweep = common.add_argument_group("sweeps")
    sweep.add_argument("--param", choices=list(SWEEP_PARAMS), default="lambda")
    sweep.add_argument("--grid", help="comma-separated grid values")
    sweep.add_argument("--rerank-study", action="store_true")
    common.add_argument("--no-progress", action="store_true")
    common.add_argument("--verbose", action="store_true")
    parser = argparse.ArgumentParser(prog="facetlm", description="Cluster-based language-model retrieval")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        subparsers.add_parser(name, parents=[common])
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 1
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        config = RunConfig.from_args(args)
        COMMANDS[args.command](config)
    except (OSError, FormatError, FingerprintMismatchError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
