"""
FacetLM planted-topic experiment

Builds a synthetic collection with known topics, then compares the language-model
baseline with the cluster-based algorithms and runs the re-rank study.
"""

from dataclasses import replace
import os
import sys

script_dir = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, script_dir)

from FacetLM.api import RunConfig, cmd_index, cmd_cluster, cmd_search, cmd_eval, cmd_sweep
from FacetLM.reprs import SmoothingSpec
from FacetLM.retrieval import AlgorithmSpec
from FacetLM.synthetic import planted_topics

# ============================================
# CONFIGURATION
# ============================================

OUTPUT_DIR = os.path.join(script_dir, "out", "synthetic")

SETTINGS = {
    "num_docs": 500,
    "num_topics": 10,
    "num_queries": 20,
    "seed": 0,
    "k": 10,
    "m": 100,
    "lambda": 0.6,
    "mu": 2000.0,
    "algorithms": ["lm", "basis_select", "set_select", "bag_select", "uniform_aspect_x", "aspect_x", "interpolation"],
}

# ============================================
# MAIN
# ============================================

def main():
    collection = planted_topics(
        num_docs=SETTINGS["num_docs"],
        num_topics=SETTINGS["num_topics"],
        num_queries=SETTINGS["num_queries"],
        seed=SETTINGS["seed"],
    )
    paths = collection.write(os.path.join(OUTPUT_DIR, "data"))
    smoothing = SmoothingSpec(mu=SETTINGS["mu"])
    base = RunConfig(
        corpus=paths["corpus"],
        queries=paths["queries"],
        qrels=paths["qrels"],
        out=OUTPUT_DIR,
        smoothing=smoothing,
        k=SETTINGS["k"],
    )

    print(f"\n{'='*50}")
    print("FacetLM planted-topic experiment")
    print(f"{'='*50}")
    print(f"Docs: {SETTINGS['num_docs']} | Topics: {SETTINGS['num_topics']} | Queries: {SETTINGS['num_queries']}")
    print(f"k: {SETTINGS['k']} | m: {SETTINGS['m']} | lambda: {SETTINGS['lambda']} | mu: {SETTINGS['mu']}")
    print(f"{'='*50}\n")

    cmd_index(base)
    cmd_cluster(base)
    runs = {}
    for name in SETTINGS["algorithms"]:
        m = None if name == "lm" else SETTINGS["m"]
        algorithm = AlgorithmSpec(name=name, m=m, lam=SETTINGS["lambda"])
        runs[name] = cmd_search(replace(base, algorithm=algorithm))
    for name, path in runs.items():
        if name != "lm":
            cmd_eval(replace(base, run=path, baseline=runs["lm"], out=os.path.join(OUTPUT_DIR, name)))
    sweep = AlgorithmSpec(name="interpolation", m=SETTINGS["m"])
    cmd_sweep(replace(base, algorithm=sweep, param="lambda", rerank_study=True))

    print(f"\n{'='*50}")
    print("SUCCESS!")
    print(f"Output: {OUTPUT_DIR}")
    print(f"{'='*50}")


if __name__ == "__main__":
    main()
