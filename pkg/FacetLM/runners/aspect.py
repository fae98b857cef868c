from ..scoring import FacetSet
import numpy as np


def aspect_sums(context, positions, weighted=True):
    """Sum over each document's facets of p_c(q), times p_c(d) when weighted.

    Returns a dense vector over all documents; facets are visited in
    cluster-rank order.
    """
    scorer = context.scorer
    cluster_scores = context.cluster_scores
    sums = np.zeros(context.num_docs)
    norms = np.zeros(context.num_docs)
    for position in positions:
        rows = context.member_rows[position]
        if weighted:
            affinities = scorer.member_affinities(position)
            sums[rows] += cluster_scores[position] * affinities
            norms[rows] += affinities
        else:
            sums[rows] += cluster_scores[position]
    if weighted and context.algorithm.normalize_cluster_posteriors:
        np.divide(sums, norms, out=sums, where=norms > 0)
    return sums


class UniformAspectRunner:
    def __init__(self):
        pass

    def run(self, context):
        facets = FacetSet(context.top_clusters(context.algorithm.m), context.member_rows)
        rows = facets.rows()
        sums = aspect_sums(context, facets.positions, weighted=False)
        return rows, sums[rows], facets


class AspectRunner:
    def __init__(self):
        pass

    def run(self, context):
        facets = FacetSet(context.top_clusters(context.algorithm.m), context.member_rows)
        rows = facets.rows()
        sums = aspect_sums(context, facets.positions, weighted=True)
        return rows, sums[rows], facets
