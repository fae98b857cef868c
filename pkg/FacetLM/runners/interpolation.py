from ..scoring import FacetSet
from .aspect import aspect_sums
import numpy as np


class InterpolationRunner:
    """lambda * p_d(q) + (1 - lambda) * aspect-x sum.

    With lambda > 0 every document is a candidate; documents outside the
    top clusters keep the document term alone.
    """

    def __init__(self):
        pass

    def run(self, context):
        lam = context.algorithm.lam
        facets = FacetSet(context.top_clusters(context.algorithm.m), context.member_rows)
        sums = aspect_sums(context, facets.positions, weighted=True)
        scores = lam * context.doc_scores + (1.0 - lam) * sums
        rows = np.arange(context.num_docs) if lam > 0 else facets.rows()
        return rows, scores[rows], facets
