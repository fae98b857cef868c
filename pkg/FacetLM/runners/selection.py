from ..scoring import FacetSet
import numpy as np


def selection_score(context, row, position):
    # doc_term=False backs off to the cluster score alone
    if context.algorithm.doc_term:
        return context.doc_scores[row]
    return context.cluster_scores[position]


class BasisSelectRunner:
    """Only the basis documents of the top clusters, scored by p_d(q).

    Clusters are consumed in rank order until N documents with a non-zero
    score are selected or m clusters are exhausted.
    """

    def __init__(self):
        pass

    def run(self, context):
        algorithm = context.algorithm
        rows, scores, consumed = [], [], []
        for position in context.top_clusters(algorithm.m):
            consumed.append(position)
            row = context.member_rows[position][0]
            score = selection_score(context, row, position)
            if score > 0:
                rows.append(row)
                scores.append(score)
                if len(rows) == algorithm.n:
                    break
        facets = FacetSet(consumed, context.member_rows, basis_only=True)
        return np.array(rows, dtype=np.int64), np.array(scores, dtype=np.float64), facets


class SetSelectRunner:
    """Union of the top clusters' members, admitted first-in first-out.

    The last cluster is admitted partially, in member order (closest to
    its basis first), until N documents are selected.
    """

    def __init__(self):
        pass

    def run(self, context):
        algorithm = context.algorithm
        selected = {}
        consumed = []
        for position in context.top_clusters(algorithm.m):
            consumed.append(position)
            for row in context.member_rows[position]:
                if row in selected:
                    continue
                score = selection_score(context, row, position)
                if score > 0:
                    selected[row] = score
                    if len(selected) == algorithm.n:
                        break
            if len(selected) == algorithm.n:
                break
        rows = np.fromiter(selected.keys(), dtype=np.int64, count=len(selected))
        scores = np.fromiter(selected.values(), dtype=np.float64, count=len(selected))
        return rows, scores, FacetSet(consumed, context.member_rows)


class BagSelectRunner:
    def __init__(self):
        pass

    def run(self, context):
        facets = FacetSet(context.top_clusters(context.algorithm.m), context.member_rows)
        rows = facets.rows()
        multiplicity = facets.multiplicity(context.num_docs)[rows]
        return rows, context.doc_scores[rows] * multiplicity, facets
