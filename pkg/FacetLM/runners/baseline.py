from ..scoring import FacetSet
import numpy as np


class LanguageModelRunner:
    def __init__(self):
        pass

    def run(self, context):
        scores = context.doc_scores
        return np.arange(len(scores)), scores, FacetSet([], None)
