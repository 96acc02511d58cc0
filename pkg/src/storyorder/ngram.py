"""N-gram overlap successor scoring: smoothed BLEU between sentence pairs.

score[i][j] treats sentence i as the reference and sentence j as the
hypothesis, with clipped n-gram precisions up to max_n, add-one smoothing
on each precision, uniform weights, and the standard brevity penalty.
"""

import math
from collections import Counter

from .embeddings import tokenize
from .errors import ValidationError
from .scoring import PairScoreMatrix

import numpy as np


def ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def smoothed_bleu(hypothesis: list[str], reference: list[str], max_n: int = 4) -> float:
    """Add-one smoothed precisions keep the score positive for disjoint
    sentences and exactly 1.0 for identical ones."""
    log_sum = 0.0
    for n in range(1, max_n + 1):
        hyp_counts = ngrams(hypothesis, n)
        ref_counts = ngrams(reference, n)
        total = sum(hyp_counts.values())
        matched = sum(min(count, ref_counts[gram]) for gram, count in hyp_counts.items())
        log_sum += math.log((matched + 1.0) / (total + 1.0))
    precision = math.exp(log_sum / max_n)
    c, r = len(hypothesis), len(reference)
    brevity = 1.0 if c >= r else math.exp(1.0 - r / c)
    return brevity * precision


def ngram_overlap_scores(sentences, max_n: int = 4) -> PairScoreMatrix:
    if len(sentences) < 2:
        raise ValidationError("n-gram overlap scoring needs at least 2 sentences")
    token_lists = []
    for i, sentence in enumerate(sentences):
        tokens = tokenize(sentence)
        if not tokens:
            raise ValidationError(f"sentence {i} has no tokens: {sentence!r}")
        token_lists.append(tokens)
    n = len(sentences)
    scores = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                scores[i][j] = smoothed_bleu(token_lists[j], token_lists[i], max_n=max_n)
    return PairScoreMatrix(scores=scores)
