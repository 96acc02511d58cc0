"""Sentence ordering toolkit.

Pipeline: load a story corpus, encode sentences to vectors (or ingest
pre-computed embeddings), predict each sentence's successor embedding with a
sentence-level language model, score candidate/sentence pairs by cosine
similarity, recover the order that maximizes the total consecutive-pair
score, and evaluate against the gold order with rank metrics.
"""

__version__ = "0.1.0"

from .corpus import Story, ShuffledStory, SplitSpec, load_corpus, shuffle_story, split_corpus
from .embeddings import EmbeddedStory, load_embeddings, normalize, toy_cbow_embed
from .metrics import EvalReport, StoryScore, evaluate, exact_match, kendall_tau, pairwise_ratio
from .scoring import (
    OrderingResult,
    PairScoreMatrix,
    brute_force_order,
    cosine,
    nn_order,
    pair_scores,
    total_score,
)

__all__ = [
    "__version__",
    "Story",
    "ShuffledStory",
    "SplitSpec",
    "load_corpus",
    "shuffle_story",
    "split_corpus",
    "EmbeddedStory",
    "load_embeddings",
    "normalize",
    "toy_cbow_embed",
    "EvalReport",
    "StoryScore",
    "evaluate",
    "exact_match",
    "kendall_tau",
    "pairwise_ratio",
    "OrderingResult",
    "PairScoreMatrix",
    "brute_force_order",
    "cosine",
    "nn_order",
    "pair_scores",
    "total_score",
]
