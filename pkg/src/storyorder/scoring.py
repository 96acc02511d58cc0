"""Successor scoring and order recovery.

A PairScoreMatrix holds score[i][j] = similarity of sentence j as the
successor of sentence i. Orders are recovered either exhaustively (optimal,
capped at n<=8 by default: 8! = 40,320 orders) or by a greedy
nearest-neighbor chain; both maximize the sum of consecutive-pair scores.
"""

import json
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import SearchSpaceError, ValidationError

BRUTE_FORCE = "brute-force"
NEAREST_NEIGHBOR = "nearest-neighbor"
BRUTE_FORCE_CAP = 8

_NEG_INF = float("-inf")


@dataclass
class PairScoreMatrix:
    """n x n successor scores; the diagonal is a -inf sentinel so no search
    can ever pick a sentence as its own successor."""

    scores: np.ndarray

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.scores.ndim != 2 or self.scores.shape[0] != self.scores.shape[1]:
            raise ValidationError(f"pair scores must be square, got {self.scores.shape}")
        off_diag = ~np.eye(self.n, dtype=bool)
        if not np.all(np.isfinite(self.scores[off_diag])):
            raise ValidationError("non-finite off-diagonal pair score")
        np.fill_diagonal(self.scores, _NEG_INF)

    @property
    def n(self) -> int:
        return int(self.scores.shape[0])

    def to_json(self) -> str:
        rows = self.scores.tolist()
        for i in range(self.n):
            rows[i][i] = None
        return json.dumps({"n": self.n, "scores": rows})

    @classmethod
    def from_json(cls, text: str) -> "PairScoreMatrix":
        data = json.loads(text)
        rows = data["scores"]
        for i in range(data["n"]):
            rows[i][i] = _NEG_INF
        return cls(scores=np.asarray(rows, dtype=np.float64))


@dataclass(frozen=True)
class OrderingResult:
    order: tuple[int, ...]
    total_score: float
    strategy: str
    ties_broken: bool


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """dot(u,v) / (|u||v|), clamped to [-1, 1] against rounding."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValidationError("cosine undefined for zero-norm vectors")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def pair_scores(candidates: np.ndarray, embeddings: np.ndarray) -> PairScoreMatrix:
    """score[i][j] = cosine(candidate_i, embedding_j) for i != j."""
    c = np.asarray(candidates, dtype=np.float64)
    e = np.asarray(embeddings, dtype=np.float64)
    if c.shape != e.shape:
        raise ValidationError(f"candidates {c.shape} and embeddings {e.shape} must match")
    if c.ndim != 2:
        raise ValidationError("expected (n, d) matrices")
    cn = np.linalg.norm(c, axis=1, keepdims=True)
    en = np.linalg.norm(e, axis=1, keepdims=True)
    if np.any(cn == 0.0) or np.any(en == 0.0):
        raise ValidationError("zero-norm vector in pair scoring")
    scores = np.clip((c / cn) @ (e / en).T, -1.0, 1.0)
    return PairScoreMatrix(scores=scores)


def brute_force_order(matrix: PairScoreMatrix, cap: int = BRUTE_FORCE_CAP) -> OrderingResult:
    """Optimal order by exhaustive enumeration; ties go to the
    lexicographically smallest order."""
    n = matrix.n
    if n > cap:
        raise SearchSpaceError(
            f"n={n} exceeds the exhaustive-search cap {cap}; use nn_order instead"
        )
    order, total, tie = _kernels.best_path_exhaustive(matrix.scores)
    return OrderingResult(
        order=tuple(order), total_score=float(total), strategy=BRUTE_FORCE, ties_broken=bool(tie)
    )


def nn_order(matrix: PairScoreMatrix) -> OrderingResult:
    """Best greedy chain over all start sentences."""
    order, total, tie = _kernels.best_path_greedy(matrix.scores)
    return OrderingResult(
        order=tuple(order),
        total_score=float(total),
        strategy=NEAREST_NEIGHBOR,
        ties_broken=bool(tie),
    )


def total_score(matrix: PairScoreMatrix, order) -> float:
    """Sum of matrix entries along consecutive pairs of order; 0 for n=1."""
    order = list(order)
    if sorted(order) != list(range(matrix.n)):
        raise ValidationError(f"order {order} is not a permutation of 0..{matrix.n - 1}")
    return float(_kernels.path_total(matrix.scores, order))
