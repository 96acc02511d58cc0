"""Rank metrics for predicted orders.

Two readings of "perfect match" are reported side by side: the corpus-level
fraction of exactly matching orders (``pmr``) and the per-story fraction of
correctly ordered pairs (``pairwise_ratio``, equal to (tau+1)/2). Both
appear in every report so neither interpretation is silently chosen.
"""

import csv
import io
import json
from dataclasses import dataclass

from . import _kernels
from .errors import ValidationError


def _check_pair(pred, gold):
    pred = list(pred)
    gold = list(gold)
    if len(pred) != len(gold):
        raise ValidationError(f"length mismatch: pred n={len(pred)}, gold n={len(gold)}")
    if sorted(pred) != sorted(gold):
        raise ValidationError("pred and gold must be permutations of the same indices")
    if sorted(gold) != list(range(len(gold))):
        raise ValidationError("permutations must cover 0..n-1")
    return pred, gold


def _ranks(pred, gold):
    # Position of each predicted element in the gold order; inversions of
    # this sequence are exactly the discordant pairs.
    position = {value: i for i, value in enumerate(gold)}
    return [position[value] for value in pred]


def kendall_tau(pred, gold) -> float:
    """tau = 1 - 2*inversions / (n(n-1)/2); n=1 returns 1 by convention."""
    pred, gold = _check_pair(pred, gold)
    n = len(pred)
    if n == 1:
        return 1.0
    inversions = _kernels.count_inversions(_ranks(pred, gold))
    return 1.0 - 4.0 * inversions / (n * (n - 1))


def exact_match(pred, gold) -> bool:
    pred, gold = _check_pair(pred, gold)
    return pred == gold


def pairwise_ratio(pred, gold) -> float:
    """Fraction of index pairs whose relative order agrees with gold,
    counted directly over all pairs; n=1 returns 1 by convention."""
    pred, gold = _check_pair(pred, gold)
    n = len(pred)
    if n == 1:
        return 1.0
    ranks = _ranks(pred, gold)
    concordant = 0
    for i in range(n):
        for j in range(i + 1, n):
            if ranks[i] < ranks[j]:
                concordant += 1
    return concordant / (n * (n - 1) / 2)


@dataclass(frozen=True)
class StoryScore:
    story_id: str
    tau: float
    exact_match: bool
    pairwise_ratio: float


@dataclass(frozen=True)
class EvalReport:
    story_count: int
    mean_tau: float
    pmr: float
    mean_pairwise_ratio: float
    stories: tuple[StoryScore, ...]

    def to_dict(self, per_story: bool = True) -> dict:
        data = {
            "story_count": self.story_count,
            "mean_tau": self.mean_tau,
            "pmr": self.pmr,
            "mean_pairwise_ratio": self.mean_pairwise_ratio,
        }
        if per_story:
            data["stories"] = [
                {
                    "story_id": s.story_id,
                    "tau": s.tau,
                    "exact_match": s.exact_match,
                    "pairwise_ratio": s.pairwise_ratio,
                }
                for s in self.stories
            ]
        return data

    def to_json(self, per_story: bool = True, meta: dict | None = None) -> str:
        data = self.to_dict(per_story=per_story)
        if meta is not None:
            data["_meta"] = meta
        return json.dumps(data, indent=2, sort_keys=True)

    def csv_row(self, **labels) -> str:
        """One summary row (with header) for grid reports."""
        buf = io.StringIO()
        writer = csv.writer(buf)
        keys = list(labels)
        writer.writerow(keys + ["stories", "mean_tau", "pmr", "mean_pairwise_ratio"])
        writer.writerow(
            [labels[k] for k in keys]
            + [self.story_count, self.mean_tau, self.pmr, self.mean_pairwise_ratio]
        )
        return buf.getvalue()


def score_story(story_id: str, pred, gold) -> StoryScore:
    return StoryScore(
        story_id=story_id,
        tau=kendall_tau(pred, gold),
        exact_match=exact_match(pred, gold),
        pairwise_ratio=pairwise_ratio(pred, gold),
    )


def evaluate(pairs) -> EvalReport:
    """pairs: iterable of (story_id, pred, gold). Aggregates are plain means;
    pmr is the fraction of exact matches."""
    stories = [score_story(story_id, pred, gold) for story_id, pred, gold in pairs]
    if not stories:
        raise ValidationError("cannot evaluate an empty prediction list")
    count = len(stories)
    return EvalReport(
        story_count=count,
        mean_tau=sum(s.tau for s in stories) / count,
        pmr=sum(1 for s in stories if s.exact_match) / count,
        mean_pairwise_ratio=sum(s.pairwise_ratio for s in stories) / count,
        stories=tuple(stories),
    )
