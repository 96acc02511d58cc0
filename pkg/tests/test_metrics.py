import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from storyorder.errors import ValidationError
from storyorder.metrics import (
    evaluate,
    exact_match,
    kendall_tau,
    pairwise_ratio,
    score_story,
)


def brute_force_tau(pred, gold):
    """O(n^2) pair counting, independent of the merge-sort implementation."""
    n = len(pred)
    pos = {v: i for i, v in enumerate(gold)}
    ranks = [pos[v] for v in pred]
    inversions = sum(
        1 for i in range(n) for j in range(i + 1, n) if ranks[i] > ranks[j]
    )
    return 1.0 - 4.0 * inversions / (n * (n - 1))


perm_pairs = st.integers(2, 8).flatmap(
    lambda n: st.tuples(st.permutations(range(n)), st.permutations(range(n)))
)


class TestKendallTau:
    def test_identity(self):
        assert kendall_tau([0, 1, 2, 3, 4], [0, 1, 2, 3, 4]) == 1.0

    def test_reversal(self):
        assert kendall_tau([4, 3, 2, 1, 0], [0, 1, 2, 3, 4]) == -1.0

    def test_one_adjacent_swap(self):
        assert kendall_tau([1, 0, 2, 3, 4], [0, 1, 2, 3, 4]) == pytest.approx(0.8)

    def test_single_element_convention(self):
        assert kendall_tau([0], [0]) == 1.0

    def test_relative_order_only(self):
        # tau(p, g) depends only on g^-1 . p
        pred, gold = [2, 0, 3, 1], [3, 2, 1, 0]
        inv_gold = [gold.index(v) for v in pred]
        assert kendall_tau(pred, gold) == kendall_tau(inv_gold, [0, 1, 2, 3])

    def test_length_mismatch(self):
        with pytest.raises(ValidationError, match="length"):
            kendall_tau([0, 1], [0, 1, 2])

    def test_non_bijective(self):
        with pytest.raises(ValidationError, match="permutations"):
            kendall_tau([0, 0, 1], [0, 1, 2])

    @given(perm_pairs)
    @settings(max_examples=100, deadline=None)
    def test_matches_brute_force_pair_counting(self, pair):
        pred, gold = list(pair[0]), list(pair[1])
        assert kendall_tau(pred, gold) == brute_force_tau(pred, gold)

    @given(st.permutations(range(6)))
    @settings(max_examples=30, deadline=None)
    def test_self_and_reverse(self, perm):
        perm = list(perm)
        assert kendall_tau(perm, perm) == 1.0
        assert kendall_tau(perm[::-1], perm) == -1.0


class TestExactMatch:
    def test_equal(self):
        assert exact_match([0, 1, 2], [0, 1, 2]) is True

    def test_one_swap(self):
        assert exact_match([1, 0, 2], [0, 1, 2]) is False

    def test_single(self):
        assert exact_match([0], [0]) is True


class TestPairwiseRatio:
    def test_identity(self):
        assert pairwise_ratio([0, 1, 2, 3, 4], [0, 1, 2, 3, 4]) == 1.0

    def test_reversal(self):
        assert pairwise_ratio([4, 3, 2, 1, 0], [0, 1, 2, 3, 4]) == 0.0

    def test_one_adjacent_swap(self):
        assert pairwise_ratio([1, 0, 2, 3, 4], [0, 1, 2, 3, 4]) == pytest.approx(0.9)

    @given(perm_pairs)
    @settings(max_examples=100, deadline=None)
    def test_tau_identity(self, pair):
        pred, gold = list(pair[0]), list(pair[1])
        tau = kendall_tau(pred, gold)
        assert pairwise_ratio(pred, gold) == pytest.approx((tau + 1) / 2, abs=1e-12)


class TestEvaluate:
    def test_all_exact(self):
        pairs = [(f"s{i}", [0, 1, 2], [0, 1, 2]) for i in range(4)]
        report = evaluate(pairs)
        assert report.pmr == 1.0
        assert report.mean_tau == 1.0
        assert report.mean_pairwise_ratio == 1.0

    def test_two_exact_of_five(self):
        gold = [0, 1, 2, 3, 4]
        preds = [gold, gold, [1, 0, 2, 3, 4], [4, 3, 2, 1, 0], [2, 1, 0, 3, 4]]
        report = evaluate([(f"s{i}", p, gold) for i, p in enumerate(preds)])
        assert report.pmr == pytest.approx(0.4)

    def test_single_adjacent_swap_story(self):
        report = evaluate([("s0", [1, 0, 2, 3, 4], [0, 1, 2, 3, 4])])
        assert report.mean_tau == pytest.approx(0.8)
        assert report.pmr == 0.0

    def test_exact_match_implies_perfect_scores(self):
        score = score_story("s", [2, 0, 1], [2, 0, 1])
        assert score.exact_match and score.tau == 1.0 and score.pairwise_ratio == 1.0

    def test_aggregates_are_means(self):
        gen = np.random.default_rng(3)
        pairs = []
        for i in range(20):
            n = int(gen.integers(2, 7))
            pairs.append((f"s{i}", list(gen.permutation(n)), list(range(n))))
        report = evaluate(pairs)
        assert report.mean_tau == pytest.approx(
            sum(s.tau for s in report.stories) / 20, abs=1e-12
        )
        assert report.pmr == sum(s.exact_match for s in report.stories) / 20

    def test_empty_error(self):
        with pytest.raises(ValidationError, match="empty"):
            evaluate([])

    def test_json_and_csv_serialization(self):
        report = evaluate([("a", [0, 1], [0, 1]), ("b", [1, 0], [0, 1])])
        data = json.loads(report.to_json(meta={"tool": "storyorder"}))
        assert data["story_count"] == 2
        assert data["_meta"]["tool"] == "storyorder"
        assert len(data["stories"]) == 2
        row = report.csv_row(strategy="brute-force")
        lines = row.strip().splitlines()
        assert lines[0].startswith("strategy,")
        assert lines[1].startswith("brute-force,")
