import math

import numpy as np
import pytest

from storyorder.errors import ValidationError
from storyorder.ngram import ngram_overlap_scores, ngrams, smoothed_bleu


class TestSmoothedBleu:
    def test_identical_sentences_score_one(self):
        tokens = "the quick brown fox jumped".split()
        assert smoothed_bleu(tokens, tokens) == pytest.approx(1.0, abs=1e-12)

    def test_disjoint_sentences_hit_smoothing_floor(self):
        hyp = "alpha beta gamma delta epsilon zeta eta theta".split()
        ref = "one two three four five six seven eight".split()
        score = smoothed_bleu(hyp, ref)
        # add-one smoothing keeps each precision at 1/(count+1)
        expected = math.exp(sum(math.log(1.0 / (8 - n + 2)) for n in range(1, 5)) / 4)
        assert score == pytest.approx(expected, abs=1e-12)
        assert 0.0 < score < 0.2

    def test_hand_worked_two_gram_example(self):
        # hyp "the cat ran" vs ref "the cat sat", max_n=2:
        #   p1 = (2+1)/(3+1) = 3/4, p2 = (1+1)/(2+1) = 2/3
        #   score = sqrt(3/4 * 2/3) = sqrt(1/2); brevity penalty 1
        score = smoothed_bleu("the cat ran".split(), "the cat sat".split(), max_n=2)
        assert score == pytest.approx(math.sqrt(0.5), abs=1e-12)

    def test_brevity_penalty_applies_to_short_hypothesis(self):
        hyp = "the cat".split()
        ref = "the cat sat on the mat".split()
        with_bp = smoothed_bleu(hyp, ref, max_n=1)
        # p1 = (2+1)/(2+1) = 1, so the whole score is the penalty exp(1 - 6/2)
        assert with_bp == pytest.approx(math.exp(1 - 3), abs=1e-12)

    def test_clipping_counts_repeats(self):
        # hyp repeats "the" 3x but ref has it twice: clipped matches = 2
        hyp = "the the the".split()
        ref = "the the cat".split()
        score = smoothed_bleu(hyp, ref, max_n=1)
        assert score == pytest.approx((2 + 1) / (3 + 1), abs=1e-12)

    def test_ngrams_counter(self):
        counts = ngrams(["a", "b", "a", "b"], 2)
        assert counts[("a", "b")] == 2
        assert counts[("b", "a")] == 1


class TestOverlapMatrix:
    def test_identical_pair_scores_one(self):
        m = ngram_overlap_scores(["the cat sat down.", "The cat sat down!"])
        assert m.scores[0][1] == pytest.approx(1.0, abs=1e-12)
        assert m.scores[1][0] == pytest.approx(1.0, abs=1e-12)

    def test_diagonal_sentinel(self):
        m = ngram_overlap_scores(["a b c.", "d e f."])
        assert np.all(np.diag(m.scores) == -np.inf)

    def test_needs_two_sentences(self):
        with pytest.raises(ValidationError, match="at least 2"):
            ngram_overlap_scores(["only one."])

    def test_empty_sentence_rejected(self):
        with pytest.raises(ValidationError, match="no tokens"):
            ngram_overlap_scores(["fine words here.", "???"])

    def test_reference_direction(self):
        # score[i][j] scores j as hypothesis against reference i, so a pair
        # with asymmetric lengths yields an asymmetric matrix
        m = ngram_overlap_scores(["the cat sat on the mat.", "the cat."])
        assert m.scores[0][1] != m.scores[1][0]
