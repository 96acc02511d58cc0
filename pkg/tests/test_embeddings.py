import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from storyorder.embeddings import (
    EmbeddedStory,
    load_embeddings,
    normalize,
    save_embeddings,
    token_vector,
    tokenize,
    toy_cbow_embed,
)
from storyorder.errors import EmbeddingFormatError
from storyorder.scoring import cosine


def make_embedded(count=3, n=5, d=8, seed=0):
    gen = np.random.default_rng(seed)
    return [
        EmbeddedStory(
            story_id=f"s{i}",
            sentences=tuple(f"sentence {k}." for k in range(n)),
            embeddings=gen.standard_normal((n, d)),
            encoder="test",
        )
        for i in range(count)
    ]


class TestInterchange:
    def test_load_two_records(self, tmp_path):
        path = tmp_path / "e.jsonl"
        save_embeddings(path, make_embedded(2, d=768))
        loaded = load_embeddings(path)
        assert len(loaded) == 2
        assert all(s.dim == 768 for s in loaded)

    def test_round_trip_bit_for_bit(self, tmp_path):
        stories = make_embedded(10, d=12, seed=5)
        path = tmp_path / "e.jsonl"
        save_embeddings(path, stories, meta={"seed": 5})
        loaded = load_embeddings(path)
        assert [s.story_id for s in loaded] == [s.story_id for s in stories]
        for a, b in zip(stories, loaded):
            assert np.array_equal(a.embeddings, b.embeddings)
            assert a.encoder == b.encoder

    def test_gold_perm_survives(self, tmp_path):
        story = make_embedded(1, n=3)[0]
        story.gold_perm = (2, 0, 1)
        path = tmp_path / "e.jsonl"
        save_embeddings(path, [story])
        assert load_embeddings(path)[0].gold_perm == (2, 0, 1)

    def test_count_mismatch(self, tmp_path):
        path = tmp_path / "e.jsonl"
        record = {
            "story_id": "s0",
            "encoder": "t",
            "dim": 2,
            "sentences": ["a.", "b.", "c.", "d.", "e."],
            "embeddings": [[1.0, 0.0]] * 4,
        }
        path.write_text(json.dumps(record) + "\n", encoding="utf-8")
        with pytest.raises(EmbeddingFormatError, match="5 sentences but 4"):
            load_embeddings(path)

    def test_cross_record_dim_mismatch_reports_index(self, tmp_path):
        path = tmp_path / "e.jsonl"
        r0 = {"story_id": "a", "encoder": "t", "dim": 2, "sentences": ["x."], "embeddings": [[1.0, 0.0]]}
        r1 = {"story_id": "b", "encoder": "t", "dim": 3, "sentences": ["y."], "embeddings": [[1.0, 0.0, 0.0]]}
        path.write_text(json.dumps(r0) + "\n" + json.dumps(r1) + "\n", encoding="utf-8")
        with pytest.raises(EmbeddingFormatError, match="record 1 has dim 3"):
            load_embeddings(path)

    def test_declared_dim_mismatch(self, tmp_path):
        path = tmp_path / "e.jsonl"
        record = {"story_id": "a", "encoder": "t", "dim": 4, "sentences": ["x."], "embeddings": [[1.0, 0.0]]}
        path.write_text(json.dumps(record) + "\n", encoding="utf-8")
        with pytest.raises(EmbeddingFormatError, match="declared dim 4"):
            load_embeddings(path)

    def test_non_finite_component(self, tmp_path):
        path = tmp_path / "e.jsonl"
        record = {"story_id": "a", "encoder": "t", "dim": 2, "sentences": ["x."], "embeddings": [[1.0, 1e400]]}
        path.write_text(json.dumps(record) + "\n", encoding="utf-8")
        with pytest.raises(EmbeddingFormatError, match="non-finite"):
            load_embeddings(path)

    def test_zero_vector_rejected(self, tmp_path):
        path = tmp_path / "e.jsonl"
        record = {"story_id": "a", "encoder": "t", "dim": 2, "sentences": ["x."], "embeddings": [[0.0, 0.0]]}
        path.write_text(json.dumps(record) + "\n", encoding="utf-8")
        with pytest.raises(EmbeddingFormatError, match="zero vector"):
            load_embeddings(path)

    def test_duplicate_story_id(self, tmp_path):
        path = tmp_path / "e.jsonl"
        stories = make_embedded(2)
        stories[1].story_id = stories[0].story_id
        save_embeddings(path, stories)
        with pytest.raises(EmbeddingFormatError, match="duplicate"):
            load_embeddings(path)

    def test_meta_line_skipped_and_cosines_bounded(self, tmp_path):
        path = tmp_path / "e.jsonl"
        save_embeddings(path, make_embedded(4, d=6), meta={"note": "header"})
        loaded = load_embeddings(path)
        assert len(loaded) == 4
        for story in loaded:
            for u in story.embeddings:
                for v in story.embeddings:
                    assert -1.0 - 1e-9 <= cosine(u, v) <= 1.0 + 1e-9


class TestToyEncoder:
    def test_deterministic(self):
        a = toy_cbow_embed("The cat sat on the mat.", d=16, seed=3)
        b = toy_cbow_embed("The cat sat on the mat.", d=16, seed=3)
        assert np.array_equal(a, b)

    def test_seed_changes_vectors(self):
        a = toy_cbow_embed("the cat", d=16, seed=3)
        b = toy_cbow_embed("the cat", d=16, seed=4)
        assert not np.allclose(a, b)

    def test_single_token_is_its_unit_vector(self):
        vec = toy_cbow_embed("Hello!", d=8, seed=1)
        assert np.allclose(vec, token_vector("hello", 8, 1), atol=1e-15)
        assert np.linalg.norm(vec) == pytest.approx(1.0)

    def test_two_token_mean(self):
        # independent recomputation: embed each token alone, average
        vec = toy_cbow_embed("alpha beta", d=8, seed=2)
        expected = (token_vector("alpha", 8, 2) + token_vector("beta", 8, 2)) / 2
        assert np.allclose(vec, expected, atol=1e-15)

    def test_case_and_punctuation_insensitive(self):
        assert np.array_equal(
            toy_cbow_embed("Dog, dog!", d=8, seed=0), toy_cbow_embed("dog DOG", d=8, seed=0)
        )

    @given(st.permutations(["red", "green", "blue", "cyan", "red"]))
    @settings(max_examples=20, deadline=None)
    def test_token_multiset_invariance(self, words):
        base = toy_cbow_embed("red green blue cyan red", d=8, seed=9)
        assert np.array_equal(toy_cbow_embed(" ".join(words), d=8, seed=9), base)

    def test_no_tokens_is_error(self):
        with pytest.raises(EmbeddingFormatError, match="no tokens"):
            toy_cbow_embed("!!! ???", d=8, seed=0)

    def test_tokenize(self):
        assert tokenize("It's 5 o'clock!") == ["it", "s", "5", "o", "clock"]


class TestNormalize:
    def test_unit_vector_unchanged(self):
        v = np.array([1.0, 0.0, 0.0])
        assert np.allclose(normalize(v), v, atol=1e-12)

    def test_three_four(self):
        assert np.allclose(normalize(np.array([3.0, 4.0])), [0.6, 0.8], atol=1e-15)

    def test_zero_vector_error(self):
        with pytest.raises(EmbeddingFormatError, match="zero"):
            normalize(np.zeros(4))

    @given(st.lists(st.floats(-100, 100), min_size=2, max_size=8))
    @settings(max_examples=50, deadline=None)
    def test_direction_preserved(self, values):
        v = np.asarray(values)
        if np.linalg.norm(v) < 1e-6:
            return
        unit = normalize(v)
        assert np.linalg.norm(unit) == pytest.approx(1.0, abs=1e-9)
        assert cosine(unit, v) == pytest.approx(1.0, abs=1e-9)
