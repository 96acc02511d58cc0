"""Shared test fixtures: synthetic corpora, file writers, gradient checks."""

import csv
import json

import numpy as np

from storyorder.corpus import Story
from storyorder.embeddings import EmbeddedStory
from storyorder.lm import loss_and_grads


def finite_difference(params, x, targets, l2, name, step=1e-5):
    """Central-difference gradient of the full training loss w.r.t. one
    parameter tensor."""
    tensor = params.tensors[name]
    fd = np.zeros_like(tensor)
    flat = tensor.reshape(-1)
    fd_flat = fd.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + step
        up, _ = loss_and_grads(params, x, targets, l2=l2)
        flat[i] = orig - step
        down, _ = loss_and_grads(params, x, targets, l2=l2)
        flat[i] = orig
        fd_flat[i] = (up - down) / (2 * step)
    return fd


def relative_error(a, b):
    denom = max(np.linalg.norm(a) + np.linalg.norm(b), 1e-12)
    return np.linalg.norm(a - b) / denom

# Five disjoint stage vocabularies: sentence k of every story draws from
# stage k, so bag-of-words embeddings cluster by story position and the
# stage -> next-stage map is learnable.
STAGE_VOCAB = [
    ["morning", "dawn", "sunrise", "waking", "early"],
    ["breakfast", "coffee", "toast", "kitchen", "cooking"],
    ["work", "office", "meeting", "desk", "project"],
    ["evening", "dinner", "sunset", "walking", "relax"],
    ["night", "sleep", "dream", "bed", "quiet"],
]


def staged_stories(count: int, seed: int = 7, words: int = 3) -> list[Story]:
    gen = np.random.default_rng(seed)
    stories = []
    for i in range(count):
        sentences = tuple(" ".join(gen.choice(vocab, size=words)) + "." for vocab in STAGE_VOCAB)
        stories.append(Story(story_id=f"story-{i:04d}", sentences=sentences))
    return stories


def rotation_walk(d: int, n: int, start: np.ndarray, angle: float = 0.9) -> np.ndarray:
    """n unit vectors where each row is the previous one advanced by a fixed
    planar rotation: a progression every backbone can learn exactly."""
    rot = np.eye(d)
    c, s = np.cos(angle), np.sin(angle)
    for k in range(0, d - 1, 2):
        rot[k : k + 2, k : k + 2] = [[c, -s], [s, c]]
    rows = np.zeros((n, d))
    v = start / np.linalg.norm(start)
    for k in range(n):
        rows[k] = v
        v = rot @ v
    return rows


def rotation_corpus(count: int, d: int = 16, n: int = 5, seed: int = 42) -> list[EmbeddedStory]:
    gen = np.random.default_rng(seed)
    sentences = tuple(f"sentence {k}." for k in range(n))
    return [
        EmbeddedStory(
            story_id=f"rot-{i:04d}",
            sentences=sentences,
            embeddings=rotation_walk(d, n, gen.standard_normal(d)),
            encoder="synthetic-rotation",
        )
        for i in range(count)
    ]


def chain_corpus(count: int, d: int = 8, n: int = 5, overlap: float = 0.8) -> list[EmbeddedStory]:
    """Embeddings whose raw cosine structure already encodes the gold chain:
    consecutive sentences share one basis direction, others are orthogonal."""
    assert d >= n + 1
    stories = []
    for i in range(count):
        rows = np.zeros((n, d))
        for k in range(n):
            rows[k][k] = 1.0
            rows[k][k + 1] = overlap
        stories.append(
            EmbeddedStory(
                story_id=f"chain-{i:04d}",
                sentences=tuple(f"sentence {k}." for k in range(n)),
                embeddings=rows,
                encoder="synthetic-chain",
            )
        )
    return stories


def write_csv_roc(path, stories: list[Story]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(
            ["storyid", "storytitle", "sentence1", "sentence2", "sentence3", "sentence4", "sentence5"]
        )
        for story in stories:
            assert story.n == 5
            writer.writerow([story.story_id, f"title {story.story_id}", *story.sentences])


def write_corpus_jsonl(path, stories: list[Story]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for story in stories:
            f.write(json.dumps({"story_id": story.story_id, "sentences": list(story.sentences)}) + "\n")
