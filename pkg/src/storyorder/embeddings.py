"""Embedding interchange: load/validate pre-computed sentence vectors and
provide a deterministic bag-of-words toy encoder for self-contained runs.

File schema (JSONL, one object per line):
    {"story_id": str, "encoder": str, "dim": int,
     "sentences": [str, ...], "embeddings": [[float, ...], ...]}
An optional ``gold_perm`` key survives a round trip. Lines holding a
``_meta`` object are skipped by the loader. Floats are written with
``repr`` precision, so write-then-load reproduces vectors bit-for-bit.

The pipeline is agnostic to how vectors were produced: a pretrained encoder
exported upstream and the toy encoder below land in the same format.
"""

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Story
from .errors import EmbeddingFormatError
from .rng import generator, stable_hash64

TOY_ENCODER = "toy-cbow-v1"

_TOKEN_RE = re.compile(r"[a-z0-9]+")


@dataclass
class EmbeddedStory:
    story_id: str
    sentences: tuple[str, ...]
    embeddings: np.ndarray  # (n, d) float64
    encoder: str = "unknown"
    gold_perm: tuple[int, ...] | None = field(default=None)

    def __post_init__(self):
        self.embeddings = np.asarray(self.embeddings, dtype=np.float64)
        validate_embedding_matrix(self.embeddings, context=f"story {self.story_id!r}")
        if self.embeddings.shape[0] != len(self.sentences):
            raise EmbeddingFormatError(
                f"story {self.story_id!r}: {len(self.sentences)} sentences but "
                f"{self.embeddings.shape[0]} embeddings"
            )

    @property
    def n(self) -> int:
        return len(self.sentences)

    @property
    def dim(self) -> int:
        return int(self.embeddings.shape[1])


def validate_embedding_matrix(matrix: np.ndarray, context: str = "") -> None:
    prefix = f"{context}: " if context else ""
    if matrix.ndim != 2 or matrix.shape[1] < 1:
        raise EmbeddingFormatError(f"{prefix}embeddings must be a non-empty 2-D matrix")
    if not np.all(np.isfinite(matrix)):
        raise EmbeddingFormatError(f"{prefix}non-finite embedding component")
    norms = np.linalg.norm(matrix, axis=1)
    if np.any(norms == 0.0):
        row = int(np.argmin(norms))
        raise EmbeddingFormatError(f"{prefix}zero vector at sentence {row}")


def load_embeddings(path) -> list[EmbeddedStory]:
    """Parse an embedding JSONL file, enforcing one dimension across the file."""
    path = Path(path)
    stories: list[EmbeddedStory] = []
    dim: int | None = None
    seen: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for line_num, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise EmbeddingFormatError(f"{path}:{line_num}: bad JSON: {e}") from None
            if not isinstance(record, dict):
                raise EmbeddingFormatError(f"{path}:{line_num}: record is not an object")
            if "_meta" in record:
                continue
            index = len(stories)
            story = _record_to_story(record, path, line_num, index)
            if story.story_id in seen:
                raise EmbeddingFormatError(
                    f"{path}:{line_num}: duplicate story_id {story.story_id!r}"
                )
            seen.add(story.story_id)
            if dim is None:
                dim = story.dim
            elif story.dim != dim:
                raise EmbeddingFormatError(
                    f"{path}:{line_num}: record {index} has dim {story.dim}, "
                    f"file declared dim {dim}"
                )
            stories.append(story)
    return stories


def _record_to_story(record: dict, path: Path, line_num: int, index: int) -> EmbeddedStory:
    where = f"{path}:{line_num}: record {index}"
    for key in ("story_id", "encoder", "dim", "sentences", "embeddings"):
        if key not in record:
            raise EmbeddingFormatError(f"{where}: missing key {key!r}")
    sentences = record["sentences"]
    vectors = record["embeddings"]
    if not isinstance(sentences, list) or not isinstance(vectors, list):
        raise EmbeddingFormatError(f"{where}: 'sentences' and 'embeddings' must be lists")
    if len(sentences) != len(vectors):
        raise EmbeddingFormatError(
            f"{where}: {len(sentences)} sentences but {len(vectors)} embeddings"
        )
    try:
        matrix = np.asarray(vectors, dtype=np.float64)
    except (TypeError, ValueError):
        raise EmbeddingFormatError(f"{where}: embeddings are not numeric rows") from None
    if matrix.ndim != 2:
        raise EmbeddingFormatError(f"{where}: embedding rows have uneven lengths")
    declared = record["dim"]
    if matrix.shape[1] != declared:
        raise EmbeddingFormatError(
            f"{where}: declared dim {declared} but vectors have {matrix.shape[1]} components"
        )
    gold_perm = record.get("gold_perm")
    try:
        return EmbeddedStory(
            story_id=str(record["story_id"]),
            sentences=tuple(sentences),
            embeddings=matrix,
            encoder=str(record["encoder"]),
            gold_perm=tuple(gold_perm) if gold_perm is not None else None,
        )
    except EmbeddingFormatError as e:
        raise EmbeddingFormatError(f"{where}: {e}") from None


def save_embeddings(path, stories: list[EmbeddedStory], meta: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as f:
        if meta is not None:
            f.write(json.dumps({"_meta": meta}, sort_keys=True) + "\n")
        for story in stories:
            record = {
                "story_id": story.story_id,
                "encoder": story.encoder,
                "dim": story.dim,
                "sentences": list(story.sentences),
                "embeddings": story.embeddings.tolist(),
            }
            if story.gold_perm is not None:
                record["gold_perm"] = list(story.gold_perm)
            f.write(json.dumps(record, ensure_ascii=False) + "\n")


def tokenize(sentence: str) -> list[str]:
    return _TOKEN_RE.findall(sentence.lower())


def token_vector(token: str, d: int, seed: int) -> np.ndarray:
    """Deterministic pseudo-random unit vector for a token, keyed by
    blake2b(seed, token). Stable across processes and platforms."""
    gen = generator(stable_hash64("token", seed, token))
    v = gen.standard_normal(d)
    return v / np.linalg.norm(v)


def toy_cbow_embed(sentence: str, d: int, seed: int) -> np.ndarray:
    """Mean of token unit vectors. Order-insensitive by construction:
    sentences with equal token multisets embed identically."""
    if d < 1:
        raise EmbeddingFormatError(f"dimension must be >= 1, got {d}")
    tokens = tokenize(sentence)
    if not tokens:
        raise EmbeddingFormatError(f"no tokens after tokenization: {sentence!r}")
    mean = np.zeros(d)
    # canonical summation order makes equal token multisets embed
    # bit-identically regardless of word order
    for token in sorted(tokens):
        mean += token_vector(token, d, seed)
    mean /= len(tokens)
    if np.linalg.norm(mean) < 1e-15:
        # Degenerate cancellation: substitute a tiny deterministic vector
        # keyed by the sentence so downstream cosine stays defined.
        gen = generator(stable_hash64("sentence", seed, sentence))
        eps = gen.standard_normal(d)
        mean = 1e-9 * eps / np.linalg.norm(eps)
    return mean


def encode_story(story: Story, d: int, seed: int) -> EmbeddedStory:
    matrix = np.stack([toy_cbow_embed(s, d, seed) for s in story.sentences])
    return EmbeddedStory(
        story_id=story.story_id,
        sentences=story.sentences,
        embeddings=matrix,
        encoder=TOY_ENCODER,
    )


def encode_corpus(stories: list[Story], d: int, seed: int) -> list[EmbeddedStory]:
    return [encode_story(story, d, seed) for story in stories]


def normalize(vector: np.ndarray) -> np.ndarray:
    """Scale to unit L2 norm, preserving direction."""
    vector = np.asarray(vector, dtype=np.float64)
    norm = np.linalg.norm(vector)
    if norm == 0.0:
        raise EmbeddingFormatError("cannot normalize a zero vector")
    return vector / norm
