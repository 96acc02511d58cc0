"""Story corpus: loading, deterministic shuffling, and train/val/test splits.

Two file formats are supported:
  csv-roc  header ``storyid,storytitle,sentence1,...,sentence5``, RFC-4180
           quoting, UTF-8. Records with two fifth-sentence options (an extra
           trailing field) are rejected: the ordering task needs exactly one
           gold sequence.
  jsonl    one ``{"story_id": str, "sentences": [str, ...]}`` object per line.
"""

import csv
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import CorpusError, CorpusParseError, TwoChoiceStoryError
from .rng import fisher_yates

CSV_ROC_HEADER = [
    "storyid",
    "storytitle",
    "sentence1",
    "sentence2",
    "sentence3",
    "sentence4",
    "sentence5",
]

FORMATS = ("csv-roc", "jsonl")


@dataclass(frozen=True)
class Story:
    """Sentences in gold order. Never mutated; shuffling returns a new object."""

    story_id: str
    sentences: tuple[str, ...]

    def __post_init__(self):
        if len(self.sentences) < 1:
            raise CorpusError(f"story {self.story_id!r}: needs at least one sentence")
        for i, s in enumerate(self.sentences):
            if not s.strip():
                raise CorpusError(f"story {self.story_id!r}: sentence {i + 1} is empty")

    @property
    def n(self) -> int:
        return len(self.sentences)


@dataclass(frozen=True)
class ShuffledStory:
    """gold_perm maps shuffled index -> gold position, so
    restored[gold_perm[k]] == sentences[k] reproduces the gold order."""

    story_id: str
    sentences: tuple[str, ...]
    gold_perm: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.gold_perm) != list(range(len(self.sentences))):
            raise CorpusError(f"story {self.story_id!r}: gold_perm is not a bijection")

    @property
    def n(self) -> int:
        return len(self.sentences)

    def restore_gold(self) -> tuple[str, ...]:
        restored = [""] * self.n
        for k, pos in enumerate(self.gold_perm):
            restored[pos] = self.sentences[k]
        return tuple(restored)


@dataclass(frozen=True)
class SplitSpec:
    """Fractions are exact rationals; floats are taken at their decimal-literal
    value (0.8 means 4/5), so 0.8/0.1/0.1 sums to 1 exactly."""

    train_fraction: Fraction
    validation_fraction: Fraction
    test_fraction: Fraction
    seed: int = 0

    def __post_init__(self):
        for name in ("train_fraction", "validation_fraction", "test_fraction"):
            value = getattr(self, name)
            if not isinstance(value, Fraction):
                value = _as_fraction(value)
                object.__setattr__(self, name, value)
            if not (0 < value < 1):
                raise CorpusError(f"{name} must be in (0, 1), got {value}")
        total = self.train_fraction + self.validation_fraction + self.test_fraction
        if total != 1:
            raise CorpusError(f"split fractions must sum to 1 exactly, got {total}")

    def sizes(self, count: int) -> tuple[int, int, int]:
        """Floor each fraction of count; the remainder goes to train."""
        n_train = int(self.train_fraction * count)
        n_val = int(self.validation_fraction * count)
        n_test = int(self.test_fraction * count)
        n_train += count - (n_train + n_val + n_test)
        return n_train, n_val, n_test


def _as_fraction(value) -> Fraction:
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


def load_corpus(path, fmt: str = "csv-roc") -> list[Story]:
    if fmt not in FORMATS:
        raise CorpusError(f"unknown corpus format {fmt!r}; expected one of {FORMATS}")
    path = Path(path)
    if fmt == "csv-roc":
        stories = _load_csv_roc(path)
    else:
        stories = _load_jsonl(path)
    seen: set[str] = set()
    for story in stories:
        if story.story_id in seen:
            raise CorpusError(f"{path}: duplicate story_id {story.story_id!r}")
        seen.add(story.story_id)
    return stories


def _load_csv_roc(path: Path) -> list[Story]:
    stories = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise CorpusParseError("empty file", path=path) from None
        if [h.strip().lower() for h in header] != CSV_ROC_HEADER:
            raise CorpusParseError(
                f"bad header {header!r}; expected {','.join(CSV_ROC_HEADER)}", path=path, line=1
            )
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) == len(CSV_ROC_HEADER) + 1:
                raise TwoChoiceStoryError(
                    f"record {row[0]!r} has two fifth-sentence options; "
                    "two-choice story-cloze records are not orderable",
                    path=path,
                    line=line,
                )
            if len(row) != len(CSV_ROC_HEADER):
                raise CorpusParseError(
                    f"expected {len(CSV_ROC_HEADER)} fields, got {len(row)}", path=path, line=line
                )
            story_id = row[0].strip()
            if not story_id:
                raise CorpusParseError("empty storyid", path=path, line=line)
            sentences = tuple(s.strip() for s in row[2:])
            for i, s in enumerate(sentences):
                if not s:
                    raise CorpusParseError(
                        f"record {story_id!r}: sentence{i + 1} is empty", path=path, line=line
                    )
            stories.append(Story(story_id=story_id, sentences=sentences))
    return stories


def _load_jsonl(path: Path) -> list[Story]:
    stories = []
    with open(path, encoding="utf-8") as f:
        for line_num, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorpusParseError(f"bad JSON: {e}", path=path, line=line_num) from None
            if not isinstance(record, dict):
                raise CorpusParseError("record is not an object", path=path, line=line_num)
            if "_meta" in record:
                continue
            if "story_id" not in record or "sentences" not in record:
                raise CorpusParseError(
                    "record needs 'story_id' and 'sentences'", path=path, line=line_num
                )
            sentences = record["sentences"]
            if not isinstance(sentences, list) or not all(isinstance(s, str) for s in sentences):
                raise CorpusParseError("'sentences' must be a list of strings", path=path, line=line_num)
            try:
                stories.append(
                    Story(
                        story_id=str(record["story_id"]),
                        sentences=tuple(s.strip() for s in sentences),
                    )
                )
            except CorpusError as e:
                raise CorpusParseError(str(e), path=path, line=line_num) from None
    return stories


def save_corpus_jsonl(path, stories: list[Story], meta: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as f:
        if meta is not None:
            f.write(json.dumps({"_meta": meta}, sort_keys=True) + "\n")
        for story in stories:
            f.write(
                json.dumps(
                    {"story_id": story.story_id, "sentences": list(story.sentences)},
                    ensure_ascii=False,
                )
                + "\n"
            )


def split_corpus(
    stories: list[Story], spec: SplitSpec
) -> tuple[list[Story], list[Story], list[Story]]:
    """Seeded shuffle, then cut into train/validation/test by spec.sizes()."""
    if not stories:
        raise CorpusError("cannot split an empty corpus")
    order = fisher_yates(len(stories), spec.seed)
    shuffled = [stories[i] for i in order]
    n_train, n_val, _ = spec.sizes(len(stories))
    return (
        shuffled[:n_train],
        shuffled[n_train : n_train + n_val],
        shuffled[n_train + n_val :],
    )


def shuffle_story(story: Story, seed: int) -> ShuffledStory:
    """Fisher-Yates shuffle of the sentences; identity for n=1."""
    perm = fisher_yates(story.n, seed)
    return ShuffledStory(
        story_id=story.story_id,
        sentences=tuple(story.sentences[p] for p in perm),
        gold_perm=tuple(perm),
    )
