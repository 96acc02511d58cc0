"""Command-line surface: encode, train, order, evaluate, ablate.

Options resolve in three layers: built-in defaults, then a JSON config file
given with --config (flat keys named like the long options), then explicit
flags. Flags win. Every output file carries a metadata header with the tool
version and a hash of the resolved configuration so runs can be reproduced
exactly; no timestamps, so identical invocations produce identical bytes.

Exit codes: 0 success, 1 runtime failure, 2 input validation failure.
"""

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path

from . import __version__, lm
from .corpus import SplitSpec, load_corpus, split_corpus
from .embeddings import (
    TOY_ENCODER,
    EmbeddedStory,
    encode_corpus,
    load_embeddings,
    save_embeddings,
)
from .errors import TrainingDivergedError, ValidationError
from .metrics import evaluate
from .ngram import ngram_overlap_scores
from .rng import HASH_ALGORITHM, SHUFFLE_ALGORITHM, derive_seed, fisher_yates
from .scoring import BRUTE_FORCE, NEAREST_NEIGHBOR, brute_force_order, nn_order, pair_scores

STRATEGIES = {
    "brute-force": BRUTE_FORCE,
    "nn": NEAREST_NEIGHBOR,
    "nearest-neighbor": NEAREST_NEIGHBOR,
}
SCORERS = ("lm-cosine", "ngram-overlap", "cbow-cosine")
SPLIT_NAMES = ("all", "train", "validation", "test")


def _config_hash(options: dict) -> str:
    canonical = json.dumps(options, sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def _meta(command: str, options: dict, **extra) -> dict:
    meta = {
        "tool": "storyorder",
        "version": __version__,
        "command": command,
        "config_hash": _config_hash(options),
    }
    meta.update(extra)
    return meta


def _csv_comment(meta: dict) -> str:
    return f"# storyorder {__version__} command={meta['command']} config_hash={meta['config_hash']}\n"


_OUTPUT_OPTIONS = {
    "encode": ("out",),
    "train": ("checkpoint", "trace"),
    "order": ("out",),
    "evaluate": ("out_json", "out_csv"),
    "ablate": ("out_csv", "out_json"),
}


def _resolved(ns: argparse.Namespace) -> dict:
    """Options that determine output content; where the output lands is
    excluded so identical runs produce identical bytes at any destination."""
    skip = ("func", "config") + _OUTPUT_OPTIONS.get(ns.command, ())
    return {k: v for k, v in vars(ns).items() if k not in skip and v is not None}


def _apply_config(ns: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    """Fill unset options from the --config JSON file; explicit flags win."""
    if not getattr(ns, "config", None):
        return
    path = Path(ns.config)
    if not path.exists():
        raise ValidationError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: bad JSON: {e}") from None
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: config must be a JSON object")
    for key, value in data.items():
        dest = key.replace("-", "_")
        if hasattr(ns, dest) and getattr(ns, dest) is None:
            setattr(ns, dest, value)


def _require(ns: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(ns, name) is None:
            raise ValidationError(f"missing required option --{name.replace('_', '-')}")


def _split_spec(ns: argparse.Namespace) -> SplitSpec:
    return SplitSpec(
        train_fraction=ns.train_frac,
        validation_fraction=ns.val_frac,
        test_fraction=ns.test_frac,
        seed=ns.split_seed,
    )


def _select_split(stories, ns: argparse.Namespace):
    if ns.split == "all":
        return stories
    train, val, test = split_corpus(stories, _split_spec(ns))
    return {"train": train, "validation": val, "test": test}[ns.split]


def _add_split_options(sub, default="all"):
    sub.add_argument("--split", choices=SPLIT_NAMES, default=None,
                     help=f"subset to use (default {default})")
    sub.add_argument("--train-frac", default=None, help="train fraction (default 0.8)")
    sub.add_argument("--val-frac", default=None, help="validation fraction (default 0.1)")
    sub.add_argument("--test-frac", default=None, help="test fraction (default 0.1)")
    sub.add_argument("--split-seed", type=int, default=None, help="split shuffle seed (default 0)")


def _finish_split_defaults(ns, default_split="all"):
    ns.split = ns.split or default_split
    ns.train_frac = ns.train_frac if ns.train_frac is not None else "0.8"
    ns.val_frac = ns.val_frac if ns.val_frac is not None else "0.1"
    ns.test_frac = ns.test_frac if ns.test_frac is not None else "0.1"
    ns.split_seed = ns.split_seed if ns.split_seed is not None else 0


# ---------------------------------------------------------------- encode


def cmd_encode(ns: argparse.Namespace) -> int:
    _require(ns, "corpus", "out")
    ns.format = ns.format or "csv-roc"
    ns.dim = ns.dim if ns.dim is not None else 64
    ns.seed = ns.seed if ns.seed is not None else 0
    stories = load_corpus(ns.corpus, fmt=ns.format)
    embedded = encode_corpus(stories, d=int(ns.dim), seed=int(ns.seed))
    meta = _meta(
        "encode",
        _resolved(ns),
        encoder=TOY_ENCODER,
        token_hash=HASH_ALGORITHM,
        dim=int(ns.dim),
        seed=int(ns.seed),
    )
    save_embeddings(ns.out, embedded, meta=meta)
    print(f"encoded {len(embedded)} stories (dim {ns.dim}) -> {ns.out}")
    return 0


# ----------------------------------------------------------------- train


def _model_config(ns: argparse.Namespace, dim: int) -> lm.ModelConfig:
    return lm.ModelConfig(
        d=dim,
        h=int(ns.hidden) if ns.hidden is not None else 0,
        heads=int(ns.heads) if ns.heads is not None else 4,
        depth_steps=int(ns.depth_steps) if ns.depth_steps is not None else 4,
        backbone=ns.backbone or lm.UNIVERSAL_TRANSFORMER,
        seed=int(ns.seed) if ns.seed is not None else 0,
    )


def _training_config(ns: argparse.Namespace) -> lm.TrainingConfig:
    return lm.TrainingConfig(
        learning_rate=float(ns.learning_rate) if ns.learning_rate is not None else 0.5,
        weight_decay=float(ns.weight_decay) if ns.weight_decay is not None else 1e-5,
        epochs=int(ns.epochs) if ns.epochs is not None else 10,
        batch_size=int(ns.batch_size) if ns.batch_size is not None else 32,
        lr_schedule=ns.lr_schedule or "inverse-time",
        lr_decay=float(ns.lr_decay) if ns.lr_decay is not None else 0.05,
        shuffle_seed=int(ns.seed) if ns.seed is not None else 0,
    )


def cmd_train(ns: argparse.Namespace) -> int:
    _require(ns, "embeddings", "checkpoint")
    _finish_split_defaults(ns, default_split="train")
    stories = load_embeddings(ns.embeddings)
    if not stories:
        raise ValidationError(f"{ns.embeddings}: no records")
    subset = _select_split(stories, ns)
    if not subset:
        raise ValidationError(f"split {ns.split!r} selected no stories")
    tcfg = _training_config(ns)

    if ns.resume:
        params, meta = lm.load_checkpoint(ns.resume)
        start_epoch = int(meta.get("epochs_trained", 0))
        if params.config.d != subset[0].dim:
            raise ValidationError(
                f"checkpoint d={params.config.d} but embeddings have dim {subset[0].dim}"
            )
    else:
        params = lm.init_params(_model_config(ns, subset[0].dim))
        start_epoch = 0

    params, trace = lm.train(params, subset, tcfg, start_epoch=start_epoch)
    epochs_trained = start_epoch + tcfg.epochs
    lm.save_checkpoint(
        ns.checkpoint,
        params,
        epochs_trained=epochs_trained,
        extra_meta=_meta("train", _resolved(ns), stories=len(subset)),
    )
    if ns.trace:
        new_file = not (Path(ns.trace).exists() and ns.resume)
        with open(ns.trace, "a" if not new_file else "w", encoding="utf-8", newline="") as f:
            if new_file:
                f.write(_csv_comment(_meta("train", _resolved(ns))))
            writer = csv.writer(f)
            if new_file:
                writer.writerow(["epoch", "mean_loss"])
            for epoch, mean_loss in trace:
                writer.writerow([epoch, repr(mean_loss)])
    print(
        f"trained {params.config.backbone} on {len(subset)} stories for "
        f"{tcfg.epochs} epochs (total {epochs_trained}); "
        f"loss {trace[0][1]:.6f} -> {trace[-1][1]:.6f}; checkpoint {ns.checkpoint}"
    )
    return 0


# ----------------------------------------------------------------- order


def _order_one(story: EmbeddedStory, scorer: str, strategy: str, params, seed: int):
    """Shuffle a gold-order story deterministically, score successor pairs,
    and search for the best reading order. Returns a prediction record whose
    predicted_order lists gold positions in predicted reading order."""
    shuffle_seed = derive_seed(seed, "shuffle", story.story_id)
    perm = fisher_yates(story.n, shuffle_seed)
    shuffled = story.embeddings[perm]
    shuffled_sentences = [story.sentences[p] for p in perm]

    if story.n == 1:
        order, total, ties = (0,), 0.0, False
    else:
        if scorer == "lm-cosine":
            candidates = lm.candidate_next(params, shuffled)
            matrix = pair_scores(candidates, shuffled)
        elif scorer == "cbow-cosine":
            matrix = pair_scores(shuffled, shuffled)
        else:
            matrix = ngram_overlap_scores(shuffled_sentences)
        result = brute_force_order(matrix) if strategy == BRUTE_FORCE else nn_order(matrix)
        order, total, ties = result.order, result.total_score, result.ties_broken

    return {
        "story_id": story.story_id,
        "n": story.n,
        "shuffle_seed": shuffle_seed,
        "predicted_order": [int(perm[k]) for k in order],
        "total_score": total,
        "strategy": strategy,
        "scorer": scorer,
        "ties_broken": ties,
    }


def cmd_order(ns: argparse.Namespace) -> int:
    _require(ns, "embeddings", "out")
    _finish_split_defaults(ns)
    ns.scorer = ns.scorer or "lm-cosine"
    ns.seed = int(ns.seed) if ns.seed is not None else 0
    strategy_key = ns.strategy or "brute-force"
    if strategy_key not in STRATEGIES:
        raise ValidationError(f"unknown strategy {strategy_key!r}; expected {sorted(STRATEGIES)}")
    strategy = STRATEGIES[strategy_key]
    if ns.scorer not in SCORERS:
        raise ValidationError(f"unknown scorer {ns.scorer!r}; expected {SCORERS}")

    params = None
    if ns.scorer == "lm-cosine":
        _require(ns, "checkpoint")
        params, _ = lm.load_checkpoint(ns.checkpoint)

    stories = load_embeddings(ns.embeddings)
    subset = _select_split(stories, ns)
    if not subset:
        raise ValidationError(f"split {ns.split!r} selected no stories")
    if params is not None and params.config.d != subset[0].dim:
        raise ValidationError(
            f"checkpoint d={params.config.d} but embeddings have dim {subset[0].dim}"
        )

    meta = _meta(
        "order",
        _resolved(ns),
        shuffle=SHUFFLE_ALGORITHM,
        per_story_seed=f"{HASH_ALGORITHM}(seed, 'shuffle', story_id)",
        seed=ns.seed,
        strategy=strategy,
        scorer=ns.scorer,
    )
    with open(ns.out, "w", encoding="utf-8") as f:
        f.write(json.dumps({"_meta": meta}, sort_keys=True) + "\n")
        for story in subset:
            record = _order_one(story, ns.scorer, strategy, params, ns.seed)
            f.write(json.dumps(record) + "\n")
    print(f"ordered {len(subset)} stories ({ns.scorer}, {strategy}) -> {ns.out}")
    return 0


# -------------------------------------------------------------- evaluate


def _load_predictions(path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as f:
        for line_num, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise ValidationError(f"{path}:{line_num}: bad JSON: {e}") from None
            if "_meta" in record:
                continue
            for key in ("story_id", "predicted_order"):
                if key not in record:
                    raise ValidationError(f"{path}:{line_num}: missing key {key!r}")
            records.append(record)
    if not records:
        raise ValidationError(f"{path}: no prediction records")
    return records


def cmd_evaluate(ns: argparse.Namespace) -> int:
    _require(ns, "predictions", "corpus")
    ns.format = ns.format or "csv-roc"
    predictions = _load_predictions(ns.predictions)
    gold = {s.story_id: s for s in load_corpus(ns.corpus, fmt=ns.format)}
    pairs = []
    for record in predictions:
        sid = record["story_id"]
        if sid not in gold:
            raise ValidationError(f"prediction for unknown story_id {sid!r}")
        n = gold[sid].n
        pred = record["predicted_order"]
        if len(pred) != n:
            raise ValidationError(f"story {sid!r}: predicted_order has {len(pred)} entries, gold n={n}")
        pairs.append((sid, pred, list(range(n))))
    report = evaluate(pairs)

    meta = _meta("evaluate", _resolved(ns))
    if ns.out_json:
        Path(ns.out_json).write_text(report.to_json(per_story=True, meta=meta), encoding="utf-8")
    if ns.out_csv:
        Path(ns.out_csv).write_text(
            _csv_comment(meta) + report.csv_row(predictions=str(ns.predictions)),
            encoding="utf-8",
        )
    print(
        f"evaluated {report.story_count} stories: mean_tau={report.mean_tau:.4f} "
        f"pmr={report.pmr:.4f} mean_pairwise_ratio={report.mean_pairwise_ratio:.4f}"
    )
    return 0


# ---------------------------------------------------------------- ablate


def _ablate_cell(stories, backbone, strategy, ns, tcfg, model_cache):
    """Train (or reuse) the backbone for this embedding file, then order and
    evaluate the eval split. Returns the EvalReport."""
    train_set, val_set, test_set = split_corpus(stories, _split_spec(ns))
    eval_set = {"train": train_set, "validation": val_set, "test": test_set}[ns.eval_split]
    if not train_set or not eval_set:
        raise ValidationError("split produced an empty train or eval set")
    if backbone not in model_cache:
        config = lm.ModelConfig(
            d=train_set[0].dim,
            heads=int(ns.heads) if ns.heads is not None else 4,
            depth_steps=int(ns.depth_steps) if ns.depth_steps is not None else 4,
            backbone=backbone,
            seed=int(ns.seed),
        )
        params = lm.init_params(config)
        lm.train(params, train_set, tcfg)
        model_cache[backbone] = params
    params = model_cache[backbone]
    pairs = []
    for story in eval_set:
        record = _order_one(story, "lm-cosine", strategy, params, int(ns.seed))
        pairs.append((story.story_id, record["predicted_order"], list(range(story.n))))
    return evaluate(pairs)


def cmd_ablate(ns: argparse.Namespace) -> int:
    _require(ns, "embeddings", "out_csv")
    _finish_split_defaults(ns)
    ns.eval_split = ns.eval_split or "test"
    ns.seed = int(ns.seed) if ns.seed is not None else 0
    if ns.eval_split not in ("train", "validation", "test"):
        raise ValidationError(f"eval_split must be train/validation/test, got {ns.eval_split!r}")
    if isinstance(ns.embeddings, str):
        try:
            ns.embeddings = json.loads(ns.embeddings)
        except json.JSONDecodeError:
            raise ValidationError(
                "--embeddings for ablate must be a JSON object mapping label -> path"
            ) from None
    if not isinstance(ns.embeddings, dict) or not ns.embeddings:
        raise ValidationError("ablate needs a non-empty label -> path mapping of embedding files")
    backbones = ns.backbones or list(lm.BACKBONES)
    strategies = [STRATEGIES[s] for s in (ns.strategies or ["brute-force", "nn"])]
    tcfg = _training_config(ns)

    rows = []
    for label, path in sorted(ns.embeddings.items()):
        try:
            stories = load_embeddings(path)
        except (OSError, ValidationError) as e:
            for backbone in backbones:
                for strategy in strategies:
                    rows.append(_ablate_row(label, backbone, strategy, error=str(e)))
            continue
        model_cache: dict = {}
        for backbone in backbones:
            for strategy in strategies:
                try:
                    report = _ablate_cell(stories, backbone, strategy, ns, tcfg, model_cache)
                    rows.append(_ablate_row(label, backbone, strategy, report=report))
                except (ValidationError, TrainingDivergedError) as e:
                    rows.append(_ablate_row(label, backbone, strategy, error=str(e)))

    header = [
        "encoder", "backbone", "strategy", "stories",
        "mean_tau", "pmr", "mean_pairwise_ratio", "status",
    ]
    meta = _meta("ablate", _resolved(ns))
    with open(ns.out_csv, "w", encoding="utf-8", newline="") as f:
        f.write(_csv_comment(meta))
        writer = csv.writer(f)
        writer.writerow(header)
        writer.writerows(rows)
    if ns.out_json:
        payload = {"_meta": meta, "rows": [dict(zip(header, row)) for row in rows]}
        Path(ns.out_json).write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
    failures = sum(1 for row in rows if row[-1] != "ok")
    print(f"ablation grid: {len(rows)} cells, {failures} failed -> {ns.out_csv}")
    return 0


def _ablate_row(label, backbone, strategy, report=None, error=None):
    if report is None:
        return [label, backbone, strategy, 0, "", "", "", f"error: {error}"]
    return [
        label, backbone, strategy, report.story_count,
        repr(report.mean_tau), repr(report.pmr), repr(report.mean_pairwise_ratio), "ok",
    ]


# ------------------------------------------------------------------ main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="storyorder",
        description="Order shuffled story sentences with a sentence-level language model.",
    )
    parser.add_argument("--version", action="version", version=f"storyorder {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", default=None, help="JSON config file; flags override it")
        p.add_argument("--seed", type=int, default=None, help="seed (default 0)")

    p = sub.add_parser("encode", help="toy-encode a corpus into an embedding file")
    add_common(p)
    p.add_argument("--corpus", default=None)
    p.add_argument("--format", choices=("csv-roc", "jsonl"), default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--dim", type=int, default=None, help="embedding dimension (default 64)")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("train", help="train the sentence-level language model")
    add_common(p)
    p.add_argument("--embeddings", default=None)
    p.add_argument("--checkpoint", default=None, help="output checkpoint path")
    p.add_argument("--trace", default=None, help="loss trace CSV path")
    p.add_argument("--resume", default=None, help="checkpoint to continue from")
    p.add_argument("--backbone", choices=lm.BACKBONES, default=None)
    p.add_argument("--hidden", type=int, default=None, help="hidden size (default 4*d)")
    p.add_argument("--heads", type=int, default=None)
    p.add_argument("--depth-steps", type=int, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--weight-decay", type=float, default=None)
    p.add_argument("--lr-schedule", choices=lm.config.LR_SCHEDULES, default=None)
    p.add_argument("--lr-decay", type=float, default=None)
    _add_split_options(p, default="train")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("order", help="shuffle stories and predict their order")
    add_common(p)
    p.add_argument("--embeddings", default=None)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--strategy", choices=sorted(STRATEGIES), default=None)
    p.add_argument("--scorer", choices=SCORERS, default=None)
    _add_split_options(p)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("evaluate", help="score predictions against the gold corpus")
    add_common(p)
    p.add_argument("--predictions", default=None)
    p.add_argument("--corpus", default=None)
    p.add_argument("--format", choices=("csv-roc", "jsonl"), default=None)
    p.add_argument("--out-json", default=None)
    p.add_argument("--out-csv", default=None)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("ablate", help="run the encoder x backbone x search grid")
    add_common(p)
    p.add_argument("--embeddings", default=None,
                   help="JSON object mapping encoder label -> embedding file path")
    p.add_argument("--backbones", nargs="+", choices=lm.BACKBONES, default=None)
    p.add_argument("--strategies", nargs="+", choices=sorted(STRATEGIES), default=None)
    p.add_argument("--eval-split", choices=("train", "validation", "test"), default=None)
    p.add_argument("--heads", type=int, default=None)
    p.add_argument("--depth-steps", type=int, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--weight-decay", type=float, default=None)
    p.add_argument("--lr-schedule", choices=lm.config.LR_SCHEDULES, default=None)
    p.add_argument("--lr-decay", type=float, default=None)
    p.add_argument("--out-csv", default=None)
    p.add_argument("--out-json", default=None)
    _add_split_options(p)
    p.set_defaults(func=cmd_ablate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        _apply_config(ns, parser)
        return ns.func(ns)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except TrainingDivergedError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # pragma: no cover - last resort
        print(f"internal error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
