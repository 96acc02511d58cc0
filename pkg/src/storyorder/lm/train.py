"""Loss, gradients, and the mini-batch training loop.

The objective mirrors inference: candidates are scored against the gold
successor embedding by cosine, so training minimizes the mean of
(1 - cosine) over positions that have a successor, plus an L2 penalty on
the weight matrices. Teacher forcing: inputs are gold-ordered embeddings
and the target for position i is the (unit-normalized) embedding i+1.
"""

import numpy as np

from ..embeddings import EmbeddedStory
from ..errors import TrainingDivergedError, ValidationError
from ..rng import derive_seed, generator
from . import bilstm, ut
from .config import UNIVERSAL_TRANSFORMER, TrainingConfig
from .params import ModelParams, zero_grads


def _backbone(params: ModelParams):
    return ut if params.config.backbone == UNIVERSAL_TRANSFORMER else bilstm


def _normalize_rows(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise ValidationError("zero-norm embedding row")
    return x / norms


def candidate_next(params: ModelParams, story) -> np.ndarray:
    """Successor candidates for every sentence of a story (or a raw (n, d)
    matrix). Rows are unit-normalized at the model boundary, which keeps
    attention scales embedding-source independent; cosine scoring downstream
    is scale invariant anyway."""
    matrix = story.embeddings if isinstance(story, EmbeddedStory) else np.asarray(story, dtype=np.float64)
    candidates, _ = _backbone(params).forward(params, _normalize_rows(matrix))
    return candidates


def loss(candidates, targets, params: ModelParams | None = None, l2: float = 0.0) -> float:
    """Mean (1 - cosine) over aligned candidate/target pairs, plus
    l2 * sum of squared weights."""
    data_loss, _ = _cosine_loss(np.asarray(candidates, dtype=np.float64), np.asarray(targets, dtype=np.float64))
    reg = l2 * params.squared_weight_norm() if l2 and params is not None else 0.0
    return float(data_loss + reg)


def _cosine_loss(candidates, targets):
    """Returns (mean 1-cosine, d loss / d candidates)."""
    if candidates.shape != targets.shape or candidates.ndim != 2:
        raise ValidationError(
            f"candidates {candidates.shape} and targets {targets.shape} must be aligned (m, d)"
        )
    if candidates.shape[0] < 1:
        raise ValidationError("loss needs at least one scored position")
    cn = np.linalg.norm(candidates, axis=1, keepdims=True)
    tn = np.linalg.norm(targets, axis=1, keepdims=True)
    if np.any(cn == 0.0) or np.any(tn == 0.0):
        raise ValidationError("zero-norm candidate or target in loss")
    dots = np.sum(candidates * targets, axis=1, keepdims=True)
    cosines = dots / (cn * tn)
    m = candidates.shape[0]
    value = float(np.mean(1.0 - cosines))
    dcand = -(targets / (cn * tn) - cosines * candidates / cn**2) / m
    return value, dcand


def loss_and_grads(params: ModelParams, inputs, targets, l2: float = 0.0):
    """Full training loss for one story and its gradient w.r.t. every
    parameter tensor. inputs: (n, d) gold-ordered unit rows; targets:
    (n-1, d) successor embeddings (the last position has no successor)."""
    x = np.asarray(inputs, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    if t.shape[0] != x.shape[0] - 1:
        raise ValidationError(f"expected {x.shape[0] - 1} targets, got {t.shape[0]}")
    backbone = _backbone(params)
    candidates, cache = backbone.forward(params, x)
    data_loss, dscored = _cosine_loss(candidates[:-1], t)
    dcandidates = np.zeros_like(candidates)
    dcandidates[:-1] = dscored
    grads = zero_grads(params)
    backbone.backward(params, cache, dcandidates, grads)
    total = data_loss
    if l2:
        total += l2 * params.squared_weight_norm()
        for name in params.weight_names():
            grads[name] += 2.0 * l2 * params.tensors[name]
    return float(total), grads


def _training_items(corpus: list[EmbeddedStory]):
    items = []
    for story in corpus:
        if story.n < 2:
            raise ValidationError(
                f"story {story.story_id!r} has n={story.n}; training needs n >= 2"
            )
        x = _normalize_rows(story.embeddings)
        items.append((x, x[1:]))
    return items


def train(
    params: ModelParams,
    corpus: list[EmbeddedStory],
    tcfg: TrainingConfig,
    start_epoch: int = 0,
) -> tuple[ModelParams, list[tuple[int, float]]]:
    """Mini-batch gradient descent over gold-ordered stories. Returns the
    (mutated) params and a per-epoch (epoch, mean batch loss) trace.
    Deterministic given configs; pass start_epoch when resuming so the batch
    stream and learning-rate schedule continue where they left off."""
    if not corpus:
        raise ValidationError("training corpus is empty")
    if params.config.d != corpus[0].dim:
        raise ValidationError(
            f"model d={params.config.d} but embeddings have dim {corpus[0].dim}"
        )
    items = _training_items(corpus)
    trace: list[tuple[int, float]] = []
    for offset in range(tcfg.epochs):
        epoch = start_epoch + offset
        lr = tcfg.learning_rate_at(epoch)
        order = generator(derive_seed(tcfg.shuffle_seed, "epoch", epoch)).permutation(len(items))
        batch_losses = []
        for lo in range(0, len(order), tcfg.batch_size):
            batch = order[lo : lo + tcfg.batch_size]
            grads_sum = zero_grads(params)
            loss_sum = 0.0
            for idx in batch:
                x, targets = items[idx]
                story_loss, story_grads = loss_and_grads(params, x, targets, l2=0.0)
                loss_sum += story_loss
                for name, g in story_grads.items():
                    grads_sum[name] += g
            scale = 1.0 / len(batch)
            batch_loss = loss_sum * scale
            if tcfg.weight_decay:
                batch_loss += tcfg.weight_decay * params.squared_weight_norm()
            if not np.isfinite(batch_loss):
                raise TrainingDivergedError(
                    f"non-finite loss at epoch {epoch}, batch {lo // tcfg.batch_size}: "
                    f"{batch_loss!r}; lower the learning rate or raise lr_decay"
                )
            for name, tensor in params.tensors.items():
                grad = grads_sum[name] * scale
                if tcfg.weight_decay and tensor.ndim == 2:
                    grad = grad + 2.0 * tcfg.weight_decay * tensor
                tensor -= lr * grad
            batch_losses.append(batch_loss)
        trace.append((epoch, float(np.mean(batch_losses))))
    return params, trace
