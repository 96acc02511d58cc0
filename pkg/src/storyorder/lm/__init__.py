"""Sentence-level language model: predicts each sentence's successor
embedding from the full set/sequence of sentence embeddings."""

from .config import BACKBONES, BILSTM, UNIVERSAL_TRANSFORMER, ModelConfig, TrainingConfig
from .params import (
    ModelParams,
    init_params,
    load_checkpoint,
    save_checkpoint,
    tensor_shapes,
    zero_grads,
)
from .train import candidate_next, loss, loss_and_grads, train

__all__ = [
    "BACKBONES",
    "BILSTM",
    "UNIVERSAL_TRANSFORMER",
    "ModelConfig",
    "TrainingConfig",
    "ModelParams",
    "init_params",
    "load_checkpoint",
    "save_checkpoint",
    "tensor_shapes",
    "zero_grads",
    "candidate_next",
    "loss",
    "loss_and_grads",
    "train",
]
