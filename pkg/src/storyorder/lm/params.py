"""Parameter container, initialization, and exact checkpoint round trips.

Naming convention: 2-D tensors are weights (scaled-uniform init, L2
regularized, covered by the init magnitude bound); 1-D tensors are biases
(zero init) or layernorm gains (suffix ``_gain``, init to one). Gains and
biases are excluded from the regularizer, as usual.
"""

import json
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..rng import generator
from .config import UNIVERSAL_TRANSFORMER, ModelConfig

CHECKPOINT_FORMAT = "storyorder-checkpoint-v1"


@dataclass
class ModelParams:
    config: ModelConfig
    tensors: dict[str, np.ndarray]

    def weight_names(self) -> list[str]:
        return [name for name, t in self.tensors.items() if t.ndim == 2]

    def squared_weight_norm(self) -> float:
        return float(sum(np.sum(t * t) for t in self.tensors.values() if t.ndim == 2))

    def copy(self) -> "ModelParams":
        return ModelParams(config=self.config, tensors={k: v.copy() for k, v in self.tensors.items()})

    def __getitem__(self, name: str) -> np.ndarray:
        return self.tensors[name]


def _attention_shapes(prefix: str, d: int) -> dict:
    # No key bias: softmax is invariant to a constant shift of every key's
    # logit contribution, so b_k would be unidentifiable (zero gradient).
    shapes = {}
    for gate in ("q", "k", "v", "o"):
        shapes[f"{prefix}_w{gate}"] = (d, d)
        if gate != "k":
            shapes[f"{prefix}_b{gate}"] = (d,)
    return shapes


def _block_shapes(prefix: str, d: int, h: int) -> dict:
    shapes = _attention_shapes(f"{prefix}_attn", d)
    shapes[f"{prefix}_ln1_gain"] = (d,)
    shapes[f"{prefix}_ln1_bias"] = (d,)
    shapes[f"{prefix}_ffn_w1"] = (d, h)
    shapes[f"{prefix}_ffn_b1"] = (h,)
    shapes[f"{prefix}_ffn_w2"] = (h, d)
    shapes[f"{prefix}_ffn_b2"] = (d,)
    shapes[f"{prefix}_ln2_gain"] = (d,)
    shapes[f"{prefix}_ln2_bias"] = (d,)
    return shapes


def tensor_shapes(config: ModelConfig) -> dict:
    d, h = config.d, config.h
    if config.backbone == UNIVERSAL_TRANSFORMER:
        shapes = _block_shapes("enc", d, h)
        shapes.update(_block_shapes("dec", d, h))
        shapes["out_w"] = (d, d)
        shapes["out_b"] = (d,)
        return shapes
    shapes = {}
    for direction in ("fwd", "bwd"):
        shapes[f"{direction}_wx"] = (d, 4 * h)
        shapes[f"{direction}_wh"] = (h, 4 * h)
        shapes[f"{direction}_b"] = (4 * h,)
    shapes["proj_w"] = (2 * h, d)
    shapes["proj_b"] = (d,)
    return shapes


def init_params(config: ModelConfig) -> ModelParams:
    """Weights ~ uniform(-s, s) with s = 1/sqrt(fan_in); biases zero, gains
    one. Deterministic given config.seed."""
    gen = generator(config.seed)
    tensors = {}
    for name, shape in tensor_shapes(config).items():
        if len(shape) == 2:
            scale = 1.0 / np.sqrt(shape[0])
            tensors[name] = gen.uniform(-scale, scale, size=shape)
        elif name.endswith("_gain"):
            tensors[name] = np.ones(shape)
        else:
            tensors[name] = np.zeros(shape)
    return ModelParams(config=config, tensors=tensors)


def zero_grads(params: ModelParams) -> dict:
    return {name: np.zeros_like(t) for name, t in params.tensors.items()}


def save_checkpoint(path, params: ModelParams, epochs_trained: int = 0, extra_meta: dict | None = None) -> None:
    meta = {
        "format": CHECKPOINT_FORMAT,
        "config": params.config.to_dict(),
        "epochs_trained": epochs_trained,
    }
    if extra_meta:
        meta.update(extra_meta)
    arrays = dict(params.tensors)
    arrays["__meta__"] = np.array(json.dumps(meta, sort_keys=True))
    with open(path, "wb") as f:
        np.savez(f, **arrays)


def load_checkpoint(path) -> tuple[ModelParams, dict]:
    with np.load(path, allow_pickle=False) as data:
        if "__meta__" not in data:
            raise ValidationError(f"{path}: not a model checkpoint (missing meta)")
        meta = json.loads(str(data["__meta__"]))
        if meta.get("format") != CHECKPOINT_FORMAT:
            raise ValidationError(f"{path}: unsupported checkpoint format {meta.get('format')!r}")
        config = ModelConfig.from_dict(meta["config"])
        expected = tensor_shapes(config)
        tensors = {}
        for name, shape in expected.items():
            if name not in data:
                raise ValidationError(f"{path}: checkpoint missing tensor {name!r}")
            tensor = data[name]
            if tensor.shape != shape:
                raise ValidationError(
                    f"{path}: tensor {name!r} has shape {tensor.shape}, expected {shape}"
                )
            if not np.all(np.isfinite(tensor)):
                raise ValidationError(f"{path}: tensor {name!r} has non-finite entries")
            tensors[name] = tensor.astype(np.float64, copy=False)
    return ModelParams(config=config, tensors=tensors), meta
