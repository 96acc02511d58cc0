"""Shared-weight recurrent transformer backbone.

Encoder: one attention+transition block applied depth_steps times with tied
weights; a sinusoidal step signal (a function of the step index only) is
added before each pass. There is deliberately NO encoding of sentence
position: at inference the input is an unordered set, so the whole stack is
equivariant under input permutation.

Decoder: each refined representation queries all encoder outputs through
cross-attention, passes the transition layer, and is projected d -> d into
that sentence's successor candidate.
"""

import numpy as np

from ..errors import ValidationError
from .ops import (
    ffn_backward,
    ffn_forward,
    layernorm_backward,
    layernorm_forward,
    mha_backward,
    mha_forward,
)


def step_signal(step: int, d: int) -> np.ndarray:
    """Sinusoidal signal for recurrence step `step` (1-based), d channels."""
    signal = np.zeros(d)
    even = np.arange(0, d, 2)
    freqs = 1.0 / np.power(10000.0, even / d)
    signal[even] = np.sin(step * freqs)
    odd = even + 1
    odd = odd[odd < d]
    signal[odd] = np.cos(step * freqs[: len(odd)])
    return signal


def forward(params, inputs):
    """inputs: (n, d) rows in any order. Returns ((n, d) candidates, cache)."""
    cfg = params.config
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != cfg.d:
        raise ValidationError(f"inputs shape {x.shape} incompatible with d={cfg.d}")
    heads = cfg.heads

    step_caches = []
    for step in range(1, cfg.depth_steps + 1):
        x_in = x + step_signal(step, cfg.d)
        attn, attn_cache = mha_forward(x_in, x_in, params, "enc_attn", heads)
        norm1, ln1_cache = layernorm_forward(x_in + attn, params["enc_ln1_gain"], params["enc_ln1_bias"])
        trans, ffn_cache = ffn_forward(norm1, params, "enc_ffn")
        x, ln2_cache = layernorm_forward(norm1 + trans, params["enc_ln2_gain"], params["enc_ln2_bias"])
        step_caches.append((attn_cache, ln1_cache, ffn_cache, ln2_cache))

    encoded = x
    attn, dec_attn_cache = mha_forward(encoded, encoded, params, "dec_attn", heads)
    norm1, dec_ln1_cache = layernorm_forward(
        encoded + attn, params["dec_ln1_gain"], params["dec_ln1_bias"]
    )
    trans, dec_ffn_cache = ffn_forward(norm1, params, "dec_ffn")
    norm2, dec_ln2_cache = layernorm_forward(
        norm1 + trans, params["dec_ln2_gain"], params["dec_ln2_bias"]
    )
    candidates = norm2 @ params["out_w"] + params["out_b"]

    cache = (step_caches, dec_attn_cache, dec_ln1_cache, dec_ffn_cache, dec_ln2_cache, norm2)
    return candidates, cache


def backward(params, cache, dcandidates, grads):
    """Accumulates parameter gradients into grads; returns d(inputs)."""
    step_caches, dec_attn_cache, dec_ln1_cache, dec_ffn_cache, dec_ln2_cache, norm2 = cache

    grads["out_w"] += norm2.T @ dcandidates
    grads["out_b"] += dcandidates.sum(axis=0)
    dnorm2 = dcandidates @ params["out_w"].T

    dres2, dgain, dbias = layernorm_backward(dnorm2, dec_ln2_cache)
    grads["dec_ln2_gain"] += dgain
    grads["dec_ln2_bias"] += dbias
    dnorm1 = dres2 + ffn_backward(dres2, dec_ffn_cache, params, "dec_ffn", grads)

    dres1, dgain, dbias = layernorm_backward(dnorm1, dec_ln1_cache)
    grads["dec_ln1_gain"] += dgain
    grads["dec_ln1_bias"] += dbias
    dxq, dxkv = mha_backward(dres1, dec_attn_cache, params, "dec_attn", params.config.heads, grads)
    dx = dres1 + dxq + dxkv

    for attn_cache, ln1_cache, ffn_cache, ln2_cache in reversed(step_caches):
        dres2, dgain, dbias = layernorm_backward(dx, ln2_cache)
        grads["enc_ln2_gain"] += dgain
        grads["enc_ln2_bias"] += dbias
        dnorm1 = dres2 + ffn_backward(dres2, ffn_cache, params, "enc_ffn", grads)

        dres1, dgain, dbias = layernorm_backward(dnorm1, ln1_cache)
        grads["enc_ln1_gain"] += dgain
        grads["enc_ln1_bias"] += dbias
        dxq, dxkv = mha_backward(dres1, attn_cache, params, "enc_attn", params.config.heads, grads)
        # the step signal is a constant, so d(x_in) = d(x)
        dx = dres1 + dxq + dxkv

    return dx
