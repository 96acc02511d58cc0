"""Numeric building blocks with explicit backward passes.

Every forward returns (output, cache); the matching backward consumes the
cache and the upstream gradient. Parameter gradients are accumulated into a
grads dict keyed like the tensors, so weight sharing across recurrence
steps sums contributions naturally.
"""

import numpy as np

LN_EPS = 1e-5
_GELU_C = np.sqrt(2.0 / np.pi)


def gelu_forward(x):
    u = _GELU_C * (x + 0.044715 * x**3)
    t = np.tanh(u)
    return 0.5 * x * (1.0 + t), (x, t)


def gelu_backward(dout, cache):
    x, t = cache
    du = _GELU_C * (1.0 + 3.0 * 0.044715 * x**2)
    return dout * (0.5 * (1.0 + t) + 0.5 * x * (1.0 - t**2) * du)


def layernorm_forward(x, gain, bias):
    mean = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    std = np.sqrt(var + LN_EPS)
    xhat = (x - mean) / std
    return gain * xhat + bias, (xhat, std, gain)


def layernorm_backward(dout, cache):
    xhat, std, gain = cache
    dgain = (dout * xhat).sum(axis=0)
    dbias = dout.sum(axis=0)
    dxhat = dout * gain
    dx = (
        dxhat
        - dxhat.mean(axis=-1, keepdims=True)
        - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True)
    ) / std
    return dx, dgain, dbias


def softmax_rows(x):
    shifted = x - x.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _split_heads(x, heads):
    n, d = x.shape
    return x.reshape(n, heads, d // heads).transpose(1, 0, 2)


def _merge_heads(x):
    heads, n, dk = x.shape
    return x.transpose(1, 0, 2).reshape(n, heads * dk)


def mha_forward(xq, xkv, params, prefix, heads):
    """Multi-head attention; queries from xq, keys/values from xkv.
    Self-attention is the special case xq is xkv."""
    p = params.tensors
    q = xq @ p[f"{prefix}_wq"] + p[f"{prefix}_bq"]
    k = xkv @ p[f"{prefix}_wk"]  # key bias would cancel in the softmax
    v = xkv @ p[f"{prefix}_wv"] + p[f"{prefix}_bv"]
    qh, kh, vh = (_split_heads(m, heads) for m in (q, k, v))
    dk = qh.shape[-1]
    logits = qh @ kh.transpose(0, 2, 1) / np.sqrt(dk)
    attn = softmax_rows(logits)
    context = _merge_heads(attn @ vh)
    out = context @ p[f"{prefix}_wo"] + p[f"{prefix}_bo"]
    return out, (xq, xkv, qh, kh, vh, attn, context)


def mha_backward(dout, cache, params, prefix, heads, grads):
    """Returns (dxq, dxkv); the caller adds them if xq and xkv were the
    same tensor."""
    xq, xkv, qh, kh, vh, attn, context = cache
    p = params.tensors
    dk = qh.shape[-1]

    grads[f"{prefix}_wo"] += context.T @ dout
    grads[f"{prefix}_bo"] += dout.sum(axis=0)
    dcontext = dout @ p[f"{prefix}_wo"].T

    dctx_h = _split_heads(dcontext, heads)
    dattn = dctx_h @ vh.transpose(0, 2, 1)
    dvh = attn.transpose(0, 2, 1) @ dctx_h

    # softmax jacobian, rowwise
    dlogits = attn * (dattn - (dattn * attn).sum(axis=-1, keepdims=True))
    dlogits /= np.sqrt(dk)

    dqh = dlogits @ kh
    dkh = dlogits.transpose(0, 2, 1) @ qh

    dq, dkm, dv = (_merge_heads(m) for m in (dqh, dkh, dvh))

    grads[f"{prefix}_wq"] += xq.T @ dq
    grads[f"{prefix}_bq"] += dq.sum(axis=0)
    grads[f"{prefix}_wk"] += xkv.T @ dkm
    grads[f"{prefix}_wv"] += xkv.T @ dv
    grads[f"{prefix}_bv"] += dv.sum(axis=0)

    dxq = dq @ p[f"{prefix}_wq"].T
    dxkv = dkm @ p[f"{prefix}_wk"].T + dv @ p[f"{prefix}_wv"].T
    return dxq, dxkv


def ffn_forward(x, params, prefix):
    p = params.tensors
    pre = x @ p[f"{prefix}_w1"] + p[f"{prefix}_b1"]
    act, gelu_cache = gelu_forward(pre)
    out = act @ p[f"{prefix}_w2"] + p[f"{prefix}_b2"]
    return out, (x, act, gelu_cache)


def ffn_backward(dout, cache, params, prefix, grads):
    x, act, gelu_cache = cache
    p = params.tensors
    grads[f"{prefix}_w2"] += act.T @ dout
    grads[f"{prefix}_b2"] += dout.sum(axis=0)
    dact = dout @ p[f"{prefix}_w2"].T
    dpre = gelu_backward(dact, gelu_cache)
    grads[f"{prefix}_w1"] += x.T @ dpre
    grads[f"{prefix}_b1"] += dpre.sum(axis=0)
    return dpre @ p[f"{prefix}_w1"].T
