"""Bidirectional recurrent backbone (ablation baseline).

One LSTM pass per direction over the input sequence; the per-position
forward and backward states are concatenated and projected back to d to
form the successor candidates. Unlike the transformer backbone this model
consumes the inputs AS a sequence, so it is not permutation equivariant.
"""

import numpy as np

from ..errors import ValidationError


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _lstm_pass(x, wx, wh, b, h_size, reverse=False):
    n = x.shape[0]
    order = range(n - 1, -1, -1) if reverse else range(n)
    h = np.zeros(h_size)
    c = np.zeros(h_size)
    states = [None] * n
    hidden = np.zeros((n, h_size))
    for t in order:
        z = x[t] @ wx + h @ wh + b
        i = _sigmoid(z[:h_size])
        f = _sigmoid(z[h_size : 2 * h_size])
        g = np.tanh(z[2 * h_size : 3 * h_size])
        o = _sigmoid(z[3 * h_size :])
        c_new = f * c + i * g
        tanh_c = np.tanh(c_new)
        h_new = o * tanh_c
        states[t] = (i, f, g, o, c, h, tanh_c)
        h, c = h_new, c_new
        hidden[t] = h_new
    return hidden, states


def _lstm_backward(dhidden, x, states, wx, wh, h_size, reverse=False):
    n = x.shape[0]
    order = range(n) if reverse else range(n - 1, -1, -1)
    dwx = np.zeros_like(wx)
    dwh = np.zeros_like(wh)
    db = np.zeros(4 * h_size)
    dx = np.zeros_like(x)
    dh_next = np.zeros(h_size)
    dc_next = np.zeros(h_size)
    for t in order:
        i, f, g, o, c_prev, h_prev, tanh_c = states[t]
        dh = dhidden[t] + dh_next
        do = dh * tanh_c
        dc = dc_next + dh * o * (1.0 - tanh_c**2)
        di = dc * g
        df = dc * c_prev
        dg = dc * i
        dc_next = dc * f
        dz = np.concatenate(
            [di * i * (1.0 - i), df * f * (1.0 - f), dg * (1.0 - g**2), do * o * (1.0 - o)]
        )
        dwx += np.outer(x[t], dz)
        dwh += np.outer(h_prev, dz)
        db += dz
        dh_next = dz @ wh.T
        dx[t] = dz @ wx.T
    return dx, dwx, dwh, db


def forward(params, inputs):
    """inputs: (n, d) in sequence order. Returns ((n, d) candidates, cache)."""
    cfg = params.config
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != cfg.d:
        raise ValidationError(f"inputs shape {x.shape} incompatible with d={cfg.d}")
    h = cfg.h
    fwd_hidden, fwd_states = _lstm_pass(x, params["fwd_wx"], params["fwd_wh"], params["fwd_b"], h)
    bwd_hidden, bwd_states = _lstm_pass(
        x, params["bwd_wx"], params["bwd_wh"], params["bwd_b"], h, reverse=True
    )
    combined = np.concatenate([fwd_hidden, bwd_hidden], axis=1)
    candidates = combined @ params["proj_w"] + params["proj_b"]
    return candidates, (x, fwd_states, bwd_states, combined)


def backward(params, cache, dcandidates, grads):
    x, fwd_states, bwd_states, combined = cache
    h = params.config.h

    grads["proj_w"] += combined.T @ dcandidates
    grads["proj_b"] += dcandidates.sum(axis=0)
    dcombined = dcandidates @ params["proj_w"].T

    dx_f, dwx, dwh, db = _lstm_backward(
        dcombined[:, :h], x, fwd_states, params["fwd_wx"], params["fwd_wh"], h
    )
    grads["fwd_wx"] += dwx
    grads["fwd_wh"] += dwh
    grads["fwd_b"] += db

    dx_b, dwx, dwh, db = _lstm_backward(
        dcombined[:, h:], x, bwd_states, params["bwd_wx"], params["bwd_wh"], h, reverse=True
    )
    grads["bwd_wx"] += dwx
    grads["bwd_wh"] += dwh
    grads["bwd_b"] += db

    return dx_f + dx_b
