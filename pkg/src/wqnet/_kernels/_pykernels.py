"""Pure-numpy kernels: the fallback backend for the hot layer loops.

All arrays are float64. Convolution outputs are pre-activation; the layer
code applies ReLU. LSTM gate order along the 4u axis is i, f, g, o
(input, forget, candidate, output).
"""
from __future__ import annotations

import numpy as np

BACKEND_NAME = "py"


def conv1d_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Valid 1-D convolution. x (n,T,C), w (k,C,F), b (F,) -> (n,T-k+1,F)."""
    n, t, _ = x.shape
    k = w.shape[0]
    out_len = t - k + 1
    pre = np.broadcast_to(b, (n, out_len, w.shape[2])).copy()
    for dt in range(k):
        pre += x[:, dt:dt + out_len, :] @ w[dt]
    return pre


def conv1d_backward(x: np.ndarray, w: np.ndarray, dpre: np.ndarray):
    """Gradients of conv1d_forward. Returns (dx, dw, db)."""
    out_len = dpre.shape[1]
    k = w.shape[0]
    dx = np.zeros_like(x)
    dw = np.zeros_like(w)
    for dt in range(k):
        window = x[:, dt:dt + out_len, :]
        dw[dt] = np.einsum("ntc,ntf->cf", window, dpre)
        dx[:, dt:dt + out_len, :] += dpre @ w[dt].T
    db = dpre.sum(axis=(0, 1))
    return dx, dw, db


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def lstm_forward(x: np.ndarray, wx: np.ndarray, wh: np.ndarray, b: np.ndarray):
    """LSTM over the full sequence, returning only the final hidden state.

    x (n,T,C), wx (C,4u), wh (u,4u), b (4u,). Initial h and c are zero.
    Returns (h_last, cache); cache holds the activated gates and cell
    trajectories needed by lstm_backward.
    """
    n, t, _ = x.shape
    u = wh.shape[0]
    gi = np.empty((t, n, u))
    gf = np.empty((t, n, u))
    gg = np.empty((t, n, u))
    go = np.empty((t, n, u))
    cs = np.empty((t, n, u))
    tanh_c = np.empty((t, n, u))
    h_prev = np.empty((t, n, u))

    h = np.zeros((n, u))
    c = np.zeros((n, u))
    for step in range(t):
        h_prev[step] = h
        z = x[:, step, :] @ wx + h @ wh + b
        gi[step] = _sigmoid(z[:, :u])
        gf[step] = _sigmoid(z[:, u:2 * u])
        gg[step] = np.tanh(z[:, 2 * u:3 * u])
        go[step] = _sigmoid(z[:, 3 * u:])
        c = gf[step] * c + gi[step] * gg[step]
        cs[step] = c
        tanh_c[step] = np.tanh(c)
        h = go[step] * tanh_c[step]
    cache = (gi, gf, gg, go, cs, tanh_c, h_prev)
    return h, cache


def lstm_backward(x: np.ndarray, wx: np.ndarray, wh: np.ndarray, cache, dh_last: np.ndarray):
    """BPTT through lstm_forward. Returns (dx, dwx, dwh, db)."""
    gi, gf, gg, go, cs, tanh_c, h_prev = cache
    t, n, u = gi.shape
    dx = np.zeros_like(x)
    dwx = np.zeros_like(wx)
    dwh = np.zeros_like(wh)
    db = np.zeros(4 * u)

    dh = dh_last.copy()
    dc = np.zeros((n, u))
    dz = np.empty((n, 4 * u))
    for step in range(t - 1, -1, -1):
        do = dh * tanh_c[step]
        dc = dc + dh * go[step] * (1.0 - tanh_c[step] ** 2)
        di = dc * gg[step]
        dg = dc * gi[step]
        c_prev = cs[step - 1] if step > 0 else np.zeros((n, u))
        df = dc * c_prev
        dz[:, :u] = di * gi[step] * (1.0 - gi[step])
        dz[:, u:2 * u] = df * gf[step] * (1.0 - gf[step])
        dz[:, 2 * u:3 * u] = dg * (1.0 - gg[step] ** 2)
        dz[:, 3 * u:] = do * go[step] * (1.0 - go[step])

        dwx += x[:, step, :].T @ dz
        dwh += h_prev[step].T @ dz
        db += dz.sum(axis=0)
        dx[:, step, :] = dz @ wx.T
        dh = dz @ wh.T
        dc = dc * gf[step]
    return dx, dwx, dwh, db
