"""LSTM sequence kernels — the hot inner loops of training and inference.

Both kernels run over a whole sequence so the per-timestep loop lives in
compiled code. They are JIT-compiled with numba unless the environment
variable ECPE_JIT is set to 0/false/off (or numba is not installed), in
which case the same functions run as plain numpy. `benchmarks/bench_kernels.py`
compares the two paths.

Gate layout: the four gates are stacked row-wise in one matrix, in the
order input | forget | cell | output, so w_x is (4H, D), w_h is (4H, H)
and bias is (4H,). All arrays are C-contiguous float64.
"""

import os

import numpy as np


def _jit_wanted() -> bool:
    return os.environ.get("ECPE_JIT", "1").strip().lower() not in ("0", "false", "off")


JIT_ENABLED = False
if _jit_wanted():
    try:
        from numba import njit
    except ImportError:
        njit = None
    if njit is not None:
        JIT_ENABLED = True


def _maybe_jit(fn):
    if JIT_ENABLED:
        return njit(cache=True)(fn)
    return fn


@_maybe_jit
def lstm_forward_seq(w_x, w_h, bias, xs):
    """Run an LSTM left to right over xs (T, D) from zero state.

    Returns (hs, cs, gates, tanh_c) where hs/cs are (T+1, H) with row 0 the
    initial zero state, gates is (T, 4H) post-activation in i|f|g|o order and
    tanh_c is (T, H); everything the backward pass needs.
    """
    T = xs.shape[0]
    H = w_h.shape[1]
    hs = np.zeros((T + 1, H))
    cs = np.zeros((T + 1, H))
    gates = np.empty((T, 4 * H))
    tanh_c = np.empty((T, H))
    for t in range(T):
        z = np.dot(w_x, xs[t]) + np.dot(w_h, hs[t]) + bias
        i = 1.0 / (1.0 + np.exp(-z[:H]))
        f = 1.0 / (1.0 + np.exp(-z[H:2 * H]))
        g = np.tanh(z[2 * H:3 * H])
        o = 1.0 / (1.0 + np.exp(-z[3 * H:]))
        c = f * cs[t] + i * g
        tc = np.tanh(c)
        gates[t, :H] = i
        gates[t, H:2 * H] = f
        gates[t, 2 * H:3 * H] = g
        gates[t, 3 * H:] = o
        cs[t + 1] = c
        tanh_c[t] = tc
        hs[t + 1] = o * tc
    return hs, cs, gates, tanh_c


@_maybe_jit
def lstm_backward_seq(w_x, w_h, xs, hs, cs, gates, tanh_c, d_h_out):
    """Backpropagate through time given d_h_out (T, H), the gradient of the
    loss w.r.t. each timestep's hidden output.

    Returns (d_wx, d_wh, d_bias). Input gradients are not computed; the
    models feed frozen embeddings.
    """
    T = xs.shape[0]
    H = w_h.shape[1]
    d_wx = np.zeros_like(w_x)
    d_wh = np.zeros_like(w_h)
    d_bias = np.zeros(4 * H)
    w_h_t = np.ascontiguousarray(w_h.T)
    dh = np.zeros(H)
    dc = np.zeros(H)
    dz = np.empty(4 * H)
    for t in range(T - 1, -1, -1):
        dht = d_h_out[t] + dh
        i = gates[t, :H]
        f = gates[t, H:2 * H]
        g = gates[t, 2 * H:3 * H]
        o = gates[t, 3 * H:]
        tc = tanh_c[t]
        do = dht * tc
        dct = dht * o * (1.0 - tc * tc) + dc
        dz[:H] = (dct * g) * i * (1.0 - i)
        dz[H:2 * H] = (dct * cs[t]) * f * (1.0 - f)
        dz[2 * H:3 * H] = (dct * i) * (1.0 - g * g)
        dz[3 * H:] = (dht * tc) * o * (1.0 - o)
        dc = dct * f
        d_wx += np.outer(dz, xs[t])
        d_wh += np.outer(dz, hs[t])
        d_bias += dz
        dh = np.dot(w_h_t, dz)
    return d_wx, d_wh, d_bias


def warmup():
    """Trigger JIT compilation on tiny inputs (no-op on the numpy path)."""
    xs = np.zeros((2, 3))
    w_x = np.zeros((8, 3))
    w_h = np.zeros((8, 2))
    b = np.zeros(8)
    hs, cs, gates, tanh_c = lstm_forward_seq(w_x, w_h, b, xs)
    lstm_backward_seq(w_x, w_h, xs, hs, cs, gates, tanh_c, np.zeros((2, 2)))
