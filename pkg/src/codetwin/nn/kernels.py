"""LSTM sequence kernels: compiled extension with pure-numpy fallback.

Gate layout along the 4H axis is [input, forget, cell, output].  The
matrix-heavy projections (input projection, weight-gradient outer products)
are numpy GEMMs in both backends; only the sequential recurrence differs.
Backend choice: ``CODETWIN_BACKEND`` = ``auto`` (default), ``ext``, or
``python``.  The extension handles float32 only; float64 calls (used by the
finite-difference gradient checker) always take the numpy path.
"""

from __future__ import annotations

import os

import numpy as np

from ..errors import ShapeMismatch

try:
    from . import _lstm_ext
except ImportError:
    _lstm_ext = None

_mode = os.environ.get("CODETWIN_BACKEND", "auto")
if _mode not in ("auto", "ext", "python"):
    raise ValueError(f"CODETWIN_BACKEND must be auto/ext/python, got {_mode!r}")
if _mode == "ext" and _lstm_ext is None:
    raise ImportError("CODETWIN_BACKEND=ext but the compiled extension is unavailable")

_USE_EXT = _mode != "python" and _lstm_ext is not None


def active_backend() -> str:
    """Name of the backend used for float32 sequence kernels."""
    return "ext" if _USE_EXT else "python"


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def _check_shapes(Wx, Wh, b, x_dim, h_dim):
    if Wh.shape != (4 * h_dim, h_dim) or Wx.shape != (4 * h_dim, x_dim) \
            or b.shape != (4 * h_dim,):
        raise ShapeMismatch(
            f"LSTM weights {Wx.shape}/{Wh.shape}/{b.shape} inconsistent with "
            f"input dim {x_dim}, hidden dim {h_dim}")


def lstm_step(Wx, Wh, b, x, h, c):
    """One LSTM cell step; returns (h', c').

    i = sigm(Wx_i x + Wh_i h + b_i), f likewise, g = tanh(...), o = sigm(...)
    c' = f*c + i*g,  h' = o*tanh(c').
    """
    hd = h.shape[0]
    _check_shapes(Wx, Wh, b, x.shape[0], hd)
    if c.shape != (hd,):
        raise ShapeMismatch(f"cell state shape {c.shape} != ({hd},)")
    z = Wx @ x + Wh @ h + b
    i = _sigmoid(z[:hd])
    f = _sigmoid(z[hd:2 * hd])
    g = np.tanh(z[2 * hd:3 * hd])
    o = _sigmoid(z[3 * hd:])
    c_new = f * c + i * g
    h_new = o * np.tanh(c_new)
    return h_new, c_new


def lstm_forward(Wx, Wh, b, X, h0, c0):
    """Run the cell over a whole sequence X of shape (T, d_in).

    Returns (H, cache) where H is (T, d_h) and cache feeds lstm_backward.
    """
    T, x_dim = X.shape
    hd = h0.shape[0]
    _check_shapes(Wx, Wh, b, x_dim, hd)
    G = X @ Wx.T + b  # (T, 4H) input-driven preactivations
    gates = np.empty((T, 4 * hd), dtype=X.dtype)
    C = np.empty((T, hd), dtype=X.dtype)
    TC = np.empty((T, hd), dtype=X.dtype)
    H = np.empty((T, hd), dtype=X.dtype)
    if _USE_EXT and X.dtype == np.float32 and Wh.dtype == np.float32:
        _lstm_ext.forward(np.ascontiguousarray(G), np.ascontiguousarray(Wh),
                          np.ascontiguousarray(h0), np.ascontiguousarray(c0),
                          gates, C, TC, H)
    else:
        h = h0
        c = c0
        for t in range(T):
            z = G[t] + Wh @ h
            i = _sigmoid(z[:hd])
            f = _sigmoid(z[hd:2 * hd])
            g = np.tanh(z[2 * hd:3 * hd])
            o = _sigmoid(z[3 * hd:])
            c = f * c + i * g
            tc = np.tanh(c)
            h = o * tc
            gates[t, :hd] = i
            gates[t, hd:2 * hd] = f
            gates[t, 2 * hd:3 * hd] = g
            gates[t, 3 * hd:] = o
            C[t] = c
            TC[t] = tc
            H[t] = h
    cache = (X, Wx, Wh, h0, c0, gates, C, TC, H)
    return H, cache


def lstm_backward(cache, dH=None, dh_last=None, dc_last=None):
    """Backpropagate through lstm_forward.

    dH is a (T, d_h) gradient on every hidden state (may be None); dh_last /
    dc_last are extra gradients on the final hidden / cell state.  Returns
    (dX, dWx, dWh, db, dh0, dc0).
    """
    X, Wx, Wh, h0, c0, gates, C, TC, H = cache
    T, hd = H.shape
    dtype = X.dtype
    dh_last = np.zeros(hd, dtype) if dh_last is None else dh_last.astype(dtype, copy=True)
    dc_last = np.zeros(hd, dtype) if dc_last is None else dc_last.astype(dtype, copy=True)
    dG = np.empty((T, 4 * hd), dtype=dtype)
    if _USE_EXT and dtype == np.float32 and Wh.dtype == np.float32:
        dH_arr = np.zeros((T, hd), np.float32) if dH is None else np.ascontiguousarray(dH)
        dh0 = np.empty(hd, np.float32)
        dc0 = np.empty(hd, np.float32)
        _lstm_ext.backward(gates, C, TC, np.ascontiguousarray(Wh),
                           np.ascontiguousarray(c0), dH_arr,
                           dh_last, dc_last, dG, dh0, dc0)
    else:
        dh = dh_last
        dc = dc_last
        for t in range(T - 1, -1, -1):
            if dH is not None:
                dh = dh + dH[t]
            i = gates[t, :hd]
            f = gates[t, hd:2 * hd]
            g = gates[t, 2 * hd:3 * hd]
            o = gates[t, 3 * hd:]
            tc = TC[t]
            do = dh * tc
            dct = dc + dh * o * (1.0 - tc * tc)
            c_prev = C[t - 1] if t > 0 else c0
            dG[t, :hd] = dct * g * i * (1.0 - i)
            dG[t, hd:2 * hd] = dct * c_prev * f * (1.0 - f)
            dG[t, 2 * hd:3 * hd] = dct * i * (1.0 - g * g)
            dG[t, 3 * hd:] = do * o * (1.0 - o)
            dc = dct * f
            dh = Wh.T @ dG[t]
        dh0 = dh
        dc0 = dc
    dX = dG @ Wx
    dWx = dG.T @ X
    Hprev = np.vstack([h0[None, :], H[:-1]])
    dWh = dG.T @ Hprev
    db = dG.sum(axis=0)
    return dX, dWx, dWh, db, dh0, dc0
