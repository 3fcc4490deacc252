# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for the LSTM sequence kernels (float32 only).

Matches the numpy fallback in codetwin.nn.kernels step for step; the GEMM
pre/post-processing stays in numpy in both backends.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport expf, tanhf

cnp.import_array()


cdef inline float sigf(float z) nogil:
    return 1.0 / (1.0 + expf(-z))


def forward(float[:, ::1] G, float[:, ::1] Wh, float[::1] h0, float[::1] c0,
            float[:, ::1] gates, float[:, ::1] C, float[:, ::1] TC,
            float[:, ::1] H):
    """Recurrence over precomputed input projections G = X Wx^T + b."""
    cdef Py_ssize_t T = G.shape[0]
    cdef Py_ssize_t hd = Wh.shape[1]
    cdef Py_ssize_t t, r, k
    cdef float hk, i, f, g, o, c, tc
    # transposed copy so the recurrent matvec runs as unit-stride axpy
    # updates, which the compiler can vectorize without reassociating sums
    cdef float[:, ::1] WhT = np.ascontiguousarray(np.asarray(Wh).T)
    cdef float[::1] h = np.empty(hd, dtype=np.float32)
    cdef float[::1] cprev = np.empty(hd, dtype=np.float32)
    cdef float[::1] zbuf = np.empty(4 * hd, dtype=np.float32)
    with nogil:
        for k in range(hd):
            h[k] = h0[k]
            cprev[k] = c0[k]
        for t in range(T):
            for r in range(4 * hd):
                zbuf[r] = G[t, r]
            for k in range(hd):
                hk = h[k]
                for r in range(4 * hd):
                    zbuf[r] += WhT[k, r] * hk
            for k in range(hd):
                i = sigf(zbuf[k])
                f = sigf(zbuf[hd + k])
                g = tanhf(zbuf[2 * hd + k])
                o = sigf(zbuf[3 * hd + k])
                c = f * cprev[k] + i * g
                tc = tanhf(c)
                gates[t, k] = i
                gates[t, hd + k] = f
                gates[t, 2 * hd + k] = g
                gates[t, 3 * hd + k] = o
                C[t, k] = c
                TC[t, k] = tc
                cprev[k] = c
                h[k] = o * tc
            for k in range(hd):
                H[t, k] = h[k]


def backward(float[:, ::1] gates, float[:, ::1] C, float[:, ::1] TC,
             float[:, ::1] Wh, float[::1] c0, float[:, ::1] dH,
             float[::1] dh_last, float[::1] dc_last,
             float[:, ::1] dG, float[::1] dh0, float[::1] dc0):
    """Reverse recurrence producing gate preactivation gradients dG."""
    cdef Py_ssize_t T = gates.shape[0]
    cdef Py_ssize_t hd = Wh.shape[1]
    cdef Py_ssize_t t, r, k
    cdef float i, f, g, o, tc, do, dct, cp, gr
    cdef float[::1] dh = np.empty(hd, dtype=np.float32)
    cdef float[::1] dc = np.empty(hd, dtype=np.float32)
    with nogil:
        for k in range(hd):
            dh[k] = dh_last[k]
            dc[k] = dc_last[k]
        for t in range(T - 1, -1, -1):
            for k in range(hd):
                dh[k] = dh[k] + dH[t, k]
            for k in range(hd):
                i = gates[t, k]
                f = gates[t, hd + k]
                g = gates[t, 2 * hd + k]
                o = gates[t, 3 * hd + k]
                tc = TC[t, k]
                do = dh[k] * tc
                dct = dc[k] + dh[k] * o * (1.0 - tc * tc)
                cp = C[t - 1, k] if t > 0 else c0[k]
                dG[t, k] = dct * g * i * (1.0 - i)
                dG[t, hd + k] = dct * cp * f * (1.0 - f)
                dG[t, 2 * hd + k] = dct * i * (1.0 - g * g)
                dG[t, 3 * hd + k] = do * o * (1.0 - o)
                dc[k] = dct * f
            # dh = Wh^T dG[t] in axpy order (rows of Wh are unit-stride)
            for k in range(hd):
                dh[k] = 0.0
            for r in range(4 * hd):
                gr = dG[t, r]
                for k in range(hd):
                    dh[k] += Wh[r, k] * gr
        for k in range(hd):
            dh0[k] = dh[k]
            dc0[k] = dc[k]
