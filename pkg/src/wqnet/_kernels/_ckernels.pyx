# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels for the hot layer loops; same contract as _pykernels.

Matrix products go through BLAS dgemm (anything else loses to numpy at
these shapes); the gate/activation element-wise math is fused into single
C loops, which is where the win over numpy's chained temporaries comes from.
"""

import numpy as np

from libc.math cimport exp, tanh
from scipy.linalg.cython_blas cimport dgemm

BACKEND_NAME = "c"


cdef inline double _sig(double z) noexcept nogil:
    cdef double e
    if z >= 0.0:
        return 1.0 / (1.0 + exp(-z))
    e = exp(z)
    return e / (1.0 + e)


cdef inline void _gemm_rm(bint trans_a, bint trans_b,
                          int m, int n, int k, double alpha,
                          const double *a, int lda,
                          const double *b, int ldb,
                          double beta, double *c, int ldc) noexcept nogil:
    # row-major C(m,n) = alpha*op(A)op(B) + beta*C via the Fortran swap trick
    cdef char ta = b'T' if trans_a else b'N'
    cdef char tb = b'T' if trans_b else b'N'
    dgemm(&tb, &ta, &n, &m, &k, &alpha,
          <double*>b, &ldb, <double*>a, &lda, &beta, c, &ldc)


def conv1d_forward(const double[:, :, ::1] x, const double[:, :, ::1] w, const double[::1] b):
    cdef Py_ssize_t n = x.shape[0], t = x.shape[1], c = x.shape[2]
    cdef Py_ssize_t k = w.shape[0], f = w.shape[2]
    cdef Py_ssize_t out_len = t - k + 1
    pre_arr = np.empty((n, out_len, f))
    cdef double[:, :, ::1] pre = pre_arr
    cdef Py_ssize_t i, ot, j, dt, ch
    cdef double xv
    with nogil:
        for i in range(n):
            for ot in range(out_len):
                for j in range(f):
                    pre[i, ot, j] = b[j]
                for dt in range(k):
                    for ch in range(c):
                        xv = x[i, ot + dt, ch]
                        for j in range(f):
                            pre[i, ot, j] += xv * w[dt, ch, j]
    return pre_arr


def conv1d_backward(const double[:, :, ::1] x, const double[:, :, ::1] w, const double[:, :, ::1] dpre):
    cdef Py_ssize_t n = x.shape[0], t = x.shape[1], c = x.shape[2]
    cdef Py_ssize_t k = w.shape[0], f = w.shape[2]
    cdef Py_ssize_t out_len = dpre.shape[1]
    dx_arr = np.zeros((n, t, c))
    dw_arr = np.zeros((k, c, f))
    db_arr = np.zeros(f)
    cdef double[:, :, ::1] dx = dx_arr
    cdef double[:, :, ::1] dw = dw_arr
    cdef double[::1] db = db_arr
    cdef Py_ssize_t i, ot, j, dt, ch
    cdef double xv, acc
    with nogil:
        for i in range(n):
            for ot in range(out_len):
                for j in range(f):
                    db[j] += dpre[i, ot, j]
                for dt in range(k):
                    for ch in range(c):
                        xv = x[i, ot + dt, ch]
                        acc = 0.0
                        for j in range(f):
                            dw[dt, ch, j] += xv * dpre[i, ot, j]
                            acc += w[dt, ch, j] * dpre[i, ot, j]
                        dx[i, ot + dt, ch] += acc
    return dx_arr, dw_arr, db_arr


def lstm_forward(const double[:, :, ::1] x, const double[:, ::1] wx, const double[:, ::1] wh, const double[::1] b):
    cdef int n = <int>x.shape[0], t = <int>x.shape[1], c = <int>x.shape[2]
    cdef int u = <int>wh.shape[0], g4 = 4 * u
    gi_arr = np.empty((t, n, u))
    gf_arr = np.empty((t, n, u))
    gg_arr = np.empty((t, n, u))
    go_arr = np.empty((t, n, u))
    cs_arr = np.empty((t, n, u))
    tc_arr = np.empty((t, n, u))
    hp_arr = np.empty((t, n, u))
    h_arr = np.zeros((n, u))
    c_arr = np.zeros((n, u))
    z_arr = np.empty((n, g4))
    cdef double[:, :, ::1] gi = gi_arr, gf = gf_arr, gg = gg_arr, go = go_arr
    cdef double[:, :, ::1] cs = cs_arr, tc = tc_arr, hp = hp_arr
    cdef double[:, ::1] h = h_arr, cell = c_arr, z = z_arr
    cdef int step, i, j
    cdef double iv, fv, gv, ov, cv
    with nogil:
        for step in range(t):
            for i in range(n):
                for j in range(u):
                    hp[step, i, j] = h[i, j]
                for j in range(g4):
                    z[i, j] = b[j]
            # z += x_t @ wx + h @ wh
            _gemm_rm(0, 0, n, g4, c, 1.0, &x[0, step, 0], t * c, &wx[0, 0], g4, 1.0, &z[0, 0], g4)
            _gemm_rm(0, 0, n, g4, u, 1.0, &h[0, 0], u, &wh[0, 0], g4, 1.0, &z[0, 0], g4)
            for i in range(n):
                for j in range(u):
                    iv = _sig(z[i, j])
                    fv = _sig(z[i, u + j])
                    gv = tanh(z[i, 2 * u + j])
                    ov = _sig(z[i, 3 * u + j])
                    cv = fv * cell[i, j] + iv * gv
                    gi[step, i, j] = iv
                    gf[step, i, j] = fv
                    gg[step, i, j] = gv
                    go[step, i, j] = ov
                    cell[i, j] = cv
                    cs[step, i, j] = cv
                    cv = tanh(cv)
                    tc[step, i, j] = cv
                    h[i, j] = ov * cv
    cache = (gi_arr, gf_arr, gg_arr, go_arr, cs_arr, tc_arr, hp_arr)
    return h_arr, cache


def lstm_backward(const double[:, :, ::1] x, const double[:, ::1] wx, const double[:, ::1] wh, cache, const double[:, ::1] dh_last):
    gi_arr, gf_arr, gg_arr, go_arr, cs_arr, tc_arr, hp_arr = cache
    cdef const double[:, :, ::1] gi = gi_arr, gf = gf_arr, gg = gg_arr, go = go_arr
    cdef const double[:, :, ::1] cs = cs_arr, tc = tc_arr, hp = hp_arr
    cdef int t = <int>gi.shape[0], n = <int>gi.shape[1], u = <int>gi.shape[2]
    cdef int c = <int>x.shape[2], g4 = 4 * u
    dx_arr = np.zeros((n, t, c))
    dwx_arr = np.zeros((c, g4))
    dwh_arr = np.zeros((u, g4))
    db_arr = np.zeros(g4)
    dh_arr = np.array(dh_last, copy=True)
    dc_arr = np.zeros((n, u))
    dz_arr = np.empty((n, g4))
    cdef double[:, :, ::1] dx = dx_arr
    cdef double[:, ::1] dwx = dwx_arr, dwh = dwh_arr, dh = dh_arr, dc = dc_arr, dz = dz_arr
    cdef double[::1] db = db_arr
    cdef int step, i, j
    cdef double tchij, c_prev, di, df, dg, do_, dcv, iv, fv, gv, ov
    with nogil:
        for step in range(t - 1, -1, -1):
            for i in range(n):
                for j in range(u):
                    iv = gi[step, i, j]
                    fv = gf[step, i, j]
                    gv = gg[step, i, j]
                    ov = go[step, i, j]
                    tchij = tc[step, i, j]
                    do_ = dh[i, j] * tchij
                    dcv = dc[i, j] + dh[i, j] * ov * (1.0 - tchij * tchij)
                    di = dcv * gv
                    dg = dcv * iv
                    if step > 0:
                        c_prev = cs[step - 1, i, j]
                    else:
                        c_prev = 0.0
                    df = dcv * c_prev
                    dz[i, j] = di * iv * (1.0 - iv)
                    dz[i, u + j] = df * fv * (1.0 - fv)
                    dz[i, 2 * u + j] = dg * (1.0 - gv * gv)
                    dz[i, 3 * u + j] = do_ * ov * (1.0 - ov)
                    dc[i, j] = dcv * fv
                for j in range(g4):
                    db[j] += dz[i, j]
            # dwx += x_t^T dz ; dwh += h_prev^T dz
            _gemm_rm(1, 0, c, g4, n, 1.0, &x[0, step, 0], t * c, &dz[0, 0], g4, 1.0, &dwx[0, 0], g4)
            _gemm_rm(1, 0, u, g4, n, 1.0, &hp[step, 0, 0], u, &dz[0, 0], g4, 1.0, &dwh[0, 0], g4)
            # dx_t = dz wx^T ; dh (next iteration) = dz wh^T
            _gemm_rm(0, 1, n, c, g4, 1.0, &dz[0, 0], g4, &wx[0, 0], g4, 0.0, &dx[0, step, 0], t * c)
            _gemm_rm(0, 1, n, u, g4, 1.0, &dz[0, 0], g4, &wh[0, 0], g4, 0.0, &dh[0, 0], u)
    return dx_arr, dwx_arr, dwh_arr, db_arr
