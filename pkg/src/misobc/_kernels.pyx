# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_kernels_py``; same signatures."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log1p, fabs

cnp.import_array()

cdef double LN2 = 0.6931471805599453
cdef double PHASE_TOL = 1e-12


cdef inline double cabs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef void _project_out(double complex[:] x, double complex[:, :] q,
                       int nq, int d) nogil:
    cdef int rep, j, t
    cdef double complex coef
    for rep in range(2):
        for j in range(nq):
            coef = 0
            for t in range(d):
                coef = coef + q[j, t].conjugate() * x[t]
            for t in range(d):
                x[t] = x[t] - coef * q[j, t]


cdef double _norm(double complex[:] x, int d) nogil:
    cdef double s = 0
    cdef int t
    for t in range(d):
        s += cabs2(x[t])
    return sqrt(s)


def null_directions(basis, double rank_tol=1e-6):
    cdef double complex[:, :, :] b = np.ascontiguousarray(basis, dtype=np.complex128)
    cdef Py_ssize_t n = b.shape[0]
    cdef int r = b.shape[1]
    cdef int d = b.shape[2]
    out_arr = np.zeros((n, d), dtype=np.complex128)
    ok_arr = np.zeros(n, dtype=np.uint8)
    cdef double complex[:, :] out = out_arr
    cdef unsigned char[:] ok = ok_arr
    cdef double complex[:, :] q = np.zeros((max(r, 1), d), dtype=np.complex128)
    cdef double complex[:] x = np.zeros(d, dtype=np.complex128)
    cdef Py_ssize_t i
    cdef int j, t, nq, probe, first
    cdef double bnorm, rnorm, pm
    cdef double complex rot
    with nogil:
        for i in range(n):
            nq = 0
            for j in range(r):
                for t in range(d):
                    x[t] = b[i, j, t]
                bnorm = _norm(x, d)
                _project_out(x, q, nq, d)
                rnorm = _norm(x, d)
                if bnorm > 0 and rnorm > rank_tol * bnorm:
                    for t in range(d):
                        q[nq, t] = x[t] / rnorm
                    nq += 1
            for probe in range(d):
                for t in range(d):
                    x[t] = 0
                x[probe] = 1
                _project_out(x, q, nq, d)
                rnorm = _norm(x, d)
                if rnorm > rank_tol:
                    for t in range(d):
                        out[i, t] = x[t] / rnorm
                    ok[i] = 1
                    break
            first = -1
            for t in range(d):
                if sqrt(cabs2(out[i, t])) > PHASE_TOL:
                    first = t
                    break
            if first >= 0:
                pm = sqrt(cabs2(out[i, first]))
                rot = out[i, first].conjugate() / pm
                for t in range(d):
                    out[i, t] = out[i, t] * rot
    return out_arr, ok_arr.astype(bool)


def stream_gains(h, v):
    cdef double complex[:, :, :] hh = np.ascontiguousarray(h, dtype=np.complex128)
    cdef double complex[:, :, :] vv = np.ascontiguousarray(v, dtype=np.complex128)
    cdef Py_ssize_t n = hh.shape[0]
    cdef int k = hh.shape[1]
    cdef int m = hh.shape[2]
    cdef int s = vv.shape[1]
    out_arr = np.empty((n, k, s), dtype=np.float64)
    cdef double[:, :, :] out = out_arr
    cdef Py_ssize_t i
    cdef int a, c, t
    cdef double complex acc
    with nogil:
        for i in range(n):
            for a in range(k):
                for c in range(s):
                    acc = 0
                    for t in range(m):
                        acc = acc + hh[i, a, t].conjugate() * vv[i, c, t]
                    out[i, a, c] = cabs2(acc)
    return out_arr


def layered_rates(gains, double p_common, p_private, p_degraded, int m, bint k0_at_kalpha):
    cdef double[:, :, :] g = np.ascontiguousarray(gains, dtype=np.float64)
    cdef double[:] pp = np.ascontiguousarray(p_private, dtype=np.float64)
    cdef double[:] pd = np.ascontiguousarray(p_degraded, dtype=np.float64)
    cdef Py_ssize_t n = g.shape[0]
    cdef int k = g.shape[1]
    cdef int n0 = pd.shape[0]
    cdef int n_margin = m
    cdef int layer, j, u, a, col
    for layer in range(n0):
        n_margin += (m if k0_at_kalpha else 0) + (n0 - layer)

    private_arr = np.empty((n, m), dtype=np.float64)
    common_arr = np.empty(n, dtype=np.float64)
    degraded_arr = np.empty((n, n0), dtype=np.float64)
    margins_arr = np.empty((n, n_margin), dtype=np.float64)
    cdef double[:, :] private = private_arr
    cdef double[:] common = common_arr
    cdef double[:, :] degraded = degraded_arr
    cdef double[:, :] margins = margins_arr

    cdef double[:] alpha_block = np.empty(k, dtype=np.float64)
    cdef double[:] priv_total = np.empty(k, dtype=np.float64)
    cdef double[:] caps = np.empty(k, dtype=np.float64)
    cdef Py_ssize_t i
    cdef double own, below, sinr, rate, cap
    cdef int nrx, first_rx

    with nogil:
        for i in range(n):
            for u in range(k):
                priv_total[u] = 0
                for j in range(m):
                    priv_total[u] += g[i, u, 1 + j] * pp[j]
                alpha_block[u] = p_common * g[i, u, 0] + priv_total[u]

            # common symbol
            if p_common > 0:
                rate = 1e308
                for u in range(m):
                    sinr = p_common * g[i, u, 0] / (1.0 + priv_total[u])
                    caps[u] = log1p(sinr) / LN2
                    if caps[u] < rate:
                        rate = caps[u]
                common[i] = rate
                for u in range(m):
                    margins[i, u] = caps[u] - rate
            else:
                common[i] = 0
                for u in range(m):
                    margins[i, u] = 0
            col = m

            # no-CSIT layers
            for layer in range(n0):
                nrx = 0
                rate = 1e308
                first_rx = 0 if k0_at_kalpha else m
                for u in range(first_rx, k):
                    if u >= m and u - m < layer:
                        continue
                    below = 0
                    for j in range(n0 - 1, layer, -1):
                        below += g[i, u, m + 1 + j] * pd[j]
                    sinr = g[i, u, m + 1 + layer] * pd[layer] / (1.0 + below + alpha_block[u])
                    caps[nrx] = log1p(sinr) / LN2
                    if caps[nrx] < rate:
                        rate = caps[nrx]
                    nrx += 1
                degraded[i, layer] = rate
                for a in range(nrx):
                    margins[i, col + a] = caps[a] - rate
                col += nrx

            for u in range(m):
                own = g[i, u, 1 + u] * pp[u]
                private[i, u] = log1p(own / (1.0 + priv_total[u] - own)) / LN2

    return private_arr, common_arr, degraded_arr, margins_arr
