# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled iteration kernels; semantics match imcergo._kernels_py."""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs

cnp.import_array()

BACKEND = "compiled"


cdef void _sort_desc(const double[::1] h, Py_ssize_t[::1] idx) noexcept nogil:
    # insertion sort: h descending, ties broken by ascending state index
    cdef Py_ssize_t n = h.shape[0]
    cdef Py_ssize_t i, j, key
    for i in range(n):
        idx[i] = i
    for i in range(1, n):
        key = idx[i]
        j = i - 1
        while j >= 0 and (h[idx[j]] < h[key] or (h[idx[j]] == h[key] and idx[j] > key)):
            idx[j + 1] = idx[j]
            j -= 1
        idx[j + 1] = key


cdef void _apply(const double[:, ::1] verts,
                 const long long[::1] vrows,
                 const long long[::1] vstarts,
                 const long long[::1] irows,
                 const double[:, ::1] low,
                 const double[:, ::1] upp,
                 const double[::1] h,
                 double[::1] out,
                 Py_ssize_t[::1] idx,
                 double[::1] suffix) noexcept nogil:
    cdef Py_ssize_t n = h.shape[0]
    cdef Py_ssize_t nv = vrows.shape[0]
    cdef Py_ssize_t ni = irows.shape[0]
    cdef Py_ssize_t r, v, y, j
    cdef double best, s, mass, value, cap, p, lj

    for r in range(nv):
        best = -INFINITY
        for v in range(vstarts[r], vstarts[r + 1]):
            s = 0.0
            for y in range(n):
                s += verts[v, y] * h[y]
            if s > best:
                best = s
        out[vrows[r]] = best

    if ni > 0:
        _sort_desc(h, idx)
        for r in range(ni):
            suffix[n] = 0.0
            for j in range(n - 1, -1, -1):
                suffix[j] = suffix[j + 1] + low[r, idx[j]]
            mass = 0.0
            value = 0.0
            for j in range(n):
                y = idx[j]
                cap = 1.0 - mass - suffix[j + 1]
                p = upp[r, y]
                if cap < p:
                    p = cap
                lj = low[r, y]
                if p < lj:
                    p = lj
                value += p * h[y]
                mass += p
            out[irows[r]] = value


cdef class _Packed:
    cdef double[:, ::1] verts
    cdef double[:, ::1] low
    cdef double[:, ::1] upp
    cdef long long[::1] vrows
    cdef long long[::1] vstarts
    cdef long long[::1] irows
    cdef Py_ssize_t n


cdef _Packed _pack(cm):
    cdef _Packed p = _Packed()
    p.verts = cm.verts
    p.low = cm.low
    p.upp = cm.upp
    p.vrows = cm.vrows
    p.vstarts = cm.vstarts
    p.irows = cm.irows
    p.n = cm.n
    return p


def apply_upper(cm, const double[::1] h):
    cdef _Packed p = _pack(cm)
    out = np.empty(p.n)
    idx = np.empty(p.n, dtype=np.intp)
    suffix = np.empty(p.n + 1)
    cdef double[::1] out_v = out
    cdef Py_ssize_t[::1] idx_v = idx
    cdef double[::1] suf_v = suffix
    with nogil:
        _apply(p.verts, p.vrows, p.vstarts, p.irows, p.low, p.upp, h, out_v, idx_v, suf_v)
    return out


def run_iterate(cm, const double[::1] f, Py_ssize_t k):
    cdef _Packed p = _pack(cm)
    h = np.array(f, dtype=float)
    out = np.empty(p.n)
    idx = np.empty(p.n, dtype=np.intp)
    suffix = np.empty(p.n + 1)
    cdef double[::1] h_v = h
    cdef double[::1] out_v = out
    cdef Py_ssize_t[::1] idx_v = idx
    cdef double[::1] suf_v = suffix
    cdef Py_ssize_t step, y
    with nogil:
        for step in range(k):
            _apply(p.verts, p.vrows, p.vstarts, p.irows, p.low, p.upp, h_v, out_v, idx_v, suf_v)
            for y in range(p.n):
                h_v[y] = out_v[y]
    return h


def run_average(cm, const double[::1] f, Py_ssize_t k, trace=None):
    cdef _Packed p = _pack(cm)
    m = np.array(f, dtype=float)
    out = np.empty(p.n)
    idx = np.empty(p.n, dtype=np.intp)
    suffix = np.empty(p.n + 1)
    cdef double[::1] m_v = m
    cdef double[::1] out_v = out
    cdef Py_ssize_t[::1] idx_v = idx
    cdef double[::1] suf_v = suffix
    cdef double[:, ::1] tr_v
    cdef bint want_trace = trace is not None
    cdef Py_ssize_t j, y
    if want_trace:
        tr_v = trace
        for y in range(p.n):
            tr_v[0, y] = m_v[y]
        with nogil:
            for j in range(1, k):
                _apply(p.verts, p.vrows, p.vstarts, p.irows, p.low, p.upp, m_v, out_v, idx_v, suf_v)
                for y in range(p.n):
                    m_v[y] = f[y] + out_v[y]
                    tr_v[j, y] = m_v[y]
    else:
        with nogil:
            for j in range(1, k):
                _apply(p.verts, p.vrows, p.vstarts, p.irows, p.low, p.upp, m_v, out_v, idx_v, suf_v)
                for y in range(p.n):
                    m_v[y] = f[y] + out_v[y]
    return m


def run_power(cm, const double[::1] f, double tol, Py_ssize_t cap):
    cdef _Packed p = _pack(cm)
    v = np.array(f, dtype=float)
    w = np.empty(p.n)
    idx = np.empty(p.n, dtype=np.intp)
    suffix = np.empty(p.n + 1)
    cdef double[::1] v_v = v
    cdef double[::1] w_v = w
    cdef Py_ssize_t[::1] idx_v = idx
    cdef double[::1] suf_v = suffix
    cdef Py_ssize_t it = 0, y
    cdef double hi, lo, delta, d
    cdef bint converged = False
    with nogil:
        for it in range(1, cap + 1):
            _apply(p.verts, p.vrows, p.vstarts, p.irows, p.low, p.upp, v_v, w_v, idx_v, suf_v)
            hi = -INFINITY
            lo = INFINITY
            delta = 0.0
            for y in range(p.n):
                if w_v[y] > hi:
                    hi = w_v[y]
                if w_v[y] < lo:
                    lo = w_v[y]
                d = fabs(w_v[y] - v_v[y])
                if d > delta:
                    delta = d
                v_v[y] = w_v[y]
            if hi - lo <= tol and delta <= tol:
                converged = True
                break
    return v, it, converged


def run_eigen(cm, const double[::1] f, const double[::1] h0, double tol, Py_ssize_t cap):
    cdef _Packed p = _pack(cm)
    h = np.empty(p.n)
    raw = np.empty(p.n)
    out = np.empty(p.n)
    idx = np.empty(p.n, dtype=np.intp)
    suffix = np.empty(p.n + 1)
    cdef double[::1] h_v = h
    cdef double[::1] raw_v = raw
    cdef double[::1] out_v = out
    cdef Py_ssize_t[::1] idx_v = idx
    cdef double[::1] suf_v = suffix
    cdef Py_ssize_t it = 0, y
    cdef double mn, g, mu = 0.0, res = INFINITY, acc, d
    cdef bint converged = False

    mn = INFINITY
    for y in range(p.n):
        if h0[y] < mn:
            mn = h0[y]
    for y in range(p.n):
        h_v[y] = h0[y] - mn

    with nogil:
        for it in range(1, cap + 1):
            _apply(p.verts, p.vrows, p.vstarts, p.irows, p.low, p.upp, h_v, out_v, idx_v, suf_v)
            acc = 0.0
            for y in range(p.n):
                raw_v[y] = f[y] + out_v[y]
                acc += raw_v[y] - h_v[y]
            mu = acc / p.n
            res = 0.0
            for y in range(p.n):
                d = fabs((raw_v[y] - h_v[y]) - mu)
                if d > res:
                    res = d
            if res <= tol:
                converged = True
                break
            mn = INFINITY
            for y in range(p.n):
                h_v[y] = 0.5 * (h_v[y] + raw_v[y])
                if h_v[y] < mn:
                    mn = h_v[y]
            for y in range(p.n):
                h_v[y] = h_v[y] - mn
    return h, mu, res, it, converged
