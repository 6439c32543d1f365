# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; same signatures and results as ``_pure``.

Integer work is done in int64.  The dispatcher in ``__init__`` only routes
calls here when every intermediate provably fits in 62 bits.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, M_PI

cnp.import_array()


cdef inline long long _ipow(long long v, int k) nogil:
    cdef long long r = 1
    cdef int i
    for i in range(k):
        r *= v
    return r


cdef tuple _half_table(coeffs, int k, long long[:] values):
    cdef Py_ssize_t m = len(coeffs)
    cdef Py_ssize_t nv = values.shape[0]
    cdef Py_ssize_t total = 1
    cdef Py_ssize_t t, j
    for j in range(m):
        total *= nv
    cdef cnp.ndarray[cnp.int64_t, ndim=2] terms = np.empty((max(m, 1), nv), dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] absval = np.abs(np.asarray(values, dtype=np.int64))
    for j in range(m):
        for t in range(nv):
            terms[j, t] = <long long>coeffs[j] * _ipow(values[t], k)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_v = np.empty(total, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_n = np.empty(total, dtype=np.int64)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] idx = np.zeros(max(m, 1), dtype=np.intp)
    cdef long long acc, nrm
    for t in range(total):
        acc = 0
        nrm = 0
        for j in range(m):
            acc += terms[j, idx[j]]
            if absval[idx[j]] > nrm:
                nrm = absval[idx[j]]
        out_v[t] = acc
        out_n[t] = nrm
        j = m - 1
        while j >= 0:
            idx[j] += 1
            if idx[j] < nv:
                break
            idx[j] = 0
            j -= 1
    return out_v, out_n


def count_zero_sums(coeffs, int k, values):
    """Number of x in values^s with sum a_j x_j^k == 0 (meet in the middle)."""
    cdef long long[:] vals = np.asarray(values, dtype=np.int64)
    h = len(coeffs) // 2
    lv, _ = _half_table(list(coeffs[:h]), k, vals)
    rv, _ = _half_table(list(coeffs[h:]), k, vals)
    lv.sort()
    rv.sort()
    cdef long long[:] L = lv
    cdef long long[:] R = rv
    cdef Py_ssize_t i = 0, j = R.shape[0] - 1, i2, j2
    cdef Py_ssize_t nl = L.shape[0]
    cdef long long s
    total = 0
    while i < nl and j >= 0:
        s = L[i] + R[j]
        if s < 0:
            i += 1
        elif s > 0:
            j -= 1
        else:
            i2 = i
            while i2 < nl and L[i2] == L[i]:
                i2 += 1
            j2 = j
            while j2 >= 0 and R[j2] == R[j]:
                j2 -= 1
            total += (i2 - i) * (j - j2)
            i = i2
            j = j2
    return int(total)


cdef tuple _min_table(coeffs, int k, long long B):
    cdef long long[:] vals = np.arange(-B, B + 1, dtype=np.int64)
    v, n = _half_table(coeffs, k, vals)
    keep = n > 0
    v = v[keep]
    n = n[keep]
    order = np.lexsort((n, v))
    v = v[order]
    n = n[order]
    if v.shape[0] == 0:
        return v, n
    first = np.empty(v.shape[0], dtype=bool)
    first[0] = True
    first[1:] = v[1:] != v[:-1]
    return np.ascontiguousarray(v[first]), np.ascontiguousarray(n[first])


def min_norm(coeffs, int k, long long B):
    """Least sup-norm of a nonzero solution in [-B, B]^s, or 0 when there is none."""
    h = len(coeffs) // 2
    lv, ln = _min_table(list(coeffs[:h]), k, B)
    rv, rn = _min_table(list(coeffs[h:]), k, B)
    cdef long long[:] L = lv
    cdef long long[:] LN = ln
    cdef long long[:] R = rv
    cdef long long[:] RN = rn
    cdef long long best = 0, cand, s
    cdef Py_ssize_t i = 0, j = R.shape[0] - 1
    cdef Py_ssize_t nl = L.shape[0]
    while i < nl and j >= 0:
        s = L[i] + R[j]
        if s < 0:
            i += 1
        elif s > 0:
            j -= 1
        else:
            cand = LN[i] if LN[i] > RN[j] else RN[j]
            if best == 0 or cand < best:
                best = cand
            i += 1
            j -= 1
    # one half is the zero tuple
    for i in range(nl):
        if L[i] == 0 and (best == 0 or LN[i] < best):
            best = LN[i]
    for i in range(R.shape[0]):
        if R[i] == 0 and (best == 0 or RN[i] < best):
            best = RN[i]
    return int(best)


def cyclic_convolve(hists, Py_ssize_t modulus):
    """Cyclic convolution of nonnegative count vectors of length ``modulus``."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] acc = np.zeros(modulus, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] nxt
    cdef cnp.ndarray[cnp.int64_t, ndim=1] hh
    cdef cnp.ndarray[cnp.intp_t, ndim=1] sup
    cdef Py_ssize_t i, t, ns, jj
    cdef long long a
    acc[0] = 1
    for h in hists:
        hh = np.asarray(h, dtype=np.int64)
        sup = np.flatnonzero(hh).astype(np.intp)
        ns = sup.shape[0]
        nxt = np.zeros(modulus, dtype=np.int64)
        for i in range(modulus):
            a = acc[i]
            if a == 0:
                continue
            for t in range(ns):
                jj = i + sup[t]
                if jj >= modulus:
                    jj -= modulus
                nxt[jj] += a * hh[sup[t]]
        acc = nxt
    return [int(x) for x in acc]


def gauss_sum_table(long long q, int k):
    """[S(q, r) for r in range(q)] with S(q, r) = sum_x e(r x^k / q)."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] hist = np.zeros(q, dtype=np.int64)
    cdef long long x, r, c, e, pw
    cdef int i
    for x in range(q):
        pw = 1
        for i in range(k):
            pw = (pw * x) % q
        hist[pw] += 1
    sup = np.flatnonzero(hist)
    cdef long long[:] S = sup.astype(np.int64)
    cdef Py_ssize_t ns = S.shape[0], t
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(q, dtype=np.complex128)
    cdef double re, im, ang
    for r in range(q):
        re = 0.0
        im = 0.0
        for t in range(ns):
            c = S[t]
            e = (r * c) % q
            ang = 2.0 * M_PI * <double>e / <double>q
            re += hist[c] * cos(ang)
            im += hist[c] * sin(ang)
        out[r] = re + 1j * im
    return out
