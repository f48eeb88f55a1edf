# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend; API and scan order match _pykern exactly."""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport free, malloc
from libc.string cimport memset

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil
    int __builtin_clzll(unsigned long long) nogil

BACKEND = "cython"

ctypedef unsigned long long u64


cdef inline int _rank_c(u64 *vals, int count) nogil:
    cdef u64 piv[65]
    cdef u64 v
    cdef int rank = 0, i, b
    memset(piv, 0, sizeof(piv))
    for i in range(count):
        v = vals[i]
        while v:
            b = 63 - __builtin_clzll(v)
            if piv[b]:
                v ^= piv[b]
            else:
                piv[b] = v
                rank += 1
                break
    return rank


def rank_words(rows, int width):
    cdef u64 buf[256]
    cdef int count = 0
    for r in rows:
        if count >= 256:
            raise ValueError("too many rows for kernel rank")
        buf[count] = <u64> int(r)
        count += 1
    return _rank_c(buf, count)


def condenser_sweep(object bases_obj, object cols_obj, int m_out, int threshold):
    cdef cnp.ndarray[cnp.uint64_t, ndim=2, mode="c"] bases = np.ascontiguousarray(
        bases_obj, dtype=np.uint64)
    cdef cnp.ndarray[cnp.uint64_t, ndim=2, mode="c"] mcols = np.ascontiguousarray(
        cols_obj, dtype=np.uint64)
    cdef Py_ssize_t ns = bases.shape[0]
    cdef int k = <int> bases.shape[1]
    cdef Py_ssize_t n_maps = mcols.shape[0]
    cdef int n = <int> mcols.shape[1]
    cdef u64 imgs[64]
    cdef u64 r, img
    cdef int best, rk, j, mi, ri
    cdef Py_ssize_t si
    cdef int min_best = -1
    cdef Py_ssize_t argmin = -1
    cdef long below = 0
    if k > 64:
        raise ValueError("kernel supports k <= 64")
    with nogil:
        for si in range(ns):
            best = 0
            for mi in range(n_maps):
                for ri in range(k):
                    r = bases[si, ri]
                    img = 0
                    while r:
                        j = __builtin_ctzll(r)
                        img ^= mcols[mi, j]
                        r &= r - 1
                    imgs[ri] = img
                rk = _rank_c(imgs, k)
                if rk > best:
                    best = rk
                    if best == m_out:
                        break
            if best < threshold:
                below += 1
            if min_best < 0 or best < min_best:
                min_best = best
                argmin = si
    return min_best, argmin, below


cdef void _coset_mask(u64 *mask, int W, long *pts, int span, long shift) nogil:
    cdef int i
    cdef long p
    memset(mask, 0, W * sizeof(u64))
    for i in range(span):
        p = pts[i] ^ shift
        mask[p >> 6] |= (<u64> 1) << (p & 63)


cdef void _span_pts(u64 *rows, int k, long *pts) nogil:
    cdef long cur = 0
    cdef long i
    pts[0] = 0
    for i in range(1, (<long> 1) << k):
        cur ^= <long> rows[__builtin_ctzll(<u64> i)]
        pts[i] = cur


cdef int _free_positions(u64 *rows, int k, int n, int *free_pos) nogil:
    cdef u64 pivot_mask = 0
    cdef int i, j, cnt = 0
    for i in range(k):
        pivot_mask |= rows[i] & (~rows[i] + 1)
    for j in range(n):
        if not (pivot_mask >> j) & 1:
            free_pos[cnt] = j
            cnt += 1
    return cnt


cdef inline int _pc_and(u64 *a, u64 *b, int W) nogil:
    cdef int i, acc = 0
    for i in range(W):
        acc += __builtin_popcountll(a[i] & b[i])
    return acc


cdef inline int _getbit(u64 *words, long x) nogil:
    return <int> ((words[x >> 6] >> (x & 63)) & 1)


def _prep(object f_words_obj, int n, object bases_obj):
    f_words = np.ascontiguousarray(f_words_obj, dtype=np.uint64)
    bases = np.ascontiguousarray(bases_obj, dtype=np.uint64)
    return f_words, bases


def affine_sweep_m1(object f_words_obj, int n, object bases_obj, bint with_shifts):
    cdef cnp.ndarray[cnp.uint64_t, ndim=1, mode="c"] fw
    cdef cnp.ndarray[cnp.uint64_t, ndim=2, mode="c"] bases
    fw, bases = _prep(f_words_obj, n, bases_obj)
    cdef int size = 1 << n
    cdef int W = max(1, size >> 6)
    cdef Py_ssize_t ns = bases.shape[0]
    cdef int k = <int> bases.shape[1]
    cdef long span = (<long> 1) << k
    cdef long *pts = <long *> malloc(span * sizeof(long))
    cdef u64 *mask = <u64 *> malloc(W * sizeof(u64))
    cdef int free_pos[64]
    cdef int n_free, num
    cdef long shift, sidx, n_shifts
    cdef Py_ssize_t si
    cdef int best_num = -1
    cdef Py_ssize_t best_si = -1
    cdef long best_shift = -1
    cdef int t
    try:
        with nogil:
            for si in range(ns):
                _span_pts(&bases[si, 0], k, pts)
                n_free = _free_positions(&bases[si, 0], k, n, free_pos)
                n_shifts = ((<long> 1) << n_free) if with_shifts else 1
                for sidx in range(n_shifts):
                    shift = 0
                    for t in range(n_free):
                        if (sidx >> t) & 1:
                            shift |= (<long> 1) << free_pos[t]
                    _coset_mask(mask, W, pts, <int> span, shift)
                    num = <int> span - 2 * _pc_and(mask, &fw[0], W)
                    if num < 0:
                        num = -num
                    if num > best_num:
                        best_num = num
                        best_si = si
                        best_shift = shift
                        if best_num == span:
                            break
                if best_num == span:
                    break
    finally:
        free(pts)
        free(mask)
    return best_num, best_si, best_shift


cdef u64 *_build_g_table(u64 *f, int n, bint as_shift) nogil:
    """Table of masks indexed by a: g_a[x] = f[x]^f[x^a] (or f[x^a] if as_shift)."""
    cdef int size = 1 << n
    cdef int W = size >> 6
    if W == 0:
        W = 1
    cdef u64 *tab = <u64 *> malloc((<size_t> size) * W * sizeof(u64))
    if tab == NULL:
        return NULL
    memset(tab, 0, (<size_t> size) * W * sizeof(u64))
    cdef long a, x
    cdef int bit
    for a in range(1, size):
        for x in range(size):
            bit = _getbit(f, x ^ a)
            if not as_shift:
                bit ^= _getbit(f, x)
            if bit:
                tab[a * W + (x >> 6)] |= (<u64> 1) << (x & 63)
    return tab


def xor_sweep_m1(object f_words_obj, int n, object bases_obj, bint with_shifts):
    cdef cnp.ndarray[cnp.uint64_t, ndim=1, mode="c"] fw
    cdef cnp.ndarray[cnp.uint64_t, ndim=2, mode="c"] bases
    fw, bases = _prep(f_words_obj, n, bases_obj)
    cdef int size = 1 << n
    cdef int W = max(1, size >> 6)
    cdef Py_ssize_t ns = bases.shape[0]
    cdef int k = <int> bases.shape[1]
    cdef long span = (<long> 1) << k
    cdef u64 *gs = _build_g_table(&fw[0], n, False)
    if gs == NULL:
        raise MemoryError("g-table allocation failed")
    cdef long *pts = <long *> malloc(span * sizeof(long))
    cdef u64 *mask = <u64 *> malloc(W * sizeof(u64))
    cdef int free_pos[64]
    cdef int n_free, num, num_best
    cdef long shift, sidx, n_shifts, a, a_best
    cdef Py_ssize_t si
    cdef int best_num = -1
    cdef Py_ssize_t best_si = -1
    cdef long best_shift = -1, best_a = -1
    cdef int t
    try:
        with nogil:
            for si in range(ns):
                _span_pts(&bases[si, 0], k, pts)
                n_free = _free_positions(&bases[si, 0], k, n, free_pos)
                n_shifts = ((<long> 1) << n_free) if with_shifts else 1
                for sidx in range(n_shifts):
                    shift = 0
                    for t in range(n_free):
                        if (sidx >> t) & 1:
                            shift |= (<long> 1) << free_pos[t]
                    _coset_mask(mask, W, pts, <int> span, shift)
                    num_best = -1
                    a_best = -1
                    for a in range(1, size):
                        num = <int> span - 2 * _pc_and(mask, gs + a * W, W)
                        if num < 0:
                            num = -num
                        if num > num_best:
                            num_best = num
                            a_best = a
                            if num == span:
                                break
                    if num_best > best_num:
                        best_num = num_best
                        best_si = si
                        best_shift = shift
                        best_a = a_best
                        if best_num == span:
                            break
                if best_num == span:
                    break
    finally:
        free(pts)
        free(mask)
        free(gs)
    return best_num, best_si, best_shift, best_a


def joint_sweep_m1(object f_words_obj, int n, object bases_obj, bint with_shifts):
    cdef cnp.ndarray[cnp.uint64_t, ndim=1, mode="c"] fw
    cdef cnp.ndarray[cnp.uint64_t, ndim=2, mode="c"] bases
    fw, bases = _prep(f_words_obj, n, bases_obj)
    cdef int size = 1 << n
    cdef int W = max(1, size >> 6)
    cdef Py_ssize_t ns = bases.shape[0]
    cdef int k = <int> bases.shape[1]
    cdef long span = (<long> 1) << k
    cdef u64 *fas = _build_g_table(&fw[0], n, True)
    if fas == NULL:
        raise MemoryError("shift-table allocation failed")
    cdef long *pts = <long *> malloc(span * sizeof(long))
    cdef u64 *mask = <u64 *> malloc(W * sizeof(u64))
    cdef u64 *m1 = <u64 *> malloc(W * sizeof(u64))
    cdef u64 *m0 = <u64 *> malloc(W * sizeof(u64))
    cdef int free_pos[64]
    cdef int n_free, num, num_best, pc0, pc1, c01, c11, i
    cdef long shift, sidx, n_shifts, a, a_best
    cdef Py_ssize_t si
    cdef int best_num = -1
    cdef Py_ssize_t best_si = -1
    cdef long best_shift = -1, best_a = -1
    cdef int t
    try:
        with nogil:
            for si in range(ns):
                _span_pts(&bases[si, 0], k, pts)
                n_free = _free_positions(&bases[si, 0], k, n, free_pos)
                n_shifts = ((<long> 1) << n_free) if with_shifts else 1
                for sidx in range(n_shifts):
                    shift = 0
                    for t in range(n_free):
                        if (sidx >> t) & 1:
                            shift |= (<long> 1) << free_pos[t]
                    _coset_mask(mask, W, pts, <int> span, shift)
                    pc1 = 0
                    pc0 = 0
                    for i in range(W):
                        m1[i] = mask[i] & fw[i]
                        m0[i] = mask[i] & ~fw[i]
                        pc1 += __builtin_popcountll(m1[i])
                        pc0 += __builtin_popcountll(m0[i])
                    num_best = -1
                    a_best = -1
                    for a in range(1, size):
                        c11 = _pc_and(m1, fas + a * W, W)
                        c01 = _pc_and(m0, fas + a * W, W)
                        num = pc0 - c01 - (pc1 - c11)
                        if num < 0:
                            num = -num
                        if c01 >= c11:
                            num += c01 - c11
                        else:
                            num += c11 - c01
                        if num > num_best:
                            num_best = num
                            a_best = a
                    if num_best > best_num:
                        best_num = num_best
                        best_si = si
                        best_shift = shift
                        best_a = a_best
                        if best_num == span:
                            break
                if best_num == span:
                    break
    finally:
        free(pts)
        free(mask)
        free(m1)
        free(m0)
        free(fas)
    return best_num, best_si, best_shift, best_a
