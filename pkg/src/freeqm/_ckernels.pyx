# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pair-coboundary kernel; mirrors ``_pykernels`` on int64 data."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, int32_t

cnp.import_array()


cdef inline int64_t _product_value(const int32_t[:] gens, const int64_t[:] exps,
                                   const int64_t[:] offsets, const int64_t[:, :] table,
                                   int64_t bound, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    cdef Py_ssize_t a0 = offsets[a], a1 = offsets[a + 1]
    cdef Py_ssize_t b0 = offsets[b], b1 = offsets[b + 1]
    cdef Py_ssize_t i = a1 - 1, j = b0, p
    cdef int64_t s = 0
    while i >= a0 and j < b1 and gens[i] == gens[j] and exps[i] + exps[j] == 0:
        i -= 1
        j += 1
    if i >= a0 and j < b1 and gens[i] == gens[j]:
        for p in range(a0, i):
            s += table[gens[p], exps[p] + bound]
        s += table[gens[i], exps[i] + exps[j] + bound]
        for p in range(j + 1, b1):
            s += table[gens[p], exps[p] + bound]
    else:
        for p in range(a0, i + 1):
            s += table[gens[p], exps[p] + bound]
        for p in range(j, b1):
            s += table[gens[p], exps[p] + bound]
    return s


def word_values(gens, exps, offsets, table, int64_t bound):
    cdef const int32_t[:] g = np.ascontiguousarray(gens, dtype=np.int32)
    cdef const int64_t[:] e = np.ascontiguousarray(exps, dtype=np.int64)
    cdef const int64_t[:] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef const int64_t[:, :] tab = np.ascontiguousarray(table, dtype=np.int64)
    cdef Py_ssize_t n = off.shape[0] - 1, w, p
    out = np.zeros(n, dtype=np.int64)
    cdef int64_t[:] o = out
    cdef int64_t s
    with nogil:
        for w in range(n):
            s = 0
            for p in range(off[w], off[w + 1]):
                s += tab[g[p], e[p] + bound]
            o[w] = s
    return out


def coboundary_extremum(gens, exps, offsets, table, int64_t bound, left=None, right=None):
    cdef const int32_t[:] g = np.ascontiguousarray(gens, dtype=np.int32)
    cdef const int64_t[:] e = np.ascontiguousarray(exps, dtype=np.int64)
    cdef const int64_t[:] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef const int64_t[:, :] tab = np.ascontiguousarray(table, dtype=np.int64)
    cdef const int64_t[:] gv = word_values(gens, exps, offsets, table, bound)
    cdef Py_ssize_t n = off.shape[0] - 1, a, b, p, npairs
    cdef int64_t c, ac, best = -1, signed = 0
    cdef Py_ssize_t bi = -1, bj = -1
    cdef const int64_t[:] lv
    cdef const int64_t[:] rv
    if left is None:
        with nogil:
            for a in range(n):
                for b in range(n):
                    c = gv[a] + gv[b] - _product_value(g, e, off, tab, bound, a, b)
                    ac = c if c >= 0 else -c
                    if ac > best:
                        best = ac
                        signed = c
                        bi = a
                        bj = b
    else:
        lv = np.ascontiguousarray(left, dtype=np.int64)
        rv = np.ascontiguousarray(right, dtype=np.int64)
        npairs = lv.shape[0]
        with nogil:
            for p in range(npairs):
                a = lv[p]
                b = rv[p]
                c = gv[a] + gv[b] - _product_value(g, e, off, tab, bound, a, b)
                ac = c if c >= 0 else -c
                if ac > best:
                    best = ac
                    signed = c
                    bi = a
                    bj = b
    return int(best), int(signed), int(bi), int(bj)
