# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled bit-vector kernels.

All functions take a C-contiguous (m, W) uint64 matrix holding one packed
indicator vector per row.  Bit layout inside a word is irrelevant: only
XOR/popcount combinations of whole rows are computed.
"""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport free, malloc

cnp.import_array()

cdef extern from *:
    """
    #if defined(_MSC_VER)
    #  include <intrin.h>
       static inline unsigned long long sp_popcnt64(unsigned long long x)
       { return __popcnt64(x); }
    #else
       static inline unsigned long long sp_popcnt64(unsigned long long x)
       { return __builtin_popcountll(x); }
    #endif
    """
    unsigned long long sp_popcnt64(unsigned long long x) nogil

ctypedef cnp.uint64_t u64
ctypedef cnp.int64_t i64


cdef inline i64 row_distance(const u64* a, const u64* b, Py_ssize_t w) nogil:
    cdef i64 total = 0
    cdef Py_ssize_t j
    for j in range(w):
        total += <i64>sp_popcnt64(a[j] ^ b[j])
    return total


def popcounts(const u64[:, ::1] words):
    """Number of set bits in each row."""
    cdef Py_ssize_t m = words.shape[0], w = words.shape[1]
    out = np.empty(m, dtype=np.int64)
    cdef i64[::1] o = out
    cdef Py_ssize_t i, j
    cdef i64 total
    with nogil:
        for i in range(m):
            total = 0
            for j in range(w):
                total += <i64>sp_popcnt64(words[i, j])
            o[i] = total
    return out


def distances_to(const u64[:, ::1] words, const u64[::1] row):
    """XOR-popcount distance from ``row`` to every row of ``words``."""
    cdef Py_ssize_t m = words.shape[0], w = words.shape[1]
    if row.shape[0] != w:
        raise ValueError("row width mismatch")
    out = np.empty(m, dtype=np.int64)
    cdef i64[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(m):
            o[i] = row_distance(&words[i, 0], &row[0], w)
    return out


def pairwise_distances(const u64[:, ::1] words):
    """Full symmetric (m, m) distance matrix; intended for small m."""
    cdef Py_ssize_t m = words.shape[0], w = words.shape[1]
    out = np.zeros((m, m), dtype=np.int64)
    cdef i64[:, ::1] o = out
    cdef Py_ssize_t i, j
    cdef i64 d
    with nogil:
        for i in range(m):
            for j in range(i + 1, m):
                d = row_distance(&words[i, 0], &words[j, 0], w)
                o[i, j] = d
                o[j, i] = d
    return out


def min_pairwise_distance(const u64[:, ::1] words):
    """Smallest distance over all row pairs (m >= 2)."""
    cdef Py_ssize_t m = words.shape[0], w = words.shape[1]
    if m < 2:
        raise ValueError("need at least two rows")
    cdef i64 best = <i64>w * 64 + 1
    cdef i64 d
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(m):
            for j in range(i + 1, m):
                d = row_distance(&words[i, 0], &words[j, 0], w)
                if d < best:
                    best = d
                    if best == 0:
                        break
            if best == 0:
                break
    return int(best)


def greedy_select(const u64[:, ::1] words, const i64[::1] lengths,
                  const i64[::1] order, i64 delta, bint strict):
    """Scan rows in ``order``; keep a row iff it is separated from every
    previously kept row (distance > delta when strict, >= delta otherwise).

    Kept rows are bucketed by popcount so each candidate is only compared
    against kept rows whose length differs by at most delta (distance is
    bounded below by the length difference).
    """
    cdef Py_ssize_t m = words.shape[0], w = words.shape[1]
    if lengths.shape[0] != m or order.shape[0] != m:
        raise ValueError("lengths/order size mismatch")
    cdef i64 maxlen = <i64>w * 64
    kept_np = np.empty(m, dtype=np.int64)
    cdef i64[::1] kept = kept_np
    # intrusive per-length lists over kept rows
    cdef i64* head = <i64*>malloc((maxlen + 1) * sizeof(i64))
    cdef i64* nxt = <i64*>malloc(m * sizeof(i64))
    if head == NULL or nxt == NULL:
        free(head)
        free(nxt)
        raise MemoryError()
    cdef Py_ssize_t n_kept = 0
    cdef Py_ssize_t pos
    cdef i64 cand, lo, hi, bucket, node, length, d
    cdef bint ok
    with nogil:
        for bucket in range(maxlen + 1):
            head[bucket] = -1
        for pos in range(m):
            cand = order[pos]
            length = lengths[cand]
            lo = length - delta
            if lo < 0:
                lo = 0
            hi = length + delta
            if hi > maxlen:
                hi = maxlen
            ok = True
            for bucket in range(lo, hi + 1):
                node = head[bucket]
                while node != -1:
                    d = row_distance(&words[cand, 0], &words[node, 0], w)
                    if (d <= delta) if strict else (d < delta):
                        ok = False
                        break
                    node = nxt[node]
                if not ok:
                    break
            if ok:
                kept[n_kept] = cand
                n_kept += 1
                nxt[cand] = head[length]
                head[length] = cand
    free(head)
    free(nxt)
    return kept_np[:n_kept].copy()


def prim_mst(const u64[:, ::1] words):
    """Dense Prim over the implicit XOR-popcount metric, rooted at row 0.

    Returns (parent, weight): parent[0] = -1; keys update only on strict
    improvement and ties pick the lowest row index, so the tree is
    deterministic.
    """
    cdef Py_ssize_t m = words.shape[0], w = words.shape[1]
    if m < 1:
        raise ValueError("need at least one row")
    parent_np = np.full(m, -1, dtype=np.int64)
    weight_np = np.zeros(m, dtype=np.int64)
    cdef i64[::1] parent = parent_np
    cdef i64[::1] weight = weight_np
    cdef i64* key = <i64*>malloc(m * sizeof(i64))
    cdef char* done = <char*>malloc(m)
    if key == NULL or done == NULL:
        free(key)
        free(done)
        raise MemoryError()
    cdef Py_ssize_t i, it
    cdef i64 u, best_key, d
    cdef i64 INF = <i64>1 << 62
    with nogil:
        for i in range(m):
            key[i] = INF
            done[i] = 0
        key[0] = 0
        for it in range(m):
            u = -1
            best_key = INF + 1
            for i in range(m):
                if not done[i] and key[i] < best_key:
                    best_key = key[i]
                    u = i
            done[u] = 1
            weight[u] = key[u] if u != 0 else 0
            for i in range(m):
                if not done[i]:
                    d = row_distance(&words[u, 0], &words[i, 0], w)
                    if d < key[i]:
                        key[i] = d
                        parent[i] = u
    free(key)
    free(done)
    return parent_np, weight_np
