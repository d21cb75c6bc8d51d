# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled persistence kernels: union-find pairing for dimension 0 and
sparse GF(2) column reduction. Contracts match _core_py exactly."""

import numpy as np

cimport numpy as cnp
from libcpp.vector cimport vector

cnp.import_array()


cdef long _find(long* parent, long x) noexcept nogil:
    cdef long root = x
    cdef long nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


def uf_pairs(long n_verts, cnp.ndarray[cnp.int64_t, ndim=2] edges not None):
    """Zero-dimensional persistence pairing by union-find (elder rule: the
    root index equals the oldest vertex of its component)."""
    cdef long m = edges.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] parent_arr = \
        np.arange(n_verts, dtype=np.int64)
    cdef long* parent = <long*> parent_arr.data if n_verts else NULL
    cdef cnp.ndarray[cnp.int64_t, ndim=1] killed_v = \
        np.empty(m, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] killer_e = \
        np.empty(m, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1, cast=True] positive = \
        np.zeros(m, dtype=bool)
    cdef long e, ra, rb, tmp, k = 0
    for e in range(m):
        ra = _find(parent, edges[e, 0])
        rb = _find(parent, edges[e, 1])
        if ra == rb:
            positive[e] = 1
            continue
        if ra > rb:
            tmp = ra
            ra = rb
            rb = tmp
        parent[rb] = ra
        killed_v[k] = rb
        killer_e[k] = e
        k += 1
    return killed_v[:k].copy(), killer_e[:k].copy(), \
        positive.view(np.bool_)


def center_accumulate(cnp.ndarray[cnp.int64_t, ndim=1] vbin not None,
                      cnp.ndarray[cnp.int64_t, ndim=1] ebin not None,
                      cnp.ndarray[cnp.int64_t, ndim=1] tbin not None,
                      cnp.ndarray[cnp.int64_t, ndim=2] re not None,
                      cnp.ndarray[cnp.int64_t, ndim=2] rows not None,
                      long count,
                      cnp.ndarray[cnp.int64_t, ndim=1] h0 not None,
                      cnp.ndarray[cnp.int64_t, ndim=1] h1 not None):
    """Fused per-center H0 / H1 accumulation (see _core_py for the contract
    and reference implementation)."""
    cdef long n_v = vbin.shape[0]
    cdef long n_e = ebin.shape[0]
    cdef long n_t = tbin.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] parent_arr = \
        np.arange(n_v, dtype=np.int64)
    cdef long* parent = <long*> parent_arr.data if n_v else NULL
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] epaired = \
        np.zeros(n_e, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] epositive = \
        np.zeros(n_e, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] vkilled = \
        np.zeros(n_v, dtype=np.uint8)
    cdef long e, v, ra, rb, tmp, b, d
    for e in range(n_e):
        ra = _find(parent, re[e, 0])
        rb = _find(parent, re[e, 1])
        if ra == rb:
            epositive[e] = 1
            continue
        if ra > rb:
            tmp = ra
            ra = rb
            rb = tmp
        parent[rb] = ra
        vkilled[rb] = 1
        b = vbin[rb]
        d = ebin[e]
        if d > b:
            h0[b] += 1
            h0[d] -= 1
    for v in range(n_v):
        if not vkilled[v]:
            h0[vbin[v]] += 1

    cdef cnp.ndarray[cnp.int64_t, ndim=1] pivot_owner = \
        np.full(n_e, -1, dtype=np.int64)
    cdef vector[vector[long]] reduced = vector[vector[long]](n_t)
    cdef vector[long] work, merged
    cdef long k, i, low, owner
    cdef size_t a, bb
    cdef vector[long]* other
    for k in range(n_t):
        work.clear()
        for i in range(3):
            work.push_back(rows[k, i])
        while work.size() > 0:
            low = work.back()
            owner = pivot_owner[low]
            if owner < 0:
                pivot_owner[low] = k
                reduced[k] = work
                epaired[low] = 1
                b = ebin[low]
                d = tbin[k]
                if d > b:
                    h1[b] += 1
                    h1[d] -= 1
                break
            other = &reduced[owner]
            merged.clear()
            a = 0
            bb = 0
            while a < work.size() and bb < other[0].size():
                if work[a] < other[0][bb]:
                    merged.push_back(work[a])
                    a += 1
                elif work[a] > other[0][bb]:
                    merged.push_back(other[0][bb])
                    bb += 1
                else:
                    a += 1
                    bb += 1
            while a < work.size():
                merged.push_back(work[a])
                a += 1
            while bb < other[0].size():
                merged.push_back(other[0][bb])
                bb += 1
            work.swap(merged)
    for e in range(n_e):
        if epositive[e] and not epaired[e]:
            h1[ebin[e]] += 1


def reduce_cols(long n_rows, cnp.ndarray[cnp.int64_t, ndim=1] indptr not None,
                cnp.ndarray[cnp.int64_t, ndim=1] indices not None,
                skip=None):
    """Left-to-right GF(2) column reduction on sorted sparse columns.

    Returns the pivot row of each column, -1 for zero columns; columns
    flagged in `skip` are cleared without work."""
    cdef long n_cols = indptr.shape[0] - 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pivots = \
        np.full(n_cols, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pivot_owner = \
        np.full(n_rows, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] skip_arr
    cdef cnp.uint8_t* skip_ptr = NULL
    if skip is not None:
        skip_arr = np.ascontiguousarray(skip, dtype=np.uint8)
        skip_ptr = <cnp.uint8_t*> skip_arr.data

    cdef vector[vector[long]] reduced = vector[vector[long]](n_cols)
    cdef vector[long] work, merged
    cdef long j, i, low, owner
    cdef size_t a, b
    cdef vector[long]* other
    for j in range(n_cols):
        if skip_ptr != NULL and skip_ptr[j]:
            continue
        work.clear()
        for i in range(indptr[j], indptr[j + 1]):
            work.push_back(indices[i])
        while work.size() > 0:
            low = work.back()
            owner = pivot_owner[low]
            if owner < 0:
                pivot_owner[low] = j
                pivots[j] = low
                reduced[j] = work
                break
            # symmetric-difference merge with the owning reduced column
            other = &reduced[owner]
            merged.clear()
            a = 0
            b = 0
            while a < work.size() and b < other[0].size():
                if work[a] < other[0][b]:
                    merged.push_back(work[a])
                    a += 1
                elif work[a] > other[0][b]:
                    merged.push_back(other[0][b])
                    b += 1
                else:
                    a += 1
                    b += 1
            while a < work.size():
                merged.push_back(work[a])
                a += 1
            while b < other[0].size():
                merged.push_back(other[0][b])
                b += 1
            work.swap(merged)
    return pivots
