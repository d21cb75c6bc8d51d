"""Pure-Python persistence kernels (fallback when the compiled extension is
unavailable). Same contracts as the Cython versions in _core.pyx.
"""
from __future__ import annotations

import numpy as np


def uf_pairs(n_verts: int, edges: np.ndarray):
    """Zero-dimensional persistence pairing by union-find.

    Vertices must be numbered in filtration order; edges must arrive in
    filtration order. Elder rule: merging kills the component whose oldest
    vertex is younger.

    Returns (killed_vertex, killing_edge, positive_edge_mask): paired arrays
    of vertex rank / edge rank, and a bool mask over edges marking cycle
    creators (edges that merged nothing).
    """
    parent = np.arange(n_verts, dtype=np.int64)

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    killed_v, killer_e = [], []
    positive = np.zeros(len(edges), dtype=bool)
    for e, (a, b) in enumerate(edges):
        ra, rb = find(int(a)), find(int(b))
        if ra == rb:
            positive[e] = True
            continue
        if ra > rb:
            ra, rb = rb, ra
        parent[rb] = ra           # root index == oldest vertex of component
        killed_v.append(rb)
        killer_e.append(e)
    return (np.array(killed_v, dtype=np.int64),
            np.array(killer_e, dtype=np.int64), positive)


def center_accumulate(vbin, ebin, tbin, re, rows, count, h0, h1):
    """One center's H0 / H1 contribution to the curve diff arrays.

    Inputs are already restricted to live cells and sorted by bin: `vbin`,
    `ebin`, `tbin` are the grid bins of vertices / edges / triangles, `re`
    holds vertex-rank pairs per edge, `rows` edge-rank triples per triangle,
    both ascending within each row.
    """
    killed_v, killer_e, positive = uf_pairs(len(vbin), re)
    for v, e in zip(killed_v, killer_e):
        b, d = vbin[v], ebin[e]
        if d > b:
            h0[b] += 1
            h0[d] -= 1
    killed = set(int(v) for v in killed_v)
    for v in range(len(vbin)):
        if v not in killed:
            h0[vbin[v]] += 1

    indptr = np.arange(len(rows) + 1, dtype=np.int64) * 3
    pivots = reduce_cols(len(ebin), indptr,
                         rows.reshape(-1).astype(np.int64), None)
    paired_edges = set()
    for k, p in enumerate(pivots):
        if p >= 0:
            paired_edges.add(int(p))
            b, d = ebin[p], tbin[k]
            if d > b:
                h1[b] += 1
                h1[d] -= 1
    for e in np.flatnonzero(positive):
        if int(e) not in paired_edges:
            h1[ebin[e]] += 1


def reduce_cols(n_rows: int, indptr: np.ndarray, indices: np.ndarray,
                skip: np.ndarray | None = None) -> np.ndarray:
    """Left-to-right GF(2) column reduction.

    Columns are given in filtration order as CSC (indptr, indices) with row
    indices ascending within each column. `skip` marks columns known to
    reduce to zero (clearing). Returns the pivot row of each column, -1 for
    zero columns.
    """
    n_cols = len(indptr) - 1
    pivots = np.full(n_cols, -1, dtype=np.int64)
    pivot_owner = np.full(n_rows, -1, dtype=np.int64)
    reduced = [None] * n_cols     # bitmask ints of fully reduced columns
    for j in range(n_cols):
        if skip is not None and skip[j]:
            continue
        col = 0
        for r in indices[indptr[j]:indptr[j + 1]]:
            col |= 1 << int(r)
        while col:
            low = col.bit_length() - 1
            owner = pivot_owner[low]
            if owner < 0:
                pivot_owner[low] = j
                pivots[j] = low
                reduced[j] = col
                break
            col ^= reduced[owner]
    return pivots
