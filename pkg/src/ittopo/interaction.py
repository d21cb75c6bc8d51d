"""Interaction filtrations between two element clusters (n = 2) and their
persistent interaction homology in dimensions 0 and 1.

Generators are pairs (sigma, tau) of simplices from the center / partner
alpha complexes. The entry value is the max of both component values and the
halved cross distances over vertex pairs, so every interaction face is born
no later than its cofaces and the componentwise boundary stays within the
filtration.

The centered construction (center cluster restricted to its 0-skeleton) is
the production path: its chain complex splits as a direct sum over centers,
which `centered_pair_curves` exploits to stay fast on supercell-sized input.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import EmptyCluster, InvalidFiltration
from .filtration import DEFAULT_MAX_VALUE, Filtration, Simplex, alpha_filtration
from .persistence import Bar, Barcode, chain_persistence


@dataclass(frozen=True)
class InteractionSimplex:
    left: Simplex
    right: Simplex
    value: float

    @property
    def dim(self) -> int:
        return self.left.dim + self.right.dim

    @property
    def key(self):
        return (self.left.vertices, self.right.vertices)


class InteractionFiltration:
    def __init__(self, center_points, partner_points, simplices, mode,
                 max_value):
        self.center_points = np.asarray(center_points, dtype=np.float64)
        self.partner_points = np.asarray(partner_points, dtype=np.float64)
        self.simplices = simplices  # sorted list of InteractionSimplex
        self.mode = mode
        self.max_value = float(max_value)
        self._index = {s.key: i for i, s in enumerate(simplices)}

    def __len__(self):
        return len(self.simplices)

    def index_of(self, key):
        return self._index.get(key)


def _sort_key(s: InteractionSimplex):
    return (s.value, s.dim, s.left.vertices, s.right.vertices)


def _cross_halfdist(center_pts, partner_pts):
    diff = center_pts[:, None, :] - partner_pts[None, :, :]
    return 0.5 * np.linalg.norm(diff, axis=-1)


def interaction_filtration(center, partner, mode: str = "centered",
                           max_value: float = DEFAULT_MAX_VALUE
                           ) -> InteractionFiltration:
    """Materialized interaction filtration between two point clouds.

    Centered mode pairs every center vertex with partner simplices of
    dimension <= 2; symmetric mode pairs simplices from both sides with total
    dimension <= 2. Intended for desk-scale inputs; the featurization
    pipeline uses `centered_pair_curves` instead.
    """
    center = np.asarray(center, dtype=np.float64).reshape(-1, 3)
    partner = np.asarray(partner, dtype=np.float64).reshape(-1, 3)
    if len(center) == 0 or len(partner) == 0:
        raise EmptyCluster("both clusters need at least one point")
    if mode not in ("centered", "symmetric"):
        raise ValueError(f"unknown mode {mode!r}")
    k2 = alpha_filtration(partner, max_value=max_value)
    half = _cross_halfdist(center, partner)

    right_simplices = [s for s in k2.simplices if s.dim <= 2]
    out = []
    if mode == "centered":
        for ci in range(len(center)):
            cv = Simplex((ci,), 0.0)
            for tau in right_simplices:
                val = max(tau.value, max(half[ci, w] for w in tau.vertices))
                if val <= max_value:
                    out.append(InteractionSimplex(cv, tau, float(val)))
    else:
        k1 = alpha_filtration(center, max_value=max_value)
        left_simplices = [s for s in k1.simplices if s.dim <= 2]
        for sig in left_simplices:
            for tau in right_simplices:
                if sig.dim + tau.dim > 2:
                    continue
                val = max(sig.value, tau.value,
                          max(half[u, w] for u in sig.vertices
                              for w in tau.vertices))
                if val <= max_value:
                    out.append(InteractionSimplex(sig, tau, float(val)))
    out.sort(key=_sort_key)
    return InteractionFiltration(center, partner, out, mode, max_value)


def boundary_keys(s: InteractionSimplex):
    """Component keys of the GF(2) boundary: (d sigma, tau) + (sigma, d tau)."""
    keys = []
    lv, rv = s.left.vertices, s.right.vertices
    if len(lv) > 1:
        for face in itertools.combinations(lv, len(lv) - 1):
            keys.append((face, rv))
    if len(rv) > 1:
        for face in itertools.combinations(rv, len(rv) - 1):
            keys.append((lv, face))
    return keys


def interaction_boundary(s: InteractionSimplex, f: InteractionFiltration):
    """Boundary chain of `s` as simplices of `f` (empty for dimension 0)."""
    out = []
    for key in boundary_keys(s):
        i = f.index_of(key)
        if i is None:
            raise InvalidFiltration(f"boundary term {key} missing")
        term = f.simplices[i]
        if term.value > s.value + 1e-12:
            raise InvalidFiltration("boundary term born after coface")
        out.append(term)
    return out


def pih(f: InteractionFiltration, dims=(0, 1)) -> Barcode:
    """Persistent interaction homology barcode (dimensions 0 and 1)."""
    sdims = np.array([s.dim for s in f.simplices], dtype=np.int64)
    values = np.array([s.value for s in f.simplices], dtype=np.float64)
    boundary = []
    for s in f.simplices:
        fac = []
        for key in boundary_keys(s):
            i = f.index_of(key)
            if i is None:
                raise InvalidFiltration(f"boundary term {key} missing")
            fac.append(i)
        boundary.append(sorted(fac))
    bc = chain_persistence(sdims, values, boundary,
                           int(sdims.max()) if len(f) else 0)
    bars = [b for b in bc.bars if b.dim in dims]
    return Barcode(bars, max_dim=max(dims))


def brute_force_interaction_betti(f: InteractionFiltration, scale: float,
                                  p: int) -> int:
    """Dense GF(2) rank oracle: beta_p of the interaction subcomplex at
    `scale`, computed as nullity(d_p) - rank(d_{p+1})."""
    from .persistence import _gf2_rank

    live = [s for s in f.simplices if s.value <= scale]
    by_dim = {}
    for s in live:
        by_dim.setdefault(s.dim, []).append(s.key)
    index = {d: {k: i for i, k in enumerate(keys)}
             for d, keys in by_dim.items()}
    n_p = len(by_dim.get(p, []))
    if n_p == 0:
        return 0

    def rank_of(d):
        rows = []
        lower = index.get(d - 1, {})
        for s in live:
            if s.dim != d:
                continue
            mask = 0
            for key in boundary_keys(s):
                mask ^= 1 << lower[key]
            rows.append(mask)
        return _gf2_rank(rows)

    rank_dp = rank_of(p) if p > 0 else 0
    return n_p - rank_dp - rank_of(p + 1)

# --- fast centered path -------------------------------------------------

def _grid_bins(values, start, step, count):
    """Index of the first grid point >= value; `count` when past the grid.

    Uses the same comparison semantics as betti_curve so both paths agree
    bit-for-bit."""
    grid = start + step * np.arange(count)
    return np.searchsorted(grid, np.asarray(values), side="left")


def partner_complex(partner_points, max_value: float = DEFAULT_MAX_VALUE):
    """Precompute the partner alpha complex in array form for reuse across
    centers: vertices, edges, triangles with values, plus triangle->edge
    incidence."""
    f = alpha_filtration(partner_points, max_value=max_value)
    nv = len(f.points)
    edges = f.verts[f.dims == 1][:, :2]
    evals = f.values[f.dims == 1]
    tris = f.verts[f.dims == 2][:, :3]
    tvals = f.values[f.dims == 2]
    eindex = {(int(a), int(b)): i for i, (a, b) in enumerate(edges)}
    tri_edges = np.zeros((len(tris), 3), dtype=np.int64)
    for i, (a, b, c) in enumerate(tris):
        tri_edges[i] = (eindex[(int(a), int(b))], eindex[(int(a), int(c))],
                        eindex[(int(b), int(c))])
    return {
        "points": f.points, "n_verts": nv,
        "edges": edges.astype(np.int64), "edge_values": evals.copy(),
        "tris": tris.astype(np.int64), "tri_values": tvals.copy(),
        "tri_edges": tri_edges,
    }


def centered_pair_curves(center_points, pc, start: float, step: float,
                         count: int):
    """H0 and H1 Betti curves of the centered interaction filtration,
    summed over centers via the direct-sum decomposition (the boundary never
    mixes centers because vertices have empty boundary).

    `pc` is a dict from partner_complex(). Returns (h0, h1) int64 arrays of
    length `count`."""
    center_points = np.asarray(center_points, dtype=np.float64).reshape(-1, 3)
    if len(center_points) == 0 or pc["n_verts"] == 0:
        raise EmptyCluster("both clusters need at least one point")
    h0 = np.zeros(count + 1, dtype=np.int64)
    h1 = np.zeros(count + 1, dtype=np.int64)
    edges, tris, tri_edges = pc["edges"], pc["tris"], pc["tri_edges"]
    evals, tvals = pc["edge_values"], pc["tri_values"]
    pts = pc["points"]
    for c in center_points:
        half = 0.5 * np.linalg.norm(pts - c[None, :], axis=1)
        vbin = _grid_bins(half, start, step, count)
        if len(edges):
            ev = np.maximum(evals, np.maximum(half[edges[:, 0]],
                                              half[edges[:, 1]]))
            ebin = np.maximum(_grid_bins(ev, start, step, count),
                              np.maximum(vbin[edges[:, 0]], vbin[edges[:, 1]]))
        else:
            ebin = np.zeros(0, dtype=np.int64)
        if len(tris):
            tv = np.maximum(tvals, np.maximum(
                half[tris[:, 0]], np.maximum(half[tris[:, 1]],
                                             half[tris[:, 2]])))
            tbin = _grid_bins(tv, start, step, count)
        else:
            tbin = np.zeros(0, dtype=np.int64)
        _accumulate_center(vbin, ebin, tbin, edges, tri_edges, count, h0, h1)
    return h0[:count].cumsum(), h1[:count].cumsum()


def _accumulate_center(vbin, ebin, tbin, edges, tri_edges, count, h0, h1):
    """One center's contribution, written as diff arrays into h0 / h1.

    Restricts to live cells (bin < count), sorts each dimension by bin with
    stable tie-break on input order, then hands the pairing to the fused
    kernel."""
    live_v = np.flatnonzero(vbin < count)
    if len(live_v) == 0:
        return
    vorder = live_v[np.argsort(vbin[live_v], kind="stable")]
    vrank = np.full(len(vbin), -1, dtype=np.int64)
    vrank[vorder] = np.arange(len(vorder))

    live_e = np.flatnonzero(ebin < count)
    eorder = live_e[np.argsort(ebin[live_e], kind="stable")]
    re = np.ascontiguousarray(vrank[edges[eorder]])
    re.sort(axis=1)

    erank = np.full(len(ebin), -1, dtype=np.int64)
    erank[eorder] = np.arange(len(eorder))
    live_t = np.flatnonzero(tbin < count)
    torder = live_t[np.argsort(tbin[live_t], kind="stable")]
    rows = np.ascontiguousarray(erank[tri_edges[torder]])
    rows.sort(axis=1)

    _kernels.center_accumulate(
        np.ascontiguousarray(vbin[vorder]), np.ascontiguousarray(ebin[eorder]),
        np.ascontiguousarray(tbin[torder]), re, rows, count, h0, h1)
