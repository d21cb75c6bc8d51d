"""Persistence barcodes over GF(2), Betti curves on the feature grid and a
dense rank oracle.

The reduction runs dimension-by-dimension from the top with the clearing
optimization; dimension 0 is paired by union-find. Output is identical to
plain left-to-right column reduction of the full boundary matrix.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InvalidFiltration, TooLarge
from .filtration import Filtration

INF = float("inf")

GRID_START = 0.0
GRID_STEP = 0.1
GRID_COUNT = 250


@dataclass(frozen=True)
class Bar:
    dim: int
    birth: float
    death: float  # math.inf for essential classes

    @property
    def finite(self) -> bool:
        return self.death != INF


@dataclass
class Barcode:
    bars: list
    max_dim: int

    def __post_init__(self):
        self.bars = sorted(self.bars, key=lambda b: (b.dim, b.birth, b.death))

    def in_dim(self, d: int):
        return [b for b in self.bars if b.dim == d]

    def to_csv(self, header: str | None = None) -> str:
        lines = []
        if header:
            lines.append(f"# {header}")
        lines.append("dim,birth,death")
        for b in self.bars:
            death = "inf" if not b.finite else repr(float(b.death))
            lines.append(f"{b.dim},{float(b.birth)!r},{death}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "Barcode":
        bars = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("dim,"):
                continue
            d, b, dth = line.split(",")
            bars.append(Bar(int(d), float(b),
                            INF if dth == "inf" else float(dth)))
        return cls(bars, max((b.dim for b in bars), default=0))


def chain_persistence(dims, values, boundary, max_dim: int) -> Barcode:
    """Barcode of an arbitrary filtered chain complex over GF(2).

    `boundary[i]` lists the filtration positions of the facets of cell i
    (cells of dimension d have facets of dimension d-1; dimension-0 cells
    have empty boundary). Cells must already be in filtration order with
    faces preceding cofaces.
    """
    dims = np.asarray(dims, dtype=np.int64)
    values = np.asarray(values, dtype=np.float64)
    n = len(dims)
    for i, fac in enumerate(boundary):
        for f in fac:
            if f >= i:
                raise InvalidFiltration(
                    f"facet {f} does not precede cell {i}")
            if dims[f] != dims[i] - 1:
                raise InvalidFiltration("facet dimension mismatch")

    by_dim = [np.flatnonzero(dims == d) for d in range(int(dims.max()) + 1 if n else 1)]
    rank_in_dim = np.empty(n, dtype=np.int64)
    for idx in by_dim:
        rank_in_dim[idx] = np.arange(len(idx))

    bars = []
    top = len(by_dim) - 1

    # dimension 0 via union-find
    verts = by_dim[0]
    d1 = by_dim[1] if top >= 1 else np.array([], dtype=np.int64)
    edges = np.zeros((len(d1), 2), dtype=np.int64)
    for k, i in enumerate(d1):
        fac = boundary[i]
        if len(fac) != 2:
            raise InvalidFiltration("dimension-1 cell without 2 facets")
        edges[k] = sorted(rank_in_dim[f] for f in fac)
    killed_v, killer_e, positive = _kernels.uf_pairs(len(verts), edges)
    for v, e in zip(killed_v, killer_e):
        b, d = values[verts[v]], values[d1[e]]
        if d > b:
            bars.append(Bar(0, float(b), float(d)))
    paired_roots = set(int(v) for v in killed_v)
    for v in range(len(verts)):
        if v not in paired_roots:
            bars.append(Bar(0, float(values[verts[v]]), INF))

    # dimensions >= 1 via column reduction with clearing, top dimension first
    cleared_rows = None  # ranks (in dim d) of cells paired from above
    positive_by_dim = {1: positive}
    pivot_rows_by_dim = {}
    for d in range(top, 1, -1):
        cols = by_dim[d]
        rows = by_dim[d - 1]
        indptr = np.zeros(len(cols) + 1, dtype=np.int64)
        ind = []
        for k, i in enumerate(cols):
            fac = sorted(int(rank_in_dim[f]) for f in boundary[i])
            ind.extend(fac)
            indptr[k + 1] = len(ind)
        indices = np.array(ind, dtype=np.int64)
        skip = None
        if cleared_rows is not None:
            skip = np.zeros(len(cols), dtype=np.uint8)
            skip[list(cleared_rows)] = 1
        pivots = _kernels.reduce_cols(len(rows), indptr, indices, skip)
        pivot_rows_by_dim[d - 1] = {int(p) for p in pivots if p >= 0}
        for k, p in enumerate(pivots):
            if p >= 0:
                b, dv = values[rows[p]], values[cols[k]]
                if dv > b:
                    bars.append(Bar(d - 1, float(b), float(dv)))
        zero_cols = {k for k in range(len(cols))
                     if pivots[k] < 0 and (skip is None or not skip[k])}
        positive_by_dim[d] = zero_cols
        cleared_rows = {int(p) for p in pivots if p >= 0}

    # essential classes in dimensions >= 1 (reported up to dimension 2)
    for d in range(1, min(top, 2) + 1):
        if d == 1:
            pos = set(np.flatnonzero(positive_by_dim[1]))
        else:
            pos = positive_by_dim.get(d, set())
        paired = pivot_rows_by_dim.get(d, set())
        for k in sorted(pos - paired):
            bars.append(Bar(d, float(values[by_dim[d][k]]), INF))

    return Barcode(bars, max_dim=min(top, 2) if n else 0)


def reduce(f: Filtration) -> Barcode:
    """Persistence pairs of a simplicial filtration."""
    idx = f.index_of()
    boundary = []
    for i, (row, d) in enumerate(zip(f.verts, f.dims)):
        vs = tuple(int(x) for x in row[:d + 1])
        if d == 0:
            boundary.append([])
            continue
        fac = []
        for face in itertools.combinations(vs, d):
            j = idx.get(face)
            if j is None:
                raise InvalidFiltration(f"missing face {face}")
            fac.append(j)
        boundary.append(fac)
    return chain_persistence(f.dims, f.values, boundary,
                             int(f.dims.max()) if len(f) else 0)


@dataclass
class BettiGrid:
    start: float
    step: float
    count: int
    values: np.ndarray  # (count, n_dims) int64

    def grid_points(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)


def betti_curve(b: Barcode, start: float = GRID_START, step: float = GRID_STEP,
                count: int = GRID_COUNT, dims=(0, 1, 2)) -> BettiGrid:
    """Betti numbers sampled at g_k = start + k*step with half-open
    [birth, death) membership."""
    if step <= 0 or count < 1:
        raise ValueError("grid requires step > 0 and count >= 1")
    dims = tuple(dims)
    vals = np.zeros((count, len(dims)), dtype=np.int64)
    grid = start + step * np.arange(count)
    for col, d in enumerate(dims):
        for bar in b.in_dim(d):
            sel = (grid >= bar.birth) & (grid < bar.death)
            vals[sel, col] += 1
    return BettiGrid(start, step, count, vals)


def _gf2_rank(rows) -> int:
    """Rank of a GF(2) matrix given as a list of bitmask ints."""
    rank = 0
    pivots = []
    for r in rows:
        for p in pivots:
            if r >> (p.bit_length() - 1) & 1:
                r ^= p
        if r:
            pivots.append(r)
            rank += 1
    return rank


def brute_force_betti(f: Filtration, scale: float, p: int,
                      max_simplices: int = 2000) -> int:
    """Independent oracle: beta_p of the subcomplex at `scale` via dense
    GF(2) elimination, beta_p = nullity(d_p) - rank(d_{p+1})."""
    if len(f) > max_simplices:
        raise TooLarge(f"{len(f)} simplices exceeds oracle cap")
    live = f.values <= scale
    cells = {}
    for row, d, v, ok in zip(f.verts, f.dims, f.values, live):
        if ok:
            vs = tuple(int(x) for x in row[:d + 1])
            cells.setdefault(int(d), []).append(vs)
    return betti_from_cells(cells, p)


def betti_from_cells(cells: dict, p: int) -> int:
    """beta_p from {dim: [vertex tuples]} of a simplicial complex."""
    n_p = len(cells.get(p, []))
    if n_p == 0:
        return 0
    index_p = {vs: i for i, vs in enumerate(cells.get(p, []))}
    index_pm1 = {vs: i for i, vs in enumerate(cells.get(p - 1, []))}

    def matrix_rank(higher, lower_index):
        rows = []
        for vs in higher:
            mask = 0
            for face in itertools.combinations(vs, len(vs) - 1):
                mask ^= 1 << lower_index[face]
            rows.append(mask)
        return _gf2_rank(rows)

    rank_dp = 0
    if p > 0:
        rank_dp = matrix_rank(cells.get(p, []), index_pm1)
    rank_dp1 = matrix_rank(cells.get(p + 1, []), index_p)
    return n_p - rank_dp - rank_dp1
