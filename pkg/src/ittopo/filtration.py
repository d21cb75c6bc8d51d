"""Filtered simplicial complexes over 3D point clouds.

Two backends: alpha filtrations on the Delaunay tetrahedralization
(production path) and Vietoris-Rips (verification path). Filtration values
are radii in angstroms; Rips values are halved diameters so both backends
share one scale axis.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay as _SciDelaunay
from scipy.spatial import QhullError

from .errors import TooManyPoints

JITTER = 1e-7          # symbolic-perturbation stand-in, well below the 0.1 A grid
DEGENERACY_TOL = 1e-6  # singular values below this collapse a dimension
DEFAULT_MAX_VALUE = 25.0


@dataclass(frozen=True)
class Simplex:
    vertices: tuple
    value: float

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1


class Filtration:
    """Sorted, face-closed filtration stored as flat arrays.

    verts is (N, 4) int64 padded with -1; order is (value, dim, lexicographic).
    """

    def __init__(self, points, verts, dims, values, kind, max_value):
        self.points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        self.verts = np.asarray(verts, dtype=np.int64).reshape(-1, 4)
        self.dims = np.asarray(dims, dtype=np.int64)
        self.values = np.asarray(values, dtype=np.float64)
        self.kind = kind
        self.max_value = float(max_value)

    def __len__(self):
        return len(self.values)

    @property
    def simplices(self):
        out = []
        for row, d, v in zip(self.verts, self.dims, self.values):
            out.append(Simplex(tuple(int(x) for x in row[:d + 1]), float(v)))
        return out

    def index_of(self):
        """dict mapping vertex tuple -> position in filtration order."""
        return {tuple(int(x) for x in row[:d + 1]): i
                for i, (row, d) in enumerate(zip(self.verts, self.dims))}

    def validate(self):
        """Assert face-closedness, monotone values and sorted order."""
        idx = self.index_of()
        order = np.lexsort((self.verts[:, 3], self.verts[:, 2],
                            self.verts[:, 1], self.verts[:, 0],
                            self.dims, self.values))
        assert np.array_equal(order, np.arange(len(self))), "not sorted"
        for i, (row, d, v) in enumerate(zip(self.verts, self.dims, self.values)):
            vs = tuple(int(x) for x in row[:d + 1])
            assert list(vs) == sorted(vs) and len(set(vs)) == d + 1
            for face in itertools.combinations(vs, d) if d > 0 else ():
                j = idx.get(face)
                assert j is not None, f"missing face {face} of {vs}"
                assert self.values[j] <= v + 1e-12, "face born after coface"

    def to_csv(self) -> str:
        lines = ["dim,v0,v1,v2,v3,value"]
        for row, d, v in zip(self.verts, self.dims, self.values):
            cells = [str(int(x)) if x >= 0 else "" for x in row]
            lines.append(f"{d}," + ",".join(cells) + f",{float(v)!r}")
        return "\n".join(lines) + "\n"


def _sorted_filtration(points, by_dim, kind, max_value):
    """Assemble per-dimension (verts, values) pairs into a Filtration."""
    verts_l, dims_l, vals_l = [], [], []
    for d, (vs, vals) in by_dim.items():
        if len(vs) == 0:
            continue
        keep = vals <= max_value
        vs, vals = vs[keep], vals[keep]
        pad = np.full((len(vs), 4), -1, dtype=np.int64)
        pad[:, :d + 1] = vs
        verts_l.append(pad)
        dims_l.append(np.full(len(vs), d, dtype=np.int64))
        vals_l.append(vals)
    verts = np.concatenate(verts_l)
    dims = np.concatenate(dims_l)
    vals = np.concatenate(vals_l)
    order = np.lexsort((verts[:, 3], verts[:, 2], verts[:, 1], verts[:, 0],
                        dims, vals))
    return Filtration(points, verts[order], dims[order], vals[order],
                      kind, max_value)


def _jitter(n: int) -> np.ndarray:
    rng = np.random.default_rng(987654321)
    return rng.uniform(-JITTER, JITTER, size=(n, 3))


@dataclass
class DelaunayResult:
    """Top-dimensional Delaunay cells plus the coordinates used to build them.

    Exactly one of tetrahedra / triangles / edges is nonempty except for the
    0-dimensional (single point / coincident) case.
    """
    points: np.ndarray          # original coordinates
    work_points: np.ndarray     # jittered coordinates the values derive from
    tetrahedra: np.ndarray
    triangles: np.ndarray
    edges: np.ndarray

    @property
    def top_cells(self):
        for d, cells in ((3, self.tetrahedra), (2, self.triangles),
                         (1, self.edges)):
            if len(cells):
                return d, cells
        return 0, np.zeros((0, 1), dtype=np.int64)


def delaunay3d(points) -> DelaunayResult:
    """Delaunay structure of a 3D point set with deterministic jitter.

    Degenerate (coplanar / collinear / coincident) inputs fall back to the
    lower-dimensional triangulation of the affine hull.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    n = len(pts)
    if n == 0:
        raise ValueError("empty point set")
    work = pts + _jitter(n)
    empty = lambda k: np.zeros((0, k), dtype=np.int64)
    tets, tris, edges = empty(4), empty(3), empty(2)

    centered = pts - pts.mean(axis=0)
    if n == 1:
        rank = 0
    else:
        sv = np.linalg.svd(centered, compute_uv=False)
        rank = int(np.sum(sv > DEGENERACY_TOL))

    if rank >= 3 and n >= 4:
        try:
            tri = _SciDelaunay(work)
            tets = np.sort(tri.simplices.astype(np.int64), axis=1)
        except QhullError:
            tri = _SciDelaunay(work, qhull_options="QJ")
            tets = np.sort(tri.simplices.astype(np.int64), axis=1)
        tets = tets[np.lexsort(tets.T[::-1])]
    elif rank == 2 or (rank >= 3 and n == 3):
        # triangulate in the plane of the two leading principal axes
        u, s, vt = np.linalg.svd(work - work.mean(axis=0))
        plane = (work - work.mean(axis=0)) @ vt[:2].T
        try:
            tri = _SciDelaunay(plane)
        except QhullError:
            tri = _SciDelaunay(plane, qhull_options="QJ")
        tris = np.sort(tri.simplices.astype(np.int64), axis=1)
        tris = tris[np.lexsort(tris.T[::-1])]
    elif rank == 1:
        axis = centered[np.argmax(np.linalg.norm(centered, axis=1))]
        t = centered @ axis
        order = np.argsort(t, kind="stable")
        edges = np.sort(np.stack([order[:-1], order[1:]], axis=1), axis=1)
        edges = edges[np.lexsort(edges.T[::-1])].astype(np.int64)
    return DelaunayResult(pts, work, tets, tris, edges)


def _circum(pts, cells):
    """Batched circumcenter / circumradius of 1-, 2- or 3-simplices."""
    k = cells.shape[1]
    P = pts[cells]
    with np.errstate(divide="ignore", invalid="ignore"):
        if k == 2:
            center = P.mean(axis=1)
            r = 0.5 * np.linalg.norm(P[:, 1] - P[:, 0], axis=1)
        elif k == 3:
            a = P[:, 1] - P[:, 0]
            b = P[:, 2] - P[:, 0]
            ab = np.cross(a, b)
            denom = 2.0 * np.einsum("ij,ij->i", ab, ab)
            la = np.einsum("ij,ij->i", a, a)
            lb = np.einsum("ij,ij->i", b, b)
            off = (la[:, None] * np.cross(b, ab) +
                   lb[:, None] * np.cross(ab, a)) / denom[:, None]
            center = P[:, 0] + off
            r = np.linalg.norm(off, axis=1)
        else:
            A = 2.0 * (P[:, 1:] - P[:, :1])            # (n, 3, 3)
            sq = np.einsum("ijk,ijk->ij", P, P)        # |v|^2
            rhs = sq[:, 1:] - sq[:, :1]
            ok = np.abs(np.linalg.det(A)) > 1e-300
            center = np.full((len(cells), 3), np.nan)
            if ok.any():
                center[ok] = np.linalg.solve(A[ok], rhs[ok][..., None])[..., 0]
            r = np.linalg.norm(center - P[:, 0], axis=1)
        r = np.where(np.isfinite(r), r, np.inf)
    return center, r


def _alpha_values(dl: DelaunayResult):
    """Alpha filtration radii for every simplex of the Delaunay complex.

    Returns {dim: (verts array, values array)} with vertices at 0. Uses the
    Gabriel criterion; non-Gabriel faces inherit the min over their cofaces.
    """
    pts = dl.work_points
    top_dim, top = dl.top_cells
    by_dim = {0: (np.arange(len(pts), dtype=np.int64)[:, None],
                  np.zeros(len(pts)))}
    if top_dim == 0:
        return by_dim
    _, r = _circum(pts, top)
    by_dim[top_dim] = (top, r)
    cells, cvals = top, r
    for d in range(top_dim - 1, 0, -1):
        k = cells.shape[1]
        faces, opps, parent_vals = [], [], []
        for drop in range(k):
            keepcols = [c for c in range(k) if c != drop]
            faces.append(cells[:, keepcols])
            opps.append(cells[:, drop])
            parent_vals.append(cvals)
        faces = np.concatenate(faces)
        opps = np.concatenate(opps)
        parent_vals = np.concatenate(parent_vals)
        uniq, inv = np.unique(faces, axis=0, return_inverse=True)
        center, r = _circum(pts, uniq)
        d2 = np.linalg.norm(pts[opps] - center[inv], axis=1)
        inside = d2 < r[inv] * (1.0 - 1e-12)
        nongabriel = np.zeros(len(uniq), dtype=bool)
        np.logical_or.at(nongabriel, inv, inside)
        minco = np.full(len(uniq), np.inf)
        np.minimum.at(minco, inv, parent_vals)
        vals = np.where(nongabriel, minco, np.minimum(r, minco))
        by_dim[d] = (uniq, vals)
        cells, cvals = uniq, vals
    return by_dim


def alpha_filtration(points, max_value: float = DEFAULT_MAX_VALUE) -> Filtration:
    dl = delaunay3d(points)
    by_dim = _alpha_values(dl)
    return _sorted_filtration(dl.points, by_dim, "alpha", max_value)


def rips_filtration(points, max_value: float, max_dim: int = 2,
                    max_points: int = 64, force: bool = False) -> Filtration:
    """Vietoris-Rips filtration with values = diameter / 2."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    n = len(pts)
    if n > max_points and not force:
        raise TooManyPoints(f"{n} points exceeds max_points={max_points}")
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    by_dim = {0: (np.arange(n, dtype=np.int64)[:, None], np.zeros(n))}
    for d in range(1, max_dim + 1):
        combos = np.array(list(itertools.combinations(range(n), d + 1)),
                          dtype=np.int64)
        if len(combos) == 0:
            continue
        vals = np.zeros(len(combos))
        for a, b in itertools.combinations(range(d + 1), 2):
            vals = np.maximum(vals, dist[combos[:, a], combos[:, b]])
        vals *= 0.5
        keep = vals <= max_value
        by_dim[d] = (combos[keep], vals[keep])
    return _sorted_filtration(pts, by_dim, "rips", max_value)
