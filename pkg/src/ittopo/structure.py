"""Periodic structures: lattices, sites, supercells, neighbor lists and
unique-atom graphs.

All coordinates are Cartesian angstroms unless a name says otherwise.
Every function here is pure; structures are treated as immutable once built.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from . import elements
from .errors import TooManyAtoms

MERGE_TOL = 0.1          # duplicate-site merge distance after symmetry expansion
ENV_ROUND_TOL = 1e-3     # rounding of neighbor distances in environment keys
ATOM_TOKEN_CAP = 256


class Lattice:
    """Periodic cell described by a 3x3 row matrix (rows = a, b, c)."""

    def __init__(self, matrix):
        self.matrix = np.asarray(matrix, dtype=np.float64).reshape(3, 3)
        vol = float(np.linalg.det(self.matrix))
        if vol <= 0:
            # re-orient left-handed cells rather than reject them
            if vol < 0:
                self.matrix = self.matrix[::-1].copy()
                vol = -vol
            if vol == 0:
                raise ValueError("lattice has zero volume")
        self.volume = vol
        self.lengths = np.linalg.norm(self.matrix, axis=1)
        if np.any(self.lengths <= 0.1):
            raise ValueError("lattice vector shorter than 0.1 A")
        self._inv = np.linalg.inv(self.matrix)

    @classmethod
    def from_parameters(cls, a, b, c, alpha, beta, gamma):
        """Cell from lengths (A) and angles (deg), standard orientation."""
        al, be, ga = (math.radians(x) for x in (alpha, beta, gamma))
        va = [a, 0.0, 0.0]
        vb = [b * math.cos(ga), b * math.sin(ga), 0.0]
        cx = c * math.cos(be)
        cy = c * (math.cos(al) - math.cos(be) * math.cos(ga)) / math.sin(ga)
        cz = math.sqrt(max(c * c - cx * cx - cy * cy, 0.0))
        return cls([va, vb, [cx, cy, cz]])

    @property
    def angles(self):
        m = self.matrix
        l = self.lengths
        cosines = [
            float(np.dot(m[1], m[2]) / (l[1] * l[2])),
            float(np.dot(m[0], m[2]) / (l[0] * l[2])),
            float(np.dot(m[0], m[1]) / (l[0] * l[1])),
        ]
        return tuple(math.degrees(math.acos(max(-1.0, min(1.0, c)))) for c in cosines)

    def frac_to_cart(self, frac):
        return np.asarray(frac, dtype=np.float64) @ self.matrix

    def cart_to_frac(self, cart):
        return np.asarray(cart, dtype=np.float64) @ self._inv

    def plane_spacings(self):
        """Distance between lattice planes along each axis."""
        return 1.0 / np.linalg.norm(self._inv, axis=0)


@dataclass(frozen=True)
class Site:
    z: int
    frac: tuple
    cart: tuple

    @property
    def symbol(self) -> str:
        return elements.symbol_of(self.z)


def _wrap(frac):
    w = np.mod(np.asarray(frac, dtype=np.float64), 1.0)
    # mod can return 1.0 for tiny negative inputs
    w[w >= 1.0] -= 1.0
    return w


def make_site(lattice: Lattice, z, frac=None, cart=None) -> Site:
    z = elements.zc(z)
    if frac is None:
        frac = lattice.cart_to_frac(cart)
    frac = _wrap(frac)
    cart = lattice.frac_to_cart(frac)
    return Site(z, tuple(float(x) for x in frac), tuple(float(x) for x in cart))


@dataclass
class Structure:
    lattice: Lattice
    sites: list
    source_id: str = ""

    def __post_init__(self):
        if not self.sites:
            raise ValueError("structure has no sites")

    @property
    def cart_coords(self) -> np.ndarray:
        return np.array([s.cart for s in self.sites], dtype=np.float64)

    @property
    def frac_coords(self) -> np.ndarray:
        return np.array([s.frac for s in self.sites], dtype=np.float64)

    @property
    def numbers(self) -> np.ndarray:
        return np.array([s.z for s in self.sites], dtype=np.int64)

    def element_set(self) -> set:
        return {s.symbol for s in self.sites}

    def to_extxyz(self) -> str:
        """Extended-XYZ text; round-trips coordinates via repr precision."""
        cellstr = " ".join("%.17g" % x for x in self.lattice.matrix.ravel())
        lines = [str(len(self.sites)),
                 'Lattice="%s" Properties=species:S:1:pos:R:3' % cellstr]
        for s in self.sites:
            lines.append("%s %.17g %.17g %.17g" % (s.symbol, *s.cart))
        return "\n".join(lines) + "\n"


def merge_close_sites(lattice: Lattice, zs, fracs, tol: float = MERGE_TOL):
    """Drop sites that coincide with an earlier site of the same element
    within `tol` angstroms under periodic wrapping."""
    kept_z, kept_f = [], []
    for z, f in zip(zs, fracs):
        f = _wrap(f)
        dup = False
        for z2, f2 in zip(kept_z, kept_f):
            if z2 != z:
                continue
            d = f - f2
            d -= np.round(d)
            if np.linalg.norm(lattice.frac_to_cart(d)) < tol:
                dup = True
                break
        if not dup:
            kept_z.append(z)
            kept_f.append(f)
    return kept_z, kept_f


def build_supercell(s: Structure, target_edge: float = 64.0,
                    max_sites: int = 500_000) -> Structure:
    """Replicate the cell so each edge is as close to `target_edge` as integer
    replication allows (round half up, never below 1x). Coordinates are never
    rescaled."""
    reps = [max(1, int(math.floor(target_edge / L + 0.5)))
            for L in s.lattice.lengths]
    n_new = len(s.sites) * reps[0] * reps[1] * reps[2]
    if n_new > max_sites:
        raise TooManyAtoms(
            f"supercell would contain {n_new} sites (cap {max_sites})")
    new_matrix = s.lattice.matrix * np.array(reps, dtype=np.float64)[:, None]
    new_lat = Lattice(new_matrix)
    fr = s.frac_coords
    zs = s.numbers
    new_sites = []
    for i in range(reps[0]):
        for j in range(reps[1]):
            for k in range(reps[2]):
                shift = np.array([i, j, k], dtype=np.float64)
                nf = (fr + shift) / np.array(reps, dtype=np.float64)
                for z, f in zip(zs, nf):
                    new_sites.append(make_site(new_lat, int(z), frac=f))
    return Structure(new_lat, new_sites, source_id=s.source_id)


def _image_shifts(lattice: Lattice, cutoff: float) -> np.ndarray:
    spac = lattice.plane_spacings()
    nmax = [int(math.ceil(cutoff / d)) for d in spac]
    rng = [np.arange(-n, n + 1) for n in nmax]
    grid = np.stack(np.meshgrid(*rng, indexing="ij"), axis=-1).reshape(-1, 3)
    return grid.astype(np.float64)


def _all_image_pairs(s: Structure, cutoff: float):
    """Yield (i, j, distance) for every ordered pair i<=j and image shift with
    0 < distance <= cutoff. For i==j the zero shift is excluded and the +/-
    shift is counted once per sign (matching 'number of images' semantics)."""
    cart = s.cart_coords
    n = len(cart)
    shifts = _image_shifts(s.lattice, cutoff)
    shift_cart = shifts @ s.lattice.matrix
    out_i, out_j, out_d = [], [], []
    for (sh, sc) in zip(shifts, shift_cart):
        disp = cart[None, :, :] + sc[None, None, :] - cart[:, None, :]
        dist = np.linalg.norm(disp, axis=-1)
        ii, jj = np.nonzero((dist <= cutoff) & (dist > 1e-12))
        if np.all(sh == 0):
            keep = ii < jj
        else:
            keep = ii <= jj
        out_i.append(ii[keep])
        out_j.append(jj[keep])
        out_d.append(dist[ii[keep], jj[keep]])
    return (np.concatenate(out_i), np.concatenate(out_j),
            np.concatenate(out_d))


def neighbor_list(s: Structure, cutoff: float = 8.0, periodic: bool = True):
    """Pairs (i, j, d) with d <= cutoff.

    i<j pairs appear once at their minimum-image distance; i==j entries
    (periodic only) appear once per image within the cutoff. Sorted by
    (i, j, d)."""
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    if not periodic:
        cart = s.cart_coords
        diff = cart[None, :, :] - cart[:, None, :]
        dist = np.linalg.norm(diff, axis=-1)
        ii, jj = np.nonzero((dist <= cutoff) & (np.triu(dist, 1) > 0))
        pairs = [(int(a), int(b), float(dist[a, b]))
                 for a, b in zip(ii, jj) if a < b]
        return sorted(pairs)
    ii, jj, dd = _all_image_pairs(s, cutoff)
    best = {}
    selfpairs = []
    for a, b, d in zip(ii, jj, dd):
        a, b, d = int(a), int(b), float(d)
        if a == b:
            selfpairs.append((a, b, d))
        else:
            key = (a, b)
            if key not in best or d < best[key]:
                best[key] = d
    pairs = [(a, b, d) for (a, b), d in best.items()] + selfpairs
    return sorted(pairs)


@dataclass
class AtomicGraph:
    nodes: list                       # (z, cluster_id, multiplicity)
    edges: list                       # (i, j, distance), i < j
    cutoff: float
    truncated: bool = False

    def __post_init__(self):
        assert len(self.nodes) <= ATOM_TOKEN_CAP


def _env_key(z, neigh):
    """(own element, sorted (neighbor element, rounded distance)) tuple."""
    return (int(z), tuple(sorted((int(nz), round(d / ENV_ROUND_TOL))
                                 for nz, d in neigh)))


def _key_hash(key) -> int:
    h = hashlib.sha1(repr(key).encode()).digest()
    return int.from_bytes(h[:8], "big")


def unique_atoms(s: Structure, cutoff: float = 8.0,
                 cap: int = ATOM_TOKEN_CAP, clusters=None) -> AtomicGraph:
    """Collapse sites with identical local environments into one node each.

    Environments are compared on the original cell with periodic neighbors.
    Nodes are ordered (cluster id, Z, environment-key hash) and truncated to
    `cap`. Edge distance between two classes is the minimum over their member
    pairs within the cutoff, rounded to the environment tolerance, so the
    graph is invariant under site permutations and rigid motions.
    """
    if clusters is None:
        from .clusters import default_clusters
        clusters = default_clusters()
    ii, jj, dd = _all_image_pairs(s, cutoff)
    neigh = {i: [] for i in range(len(s.sites))}
    zs = s.numbers
    for a, b, d in zip(ii, jj, dd):
        a, b = int(a), int(b)
        neigh[a].append((zs[b], float(d)))
        if a != b:
            neigh[b].append((zs[a], float(d)))
    groups = {}
    for i in range(len(s.sites)):
        key = _env_key(zs[i], neigh[i])
        groups.setdefault(key, []).append(i)
    reps = []
    for key, members in groups.items():
        z = int(zs[members[0]])
        reps.append((clusters[z], z, _key_hash(key), members, len(members)))
    reps.sort(key=lambda t: t[:3])
    truncated = len(reps) > cap
    reps = reps[:cap]
    nodes = [(r[1], r[0], r[4]) for r in reps]
    class_of = {}
    for node_idx, r in enumerate(reps):
        for site in r[3]:
            class_of[site] = node_idx
    best = {}
    for a, b, d in zip(ii, jj, dd):
        ca, cb = class_of.get(int(a)), class_of.get(int(b))
        if ca is None or cb is None or ca == cb:
            continue
        if ca > cb:
            ca, cb = cb, ca
        key = (ca, cb)
        d = float(d)
        if key not in best or d < best[key]:
            best[key] = d
    edges = sorted((a, b, round(d / ENV_ROUND_TOL) * ENV_ROUND_TOL)
                   for (a, b), d in best.items())
    return AtomicGraph(nodes, edges, cutoff, truncated)
