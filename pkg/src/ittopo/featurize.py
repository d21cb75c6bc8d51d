"""Assembly of the full multi-level embedding bundle for one structure:
structural token (750), elemental tokens (7 x 750), pairwise interaction
tokens (42 x 500) and the unique-atom graph, with presence masks and a
bit-exact directory format.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import persistence
from .clusters import ClusterAssignment, N_CLUSTERS, default_clusters
from .errors import BadManifest, SamePair, ShapeMismatch
from .filtration import alpha_filtration
from .interaction import (centered_pair_curves, interaction_filtration,
                          partner_complex, pih)
from .persistence import betti_curve, reduce
from .structure import AtomicGraph, Structure, build_supercell, unique_atoms

FORMAT_VERSION = "1"
N_PAIRS = N_CLUSTERS * (N_CLUSTERS - 1)  # 42 ordered pairs
STRUCTURAL_LEN = 3 * persistence.GRID_COUNT          # H0 | H1 | H2
INTERACTION_LEN = 2 * persistence.GRID_COUNT         # H0 | H1


def pair_index(center: int, partner: int) -> int:
    """Ordered pairs enumerated center-major, partner ascending skipping the
    center: (0,1) -> 0 ... (6,5) -> 41."""
    if not (0 <= center < N_CLUSTERS and 0 <= partner < N_CLUSTERS):
        raise ValueError("cluster ids must be in 0..6")
    if center == partner:
        raise SamePair(f"cluster pair ({center},{center}) is not ordered")
    return center * (N_CLUSTERS - 1) + (partner if partner < center
                                        else partner - 1)


def pair_clusters(index: int):
    """Inverse of pair_index."""
    center, off = divmod(int(index), N_CLUSTERS - 1)
    partner = off if off < center else off + 1
    return center, partner


@dataclass
class RunConfig:
    grid_start: float = persistence.GRID_START
    grid_step: float = persistence.GRID_STEP
    grid_count: int = persistence.GRID_COUNT
    supercell_edge: float = 64.0
    mode: str = "centered"
    neighbor_cutoff: float = 8.0
    max_filtration: float = 25.0

    def __post_init__(self):
        if self.grid_step <= 0 or self.grid_count < 1:
            raise ValueError("grid requires step > 0 and count >= 1")
        if self.supercell_edge <= 0 or self.neighbor_cutoff <= 0:
            raise ValueError("lengths must be positive")
        if self.mode not in ("centered", "symmetric"):
            raise ValueError(f"unknown interaction mode {self.mode!r}")


@dataclass
class EmbeddingBundle:
    structural: np.ndarray                  # (3 * grid_count,) float32
    elemental: np.ndarray                   # (7, 3 * grid_count)
    elemental_presence: np.ndarray          # (7,) bool
    interaction: np.ndarray                 # (42, 2 * grid_count)
    interaction_presence: np.ndarray        # (42,) bool
    atomic: AtomicGraph
    meta: dict = field(default_factory=dict)

    def validate(self):
        g = int(self.meta.get("grid_count", persistence.GRID_COUNT))
        if self.structural.shape != (3 * g,):
            raise ShapeMismatch(f"structural shape {self.structural.shape}")
        if self.elemental.shape != (N_CLUSTERS, 3 * g):
            raise ShapeMismatch(f"elemental shape {self.elemental.shape}")
        if self.interaction.shape != (N_PAIRS, 2 * g):
            raise ShapeMismatch(f"interaction shape {self.interaction.shape}")
        for k in range(N_CLUSTERS):
            if not self.elemental_presence[k] and np.any(self.elemental[k]):
                raise ShapeMismatch(f"absent cluster {k} has nonzero curve")
        if len(self.atomic.nodes) > 256:
            raise ShapeMismatch("atom token list exceeds the 256 cap")


def _curves_n1(points, cfg: RunConfig) -> np.ndarray:
    """Concatenated H0|H1|H2 Betti curves of the alpha filtration."""
    f = alpha_filtration(points, max_value=cfg.max_filtration)
    bc = reduce(f)
    grid = betti_curve(bc, cfg.grid_start, cfg.grid_step, cfg.grid_count,
                       dims=(0, 1, 2))
    return grid.values.T.reshape(-1).astype(np.float32)


def featurize_structure(s: Structure, clusters: ClusterAssignment | None = None,
                        config: RunConfig | None = None) -> EmbeddingBundle:
    """Full token bundle: supercell topology at the structural, elemental and
    pairwise-interaction levels plus the unique-atom graph of the original
    cell."""
    clusters = clusters if clusters is not None else default_clusters()
    cfg = config if config is not None else RunConfig()
    g = cfg.grid_count

    sc = build_supercell(s, cfg.supercell_edge)
    coords = sc.cart_coords
    cluster_ids = np.array([clusters[z] for z in sc.numbers], dtype=np.int64)

    structural = _curves_n1(coords, cfg)

    elemental = np.zeros((N_CLUSTERS, 3 * g), dtype=np.float32)
    presence = np.zeros(N_CLUSTERS, dtype=bool)
    members = {}
    for k in range(N_CLUSTERS):
        pts = coords[cluster_ids == k]
        if len(pts):
            members[k] = pts
            presence[k] = True
            elemental[k] = _curves_n1(pts, cfg)

    interaction = np.zeros((N_PAIRS, 2 * g), dtype=np.float32)
    ipresence = np.zeros(N_PAIRS, dtype=bool)
    if cfg.mode == "centered":
        partners = {k: partner_complex(pts, cfg.max_filtration)
                    for k, pts in members.items()}
        for j, pc in partners.items():
            for i in members:
                if i == j:
                    continue
                idx = pair_index(i, j)
                h0, h1 = centered_pair_curves(members[i], pc, cfg.grid_start,
                                              cfg.grid_step, g)
                interaction[idx, :g] = h0
                interaction[idx, g:] = h1
                ipresence[idx] = True
    else:
        for i in members:
            for j in members:
                if i == j:
                    continue
                idx = pair_index(i, j)
                f = interaction_filtration(members[i], members[j],
                                           mode="symmetric",
                                           max_value=cfg.max_filtration)
                grid = betti_curve(pih(f), cfg.grid_start, cfg.grid_step, g,
                                   dims=(0, 1))
                interaction[idx] = grid.values.T.reshape(-1)
                ipresence[idx] = True

    atomic = unique_atoms(s, cutoff=cfg.neighbor_cutoff, clusters=clusters)
    meta = {
        "source_id": s.source_id,
        "grid_start": cfg.grid_start,
        "grid_step": cfg.grid_step,
        "grid_count": g,
        "supercell_edge": cfg.supercell_edge,
        "mode": cfg.mode,
        "neighbor_cutoff": cfg.neighbor_cutoff,
        "cluster_table": clusters.provenance or "default",
        "format_version": FORMAT_VERSION,
    }
    return EmbeddingBundle(structural, elemental, presence, interaction,
                           ipresence, atomic, meta)


def write_bundle(b: EmbeddingBundle, out_dir) -> None:
    """Write manifest.json, raw little-endian float32 arrays and atoms.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    arrays = {
        "structural.f32": np.asarray(b.structural, dtype="<f4"),
        "elemental.f32": np.asarray(b.elemental, dtype="<f4"),
        "interaction.f32": np.asarray(b.interaction, dtype="<f4"),
    }
    for name, arr in arrays.items():
        (out / name).write_bytes(arr.tobytes(order="C"))
    manifest = {
        "meta": b.meta,
        "elemental_presence": [bool(x) for x in b.elemental_presence],
        "interaction_presence": [bool(x) for x in b.interaction_presence],
        "shapes": {
            "structural": list(b.structural.shape),
            "elemental": list(b.elemental.shape),
            "interaction": list(b.interaction.shape),
        },
        "format_version": FORMAT_VERSION,
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=1) + "\n")
    atoms = {
        "cutoff": b.atomic.cutoff,
        "truncated": b.atomic.truncated,
        "nodes": [{"z": int(z), "cluster": int(c), "multiplicity": int(m)}
                  for z, c, m in b.atomic.nodes],
        "edges": [{"i": int(i), "j": int(j), "distance": float(d)}
                  for i, j, d in b.atomic.edges],
    }
    (out / "atoms.json").write_text(
        json.dumps(atoms, sort_keys=True, indent=1) + "\n")


def read_bundle(in_dir) -> EmbeddingBundle:
    """Exact inverse of write_bundle; validates shapes against the manifest."""
    src = Path(in_dir)
    mpath = src / "manifest.json"
    if not mpath.exists():
        raise BadManifest(f"missing manifest.json in {src}")
    try:
        manifest = json.loads(mpath.read_text())
        shapes = manifest["shapes"]
        meta = manifest["meta"]
    except (json.JSONDecodeError, KeyError) as e:
        raise BadManifest(f"unreadable manifest: {e}")
    arrays = {}
    for key in ("structural", "elemental", "interaction"):
        shape = tuple(shapes[key])
        raw = (src / f"{key}.f32").read_bytes()
        expected = int(np.prod(shape)) * 4
        if len(raw) != expected:
            raise ShapeMismatch(
                f"{key}.f32 holds {len(raw)} bytes, manifest wants {expected}")
        arrays[key] = np.frombuffer(raw, dtype="<f4").reshape(shape).copy()
    atoms = json.loads((src / "atoms.json").read_text())
    graph = AtomicGraph(
        [(n["z"], n["cluster"], n["multiplicity"]) for n in atoms["nodes"]],
        [(e["i"], e["j"], e["distance"]) for e in atoms["edges"]],
        atoms["cutoff"], atoms["truncated"])
    return EmbeddingBundle(
        arrays["structural"], arrays["elemental"],
        np.array(manifest["elemental_presence"], dtype=bool),
        arrays["interaction"],
        np.array(manifest["interaction_presence"], dtype=bool),
        graph, meta)
