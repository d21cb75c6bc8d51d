"""Seven element clusters from co-occurrence statistics and chemical
similarity, plus the frozen default assignment used when no corpus is given.

Cluster convention: 0..3 are the singletons {H}, {C}, {N}, {O}; cluster 4 is
seeded at Zn; clusters 5 and 6 are auto-seeded at maximal dissimilarity.
"""
from __future__ import annotations

import numpy as np

from . import elements
from .errors import EmptyCorpus, InsufficientElements, UnknownElement

N_CLUSTERS = 7
ANCHORS = (("H", 0), ("C", 1), ("N", 2), ("O", 3), ("Zn", 4))
_SINGLETONS = {elements.Z_OF[s]: c for s, c in ANCHORS[:4]}


class ClusterAssignment:
    """Total map Z (1..103) -> cluster id 0..6."""

    def __init__(self, mapping: dict, provenance: str = "", lam: float = 0.5):
        self.mapping = {elements.zc(z): int(c) for z, c in mapping.items()}
        self.provenance = provenance
        self.lam = lam
        used = set(self.mapping.values())
        if used != set(range(N_CLUSTERS)):
            raise ValueError(f"cluster ids used: {sorted(used)}, want 0..6")
        anchor_ids = [self.mapping[elements.Z_OF[s]] for s, _ in ANCHORS]
        if len(set(anchor_ids)) != len(ANCHORS):
            raise ValueError("anchor elements share a cluster")

    def __getitem__(self, element) -> int:
        z = elements.zc(element)
        try:
            return self.mapping[z]
        except KeyError:
            raise UnknownElement(f"element Z={z} not in cluster table")

    def members(self, cluster_id: int):
        return sorted(z for z, c in self.mapping.items() if c == cluster_id)

    def to_text(self) -> str:
        lines = [f"# provenance: {self.provenance}",
                 f"# lambda: {self.lam}"]
        for z in sorted(self.mapping):
            lines.append(f"{elements.symbol_of(z)}\t{self.mapping[z]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ClusterAssignment":
        provenance, lam, mapping = "", 0.5, {}
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("provenance:"):
                    provenance = body.split(":", 1)[1].strip()
                elif body.startswith("lambda:"):
                    lam = float(body.split(":", 1)[1])
                continue
            sym, cid = line.split("\t")
            mapping[sym] = int(cid)
        return cls(mapping, provenance, lam)


class CooccurrenceMatrix:
    def __init__(self, counts: np.ndarray, structure_count: int):
        counts = np.asarray(counts, dtype=np.int64)
        assert counts.shape == (elements.MAX_Z, elements.MAX_Z)
        assert np.array_equal(counts, counts.T)
        self.counts = counts
        self.structure_count = int(structure_count)


def cooccurrence_matrix(corpus) -> CooccurrenceMatrix:
    """counts[i][j] = structures containing both elements (diagonal: either)."""
    corpus = list(corpus)
    if not corpus:
        raise EmptyCorpus("no structures in corpus")
    counts = np.zeros((elements.MAX_Z, elements.MAX_Z), dtype=np.int64)
    for elems in corpus:
        zs = sorted({elements.zc(e) for e in elems})
        for a in zs:
            counts[a - 1, a - 1] += 1
        for ai, a in enumerate(zs):
            for b in zs[ai + 1:]:
                counts[a - 1, b - 1] += 1
                counts[b - 1, a - 1] += 1
    return CooccurrenceMatrix(counts, len(corpus))


def chemical_similarity(a, b, features: np.ndarray | None = None) -> float:
    """Cosine similarity of standardized periodic-table feature vectors."""
    if features is None:
        features = elements.standardized_feature_table()
    va = features[elements.zc(a) - 1]
    vb = features[elements.zc(b) - 1]
    return float(np.dot(va, vb) / (np.linalg.norm(va) * np.linalg.norm(vb)))


def _similarity_matrix(features: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(features, axis=1, keepdims=True)
    unit = features / norms
    return unit @ unit.T


def _cooc_dissimilarity(cooc: CooccurrenceMatrix) -> np.ndarray:
    """Inverted, max-normalized co-occurrence: 1 - counts/max (off-diagonal)."""
    c = cooc.counts.astype(np.float64)
    m = c.max()
    if m == 0:
        return np.ones_like(c)
    return 1.0 - c / m


def _affinity(sim, dis, lam):
    return lam * sim + (1.0 - lam) * dis


def _total_score(assign, members, sim, dis, lam):
    """Sum over elements of the mean affinity to the rest of their cluster.

    Singleton occupants contribute 0 (no peers to score against)."""
    total = 0.0
    for z, cid in assign.items():
        peers = [m for m in members[cid] if m != z]
        if not peers:
            continue
        i = z - 1
        total += np.mean([_affinity(sim[i, p - 1], dis[i, p - 1], lam)
                          for p in peers])
    return total


def compute_clusters(cooc: CooccurrenceMatrix,
                     features: np.ndarray | None = None,
                     lam: float = 0.5) -> ClusterAssignment:
    """Greedy seeded assignment with improvement-only swap passes.

    Clusters 0..3 stay the {H},{C},{N},{O} singletons. Cluster 4 is seeded at
    Zn; 5 and 6 at the two elements farthest (lowest summed affinity) from the
    existing seeds. Remaining elements join the seeded cluster with the best
    mean affinity, in ascending-Z order, then single-element moves are applied
    while they strictly improve the total score.
    """
    if features is None:
        features = elements.standardized_feature_table()
    corpus_elems = [z for z in range(1, elements.MAX_Z + 1)
                    if cooc.counts[z - 1, z - 1] > 0]
    if len(corpus_elems) < N_CLUSTERS:
        raise InsufficientElements(
            f"corpus holds {len(corpus_elems)} elements, need >= {N_CLUSTERS}")
    sim = _similarity_matrix(features)
    dis = _cooc_dissimilarity(cooc)

    assign = dict(_SINGLETONS)
    zn = elements.Z_OF["Zn"]
    assign[zn] = 4
    seeds = [elements.Z_OF[s] for s, _ in ANCHORS]
    free = [z for z in range(1, elements.MAX_Z + 1) if z not in assign]
    for cid in (5, 6):
        best_z, best_val = None, None
        for z in free:
            val = sum(_affinity(sim[z - 1, s - 1], dis[z - 1, s - 1], lam)
                      for s in seeds)
            if best_val is None or val < best_val:
                best_z, best_val = z, val
        assign[best_z] = cid
        seeds.append(best_z)
        free.remove(best_z)

    members = {c: [z for z, cc in assign.items() if cc == c]
               for c in range(N_CLUSTERS)}
    open_ids = (4, 5, 6)
    for z in sorted(free):
        best_c, best_val = None, None
        for cid in open_ids:
            val = np.mean([_affinity(sim[z - 1, m - 1], dis[z - 1, m - 1], lam)
                           for m in members[cid]])
            if best_val is None or val > best_val:
                best_c, best_val = cid, val
        assign[z] = best_c
        members[best_c].append(z)

    movable = sorted(set(free))
    score = _total_score(assign, members, sim, dis, lam)
    improved = True
    while improved:
        improved = False
        for z in movable:
            cur = assign[z]
            for cid in open_ids:
                if cid == cur or len(members[cur]) <= 1:
                    continue
                members[cur].remove(z)
                members[cid].append(z)
                assign[z] = cid
                cand = _total_score(assign, members, sim, dis, lam)
                if cand > score + 1e-12:
                    score = cand
                    cur = cid
                    improved = True
                else:
                    members[cid].remove(z)
                    members[cur].append(z)
                    assign[z] = cur
    return ClusterAssignment(
        assign, provenance=f"computed over {cooc.structure_count} structures",
        lam=lam)


_METALLOIDS = {"B", "Si", "Ge", "As", "Sb", "Te", "Po"}
_HALOGENS = {"F", "Cl", "Br", "I", "At"}


def _fallback_mapping() -> dict:
    """Rule-based total assignment used when no corpus is available."""
    mapping = dict(_SINGLETONS)
    for z in range(1, elements.MAX_Z + 1):
        if z in mapping:
            continue
        sym = elements.symbol_of(z)
        blk = elements.block_of(z)
        grp = elements.group_of(z)
        if sym in _METALLOIDS or sym in _HALOGENS:
            mapping[z] = 5
        elif blk in ("s", "d") and sym not in ("He",):
            mapping[z] = 4          # metals, with Zn
        else:
            mapping[z] = 6          # remaining p-block nonmetals, nobles, f-block
    return mapping


_DEFAULT = None


def default_clusters() -> ClusterAssignment:
    """The frozen table shipped with the package (deterministic, corpus-free)."""
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = ClusterAssignment(_fallback_mapping(),
                                     provenance="built-in fallback", lam=0.5)
    return _DEFAULT
