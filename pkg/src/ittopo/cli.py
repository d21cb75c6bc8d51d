"""Command-line front end: batch featurization, barcode inspection, cluster
table computation and corpus statistics."""
from __future__ import annotations

import os
import sys
import time
from pathlib import Path

import click
import numpy as np

from .clusters import (ClusterAssignment, N_CLUSTERS, compute_clusters,
                       cooccurrence_matrix, default_clusters)
from .elements import standardized_feature_table
from .errors import InsufficientElements, IttopoError
from .featurize import (RunConfig, featurize_structure, pair_index,
                        write_bundle)
from .filtration import alpha_filtration
from .interaction import interaction_filtration, pih
from .io import parse_structure_file
from .persistence import Barcode, reduce as reduce_filtration
from .structure import build_supercell, unique_atoms

STRUCTURE_SUFFIXES = (".cif", ".xyz", ".extxyz")


def _load_clusters(path: str | None) -> ClusterAssignment:
    path = path or os.environ.get("ITT_CLUSTERS")
    if path:
        return ClusterAssignment.from_text(Path(path).read_text())
    return default_clusters()


def _collect_inputs(inputs):
    files = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            files.extend(sorted(q for q in p.iterdir()
                                if q.suffix.lower() in STRUCTURE_SUFFIXES))
        else:
            files.append(p)
    return files


def _featurize_one(args):
    path, out_root, cfg_dict, cluster_text = args
    cfg = RunConfig(**cfg_dict)
    clusters = ClusterAssignment.from_text(cluster_text)
    t0 = time.perf_counter()
    s = parse_structure_file(path)
    b = featurize_structure(s, clusters=clusters, config=cfg)
    write_bundle(b, Path(out_root) / s.source_id)
    dt = time.perf_counter() - t0
    return (str(path), len(s.sites), len(b.atomic.nodes), dt)


@click.group()
def main():
    """Multiscale topological featurization of periodic atomic structures."""


@main.command("featurize")
@click.argument("inputs", nargs=-1, required=True)
@click.option("--out", default="bundles", show_default=True,
              help="Output root; one bundle directory per structure.")
@click.option("--grid-start", default=0.0, show_default=True, type=float)
@click.option("--grid-step", default=0.1, show_default=True, type=float)
@click.option("--grid-count", default=250, show_default=True, type=int)
@click.option("--supercell-edge", default=64.0, show_default=True, type=float)
@click.option("--mode", default="centered", show_default=True,
              type=click.Choice(["centered", "symmetric"]))
@click.option("--clusters", default=None,
              help="Cluster table path (overrides ITT_CLUSTERS).")
@click.option("--jobs", default=1, show_default=True, type=int)
def cmd_featurize(inputs, out, grid_start, grid_step, grid_count,
                  supercell_edge, mode, clusters, jobs):
    """Write embedding bundles for structure files or directories."""
    try:
        cfg = RunConfig(grid_start=grid_start, grid_step=grid_step,
                        grid_count=grid_count, supercell_edge=supercell_edge,
                        mode=mode)
        table = _load_clusters(clusters)
    except (ValueError, IttopoError, OSError) as e:
        click.echo(f"invalid configuration: {e}", err=True)
        sys.exit(2)
    if jobs < 1:
        click.echo("invalid configuration: --jobs must be >= 1", err=True)
        sys.exit(2)
    files = _collect_inputs(inputs)
    if not files:
        click.echo("no structure files found", err=True)
        sys.exit(2)
    single = len(files) == 1 and not any(Path(i).is_dir() for i in inputs)

    cfg_dict = {
        "grid_start": cfg.grid_start, "grid_step": cfg.grid_step,
        "grid_count": cfg.grid_count, "supercell_edge": cfg.supercell_edge,
        "mode": cfg.mode,
    }
    work = [(str(p), out, cfg_dict, table.to_text()) for p in files]
    failures = []
    results = []
    if jobs == 1 or len(files) == 1:
        for w in work:
            try:
                results.append(_featurize_one(w))
            except Exception as e:
                failures.append((w[0], e))
    else:
        import multiprocessing as mp
        with mp.Pool(jobs) as pool:
            for w, res in zip(work, pool.imap(_try_featurize, work)):
                if isinstance(res, tuple):
                    results.append(res)
                else:
                    failures.append((w[0], res))
    for path, n_atoms, n_unique, dt in results:
        click.echo(f"{path}: {n_atoms} atoms, {n_unique} unique, {dt:.2f}s")
    for path, e in failures:
        click.echo(f"failed {path}: {e}", err=True)
    if failures:
        sys.exit(1 if single else 3)


def _try_featurize(w):
    try:
        return _featurize_one(w)
    except Exception as e:
        return e


def _level_barcode(path, level, cfg, clusters) -> tuple[Barcode, str]:
    s = parse_structure_file(path)
    sc = build_supercell(s, cfg.supercell_edge)
    coords = sc.cart_coords
    ids = np.array([clusters[z] for z in sc.numbers], dtype=np.int64)
    if level == "structural":
        f = alpha_filtration(coords, max_value=cfg.max_filtration)
        return reduce_filtration(f), "structural"
    if level.startswith("elemental:"):
        k = int(level.split(":", 1)[1])
        if not 0 <= k < N_CLUSTERS:
            raise ValueError(f"cluster id {k} out of range")
        pts = coords[ids == k]
        if len(pts) == 0:
            click.echo(f"warning: cluster {k} absent, empty barcode", err=True)
            return Barcode([], max_dim=2), f"elemental:{k}"
        f = alpha_filtration(pts, max_value=cfg.max_filtration)
        return reduce_filtration(f), f"elemental:{k}"
    if level.startswith("interaction:"):
        i, j = (int(x) for x in level.split(":", 1)[1].split(","))
        pair_index(i, j)  # validates the ordered pair
        ci, cj = coords[ids == i], coords[ids == j]
        title = f"interaction:{i},{j}"
        if len(ci) == 0 or len(cj) == 0:
            click.echo(f"warning: cluster {i if len(ci) == 0 else j} absent, "
                       "empty barcode", err=True)
            return Barcode([], max_dim=1), title
        f = interaction_filtration(ci, cj, mode=cfg.mode,
                                   max_value=cfg.max_filtration)
        return pih(f), title
    raise ValueError(f"unknown level {level!r}")


def barcode_svg(b: Barcode, title: str, max_value: float = 25.0,
                n_dims: int | None = None) -> str:
    """Static SVG rendering: one panel per homology dimension, bars as
    horizontal segments; infinite deaths are drawn to the right edge."""
    dims = list(range(n_dims if n_dims is not None else b.max_dim + 1))
    width, pad, row_h, panel_gap = 640.0, 40.0, 6.0, 30.0
    span = width - 2 * pad

    def x_of(v):
        v = min(float(v), max_value)
        return pad + span * v / max_value

    parts = []
    y = pad
    for d in dims:
        bars = b.in_dim(d)
        parts.append(f'<g id="dim{d}">')
        parts.append(f'<text x="{pad}" y="{y - 8:.1f}" font-size="12">'
                     f'{title} H{d} ({len(bars)} bars)</text>')
        parts.append(f'<line x1="{pad}" y1="{y:.1f}" x2="{width - pad}" '
                     f'y2="{y:.1f}" stroke="#888" stroke-width="0.5"/>')
        yy = y + row_h
        for bar in bars:
            x1, x2 = x_of(bar.birth), x_of(bar.death)
            if x2 - x1 < 0.5:
                x2 = x1 + 0.5
            parts.append(f'<line x1="{x1:.2f}" y1="{yy:.1f}" x2="{x2:.2f}" '
                         f'y2="{yy:.1f}" stroke="#1f5fa8" stroke-width="3"/>')
            yy += row_h
        parts.append('</g>')
        y = yy + panel_gap
    height = y + pad
    body = "\n".join(parts)
    return ('<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
            f'height="{height:.0f}">\n{body}\n</svg>\n')


@main.command("barcode")
@click.argument("input", type=click.Path(exists=True))
@click.option("--level", default="structural", show_default=True,
              help="structural | elemental:k | interaction:i,j")
@click.option("--format", "fmt", default="csv", show_default=True,
              type=click.Choice(["csv", "svg"]))
@click.option("--out", default="-", show_default=True,
              help="Output path, or - for standard output.")
@click.option("--supercell-edge", default=64.0, show_default=True, type=float)
@click.option("--mode", default="centered", show_default=True,
              type=click.Choice(["centered", "symmetric"]))
@click.option("--clusters", default=None)
def cmd_barcode(input, level, fmt, out, supercell_edge, mode, clusters):
    """Emit the barcode of one structure at a chosen level."""
    try:
        cfg = RunConfig(supercell_edge=supercell_edge, mode=mode)
        table = _load_clusters(clusters)
        b, title = _level_barcode(input, level, cfg, table)
    except (ValueError, IttopoError) as e:
        click.echo(f"bad selector or configuration: {e}", err=True)
        sys.exit(2)
    n_dims = 2 if title.startswith("interaction") else 3
    text = b.to_csv(header=title) if fmt == "csv" else barcode_svg(
        b, title, cfg.max_filtration, n_dims)
    if out == "-":
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)


@main.command("cluster")
@click.argument("corpus", type=click.Path(exists=True, file_okay=False))
@click.option("--lambda", "lam", default=0.5, show_default=True, type=float,
              help="Chemical-similarity weight in the affinity blend.")
@click.option("--out", default="clusters.tsv", show_default=True)
def cmd_cluster(corpus, lam, out):
    """Compute a 7-cluster element table from a structure corpus."""
    structures = []
    for p in _collect_inputs([corpus]):
        try:
            structures.append(parse_structure_file(p))
        except (IttopoError, ValueError) as e:
            click.echo(f"skipping {p}: {e}", err=True)
    try:
        cooc = cooccurrence_matrix(s.element_set() for s in structures)
        table = compute_clusters(cooc, standardized_feature_table(), lam=lam)
    except (InsufficientElements, IttopoError) as e:
        click.echo(f"cannot cluster: {e}", err=True)
        sys.exit(2)
    Path(out).write_text(table.to_text())
    click.echo(f"wrote {out}")


@main.command("stats")
@click.argument("corpus", type=click.Path(exists=True, file_okay=False))
@click.option("--out", default="stats", show_default=True,
              help="Directory for the emitted CSV files.")
@click.option("--clusters", default=None)
def cmd_stats(corpus, out, clusters):
    """Corpus statistics: unique-atom histogram, cluster co-occurrence
    percentages and the distinct-cluster fraction."""
    try:
        table = _load_clusters(clusters)
        files = _collect_inputs([corpus])
    except (IttopoError, ValueError, OSError) as e:
        click.echo(f"unreadable corpus: {e}", err=True)
        sys.exit(1)
    structures = []
    for p in files:
        try:
            structures.append(parse_structure_file(p))
        except (IttopoError, ValueError) as e:
            click.echo(f"skipping {p}: {e}", err=True)
    if not structures:
        click.echo("unreadable corpus: no readable structures", err=True)
        sys.exit(1)

    hist = {}
    cooc = np.zeros((N_CLUSTERS, N_CLUSTERS), dtype=np.int64)
    distinct = 0
    for s in structures:
        g = unique_atoms(s, clusters=table)
        hist[len(g.nodes)] = hist.get(len(g.nodes), 0) + 1
        present = sorted({table[z] for z in s.element_set()})
        for a in present:
            for b in present:
                cooc[a, b] += 1
        if len(present) == len(s.element_set()):
            distinct += 1

    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    lines = ["unique_atoms,count"]
    lines += [f"{k},{hist[k]}" for k in sorted(hist)]
    (outdir / "unique_atom_histogram.csv").write_text("\n".join(lines) + "\n")
    pct = 100.0 * cooc / len(structures)
    lines = ["," + ",".join(str(k) for k in range(N_CLUSTERS))]
    for a in range(N_CLUSTERS):
        lines.append(f"{a}," + ",".join(f"{pct[a, b]:.2f}"
                                        for b in range(N_CLUSTERS)))
    (outdir / "cluster_cooccurrence.csv").write_text("\n".join(lines) + "\n")
    frac = distinct / len(structures)
    (outdir / "distinct_cluster_fraction.txt").write_text(f"{frac:.4f}\n")
    click.echo(f"{len(structures)} structures, distinct-cluster "
               f"fraction {frac:.4f}")


if __name__ == "__main__":
    main()
