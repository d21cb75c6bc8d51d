"""Acceptance suite. Each test covers one release criterion and prints one
PASS/FAIL line; timing budgets are enforced inside the tests."""
import itertools
import os
import time
from contextlib import contextmanager

import numpy as np
import pytest
from click.testing import CliRunner

from ittopo.featurize import RunConfig, featurize_structure, write_bundle
from ittopo.filtration import alpha_filtration, rips_filtration
from ittopo.interaction import (interaction_boundary,
                                interaction_filtration, pih)
from ittopo.persistence import (betti_curve, betti_from_cells, reduce)
from ittopo.structure import Lattice, Structure, make_site
from tests.conftest import random_structure


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"\n[FAIL] {name}")
        raise
    print(f"\n[PASS] {name}")


def grid_scales(count=250, start=0.0, step=0.1):
    return start + step * np.arange(count)


def oracle_curve(values_sorted, cells_of_prefix, p, scales):
    """Betti numbers at each scale via dense GF(2) rank, deduplicated over
    scales that see the same filtration prefix."""
    prefixes = np.searchsorted(values_sorted, scales, side="right")
    out = np.zeros(len(scales), dtype=np.int64)
    cache = {}
    for k, n in enumerate(prefixes):
        if n not in cache:
            cache[n] = betti_from_cells(cells_of_prefix(int(n)), p)
        out[k] = cache[n]
    return out


def classical_cells(f):
    def cells_of_prefix(n):
        cells = {}
        for row, d in zip(f.verts[:n], f.dims[:n]):
            cells.setdefault(int(d), []).append(
                tuple(int(x) for x in row[:d + 1]))
        return cells
    return cells_of_prefix


def test_feature_shape_constants():
    with criterion("feature-shape constants (750 / 7x750 / 42x500 / <=256, "
                   "< 1 s on a 50-atom toy)"):
        syms = ["H"] * 14 + ["C"] * 16 + ["N"] * 4 + ["O"] * 12 + ["Zn"] * 4
        s = random_structure(100, syms=syms, edge=12.0)
        assert len(s.sites) == 50
        t0 = time.perf_counter()
        b = featurize_structure(s, config=RunConfig(supercell_edge=12.0))
        dt = time.perf_counter() - t0
        assert b.structural.shape == (750,)
        assert b.elemental.shape == (7, 750)
        assert b.interaction.shape == (42, 500)
        assert len(b.atomic.nodes) <= 256
        assert dt < 1.0, f"took {dt:.2f}s"


def test_classical_oracle_equivalence():
    with criterion("classical oracle equivalence (200 clouds, alpha + Rips, "
                   "all 250 scales, dims 0-2, < 60 s)"):
        t0 = time.perf_counter()
        rng = np.random.default_rng(1000)
        scales = grid_scales()
        for trial in range(200):
            pts = rng.uniform(0, 1, (int(rng.integers(4, 13)), 3))
            f = (alpha_filtration(pts) if trial % 2 == 0
                 else rips_filtration(pts, max_value=25.0))
            curve = betti_curve(reduce(f)).values
            cells_of = classical_cells(f)
            for p in (0, 1, 2):
                expected = oracle_curve(f.values, cells_of, p, scales)
                assert np.array_equal(curve[:, p], expected), (trial, p)
        dt = time.perf_counter() - t0
        assert dt < 60.0, f"took {dt:.1f}s"


def interaction_cells(f):
    keys = [s.key for s in f.simplices]
    dims = [s.dim for s in f.simplices]

    def cells_of_prefix(n):
        cells = {}
        for key, d in zip(keys[:n], dims[:n]):
            cells.setdefault(d, []).append(key)
        return cells
    return cells_of_prefix


def interaction_betti_from_cells(cells, p):
    n_p = len(cells.get(p, []))
    if n_p == 0:
        return 0
    index_p = {k: i for i, k in enumerate(cells.get(p, []))}
    index_pm1 = {k: i for i, k in enumerate(cells.get(p - 1, []))}

    from ittopo.persistence import _gf2_rank

    def rank_of(d, lower_index):
        rows = []
        for key in cells.get(d, []):
            mask = 0
            for bk in _boundary_keys_of(key):
                mask ^= 1 << lower_index[bk]
            rows.append(mask)
        return _gf2_rank(rows)

    rank_dp = rank_of(p, index_pm1) if p > 0 else 0
    return n_p - rank_dp - rank_of(p + 1, index_p)


def _boundary_keys_of(key):
    lv, rv = key
    out = []
    if len(lv) > 1:
        for face in itertools.combinations(lv, len(lv) - 1):
            out.append((face, rv))
    if len(rv) > 1:
        for face in itertools.combinations(rv, len(rv) - 1):
            out.append((lv, face))
    return out


def test_interaction_oracle_equivalence():
    with criterion("interaction oracle equivalence (100 configs, centered + "
                   "symmetric, all scales, dims 0-1, < 120 s)"):
        t0 = time.perf_counter()
        rng = np.random.default_rng(2000)
        scales = grid_scales()
        for trial in range(100):
            mode = "centered" if trial % 2 == 0 else "symmetric"
            c = rng.uniform(0, 2, (int(rng.integers(1, 9)), 3))
            p = rng.uniform(0, 2, (int(rng.integers(2, 9)), 3))
            f = interaction_filtration(c, p, mode=mode)
            curve = betti_curve(pih(f), dims=(0, 1)).values
            values = np.array([s.value for s in f.simplices])
            cells_of = interaction_cells(f)
            for pdim in (0, 1):
                prefixes = np.searchsorted(values, scales, side="right")
                cache = {}
                for k, n in enumerate(prefixes):
                    if n not in cache:
                        cache[n] = interaction_betti_from_cells(
                            cells_of(int(n)), pdim)
                    assert curve[k, pdim] == cache[n], (trial, mode, k, pdim)
        dt = time.perf_counter() - t0
        assert dt < 120.0, f"took {dt:.1f}s"


def test_boundary_squared_zero():
    with criterion("d^2 = 0 on every generator of 100 random interaction "
                   "filtrations"):
        rng = np.random.default_rng(3000)
        violations = 0
        for trial in range(100):
            mode = "centered" if trial % 2 == 0 else "symmetric"
            c = rng.uniform(0, 2, (int(rng.integers(1, 6)), 3))
            p = rng.uniform(0, 2, (int(rng.integers(2, 7)), 3))
            f = interaction_filtration(c, p, mode=mode)
            for s in f.simplices:
                chain = {}
                for t in interaction_boundary(s, f):
                    for u in interaction_boundary(t, f):
                        chain[u.key] = chain.get(u.key, 0) ^ 1
                if any(chain.values()):
                    violations += 1
        assert violations == 0


def test_analytic_bars():
    with criterion("analytic bars (triangle H1 [0.5, 0.5773503); two-point "
                   "interaction H0 [0.5, inf) + [0.5, 1.0)) within 1e-6"):
        tri = np.array([[0, 0, 0], [1, 0, 0], [0.5, np.sqrt(3) / 2, 0]])
        h1 = reduce(alpha_filtration(tri)).in_dim(1)
        assert len(h1) == 1
        assert abs(h1[0].birth - 0.5) < 1e-6
        assert abs(h1[0].death - 0.5773503) < 1e-6

        c = np.array([[0.0, 0, 0]])
        p = np.array([[1.0, 0, 0], [-1.0, 0, 0]])
        h0 = pih(interaction_filtration(c, p)).in_dim(0)
        assert len(h0) == 2
        inf_bars = [b for b in h0 if not b.finite]
        fin_bars = [b for b in h0 if b.finite]
        assert len(inf_bars) == 1 and len(fin_bars) == 1
        assert abs(inf_bars[0].birth - 0.5) < 1e-6
        assert abs(fin_bars[0].birth - 0.5) < 1e-6
        assert abs(fin_bars[0].death - 1.0) < 1e-6


FIXTURE_COMPOSITIONS = [
    ["C"] * 5 + ["O"] * 3 + ["H"] * 4 + ["Zn"] + ["N"] * 2,
    ["C"] * 4 + ["H"] * 6 + ["O"] * 2,
    ["Zn"] * 2 + ["O"] * 6 + ["C"] * 4,
    ["N"] * 3 + ["C"] * 5 + ["H"] * 3 + ["O"] * 2,
    ["C"] * 6 + ["H"] * 2 + ["O"] * 2 + ["N"] * 2 + ["Zn"],
]


def bundle_files(s, cfg, tmp_path, tag):
    b = featurize_structure(s, config=cfg)
    d = tmp_path / tag
    write_bundle(b, d)
    return {f.name: f.read_bytes() for f in d.iterdir()}


def test_invariance_suite(tmp_path):
    with criterion("invariance (5 fixtures x 20 rigid motions + 20 "
                   "permutations, bit-identical bundles)"):
        from scipy.stats import special_ortho_group
        cfg = RunConfig(supercell_edge=9.0)
        for fi, syms in enumerate(FIXTURE_COMPOSITIONS):
            rng = np.random.default_rng(500 + fi)
            lat = Lattice(np.eye(3) * 9.0)
            fracs = [rng.uniform(0.05, 0.95, 3) for _ in syms]
            base_s = Structure(
                lat, [make_site(lat, sm, frac=f)
                      for sm, f in zip(syms, fracs)], source_id=f"fix{fi}")
            base = bundle_files(base_s, cfg, tmp_path, f"base{fi}")
            for t in range(20):
                R = special_ortho_group.rvs(3, random_state=100 * fi + t)
                lat2 = Lattice(lat.matrix @ R.T)
                shift = rng.uniform(-0.04, 0.04, 3)  # stays off the walls
                s2 = Structure(
                    lat2, [make_site(lat2, sm, frac=f + shift)
                           for sm, f in zip(syms, fracs)],
                    source_id=f"fix{fi}")
                assert bundle_files(s2, cfg, tmp_path,
                                    f"r{fi}_{t}") == base, (fi, t)
            for t in range(20):
                order = rng.permutation(len(syms))
                s2 = Structure(
                    lat, [make_site(lat, syms[i], frac=fracs[i])
                          for i in order], source_id=f"fix{fi}")
                assert bundle_files(s2, cfg, tmp_path,
                                    f"p{fi}_{t}") == base, (fi, t)


def test_parser_fixture_suite():
    with criterion("parser fixtures (>= 10 hand-written CIF/XYZ cases incl. "
                   "symmetry, esd, malformed)"):
        from ittopo.errors import (BadNumber, BadSymop, CountMismatch,
                                   MissingAtoms, MissingCell, MissingLattice)
        from ittopo.io import parse_cif, parse_xyz
        from tests import test_io as fixtures

        good = {fixtures.F1: 1, fixtures.F2: 1, fixtures.F3: 2,
                fixtures.F4: 1, fixtures.F5: 2, fixtures.F6: 1}
        for text, n_sites in good.items():
            import warnings
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                assert len(parse_cif(text).sites) == n_sites
        bad = {fixtures.F7: MissingCell, fixtures.F8: MissingAtoms,
               fixtures.F9: BadSymop, fixtures.F10: BadNumber}
        for text, exc in bad.items():
            with pytest.raises(exc):
                parse_cif(text)
        assert len(parse_xyz(fixtures.F11).sites) == 2
        with pytest.raises(MissingLattice):
            parse_xyz(fixtures.F12)
        with pytest.raises(CountMismatch):
            parse_xyz(fixtures.F13)
        assert len(good) + len(bad) + 3 >= 10


@pytest.mark.slow
def test_performance_smoke(tmp_path):
    with criterion("performance smoke (10,000-atom supercell bundle "
                   "< 10 min single-threaded; --jobs 1 == --jobs 8)"):
        syms = ["H"] * 8 + ["C"] * 6 + ["O"] * 4 + ["Zn"] * 2
        s = random_structure(42, syms=syms, edge=8.0, lo=0.0, hi=1.0,
                             source_id="perf")
        t0 = time.perf_counter()
        b = featurize_structure(s, config=RunConfig(supercell_edge=64.0))
        dt = time.perf_counter() - t0
        n_atoms = len(syms) * 8 ** 3
        assert n_atoms >= 10000
        b.validate()
        assert dt < 600.0, f"took {dt:.0f}s"

        from ittopo.cli import main
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        for i in range(3):
            (corpus / f"s{i}.extxyz").write_text(
                random_structure(60 + i, edge=9.0).to_extxyz())
        runner = CliRunner()
        outs = {}
        for jobs in (1, 8):
            out = tmp_path / f"jobs{jobs}"
            r = runner.invoke(main, ["featurize", str(corpus), "--out",
                                     str(out), "--supercell-edge", "9",
                                     "--jobs", str(jobs)],
                              catch_exceptions=False)
            assert r.exit_code == 0, r.output
            outs[jobs] = {
                str(f.relative_to(out)): f.read_bytes()
                for f in sorted(out.rglob("*")) if f.is_file()}
        assert outs[1] == outs[8]
