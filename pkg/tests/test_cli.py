import json
import xml.dom.minidom

import numpy as np
import pytest
from click.testing import CliRunner

from ittopo.cli import main
from ittopo.clusters import default_clusters

CELL = """\
_cell_length_a 9.0
_cell_length_b 9.0
_cell_length_c 9.0
_cell_angle_alpha 90
_cell_angle_beta 90
_cell_angle_gamma 90
loop_
_atom_site_label
_atom_site_fract_x
_atom_site_fract_y
_atom_site_fract_z
"""


def cif(atom_rows, name="x"):
    return f"data_{name}\n" + CELL + "\n".join(atom_rows) + "\n"


@pytest.fixture
def corpus(tmp_path):
    d = tmp_path / "corpus"
    d.mkdir()
    rng = np.random.default_rng(0)
    syms = ["C", "O", "H", "Zn", "N", "C", "O", "H"]
    for n in range(3):
        rows = [f"{s}{i} {rng.uniform(0.1, 0.9):.4f} "
                f"{rng.uniform(0.1, 0.9):.4f} {rng.uniform(0.1, 0.9):.4f}"
                for i, s in enumerate(syms)]
        (d / f"s{n}.cif").write_text(cif(rows, name=f"s{n}"))
    return d


def run(*args, env=None):
    return CliRunner().invoke(main, list(args), env=env,
                              catch_exceptions=False)


def test_featurize_single(tmp_path, corpus):
    out = tmp_path / "out"
    r = run("featurize", str(corpus / "s0.cif"), "--out", str(out),
            "--supercell-edge", "9")
    assert r.exit_code == 0, r.output
    assert (out / "s0" / "manifest.json").exists()
    assert "8 atoms" in r.output


def test_featurize_batch_partial_failure(tmp_path, corpus):
    (corpus / "bad.cif").write_text("data_bad\n_cell_length_a 1\n")
    r = run("featurize", str(corpus), "--out", str(tmp_path / "o"),
            "--supercell-edge", "9")
    assert r.exit_code == 3
    assert "bad.cif" in r.output
    for n in range(3):
        assert (tmp_path / "o" / f"s{n}" / "structural.f32").exists()


def test_featurize_single_parse_error(tmp_path):
    bad = tmp_path / "bad.cif"
    bad.write_text("data_bad\n")
    r = run("featurize", str(bad), "--out", str(tmp_path / "o"))
    assert r.exit_code == 1


def test_featurize_invalid_config(tmp_path, corpus):
    r = run("featurize", str(corpus / "s0.cif"), "--grid-count", "0",
            "--out", str(tmp_path / "o"))
    assert r.exit_code == 2


def test_featurize_jobs_bit_identical(tmp_path, corpus):
    a, b = tmp_path / "a", tmp_path / "b"
    r1 = run("featurize", str(corpus), "--out", str(a),
             "--supercell-edge", "9", "--jobs", "1")
    r2 = run("featurize", str(corpus), "--out", str(b),
             "--supercell-edge", "9", "--jobs", "4")
    assert r1.exit_code == 0 and r2.exit_code == 0
    for n in range(3):
        for f in ("manifest.json", "structural.f32", "elemental.f32",
                  "interaction.f32", "atoms.json"):
            assert (a / f"s{n}" / f).read_bytes() == \
                (b / f"s{n}" / f).read_bytes()


def test_barcode_single_point_structural(tmp_path):
    p = tmp_path / "one.cif"
    p.write_text(cif(["C0 0.5 0.5 0.5"], name="one"))
    r = run("barcode", str(p), "--level", "structural",
            "--supercell-edge", "1")
    assert r.exit_code == 0
    lines = [ln for ln in r.output.splitlines()
             if ln and not ln.startswith("#") and not ln.startswith("dim")]
    assert lines == ["0,0.0,inf"]


def test_barcode_bad_selector(tmp_path, corpus):
    r = run("barcode", str(corpus / "s0.cif"), "--level", "interaction:3,3")
    assert r.exit_code == 2
    r = run("barcode", str(corpus / "s0.cif"), "--level", "nonsense")
    assert r.exit_code == 2


def test_barcode_absent_cluster_warns(tmp_path, corpus):
    r = run("barcode", str(corpus / "s0.cif"), "--level", "interaction:1,5",
            "--supercell-edge", "9")
    assert r.exit_code == 0
    assert "absent" in r.output


def test_barcode_svg_well_formed(tmp_path, corpus):
    out = tmp_path / "bc.svg"
    r = run("barcode", str(corpus / "s0.cif"), "--level", "elemental:1",
            "--format", "svg", "--out", str(out), "--supercell-edge", "9")
    assert r.exit_code == 0
    doc = xml.dom.minidom.parse(str(out))
    assert doc.documentElement.tagName == "svg"
    panels = [g for g in doc.getElementsByTagName("g")]
    assert len(panels) == 3  # one per homology dimension


def test_cluster_too_few_elements(tmp_path):
    d = tmp_path / "tiny"
    d.mkdir()
    (d / "a.cif").write_text(cif(["C0 0.2 0.2 0.2", "H1 0.4 0.4 0.4"]))
    r = run("cluster", str(d), "--out", str(tmp_path / "t.tsv"))
    assert r.exit_code == 2


def test_cluster_deterministic(tmp_path):
    d = tmp_path / "c7"
    d.mkdir()
    rows = ["H0 0.1 0.1 0.1", "C1 0.3 0.1 0.1", "N2 0.5 0.1 0.1",
            "O3 0.7 0.1 0.1", "Zn4 0.1 0.4 0.1", "Si5 0.3 0.4 0.1",
            "Fe6 0.5 0.4 0.1"]
    (d / "a.cif").write_text(cif(rows))
    t1, t2 = tmp_path / "t1.tsv", tmp_path / "t2.tsv"
    assert run("cluster", str(d), "--out", str(t1)).exit_code == 0
    assert run("cluster", str(d), "--out", str(t2)).exit_code == 0
    assert t1.read_bytes() == t2.read_bytes()


def test_stats_outputs(tmp_path):
    d = tmp_path / "one"
    d.mkdir()
    (d / "a.cif").write_text(cif(["C0 0.5 0.5 0.5"]))
    out = tmp_path / "stats"
    r = run("stats", str(d), "--out", str(out))
    assert r.exit_code == 0
    hist = (out / "unique_atom_histogram.csv").read_text().splitlines()
    assert hist == ["unique_atoms,count", "1,1"]
    frac = (out / "distinct_cluster_fraction.txt").read_text().strip()
    assert frac == "1.0000"


def test_stats_cooccurrence_hand_count(tmp_path):
    d = tmp_path / "two"
    d.mkdir()
    (d / "a.cif").write_text(cif(["C0 0.2 0.2 0.2", "O1 0.5 0.5 0.5"], "a"))
    (d / "b.cif").write_text(cif(["C0 0.2 0.2 0.2", "H1 0.5 0.5 0.5"], "b"))
    out = tmp_path / "stats"
    assert run("stats", str(d), "--out", str(out)).exit_code == 0
    lines = (out / "cluster_cooccurrence.csv").read_text().splitlines()
    # row for cluster 1 (C): with cluster 0 (H) 50%, itself 100%, cluster 3 (O) 50%
    row1 = lines[2].split(",")
    assert row1[0] == "1"
    assert row1[1] == "50.00" and row1[2] == "100.00" and row1[4] == "50.00"


def test_stats_unreadable_corpus(tmp_path):
    d = tmp_path / "junk"
    d.mkdir()
    (d / "a.cif").write_text("data_a\n")
    r = run("stats", str(d), "--out", str(tmp_path / "s"))
    assert r.exit_code == 1


def test_itt_clusters_env(tmp_path, corpus):
    table = default_clusters()
    path = tmp_path / "table.tsv"
    path.write_text(table.to_text())
    out = tmp_path / "env_out"
    r = run("featurize", str(corpus / "s0.cif"), "--out", str(out),
            "--supercell-edge", "9", env={"ITT_CLUSTERS": str(path)})
    assert r.exit_code == 0
    meta = json.loads((out / "s0" / "manifest.json").read_text())["meta"]
    assert meta["cluster_table"] == table.provenance
