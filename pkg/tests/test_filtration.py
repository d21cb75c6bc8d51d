import numpy as np
import pytest

from ittopo.errors import TooManyPoints
from ittopo.filtration import (Filtration, alpha_filtration, delaunay3d,
                               rips_filtration)


def test_alpha_values_monotone_random():
    rng = np.random.default_rng(3)
    for trial in range(10):
        pts = rng.uniform(0, 2, (int(rng.integers(4, 25)), 3))
        f = alpha_filtration(pts)
        f.validate()
        idx = f.index_of()
        import itertools
        for s in f.simplices:
            if s.dim == 0:
                assert s.value == 0.0
                continue
            for face in itertools.combinations(s.vertices, s.dim):
                assert f.values[idx[face]] <= s.value + 1e-12


def test_alpha_triangle_circumradius():
    pts = np.array([[0, 0, 0], [1, 0, 0], [0.5, np.sqrt(3) / 2, 0]])
    f = alpha_filtration(pts)
    tri = [s for s in f.simplices if s.dim == 2]
    assert len(tri) == 1
    assert tri[0].value == pytest.approx(1 / np.sqrt(3), abs=1e-6)
    edges = [s for s in f.simplices if s.dim == 1]
    assert all(e.value == pytest.approx(0.5, abs=1e-6) for e in edges)


def test_alpha_degenerate_collinear():
    pts = np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0], [3, 0, 0]], float)
    f = alpha_filtration(pts)
    dims = [s.dim for s in f.simplices]
    assert max(dims) == 1
    assert dims.count(1) == 3  # chain of consecutive edges


def test_alpha_single_point():
    f = alpha_filtration(np.zeros((1, 3)))
    assert len(f) == 1
    assert f.simplices[0].dim == 0


def test_alpha_coplanar_square():
    pts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], float)
    f = alpha_filtration(pts)
    assert max(s.dim for s in f.simplices) == 2


def test_rips_values_are_half_diameters():
    pts = np.array([[0, 0, 0], [1, 0, 0], [0, 2, 0]], float)
    f = rips_filtration(pts, max_value=5.0)
    edges = {s.vertices: s.value for s in f.simplices if s.dim == 1}
    assert edges[(0, 1)] == pytest.approx(0.5)
    assert edges[(0, 2)] == pytest.approx(1.0)
    tri = [s for s in f.simplices if s.dim == 2][0]
    assert tri.value == pytest.approx(np.sqrt(5) / 2)


def test_rips_point_cap():
    pts = np.random.default_rng(0).uniform(0, 1, (80, 3))
    with pytest.raises(TooManyPoints):
        rips_filtration(pts, max_value=2.0)
    f = rips_filtration(pts[:20], max_value=0.4)
    f.validate()


def test_filtration_order_and_csv_round_trip():
    pts = np.random.default_rng(1).uniform(0, 2, (8, 3))
    f = alpha_filtration(pts)
    vals = f.values
    assert np.all(np.diff(vals) >= -1e-15)
    text = f.to_csv()
    assert text.splitlines()[0] == "dim,v0,v1,v2,v3,value"
    assert len(text.splitlines()) == len(f) + 1


def test_validate_rejects_missing_face():
    pts = np.zeros((3, 3))
    # edge (0, 2) present but vertex 2 missing
    verts = np.array([[0, -1, -1, -1], [1, -1, -1, -1],
                      [0, 1, -1, -1], [0, 2, -1, -1]], dtype=np.int64)
    dims = np.array([0, 0, 1, 1])
    vals = np.array([0.0, 0.0, 0.5, 0.5])
    f = Filtration(pts, verts, dims, vals, kind="alpha", max_value=25.0)
    with pytest.raises(AssertionError):
        f.validate()


def test_delaunay_jitter_determinism():
    pts = np.random.default_rng(2).uniform(0, 1, (30, 3))
    a = alpha_filtration(pts)
    b = alpha_filtration(pts)
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.verts, b.verts)
