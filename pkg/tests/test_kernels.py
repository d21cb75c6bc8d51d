"""Equivalence of the compiled extension and the pure-Python fallback."""
import numpy as np
import pytest

from ittopo._kernels import BACKEND, _core_py

try:
    from ittopo._kernels import _core
except ImportError:
    _core = None

needs_compiled = pytest.mark.skipif(_core is None,
                                    reason="compiled extension not built")


def random_edges(rng, n, m):
    edges = rng.integers(0, n, size=(m, 2)).astype(np.int64)
    edges.sort(axis=1)
    return np.ascontiguousarray(edges[edges[:, 0] != edges[:, 1]])


def random_columns(rng, n_rows, n_cols):
    indptr = np.zeros(n_cols + 1, dtype=np.int64)
    ind = []
    for i in range(n_cols):
        k = int(rng.integers(0, min(6, n_rows) + 1))
        ind.extend(np.sort(rng.choice(n_rows, size=k, replace=False)))
        indptr[i + 1] = len(ind)
    return indptr, np.array(ind, dtype=np.int64)


@needs_compiled
def test_uf_pairs_equivalence():
    rng = np.random.default_rng(1)
    for _ in range(30):
        n = int(rng.integers(2, 50))
        edges = random_edges(rng, n, int(rng.integers(0, 100)))
        a = _core.uf_pairs(n, edges)
        b = _core_py.uf_pairs(n, edges)
        for x, y in zip(a, b):
            assert np.array_equal(x, y)


@needs_compiled
def test_reduce_cols_equivalence():
    rng = np.random.default_rng(2)
    for _ in range(30):
        n_rows = int(rng.integers(1, 60))
        n_cols = int(rng.integers(0, 60))
        indptr, indices = random_columns(rng, n_rows, n_cols)
        skip = None
        if rng.random() < 0.5 and n_cols:
            skip = (rng.random(n_cols) < 0.2).astype(np.uint8)
        assert np.array_equal(_core.reduce_cols(n_rows, indptr, indices, skip),
                              _core_py.reduce_cols(n_rows, indptr, indices,
                                                   skip))


@needs_compiled
def test_center_accumulate_equivalence():
    rng = np.random.default_rng(3)
    for _ in range(20):
        count = 40
        n_v = int(rng.integers(1, 15))
        vbin = np.sort(rng.integers(0, count, n_v)).astype(np.int64)
        n_e = int(rng.integers(0, 25))
        re = np.ascontiguousarray(
            random_edges(rng, n_v, n_e))
        # edge bins at least as large as both endpoint bins
        ebin = np.array([max(vbin[a], vbin[b],
                             int(rng.integers(0, count)))
                         for a, b in re], dtype=np.int64)
        order = np.argsort(ebin, kind="stable")
        ebin, re = ebin[order], re[order]
        n_t = int(rng.integers(0, 10)) if len(re) >= 3 else 0
        rows = np.zeros((n_t, 3), dtype=np.int64)
        tbin = np.zeros(n_t, dtype=np.int64)
        for k in range(n_t):
            rows[k] = np.sort(rng.choice(len(re), size=3, replace=False))
            tbin[k] = max(int(ebin[rows[k]].max()),
                          int(rng.integers(0, count)))
        order = np.argsort(tbin, kind="stable")
        tbin, rows = tbin[order], np.ascontiguousarray(rows[order])
        out = []
        for impl in (_core, _core_py):
            h0 = np.zeros(count + 1, dtype=np.int64)
            h1 = np.zeros(count + 1, dtype=np.int64)
            impl.center_accumulate(vbin, ebin, tbin, re, rows, count, h0, h1)
            out.append((h0, h1))
        assert np.array_equal(out[0][0], out[1][0])
        assert np.array_equal(out[0][1], out[1][1])


def test_backend_selection_env(tmp_path):
    import os
    import subprocess
    import sys
    env = dict(os.environ, ITTOPO_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from ittopo import _kernels; "
         "print(_kernels.BACKEND)"], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"
    assert BACKEND in ("compiled", "python")
