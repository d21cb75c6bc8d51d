"""Compare the compiled persistence kernels against the pure-Python fallback
on a realistic workload (one mid-sized supercell bundle plus the raw kernel
calls). Run directly:

    python3 benchmarks/bench_kernels.py
"""
import os
import subprocess
import sys
import time

BODY = r"""
import time
import numpy as np

from ittopo import _kernels
from ittopo.featurize import RunConfig, featurize_structure
from ittopo.filtration import alpha_filtration
from ittopo.persistence import reduce
from ittopo.structure import Lattice, Structure, make_site

rng = np.random.default_rng(42)
lat = Lattice(np.eye(3) * 8.0)
syms = ["H"] * 8 + ["C"] * 6 + ["O"] * 4 + ["Zn"] * 2
sites = [make_site(lat, s, frac=rng.uniform(0, 1, 3)) for s in syms]
s = Structure(lat, sites, source_id="bench")

t0 = time.perf_counter()
featurize_structure(s, config=RunConfig(supercell_edge=24.0))
t_bundle = time.perf_counter() - t0

pts = rng.uniform(0, 20, (1500, 3))
f = alpha_filtration(pts)
t0 = time.perf_counter()
reduce(f)
t_reduce = time.perf_counter() - t0

print(f"{_kernels.BACKEND},{t_bundle:.3f},{t_reduce:.3f}")
"""


def run(pure: bool) -> tuple[str, float, float]:
    env = dict(os.environ)
    if pure:
        env["ITTOPO_PURE_PYTHON"] = "1"
    else:
        env.pop("ITTOPO_PURE_PYTHON", None)
    out = subprocess.run([sys.executable, "-c", BODY], env=env,
                         capture_output=True, text=True, check=True)
    backend, t_bundle, t_reduce = out.stdout.strip().split(",")
    return backend, float(t_bundle), float(t_reduce)


def main():
    rows = [run(pure=False), run(pure=True)]
    print(f"{'backend':<10} {'bundle_24A_s':>12} {'reduce_1500pt_s':>16}")
    for backend, tb, tr in rows:
        print(f"{backend:<10} {tb:>12.3f} {tr:>16.3f}")
    if rows[0][0] == "compiled":
        print(f"speedup: bundle x{rows[1][1] / rows[0][1]:.1f}, "
              f"reduce x{rows[1][2] / rows[0][2]:.1f}")
    else:
        print("compiled backend unavailable; both runs used the fallback")


if __name__ == "__main__":
    main()
