import numpy as np
import pytest

from ittopo.structure import Lattice, Structure, make_site


def random_structure(seed, syms=None, edge=9.0, lo=0.05, hi=0.95,
                     source_id=None):
    """Cubic-cell structure with uniformly random interior fractional
    coordinates (kept off the cell boundary so wrapping is not in play)."""
    rng = np.random.default_rng(seed)
    if syms is None:
        syms = ["C"] * 5 + ["O"] * 3 + ["H"] * 4 + ["Zn"] * 1 + ["N"] * 2
    lat = Lattice(np.eye(3) * edge)
    sites = [make_site(lat, s, frac=rng.uniform(lo, hi, 3)) for s in syms]
    return Structure(lat, sites,
                     source_id=source_id or f"random-{seed}")


@pytest.fixture
def toy_structure():
    return random_structure(7)
