"""Periodic-table data for elements 1..103.

Provides symbols, group/block assignment and the six-feature table used by
the element-clustering stage: atomic number, group, block (one-hot),
electronegativity, valence-electron count, atomic radius.
"""
from __future__ import annotations

import numpy as np

from .errors import UnknownElement

MAX_Z = 103

SYMBOLS = [
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne",
    "Na", "Mg", "Al", "Si", "P", "S", "Cl", "Ar", "K", "Ca",
    "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn",
    "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr",
    "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In", "Sn",
    "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
    "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb",
    "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg",
    "Tl", "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th",
    "Pa", "U", "Np", "Pu", "Am", "Cm", "Bk", "Cf", "Es", "Fm",
    "Md", "No", "Lr",
]

Z_OF = {s: i + 1 for i, s in enumerate(SYMBOLS)}

_NOBLE = (2, 10, 18, 36, 54, 86)

# Pauling electronegativities; noble gases without Pauling values carry
# Allen-scale stand-ins so every element has a finite entry.
_ELECTRONEG = {
    "H": 2.20, "He": 4.16, "Li": 0.98, "Be": 1.57, "B": 2.04, "C": 2.55,
    "N": 3.04, "O": 3.44, "F": 3.98, "Ne": 4.79, "Na": 0.93, "Mg": 1.31,
    "Al": 1.61, "Si": 1.90, "P": 2.19, "S": 2.58, "Cl": 3.16, "Ar": 3.24,
    "K": 0.82, "Ca": 1.00, "Sc": 1.36, "Ti": 1.54, "V": 1.63, "Cr": 1.66,
    "Mn": 1.55, "Fe": 1.83, "Co": 1.88, "Ni": 1.91, "Cu": 1.90, "Zn": 1.65,
    "Ga": 1.81, "Ge": 2.01, "As": 2.18, "Se": 2.55, "Br": 2.96, "Kr": 3.00,
    "Rb": 0.82, "Sr": 0.95, "Y": 1.22, "Zr": 1.33, "Nb": 1.60, "Mo": 2.16,
    "Tc": 1.90, "Ru": 2.20, "Rh": 2.28, "Pd": 2.20, "Ag": 1.93, "Cd": 1.69,
    "In": 1.78, "Sn": 1.96, "Sb": 2.05, "Te": 2.10, "I": 2.66, "Xe": 2.60,
    "Cs": 0.79, "Ba": 0.89, "La": 1.10, "Ce": 1.12, "Pr": 1.13, "Nd": 1.14,
    "Pm": 1.16, "Sm": 1.17, "Eu": 1.20, "Gd": 1.20, "Tb": 1.21, "Dy": 1.22, "Ho": 1.23, "Er": 1.24,
    "Tm": 1.25, "Yb": 1.10, "Lu": 1.27, "Hf": 1.30, "Ta": 1.50, "W": 2.36,
    "Re": 1.90, "Os": 2.20, "Ir": 2.20, "Pt": 2.28, "Au": 2.54, "Hg": 2.00,
    "Tl": 1.62, "Pb": 2.33, "Bi": 2.02, "Po": 2.00, "At": 2.20, "Rn": 2.20,
    "Fr": 0.70, "Ra": 0.90, "Ac": 1.10, "Th": 1.30, "Pa": 1.50, "U": 1.38,
    "Np": 1.36, "Pu": 1.28, "Am": 1.13, "Cm": 1.28, "Bk": 1.30, "Cf": 1.30,
    "Es": 1.30, "Fm": 1.30, "Md": 1.30, "No": 1.30, "Lr": 1.30,
}

# Covalent radii in pm (Cordero-style single-bond values).
_RADIUS = {
    "H": 31, "He": 28, "Li": 128, "Be": 96, "B": 84, "C": 76, "N": 71,
    "O": 66, "F": 57, "Ne": 58, "Na": 166, "Mg": 141, "Al": 121, "Si": 111,
    "P": 107, "S": 105, "Cl": 102, "Ar": 106, "K": 203, "Ca": 176,
    "Sc": 170, "Ti": 160, "V": 153, "Cr": 139, "Mn": 139, "Fe": 132,
    "Co": 126, "Ni": 124, "Cu": 132, "Zn": 122, "Ga": 122, "Ge": 120,
    "As": 119, "Se": 120, "Br": 120, "Kr": 116, "Rb": 220, "Sr": 195,
    "Y": 190, "Zr": 175, "Nb": 164, "Mo": 154, "Tc": 147, "Ru": 146,
    "Rh": 142, "Pd": 139, "Ag": 145, "Cd": 144, "In": 142, "Sn": 139,
    "Sb": 139, "Te": 138, "I": 139, "Xe": 140, "Cs": 244, "Ba": 215,
    "La": 207, "Ce": 204, "Pr": 203, "Nd": 201, "Pm": 199, "Sm": 198,
    "Eu": 198, "Gd": 196, "Tb": 194, "Dy": 192, "Ho": 192, "Er": 189,
    "Tm": 190, "Yb": 187, "Lu": 187, "Hf": 175, "Ta": 170, "W": 162,
    "Re": 151, "Os": 144, "Ir": 141, "Pt": 136, "Au": 136, "Hg": 132,
    "Tl": 145, "Pb": 146, "Bi": 148, "Po": 140, "At": 150, "Rn": 150,
    "Fr": 260, "Ra": 221, "Ac": 215, "Th": 206, "Pa": 200, "U": 196,
    "Np": 190, "Pu": 187, "Am": 180, "Cm": 169, "Bk": 168, "Cf": 168,
    "Es": 165, "Fm": 167, "Md": 173, "No": 176, "Lr": 161,
}

_BLOCKS = ("s", "p", "d", "f")


def group_of(z: int) -> int:
    """IUPAC group 1..18; lanthanides/actinides report group 3."""
    if z == 1:
        return 1
    if z == 2:
        return 18
    prev = max(n for n in _NOBLE if n < z)
    pos = z - prev
    if prev in (2, 10):  # periods 2-3: no d block
        return pos if pos <= 2 else pos + 10
    if prev in (18, 36):  # periods 4-5
        return pos
    # periods 6-7 with the f block inserted after position 2
    if pos <= 2:
        return pos
    if pos <= 17:
        return 3
    return pos - 14


def block_of(z: int) -> str:
    if 57 <= z <= 71 or 89 <= z <= 103:
        return "f"
    g = group_of(z)
    if g <= 2 or z == 2:
        return "s"
    if g >= 13:
        return "p"
    return "d"


def valence_electrons(z: int) -> int:
    """Electron count outside the preceding noble-gas core."""
    prev = max((n for n in _NOBLE if n < z), default=0)
    return z - prev


def zc(element) -> int:
    """Coerce a symbol or atomic number to Z, enforcing the Z<=103 filter."""
    if isinstance(element, str):
        z = Z_OF.get(element)
        if z is None:
            raise UnknownElement(f"unknown element symbol {element!r}")
        return z
    z = int(element)
    if not 1 <= z <= MAX_Z:
        raise UnknownElement(f"atomic number {z} outside 1..{MAX_Z}")
    return z


def symbol_of(z: int) -> str:
    return SYMBOLS[zc(z) - 1]


def raw_feature_table() -> np.ndarray:
    """(103, 9) matrix: Z, group, block one-hot (4), EN, valence, radius."""
    rows = []
    for z in range(1, MAX_Z + 1):
        sym = SYMBOLS[z - 1]
        onehot = [1.0 if block_of(z) == b else 0.0 for b in _BLOCKS]
        rows.append([float(z), float(group_of(z)), *onehot,
                     _ELECTRONEG[sym], float(valence_electrons(z)),
                     float(_RADIUS[sym])])
    return np.array(rows, dtype=np.float64)


def standardized_feature_table() -> np.ndarray:
    """Feature table with each column shifted to zero mean, unit variance."""
    t = raw_feature_table()
    mu = t.mean(axis=0)
    sd = t.std(axis=0)
    sd[sd == 0] = 1.0
    return (t - mu) / sd
