"""Crystal-structure file ingestion: a pragmatic CIF subset (cell, symmetry
operations, fractional atom-site loop) and extended XYZ.

Occupancy / disorder tags are ignored with a warning; structures are treated
as deterministic point sets.
"""
from __future__ import annotations

import re
import warnings

import numpy as np

from . import elements
from .errors import (BadNumber, BadSymop, CountMismatch, MissingAtoms,
                     MissingCell, MissingLattice)
from .structure import Lattice, Structure, make_site, merge_close_sites

_NUM_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?(\(\d+\))?$")


def _cif_number(token: str) -> float:
    """Parse a CIF numeric token, stripping any (esd) suffix."""
    token = token.strip()
    m = _NUM_RE.match(token)
    if not m:
        raise BadNumber(f"malformed numeric token {token!r}")
    return float(token[:m.start(3)] if m.group(3) else token)


def _split_fields(line: str):
    """Whitespace split honoring single/double quoted fields."""
    fields = []
    i, n = 0, len(line)
    while i < n:
        if line[i].isspace():
            i += 1
            continue
        if line[i] in "'\"":
            q = line[i]
            j = line.find(q, i + 1)
            if j < 0:
                j = n
            fields.append(line[i + 1:j])
            i = j + 1
        else:
            j = i
            while j < n and not line[j].isspace():
                j += 1
            fields.append(line[i:j])
            i = j
    return fields


def _tokenize_cif(text: str):
    """Yield (tag, value) pairs and ('loop', headers, rows) blocks."""
    lines = []
    in_semicolon = False
    for raw in text.splitlines():
        if raw.startswith(";"):
            in_semicolon = not in_semicolon
            continue
        if in_semicolon:
            continue
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            lines.append(line)
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        if line.lower() == "loop_":
            headers = []
            i += 1
            while i < len(lines) and lines[i].strip().startswith("_"):
                headers.append(lines[i].strip().split()[0])
                i += 1
            rows = []
            while i < len(lines):
                s = lines[i].strip()
                if s.startswith("_") or s.lower().startswith(("loop_", "data_")):
                    break
                rows.append(_split_fields(s))
                i += 1
            yield ("loop", headers, rows)
        else:
            parts = _split_fields(line)
            if parts and parts[0].startswith("_"):
                yield ("tag", parts[0], " ".join(parts[1:]))
            i += 1


_SYMOP_TERM = re.compile(
    r"([+-]?)(\d+(?:\.\d+)?(?:/\d+)?|[xyz])", re.IGNORECASE)


def _parse_symop(op: str):
    """'-x+1/2, y, z' -> (3x3 rotation, translation 3-vector)."""
    parts = [p.strip() for p in op.lower().split(",")]
    if len(parts) != 3:
        raise BadSymop(f"operation {op!r} does not have 3 components")
    rot = np.zeros((3, 3))
    trans = np.zeros(3)
    axes = {"x": 0, "y": 1, "z": 2}
    for row, expr in enumerate(parts):
        consumed = 0
        for m in _SYMOP_TERM.finditer(expr.replace(" ", "")):
            sign = -1.0 if m.group(1) == "-" else 1.0
            term = m.group(2)
            if term in axes:
                rot[row, axes[term]] += sign
            elif "/" in term:
                num, den = term.split("/")
                trans[row] += sign * float(num) / float(den)
            else:
                trans[row] += sign * float(term)
            consumed += len(m.group(0))
        stripped = expr.replace(" ", "")
        if consumed != len(stripped) or not stripped:
            raise BadSymop(f"cannot parse operation component {expr!r}")
    return rot, trans


_ELEMENT_RE = re.compile(r"^([A-Z][a-z]?)")


def _element_from(label: str) -> str:
    m = _ELEMENT_RE.match(label.strip())
    if m and m.group(1) in elements.Z_OF:
        return m.group(1)
    # labels like 'ZN1' or 'zn'
    t = label.strip()
    for k in (2, 1):
        cand = t[:k].capitalize()
        if cand in elements.Z_OF:
            return cand
    raise MissingAtoms(f"cannot derive an element from label {label!r}")


def parse_cif(text: str, source_id: str = "") -> Structure:
    """Parse the supported CIF subset into a Structure.

    Symmetry operations are applied and duplicate images within 0.1 A are
    merged; P1 is assumed when no operations are present."""
    tags = {}
    loops = []
    for item in _tokenize_cif(text):
        if item[0] == "tag":
            tags[item[1].lower()] = item[2]
        else:
            loops.append((item[1], item[2]))

    try:
        cell = [_cif_number(tags[k]) for k in (
            "_cell_length_a", "_cell_length_b", "_cell_length_c",
            "_cell_angle_alpha", "_cell_angle_beta", "_cell_angle_gamma")]
    except KeyError as e:
        raise MissingCell(f"cell tag {e.args[0]} missing")
    lattice = Lattice.from_parameters(*cell)

    symops = [(np.eye(3), np.zeros(3))]
    atoms = None
    occupancy_seen = False
    for headers, rows in loops:
        low = [h.lower() for h in headers]
        if ("_symmetry_equiv_pos_as_xyz" in low
                or "_space_group_symop_operation_xyz" in low):
            col = low.index("_symmetry_equiv_pos_as_xyz"
                            if "_symmetry_equiv_pos_as_xyz" in low
                            else "_space_group_symop_operation_xyz")
            symops = []
            for row in rows:
                if len(row) <= col:
                    raise BadSymop(f"short symmetry row {row!r}")
                symops.append(_parse_symop(row[col]))
            if not symops:
                symops = [(np.eye(3), np.zeros(3))]
        if "_atom_site_fract_x" in low:
            def col_of(*names):
                for nm in names:
                    if nm in low:
                        return low.index(nm)
                return None
            cx = col_of("_atom_site_fract_x")
            cy = col_of("_atom_site_fract_y")
            cz = col_of("_atom_site_fract_z")
            ce = col_of("_atom_site_type_symbol", "_atom_site_label")
            if None in (cx, cy, cz, ce):
                raise MissingAtoms("atom-site loop lacks coordinates or labels")
            if col_of("_atom_site_occupancy") is not None:
                occupancy_seen = True
            atoms = []
            for row in rows:
                if len(row) <= max(cx, cy, cz, ce):
                    raise MissingAtoms(f"short atom-site row {row!r}")
                sym = _element_from(row[ce])
                frac = [_cif_number(row[c]) for c in (cx, cy, cz)]
                atoms.append((sym, frac))
    if atoms is None:
        raise MissingAtoms("no atom-site loop with fractional coordinates")
    if occupancy_seen:
        warnings.warn("occupancy column ignored: sites treated as fully "
                      "occupied", stacklevel=2)

    zs, fracs = [], []
    for sym, frac in atoms:
        z = elements.zc(sym)
        base = np.asarray(frac, dtype=np.float64)
        for rot, trans in symops:
            zs.append(z)
            fracs.append(rot @ base + trans)
    zs, fracs = merge_close_sites(lattice, zs, fracs)
    sites = [make_site(lattice, z, frac=f) for z, f in zip(zs, fracs)]
    return Structure(lattice, sites, source_id=source_id)


_LATTICE_RE = re.compile(r'Lattice\s*=\s*"([^"]+)"')


def parse_xyz(text: str, source_id: str = "") -> Structure:
    """Extended-XYZ with a Lattice entry on the comment line; Cartesian
    coordinates are wrapped into the cell."""
    lines = [ln for ln in text.splitlines()]
    if len(lines) < 2:
        raise CountMismatch("file too short for XYZ")
    try:
        declared = int(lines[0].strip())
    except ValueError:
        raise CountMismatch(f"bad atom count line {lines[0]!r}")
    m = _LATTICE_RE.search(lines[1])
    if not m:
        raise MissingLattice("comment line lacks a Lattice=\"...\" entry")
    nums = m.group(1).split()
    if len(nums) != 9:
        raise MissingLattice(f"Lattice entry has {len(nums)} numbers, want 9")
    lattice = Lattice(np.array([float(x) for x in nums]).reshape(3, 3))
    atom_lines = [ln for ln in lines[2:] if ln.strip()]
    if len(atom_lines) != declared:
        raise CountMismatch(
            f"declared {declared} atoms, found {len(atom_lines)}")
    sites = []
    for ln in atom_lines:
        parts = ln.split()
        if len(parts) < 4:
            raise CountMismatch(f"short atom line {ln!r}")
        sym = parts[0]
        cart = [float(x) for x in parts[1:4]]
        sites.append(make_site(lattice, sym, cart=cart))
    return Structure(lattice, sites, source_id=source_id)


def parse_structure_file(path, source_id: str | None = None) -> Structure:
    """Dispatch on extension (.cif / .xyz / .extxyz)."""
    from pathlib import Path
    p = Path(path)
    text = p.read_text()
    sid = source_id if source_id is not None else p.stem
    if p.suffix.lower() == ".cif":
        return parse_cif(text, source_id=sid)
    if p.suffix.lower() in (".xyz", ".extxyz"):
        return parse_xyz(text, source_id=sid)
    raise ValueError(f"unsupported structure file {p.name!r}")
