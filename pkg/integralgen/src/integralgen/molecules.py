"""Geometry parameterizations for the benchmark molecule set.

Each builder maps a single scan parameter R (in Angstrom) to an atom list
in Bohr.  Fixed reference values: r(O-H) = 0.958 A, angle(HOH) = 104.5 deg,
r(Be-H) = 1.326 A, inner H-chain spacing 1.0 A.
"""

from __future__ import annotations

import numpy as np

from .basis import ANGSTROM_TO_BOHR

OH_REF = 0.958
BEH_REF = 1.326
HOH_ANGLE_DEG = 104.5
H_CHAIN_SPACING = 1.0


def _atoms(spec: list[tuple[str, tuple[float, float, float]]]):
    return [(el, np.array(xyz, dtype=float) * ANGSTROM_TO_BOHR) for el, xyz in spec]


def h2(r: float):
    return _atoms([("H", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, r))])


def h4_symmetric(r: float):
    return _atoms([("H", (0.0, 0.0, i * r)) for i in range(4)])


def h6_chain(r: float):
    """Linear H6, inner spacing fixed, one terminal bond stretched to R."""
    zs = [0.0]
    for _ in range(4):
        zs.append(zs[-1] + H_CHAIN_SPACING)
    zs.append(zs[-1] + r)
    return _atoms([("H", (0.0, 0.0, z)) for z in zs])


def lih(r: float):
    return _atoms([("Li", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, r))])


def h2o_stretch(r: float):
    """One O-H stretched to R, the other fixed, angle fixed at 104.5 deg."""
    ang = np.deg2rad(HOH_ANGLE_DEG)
    h_fixed = (0.0, 0.0, OH_REF)
    h_moved = (r * np.sin(ang), 0.0, r * np.cos(ang))
    return _atoms([("O", (0.0, 0.0, 0.0)), ("H", h_fixed), ("H", h_moved)])


def beh2_stretch(r: float):
    """Linear BeH2 with one Be-H stretched to R."""
    return _atoms(
        [("H", (0.0, 0.0, -BEH_REF)), ("Be", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, r))]
    )


BUILDERS = {
    "h2": h2,
    "h4": h4_symmetric,
    "h6": h6_chain,
    "lih": lih,
    "h2o": h2o_stretch,
    "beh2": beh2_stretch,
}

GEOMETRY_NOTES = {
    "h2": "H-H distance R",
    "h4": "linear chain, equal spacing R",
    "h6": "linear chain, inner spacing 1.0 A, terminal bond R",
    "lih": "Li-H distance R",
    "h2o": "one O-H stretched to R, other 0.958 A, angle 104.5 deg",
    "beh2": "linear, one Be-H stretched to R, other 1.326 A",
}
