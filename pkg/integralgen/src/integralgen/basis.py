"""Gaussian basis data for the benchmark set: STO-3G (H, Li, Be, O) and 6-31G (H).

Exponents and contraction coefficients are the standard published values.
Coefficients refer to normalized primitives; contracted functions are
renormalized numerically at build time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ANGSTROM_TO_BOHR = 1.8897259886

# Shared STO-3G contraction patterns: every element uses the same 1s and
# 2sp coefficient sets against element-specific exponents.
_STO3G_1S = (0.1543289673, 0.5353281423, 0.4446345422)
_STO3G_2S = (-0.09996722919, 0.3995128261, 0.7001154689)
_STO3G_2P = (0.1559162750, 0.6076837186, 0.3919573931)

# element -> list of (shell_type, exponents, coeffs) with shell_type in {S, SP}
_STO3G = {
    "H": [("S", (3.425250914, 0.6239137298, 0.1688554040), (_STO3G_1S,))],
    "Li": [
        ("S", (16.11957475, 2.936200663, 0.794650487), (_STO3G_1S,)),
        ("SP", (0.6362897469, 0.1478600533, 0.0480886784), (_STO3G_2S, _STO3G_2P)),
    ],
    "Be": [
        ("S", (30.16787069, 5.495115306, 1.487192653), (_STO3G_1S,)),
        ("SP", (1.314833110, 0.3055389383, 0.0993707456), (_STO3G_2S, _STO3G_2P)),
    ],
    "O": [
        ("S", (130.7093214, 23.80886605, 6.443608313), (_STO3G_1S,)),
        ("SP", (5.033151319, 1.169596125, 0.3803889600), (_STO3G_2S, _STO3G_2P)),
    ],
}

_631G = {
    "H": [
        ("S", (18.73113696, 2.825394365, 0.6401216923),
         ((0.03349460434, 0.2347269535, 0.8137573261),)),
        ("S", (0.1612777588,), ((1.0,),)),
    ],
}

NUCLEAR_CHARGE = {"H": 1, "Li": 3, "Be": 4, "O": 8}


@dataclass
class BasisFunction:
    """Contracted Cartesian Gaussian: (x-X)^l (y-Y)^m (z-Z)^n exp(-a r^2)."""

    center: np.ndarray  # Bohr
    lmn: tuple[int, int, int]
    exponents: np.ndarray
    coefficients: np.ndarray  # includes primitive norms and contraction norm

    @property
    def total_l(self) -> int:
        return sum(self.lmn)


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _primitive_norm(a: float, lmn: tuple[int, int, int]) -> float:
    l, m, n = lmn
    num = (2.0 * a / np.pi) ** 1.5 * (4.0 * a) ** (l + m + n)
    den = (
        _double_factorial(2 * l - 1)
        * _double_factorial(2 * m - 1)
        * _double_factorial(2 * n - 1)
    )
    return float(np.sqrt(num / den))


def _contracted(center, lmn, exps, coeffs) -> BasisFunction:
    exps = np.asarray(exps, dtype=float)
    raw = np.asarray(coeffs, dtype=float) * np.array(
        [_primitive_norm(a, lmn) for a in exps]
    )
    # renormalize the contraction; <g|g> for same-center same-lmn primitives
    l, m, n = lmn
    L = l + m + n
    pref = (
        np.pi ** 1.5
        * _double_factorial(2 * l - 1)
        * _double_factorial(2 * m - 1)
        * _double_factorial(2 * n - 1)
        / 2.0 ** L
    )
    s = 0.0
    for ca, aa in zip(raw, exps):
        for cb, ab in zip(raw, exps):
            s += ca * cb * pref / (aa + ab) ** (L + 1.5)
    return BasisFunction(np.asarray(center, dtype=float), lmn, exps, raw / np.sqrt(s))


_P_ORDER = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]


def build_basis(atoms: list[tuple[str, np.ndarray]], basis_name: str) -> list[BasisFunction]:
    """Basis functions for atoms given as (element, xyz in Bohr)."""
    table = {"sto-3g": _STO3G, "6-31g": _631G}[basis_name.lower()]
    funcs: list[BasisFunction] = []
    for element, xyz in atoms:
        if element not in table:
            raise ValueError(f"element {element} not available in {basis_name}")
        for shell_type, exps, coeff_sets in table[element]:
            if shell_type == "S":
                funcs.append(_contracted(xyz, (0, 0, 0), exps, coeff_sets[0]))
            elif shell_type == "SP":
                funcs.append(_contracted(xyz, (0, 0, 0), exps, coeff_sets[0]))
                for lmn in _P_ORDER:
                    funcs.append(_contracted(xyz, lmn, exps, coeff_sets[1]))
            else:
                raise ValueError(f"unsupported shell type {shell_type}")
    return funcs


def nuclear_repulsion(atoms: list[tuple[str, np.ndarray]]) -> float:
    e = 0.0
    for i, (el_i, ri) in enumerate(atoms):
        for j in range(i):
            el_j, rj = atoms[j]
            e += NUCLEAR_CHARGE[el_i] * NUCLEAR_CHARGE[el_j] / np.linalg.norm(ri - rj)
    return e
