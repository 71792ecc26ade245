"""Determinant full CI via Slater-Condon rules over MO integrals.

Independent of any qubit-space machinery: determinants are (alpha, beta)
spatial-orbital bitmasks and matrix elements come straight from the
one-/two-electron integrals.  Serves as the cross-oracle regression
energy recorded in fixture manifests.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np


def _bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask >> i:
        if (mask >> i) & 1:
            out.append(i)
        i += 1
    return out


def _excitation(m1: int, m2: int) -> tuple[list[int], list[int]]:
    """(holes in m1, particles in m2)."""
    return _bits(m1 & ~m2), _bits(m2 & ~m1)


def _perm_sign_single(mask: int, i: int, a: int) -> float:
    lo, hi = (i, a) if i < a else (a, i)
    between = mask & (((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1))
    return -1.0 if bin(between).count("1") % 2 else 1.0


def _annihilate(mask: int, i: int) -> tuple[int, float]:
    sign = -1.0 if bin(mask & ((1 << i) - 1)).count("1") % 2 else 1.0
    return mask & ~(1 << i), sign


def _create(mask: int, a: int) -> tuple[int, float]:
    sign = -1.0 if bin(mask & ((1 << a) - 1)).count("1") % 2 else 1.0
    return mask | (1 << a), sign


def _double_sign(mask: int, i: int, j: int, a: int, b: int) -> float:
    """Sign of a^+_a a^+_b a_j a_i applied within one spin channel."""
    m, s1 = _annihilate(mask, i)
    m, s2 = _annihilate(m, j)
    m, s3 = _create(m, b)
    m, s4 = _create(m, a)
    return s1 * s2 * s3 * s4


class SlaterCondon:
    def __init__(self, h1: np.ndarray, eri: np.ndarray):
        self.h1 = h1
        self.eri = eri  # chemists' (pq|rs)

    def diagonal(self, ma: int, mb: int) -> float:
        occ_a = _bits(ma)
        occ_b = _bits(mb)
        h1 = self.h1
        eri = self.eri
        e = sum(h1[i, i] for i in occ_a) + sum(h1[i, i] for i in occ_b)
        for i in occ_a:
            for j in occ_a:
                e += 0.5 * (eri[i, i, j, j] - eri[i, j, j, i])
        for i in occ_b:
            for j in occ_b:
                e += 0.5 * (eri[i, i, j, j] - eri[i, j, j, i])
        for i in occ_a:
            for j in occ_b:
                e += eri[i, i, j, j]
        return float(e)

    def element(self, ka: tuple[int, int], kb: tuple[int, int]) -> float:
        ma1, mb1 = ka
        ma2, mb2 = kb
        da = bin(ma1 ^ ma2).count("1") // 2
        db = bin(mb1 ^ mb2).count("1") // 2
        ndiff = da + db
        if ndiff > 2:
            return 0.0
        h1 = self.h1
        eri = self.eri
        if ndiff == 0:
            return self.diagonal(ma1, mb1)
        if ndiff == 1:
            if da == 1:
                (i,), (a,) = _excitation(ma1, ma2)
                same, other = ma1, None
                sign = _perm_sign_single(ma1, i, a)
                occ_same = _bits(ma1 & ma2)
                occ_other = _bits(mb1)
            else:
                (i,), (a,) = _excitation(mb1, mb2)
                sign = _perm_sign_single(mb1, i, a)
                occ_same = _bits(mb1 & mb2)
                occ_other = _bits(ma1)
            val = h1[i, a]
            for k in occ_same:
                val += eri[i, a, k, k] - eri[i, k, k, a]
            for k in occ_other:
                val += eri[i, a, k, k]
            return float(sign * val)
        # ndiff == 2
        if da == 2:
            (i, j), (a, b) = _excitation(ma1, ma2)
            sign = _double_sign(ma1, i, j, a, b)
            return float(sign * (eri[i, a, j, b] - eri[i, b, j, a]))
        if db == 2:
            (i, j), (a, b) = _excitation(mb1, mb2)
            sign = _double_sign(mb1, i, j, a, b)
            return float(sign * (eri[i, a, j, b] - eri[i, b, j, a]))
        (i,), (a,) = _excitation(ma1, ma2)
        (j,), (b,) = _excitation(mb1, mb2)
        sign = _perm_sign_single(ma1, i, a) * _perm_sign_single(mb1, j, b)
        return float(sign * eri[i, a, j, b])


def fci_ground_energy(
    h1: np.ndarray,
    eri: np.ndarray,
    n_alpha: int,
    n_beta: int,
    e_core: float = 0.0,
    n_roots: int = 1,
) -> list[float]:
    """Lowest eigenvalues of the FCI matrix in the (n_alpha, n_beta) sector."""
    n = h1.shape[0]
    alphas = [sum(1 << p for p in occ) for occ in combinations(range(n), n_alpha)]
    betas = [sum(1 << p for p in occ) for occ in combinations(range(n), n_beta)]
    dets = [(a, b) for a in alphas for b in betas]
    dim = len(dets)
    sc = SlaterCondon(h1, eri)
    mat = np.zeros((dim, dim))
    for p in range(dim):
        for q in range(p + 1):
            v = sc.element(dets[p], dets[q])
            mat[p, q] = mat[q, p] = v
    vals = np.linalg.eigvalsh(mat)
    return [float(v + e_core) for v in vals[:n_roots]]
