"""McMurchie-Davidson one- and two-electron integrals over contracted Gaussians.

Covers arbitrary angular momentum via Hermite expansion coefficients and
the Boys function; the benchmark set only exercises s and p shells.
"""

from __future__ import annotations

import numpy as np
from scipy.special import hyp1f1

from .basis import BasisFunction


def boys(n: int, x: float) -> float:
    return float(hyp1f1(n + 0.5, n + 1.5, -x) / (2.0 * n + 1.0))


def _hermite_e(i: int, j: int, qx: float, a: float, b: float) -> np.ndarray:
    """Table E[t] of Hermite expansion coefficients for G_i(a) G_j(b), t<=i+j."""
    p = a + b
    mu = a * b / p
    # E[(i, j)] built by transfer recursion on a dict of 1D tables
    tables: dict[tuple[int, int], np.ndarray] = {}
    base = np.zeros(1)
    base[0] = np.exp(-mu * qx * qx)
    tables[(0, 0)] = base
    for ii in range(1, i + 1):
        prev = tables[(ii - 1, 0)]
        cur = np.zeros(ii + 1)
        for t in range(ii + 1):
            v = 0.0
            if t - 1 >= 0:
                v += prev[t - 1] / (2.0 * p)
            if t <= ii - 1:
                v += -(mu * qx / a) * prev[t]
            if t + 1 <= ii - 1:
                v += (t + 1) * prev[t + 1]
            cur[t] = v
        tables[(ii, 0)] = cur
    for jj in range(1, j + 1):
        for ii in range(i + 1):
            prev = tables[(ii, jj - 1)]
            cur = np.zeros(ii + jj + 1)
            for t in range(ii + jj + 1):
                v = 0.0
                if t - 1 >= 0:
                    v += prev[t - 1] / (2.0 * p)
                if t <= ii + jj - 1:
                    v += (mu * qx / b) * prev[t]
                if t + 1 <= ii + jj - 1:
                    v += (t + 1) * prev[t + 1]
                cur[t] = v
            tables[(ii, jj)] = cur
    return tables[(i, j)]


def _overlap_1d(i: int, j: int, qx: float, a: float, b: float) -> float:
    e = _hermite_e(i, j, qx, a, b)
    return float(e[0] * np.sqrt(np.pi / (a + b)))


def _primitive_overlap(a, lmn1, ra, b, lmn2, rb) -> float:
    s = 1.0
    for d in range(3):
        s *= _overlap_1d(lmn1[d], lmn2[d], ra[d] - rb[d], a, b)
    return s


def _primitive_kinetic(a, lmn1, ra, b, lmn2, rb) -> float:
    # T = -1/2 Laplacian on the ket, expanded in shifted overlaps per axis
    l2, m2, n2 = lmn2

    def s_shift(d, dj):
        lmn2s = list(lmn2)
        lmn2s[d] += dj
        if lmn2s[d] < 0:
            return 0.0
        val = 1.0
        for dd in range(3):
            val *= _overlap_1d(lmn1[dd], lmn2s[dd] if dd == d else lmn2[dd],
                               ra[dd] - rb[dd], a, b)
        return val

    t = 0.0
    for d, j in ((0, l2), (1, m2), (2, n2)):
        t += b * (2 * j + 1) * s_shift(d, 0)
        t += -2.0 * b * b * s_shift(d, 2)
        t += -0.5 * j * (j - 1) * s_shift(d, -2)
    return t


def _hermite_coulomb(t, u, v, n, p, pc):
    """R^n_{tuv}(p, PC) by downward recursion."""
    if t == u == v == 0:
        return (-2.0 * p) ** n * boys(n, p * float(np.dot(pc, pc)))
    if t > 0:
        val = 0.0
        if t > 1:
            val += (t - 1) * _hermite_coulomb(t - 2, u, v, n + 1, p, pc)
        val += pc[0] * _hermite_coulomb(t - 1, u, v, n + 1, p, pc)
        return val
    if u > 0:
        val = 0.0
        if u > 1:
            val += (u - 1) * _hermite_coulomb(t, u - 2, v, n + 1, p, pc)
        val += pc[1] * _hermite_coulomb(t, u - 1, v, n + 1, p, pc)
        return val
    val = 0.0
    if v > 1:
        val += (v - 1) * _hermite_coulomb(t, u, v - 2, n + 1, p, pc)
    val += pc[2] * _hermite_coulomb(t, u, v - 1, n + 1, p, pc)
    return val


def _primitive_nuclear(a, lmn1, ra, b, lmn2, rb, rc) -> float:
    p = a + b
    rp = (a * ra + b * rb) / p
    ex = _hermite_e(lmn1[0], lmn2[0], ra[0] - rb[0], a, b)
    ey = _hermite_e(lmn1[1], lmn2[1], ra[1] - rb[1], a, b)
    ez = _hermite_e(lmn1[2], lmn2[2], ra[2] - rb[2], a, b)
    pc = rp - rc
    val = 0.0
    for t in range(len(ex)):
        if ex[t] == 0.0:
            continue
        for u in range(len(ey)):
            if ey[u] == 0.0:
                continue
            for v in range(len(ez)):
                if ez[v] == 0.0:
                    continue
                val += ex[t] * ey[u] * ez[v] * _hermite_coulomb(t, u, v, 0, p, pc)
    return float(2.0 * np.pi / p * val)


def _primitive_eri(a, lmn1, ra, b, lmn2, rb, c, lmn3, rc, d, lmn4, rd) -> float:
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    rp = (a * ra + b * rb) / p
    rq = (c * rc + d * rd) / q
    pq = rp - rq
    e1 = [_hermite_e(lmn1[k], lmn2[k], ra[k] - rb[k], a, b) for k in range(3)]
    e2 = [_hermite_e(lmn3[k], lmn4[k], rc[k] - rd[k], c, d) for k in range(3)]
    val = 0.0
    for t in range(len(e1[0])):
        if e1[0][t] == 0.0:
            continue
        for u in range(len(e1[1])):
            if e1[1][u] == 0.0:
                continue
            for v in range(len(e1[2])):
                if e1[2][v] == 0.0:
                    continue
                w1 = e1[0][t] * e1[1][u] * e1[2][v]
                for tt in range(len(e2[0])):
                    if e2[0][tt] == 0.0:
                        continue
                    for uu in range(len(e2[1])):
                        if e2[1][uu] == 0.0:
                            continue
                        for vv in range(len(e2[2])):
                            if e2[2][vv] == 0.0:
                                continue
                            w2 = e2[0][tt] * e2[1][uu] * e2[2][vv]
                            sign = -1.0 if (tt + uu + vv) % 2 else 1.0
                            val += w1 * w2 * sign * _hermite_coulomb(
                                t + tt, u + uu, v + vv, 0, alpha, pq
                            )
    return float(
        2.0 * np.pi ** 2.5 / (p * q * np.sqrt(p + q)) * val
    )


def _contract2(f, g1: BasisFunction, g2: BasisFunction, *extra) -> float:
    val = 0.0
    for c1, a1 in zip(g1.coefficients, g1.exponents):
        for c2, a2 in zip(g2.coefficients, g2.exponents):
            val += c1 * c2 * f(a1, g1.lmn, g1.center, a2, g2.lmn, g2.center, *extra)
    return val


def overlap_matrix(basis: list[BasisFunction]) -> np.ndarray:
    n = len(basis)
    s = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            v = _contract2(_primitive_overlap, basis[i], basis[j])
            s[i, j] = s[j, i] = v
    return s


def kinetic_matrix(basis: list[BasisFunction]) -> np.ndarray:
    n = len(basis)
    t = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            v = _contract2(_primitive_kinetic, basis[i], basis[j])
            t[i, j] = t[j, i] = v
    return t


def nuclear_matrix(basis: list[BasisFunction], atoms) -> np.ndarray:
    from .basis import NUCLEAR_CHARGE

    n = len(basis)
    v = np.zeros((n, n))
    for element, rc in atoms:
        z = NUCLEAR_CHARGE[element]
        for i in range(n):
            for j in range(i + 1):
                val = _contract2(_primitive_nuclear, basis[i], basis[j], rc)
                v[i, j] -= z * val
                if i != j:
                    v[j, i] = v[i, j]
    return v


def eri_tensor(basis: list[BasisFunction]) -> np.ndarray:
    """Chemists' (ij|kl) with 8-fold symmetry filled from unique quartets."""
    n = len(basis)
    eri = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(i + 1):
            ij = i * (i + 1) // 2 + j
            for k in range(n):
                for l in range(k + 1):
                    kl = k * (k + 1) // 2 + l
                    if ij < kl:
                        continue
                    gi, gj, gk, gl = basis[i], basis[j], basis[k], basis[l]
                    val = 0.0
                    for c1, a1 in zip(gi.coefficients, gi.exponents):
                        for c2, a2 in zip(gj.coefficients, gj.exponents):
                            for c3, a3 in zip(gk.coefficients, gk.exponents):
                                for c4, a4 in zip(gl.coefficients, gl.exponents):
                                    val += c1 * c2 * c3 * c4 * _primitive_eri(
                                        a1, gi.lmn, gi.center,
                                        a2, gj.lmn, gj.center,
                                        a3, gk.lmn, gk.center,
                                        a4, gl.lmn, gl.center,
                                    )
                    for (a, b, c, d) in (
                        (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                        (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
                    ):
                        eri[a, b, c, d] = val
    return eri
