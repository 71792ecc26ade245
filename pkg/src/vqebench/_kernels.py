"""Numba kernels for amplitude-array updates.

All kernels take a ``support`` index array: the basis indices over which
source amplitudes may be nonzero.  Passing the full ``arange(2**n)`` gives
the dense behavior; drivers whose states provably stay inside a
particle-number sector pass the sector's determinant list instead, which
cuts the work per Pauli term from 2^n to the sector dimension without
changing any result (skipped sources hold exact zeros, and sector-closed
x-masks keep targets inside the support).

String phases i^{y_count} are premultiplied into the coefficients by
``QubitOperator.arrays``; kernels only apply (-1)^{parity(z & index)}.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_U1 = np.uint64(1)
_U0 = np.uint64(0)


@njit(cache=True, inline="always")
def _parity(v):
    v ^= v >> np.uint64(32)
    v ^= v >> np.uint64(16)
    v ^= v >> np.uint64(8)
    v ^= v >> np.uint64(4)
    v ^= v >> np.uint64(2)
    v ^= v >> np.uint64(1)
    return v & _U1


@njit(cache=True)
def pauli_exp_inplace(amps, x, z, eff, theta, support):
    """amps <- cos(theta)*amps + i*sin(theta)*eff*(X^x Z^z)*amps, in place.

    Valid because Pauli strings square to the identity.  ``eff`` is the
    i^{y_count} phase of the string (unit modulus), making eff*(X^x Z^z)
    Hermitian.
    """
    c = np.cos(theta)
    js = 1j * np.sin(theta) * eff
    if x == _U0:
        for k in range(support.shape[0]):
            idx = support[k]
            b = np.uint64(idx)
            sgn = 1.0 - 2.0 * _parity(z & b)
            amps[idx] = (c + js * sgn) * amps[idx]
    else:
        for k in range(support.shape[0]):
            idx = support[k]
            b = np.uint64(idx)
            b2 = b ^ x
            if b < b2:
                i2 = np.int64(b2)
                sa = 1.0 - 2.0 * _parity(z & b)
                sb = 1.0 - 2.0 * _parity(z & b2)
                va = amps[idx]
                vb = amps[i2]
                amps[idx] = c * va + js * sb * vb
                amps[i2] = c * vb + js * sa * va


@njit(cache=True)
def apply_terms(amps, out, xs, zs, effs, support):
    """out += sum_j effs[j] * (X^xs[j] Z^zs[j]) * amps over the support."""
    for t in range(xs.shape[0]):
        x = xs[t]
        z = zs[t]
        e = effs[t]
        for k in range(support.shape[0]):
            idx = support[k]
            b = np.uint64(idx)
            sgn = 1.0 - 2.0 * _parity(z & b)
            out[np.int64(b ^ x)] += e * sgn * amps[idx]


@njit(cache=True)
def expect_terms(bra, ket, xs, zs, effs, support):
    """sum_j effs[j] * <bra| X^xs[j] Z^zs[j] |ket>, sources on the support."""
    acc = 0.0 + 0.0j
    for t in range(xs.shape[0]):
        x = xs[t]
        z = zs[t]
        tacc = 0.0 + 0.0j
        for k in range(support.shape[0]):
            idx = support[k]
            b = np.uint64(idx)
            sgn = 1.0 - 2.0 * _parity(z & b)
            tacc += np.conj(bra[np.int64(b ^ x)]) * sgn * ket[idx]
        acc += effs[t] * tacc
    return acc


@njit(cache=True)
def taylor_exp_inplace(amps, xs, zs, effs, h, n_split, support, tol):
    """amps <- (exp(h * sum_j effs[j] X^x Z^z))^n_split amps, by Taylor series.

    effs carry the i*beta*i^y coefficients of an anti-Hermitian generator;
    per-order truncation below tol keeps the result exact to roundoff.
    """
    term = np.empty_like(amps)
    nxt = np.empty_like(amps)
    for _ in range(n_split):
        for k in range(support.shape[0]):
            term[support[k]] = amps[support[k]]
        for order in range(1, 60):
            for k in range(support.shape[0]):
                nxt[support[k]] = 0.0
            for t in range(xs.shape[0]):
                x = xs[t]
                z = zs[t]
                e = effs[t]
                for k in range(support.shape[0]):
                    idx = support[k]
                    b = np.uint64(idx)
                    sgn = 1.0 - 2.0 * _parity(z & b)
                    nxt[np.int64(b ^ x)] += e * sgn * term[idx]
            scale = h / order
            nrm = 0.0
            for k in range(support.shape[0]):
                idx = support[k]
                v = nxt[idx] * scale
                term[idx] = v
                amps[idx] += v
                nrm += v.real * v.real + v.imag * v.imag
            if nrm < tol * tol:
                break


@njit(cache=True)
def group_expectations(bra, ket, xs, zs, effs, offsets, support):
    """Per-group sums of string expectations for a packed pool.

    Group g owns strings offsets[g]:offsets[g+1]; returns the complex
    vector of group totals.  One call evaluates every pool-operator
    matrix element <bra|A_g|ket> in an adaptive-growth gradient sweep.
    """
    n_groups = offsets.shape[0] - 1
    out = np.zeros(n_groups, dtype=np.complex128)
    for g in range(n_groups):
        acc = 0.0 + 0.0j
        for t in range(offsets[g], offsets[g + 1]):
            x = xs[t]
            z = zs[t]
            tacc = 0.0 + 0.0j
            for k in range(support.shape[0]):
                idx = support[k]
                b = np.uint64(idx)
                sgn = 1.0 - 2.0 * _parity(z & b)
                tacc += np.conj(bra[np.int64(b ^ x)]) * sgn * ket[idx]
            acc += effs[t] * tacc
        out[g] = acc
    return out
