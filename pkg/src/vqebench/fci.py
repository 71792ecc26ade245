"""Exact reference energies: dense diagonalization in a particle-number sector."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .pauli import PauliString, QubitOperator
from .statevector import Statevector

DEFAULT_SECTOR_CAP = 20_000
LEAKAGE_TOL = 1e-12


class SectorCapacityError(RuntimeError):
    pass


class SectorLeakageError(RuntimeError):
    """Operator column has support outside the requested sector."""


@dataclass
class SectorBasis:
    """All determinants with fixed alpha/beta occupation counts, ascending."""

    n_qubits: int
    n_alpha: int
    n_beta: int
    determinants: np.ndarray  # int64, sorted ascending

    @property
    def dim(self) -> int:
        return int(self.determinants.shape[0])

    def position_table(self) -> np.ndarray:
        """det -> sector position, -1 outside; sized 2^n (int32)."""
        table = np.full(1 << self.n_qubits, -1, dtype=np.int32)
        table[self.determinants] = np.arange(self.dim, dtype=np.int32)
        return table

    def embed(self, coeffs: np.ndarray) -> Statevector:
        """Lift a sector-basis coefficient vector into the full 2^n space."""
        amps = np.zeros(1 << self.n_qubits, dtype=np.complex128)
        amps[self.determinants] = coeffs
        nrm = np.linalg.norm(amps)
        return Statevector(self.n_qubits, amps, normalized=abs(nrm - 1.0) < 1e-10)


def sector_basis(n_qubits: int, n_alpha: int, n_beta: int) -> SectorBasis:
    if n_qubits % 2 != 0:
        raise ValueError("spin sectors need an even qubit count")
    n_spatial = n_qubits // 2
    if not (0 <= n_alpha <= n_spatial and 0 <= n_beta <= n_spatial):
        raise ValueError("electron counts outside orbital range")
    dets = []
    for occ_a in combinations(range(n_spatial), n_alpha):
        mask_a = sum(1 << (2 * p) for p in occ_a)
        for occ_b in combinations(range(n_spatial), n_beta):
            dets.append(mask_a + sum(1 << (2 * p + 1) for p in occ_b))
    arr = np.array(sorted(dets), dtype=np.int64)
    expected = comb(n_spatial, n_alpha) * comb(n_spatial, n_beta)
    assert arr.shape[0] == expected
    return SectorBasis(n_qubits, n_alpha, n_beta, arr)


def _popcount_u64(v: np.ndarray) -> np.ndarray:
    return np.bitwise_count(v)


def _spin_number_operator(n_qubits: int, spin: int) -> QubitOperator:
    """N_spin = sum over that spin's qubits of (I - Z)/2."""
    terms = {PauliString.identity(n_qubits): 0.0 + 0.0j}
    for q in range(spin, n_qubits, 2):
        terms[PauliString.identity(n_qubits)] += 0.5
        terms[PauliString(n_qubits, 0, 1 << q)] = -0.5
    return QubitOperator(n_qubits, terms)


def check_number_conserving(h: QubitOperator, tol: float = 1e-9):
    """Raise SectorLeakageError unless [H, N_alpha] = [H, N_beta] = 0."""
    for spin in (0, 1):
        n_op = _spin_number_operator(h.n_qubits, spin)
        comm = h.commutator(n_op).simplify(tol)
        if comm:
            raise SectorLeakageError(
                "operator does not commute with the spin-resolved number operator"
            )


def sector_matrix(h: QubitOperator, sector: SectorBasis) -> np.ndarray:
    """Dense H[i,j] = <det_i|H|det_j>, built column-wise from the Pauli terms.

    Individual Pauli terms may scatter outside the sector; those
    contributions cancel exactly for a number-conserving operator (checked
    by the caller) and are dropped here.
    """
    dets = sector.determinants.astype(np.uint64)
    dim = sector.dim
    pos = sector.position_table()
    xs, zs, effs = h.arrays()
    mat = np.zeros((dim, dim), dtype=np.complex128)
    cols = np.arange(dim)
    for t in range(xs.shape[0]):
        targets = (dets ^ xs[t]).astype(np.int64)
        rows = pos[targets]
        signs = 1.0 - 2.0 * (_popcount_u64(zs[t] & dets) & np.uint64(1)).astype(np.float64)
        inside = rows >= 0
        if not np.all(inside):
            mat[rows[inside], cols[inside]] += effs[t] * signs[inside]
        else:
            mat[rows, cols] += effs[t] * signs
    return mat


def fci_solve(
    h: QubitOperator,
    sector: SectorBasis,
    k: int | None = None,
    cap: int = DEFAULT_SECTOR_CAP,
) -> list[tuple[float, np.ndarray]]:
    """Lowest-k eigenpairs of the sector-projected Hamiltonian, ascending.

    Vectors are expressed in the sector determinant basis; degenerate
    eigenvalues come back in arbitrary order within a 1e-10 cluster.
    """
    if sector.dim > cap:
        raise SectorCapacityError(f"sector dimension {sector.dim} exceeds cap {cap}")
    check_number_conserving(h)
    mat = sector_matrix(h, sector)
    herm_dev = np.max(np.abs(mat - mat.conj().T)) if sector.dim else 0.0
    if herm_dev > 1e-9:
        raise ValueError(f"sector Hamiltonian not Hermitian (dev {herm_dev:.2e})")
    vals, vecs = np.linalg.eigh((mat + mat.conj().T) / 2.0)
    if k is None:
        k = sector.dim
    out = []
    for i in range(min(k, sector.dim)):
        v = vecs[:, i]
        residual = np.linalg.norm(mat @ v - vals[i] * v)
        if residual > 1e-8:
            raise RuntimeError(f"eigenpair residual {residual:.2e} too large")
        out.append((float(vals[i]), v))
    return out


def fci_ground_energy(h: QubitOperator, sector: SectorBasis) -> float:
    return fci_solve(h, sector, k=1)[0][0]
