"""Restricted Hartree-Fock with DIIS, plus the AO->MO transformation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .basis import BasisFunction, NUCLEAR_CHARGE, build_basis, nuclear_repulsion
from .integrals import eri_tensor, kinetic_matrix, nuclear_matrix, overlap_matrix


class ScfConvergenceError(RuntimeError):
    pass


@dataclass
class RhfResult:
    e_hf: float
    e_nuc: float
    mo_coeff: np.ndarray
    mo_energies: np.ndarray
    h_core_ao: np.ndarray
    eri_ao: np.ndarray
    n_electrons: int


def run_rhf(
    atoms: list[tuple[str, np.ndarray]],
    basis_name: str,
    e_tol: float = 1e-12,
    d_tol: float = 1e-10,
    max_iter: int = 300,
) -> RhfResult:
    basis = build_basis(atoms, basis_name)
    n_elec = sum(NUCLEAR_CHARGE[el] for el, _ in atoms)
    if n_elec % 2:
        raise ValueError("run_rhf handles closed shells only")
    n_occ = n_elec // 2

    s = overlap_matrix(basis)
    t = kinetic_matrix(basis)
    v = nuclear_matrix(basis, atoms)
    h = t + v
    eri = eri_tensor(basis)
    e_nuc = nuclear_repulsion(atoms)

    # symmetric orthogonalization
    s_vals, s_vecs = np.linalg.eigh(s)
    if np.min(s_vals) < 1e-10:
        raise ScfConvergenceError("near-singular overlap matrix")
    x = s_vecs @ np.diag(s_vals ** -0.5) @ s_vecs.T

    def fock(dm):
        j = np.einsum("pqrs,rs->pq", eri, dm)
        k = np.einsum("prqs,rs->pq", eri, dm)
        return h + j - 0.5 * k

    def density(f):
        e_mo, c_prime = np.linalg.eigh(x.T @ f @ x)
        c = x @ c_prime
        occ = c[:, :n_occ]
        return 2.0 * occ @ occ.T, c, e_mo

    dm, c, e_mo = density(h)
    e_old = 0.0
    fock_hist: list[np.ndarray] = []
    err_hist: list[np.ndarray] = []
    for it in range(max_iter):
        f = fock(dm)
        err = x.T @ (f @ dm @ s - s @ dm @ f) @ x
        fock_hist.append(f)
        err_hist.append(err)
        if len(fock_hist) > 8:
            fock_hist.pop(0)
            err_hist.pop(0)
        if len(fock_hist) > 1:
            m = len(fock_hist)
            b = -np.ones((m + 1, m + 1))
            b[m, m] = 0.0
            for a in range(m):
                for bidx in range(m):
                    b[a, bidx] = np.sum(err_hist[a] * err_hist[bidx])
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            try:
                w = np.linalg.solve(b, rhs)[:m]
                f = sum(wi * fi for wi, fi in zip(w, fock_hist))
            except np.linalg.LinAlgError:
                pass
        dm_new, c, e_mo = density(f)
        e_el = 0.5 * np.sum(dm_new * (h + fock(dm_new)))
        d_rms = np.sqrt(np.mean((dm_new - dm) ** 2))
        dm = dm_new
        if abs(e_el - e_old) < e_tol and d_rms < d_tol:
            # deterministic MO sign: largest-|c| entry positive
            for col in range(c.shape[1]):
                pivot = np.argmax(np.abs(c[:, col]))
                if c[pivot, col] < 0:
                    c[:, col] *= -1.0
            return RhfResult(
                e_hf=float(e_el + e_nuc),
                e_nuc=float(e_nuc),
                mo_coeff=c,
                mo_energies=e_mo,
                h_core_ao=h,
                eri_ao=eri,
                n_electrons=n_elec,
            )
        e_old = e_el
    raise ScfConvergenceError(f"SCF not converged in {max_iter} iterations")


def mo_integrals(res: RhfResult) -> tuple[np.ndarray, np.ndarray]:
    """(h1_mo, eri_mo) with eri in chemists' notation (pq|rs)."""
    c = res.mo_coeff
    h1 = c.T @ res.h_core_ao @ c
    eri = np.einsum("pqrs,pi,qj,rk,sl->ijkl", res.eri_ao, c, c, c, c, optimize=True)
    return h1, eri
