import functools
from pathlib import Path

import pytest

from vqebench.fci import fci_solve, sector_basis
from vqebench.fermion import load_fcidump, load_manifest, qubit_hamiltonian
from vqebench.statevector import hf_state

REPO = Path(__file__).resolve().parents[1]
FIXTURES = REPO / "fixtures"


@pytest.fixture(scope="session")
def manifest():
    return load_manifest(FIXTURES / "manifest.json")


@functools.lru_cache(maxsize=None)
def problem(label: str):
    """(integrals, hamiltonian, sector, reference, fci_ground) for a fixture."""
    manifest = load_manifest(FIXTURES / "manifest.json")
    mi = load_fcidump(manifest[label].path, label=label)
    h = qubit_hamiltonian(mi)
    sec = sector_basis(mi.n_qubits, mi.n_alpha, mi.n_beta)
    e_fci = fci_solve(h, sec, k=1)[0][0]
    ref = hf_state(mi.n_qubits, mi.hf_occupation())
    return mi, h, sec, ref, e_fci


def fixture_labels(manifest, molecule: str, basis: str | None = None):
    labels = [
        k for k, rec in manifest.items()
        if rec.molecule == molecule and (basis is None or rec.basis == basis)
    ]
    return sorted(labels, key=lambda k: manifest[k].r_value)
