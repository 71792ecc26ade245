"""Dense-matrix oracles, independent of the packed mask arithmetic.

Everything here goes through literal 2x2 matrices, Kronecker products and
numpy linear algebra so kernel bugs cannot cancel against themselves.
"""

import numpy as np

PAULI_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense_pauli(label: str) -> np.ndarray:
    """Character i of the label acts on qubit i (little-endian indices)."""
    out = np.eye(1, dtype=complex)
    for ch in label:
        out = np.kron(PAULI_MATS[ch], out)
    return out


def dense_operator(op) -> np.ndarray:
    dim = 1 << op.n_qubits
    mat = np.zeros((dim, dim), dtype=complex)
    for ps, c in op.items():
        mat += c * dense_pauli(ps.label())
    return mat


def dense_ladder(p: int, dagger: bool, n: int) -> np.ndarray:
    """Jordan-Wigner ladder operator as an explicit matrix."""
    a = np.array([[0, 1], [0, 0]], dtype=complex)  # annihilator: a|1> = |0>
    op = a.conj().T if dagger else a
    out = np.eye(1, dtype=complex)
    for q in range(n):
        if q < p:
            m = PAULI_MATS["Z"]
        elif q == p:
            m = op
        else:
            m = PAULI_MATS["I"]
        out = np.kron(m, out)
    return out


def dense_fermion(fop, n: int) -> np.ndarray:
    dim = 1 << n
    mat = np.zeros((dim, dim), dtype=complex)
    for ops, coeff in fop.terms:
        term = np.eye(dim, dtype=complex)
        for idx, dag in ops:
            term = term @ dense_ladder(idx, dag, n)
        mat += coeff * term
    return mat


def dense_expm(mat: np.ndarray) -> np.ndarray:
    import scipy.linalg

    return scipy.linalg.expm(mat)


def random_state(n: int, rng) -> np.ndarray:
    v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return v / np.linalg.norm(v)


def random_operator(n: int, n_terms: int, rng, hermitian=False):
    from vqebench.pauli import PauliString, QubitOperator

    terms = {}
    for _ in range(n_terms):
        ps = PauliString(n, int(rng.integers(1 << n)), int(rng.integers(1 << n)))
        c = complex(rng.standard_normal(), 0.0 if hermitian else rng.standard_normal())
        terms[ps] = terms.get(ps, 0) + c
    return QubitOperator(n, terms)
