import numpy as np
import pytest

from vqebench.fermion import (
    ExcitationGenerator,
    FcidumpError,
    FermionOperator,
    MolecularIntegrals,
    SpinViolationError,
    build_hamiltonian,
    jordan_wigner,
    load_fcidump,
    number_operator,
    parse_fcidump,
    qubit_hamiltonian,
    realize_generator,
    write_fcidump,
)
from vqebench.pauli import PauliString

from ._dense import dense_expm, dense_fermion, dense_operator
from .conftest import FIXTURES, problem

MINIMAL = """&FCI NORB=1,NELEC=2,MS2=0,
 ORBSYM=1,
 ISYM=1,
&END
  6.7500000000000000e-01   1   1   1   1
 -1.2500000000000000e+00   1   1   0   0
  7.1000000000000000e-01   0   0   0   0
"""


def test_parse_minimal():
    mi = parse_fcidump(MINIMAL, "toy")
    assert mi.n_spatial == 1 and mi.n_alpha == 1 and mi.n_beta == 1
    assert mi.h1[0, 0] == -1.25
    assert mi.h2[0, 0, 0, 0] == 0.675
    assert mi.e_core == 0.71


def test_parse_h2_fixture(manifest):
    rec = manifest["h2_sto3g_0.735"]
    mi = load_fcidump(rec.path)
    assert mi.n_spatial == 2
    assert mi.n_electrons == 2
    assert mi.n_alpha - mi.n_beta == 0


def test_parse_conflicting_duplicate_raises():
    text = MINIMAL.replace(
        "  6.7500000000000000e-01   1   1   1   1",
        "  6.7500000000000000e-01   1   1   1   1\n  6.8000000000000000e-01   1   1   1   1",
    )
    with pytest.raises(FcidumpError) as exc:
        parse_fcidump(text)
    assert exc.value.line is not None


def test_parse_index_out_of_range():
    text = MINIMAL.replace("-1.2500000000000000e+00   1   1", "-1.25   1   2")
    with pytest.raises(FcidumpError):
        parse_fcidump(text)


def test_roundtrip_all_values(manifest):
    rec = manifest["h2o_sto3g_0.950"]
    mi = load_fcidump(rec.path)
    back = parse_fcidump(write_fcidump(mi))
    assert np.allclose(mi.h1, back.h1, atol=1e-12)
    assert np.allclose(mi.h2, back.h2, atol=1e-12)
    assert abs(mi.e_core - back.e_core) < 1e-12


def test_occupation_projector():
    f = FermionOperator([(((0, True), (0, False)), 1.0)])
    q = jordan_wigner(f, 1)
    ident = PauliString.identity(1)
    z0 = PauliString.from_label("Z")
    assert np.isclose(q.coefficient(ident), 0.5)
    assert np.isclose(q.coefficient(z0), -0.5)


def test_jw_matches_dense_ladders():
    f = FermionOperator(
        [(((2, True), (0, False)), 1.0), (((0, True), (2, False)), 1.0)]
    )
    q = jordan_wigner(f, 3)
    assert np.allclose(dense_operator(q), dense_fermion(f, 3), atol=1e-12)


def test_jw_anticommutation_exhaustive_4so():
    for p in range(4):
        for q in range(4):
            f = FermionOperator(
                [
                    (((p, False), (q, True)), 1.0),
                    (((q, True), (p, False)), 1.0),
                ]
            )
            mat = dense_operator(jordan_wigner(f, 4))
            want = np.eye(16) if p == q else np.zeros((16, 16))
            assert np.allclose(mat, want, atol=1e-12)


def test_jw_hermitian_gives_real_coefficients(manifest):
    _, h, _, _, _ = problem("h2_sto3g_0.735")
    assert h.is_hermitian(1e-10)


def test_hamiltonian_commutes_with_number(manifest):
    _, h, _, _, _ = problem("h2_sto3g_0.735")
    n_op = number_operator(h.n_qubits)
    assert len(h.commutator(n_op).simplify(1e-10)) == 0


def test_constant_only_hamiltonian():
    mi = MolecularIntegrals(1, 0, 0, 3.5, np.zeros((1, 1)), np.zeros((1, 1, 1, 1)))
    h = qubit_hamiltonian(mi)
    assert len(h) == 1
    assert np.isclose(h.coefficient(PauliString.identity(2)), 3.5)


def test_diagonal_one_body_terms():
    mi = MolecularIntegrals(
        1, 1, 1, 0.0, np.array([[-1.25]]), np.zeros((1, 1, 1, 1))
    )
    fop = build_hamiltonian(mi)
    assert len(fop.terms) == 2
    for ops, coeff in fop.terms:
        assert coeff == -1.25
        assert ops[0][1] and not ops[1][1]
        assert ops[0][0] == ops[1][0]


def test_h2_sector_matrix_matches_fci(manifest):
    # dense JW Hamiltonian restricted to the 2-electron sector reproduces FCI
    from vqebench.fci import sector_basis

    mi, h, sec, _, e_fci = problem("h2_sto3g_0.735")
    dense = dense_operator(h)
    sub = dense[np.ix_(sec.determinants, sec.determinants)]
    vals = np.linalg.eigvalsh(sub)
    assert abs(vals[0] - e_fci) < 1e-10


def test_generator_antihermitian_and_unitary_exp():
    gen = ExcitationGenerator("single", (0,), (2,), "uccsd")
    op = realize_generator(gen, 4)
    assert op.is_anti_hermitian()
    mat = dense_operator(op)
    u = dense_expm(0.37 * mat)
    assert np.allclose(u @ u.conj().T, np.eye(16), atol=1e-12)


def test_generator_spin_violation():
    with pytest.raises(SpinViolationError):
        ExcitationGenerator("double", (0, 2), (1, 4), "uccsd")


def test_h2_double_spans_fci_space(manifest):
    mi, h, sec, ref, e_fci = problem("h2_sto3g_0.735")
    gen = ExcitationGenerator("double", (0, 1), (2, 3), "uccsd")
    a = dense_operator(realize_generator(gen, 4))
    hf = np.zeros(16, dtype=complex)
    hf[mi.hf_occupation()] = 1.0
    energies = []
    hmat = dense_operator(h)
    for theta in np.linspace(-1.5, 1.5, 2001):
        psi = dense_expm(theta * a) @ hf
        energies.append(np.real(psi.conj() @ hmat @ psi))
    assert min(energies) < e_fci + 1e-6  # sweeps through the FCI ground state
