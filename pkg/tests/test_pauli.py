import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vqebench.pauli import (
    DimensionError,
    PauliString,
    QubitOperator,
    pauli_mul,
)

from ._dense import dense_operator, dense_pauli, random_operator


def test_single_qubit_products():
    x = PauliString.from_label("X")
    y = PauliString.from_label("Y")
    out, phase = pauli_mul(x, y)
    assert out.label() == "Z" and phase == 1j
    out, phase = pauli_mul(y, x)
    assert out.label() == "Z" and phase == -1j


@pytest.mark.parametrize("label", ["I", "X", "Y", "Z", "XYZI", "ZZYX"])
def test_involution(label):
    p = PauliString.from_label(label)
    out, phase = pauli_mul(p, p)
    assert out.is_identity and phase == 1.0


def test_mul_matches_dense_exhaustive_2q():
    for xa in range(4):
        for za in range(4):
            for xb in range(4):
                for zb in range(4):
                    a = PauliString(2, xa, za)
                    b = PauliString(2, xb, zb)
                    out, phase = pauli_mul(a, b)
                    lhs = dense_pauli(a.label()) @ dense_pauli(b.label())
                    assert np.allclose(lhs, phase * dense_pauli(out.label()))


def test_mul_matches_dense_random_4q():
    rng = np.random.default_rng(7)
    for _ in range(200):
        a = PauliString(4, int(rng.integers(16)), int(rng.integers(16)))
        b = PauliString(4, int(rng.integers(16)), int(rng.integers(16)))
        out, phase = pauli_mul(a, b)
        lhs = dense_pauli(a.label()) @ dense_pauli(b.label())
        assert np.allclose(lhs, phase * dense_pauli(out.label()))


def test_associativity_dense_3q():
    rng = np.random.default_rng(11)
    for _ in range(100):
        ps = [
            PauliString(3, int(rng.integers(8)), int(rng.integers(8)))
            for _ in range(3)
        ]
        ab, ph1 = pauli_mul(ps[0], ps[1])
        abc1, ph2 = pauli_mul(ab, ps[2])
        bc, ph3 = pauli_mul(ps[1], ps[2])
        abc2, ph4 = pauli_mul(ps[0], bc)
        assert abc1 == abc2
        assert np.isclose(ph1 * ph2, ph3 * ph4)


def test_size_mismatch_raises():
    with pytest.raises(DimensionError):
        pauli_mul(PauliString.from_label("X"), PauliString.from_label("XX"))


def test_cancellation_and_prune():
    x0 = PauliString.from_label("XI")
    op = QubitOperator(2, {x0: 1.0}) + QubitOperator(2, {x0: -1.0})
    assert len(op) == 0
    tiny = QubitOperator(2, {PauliString.from_label("ZI"): 1e-15})
    assert len(tiny.simplify(1e-12)) == 0


def test_simplify_preserves_operator_dense():
    rng = np.random.default_rng(3)
    op = random_operator(3, 12, rng)
    assert np.allclose(dense_operator(op), dense_operator(op.simplify(0.0)))


def test_commutator_commuting_strings_vanishes():
    z0 = QubitOperator.from_label("ZI")
    z1 = QubitOperator.from_label("IZ")
    assert len(z0.commutator(z1)) == 0


def test_commutator_single_qubit():
    x = QubitOperator.from_label("X")
    z = QubitOperator.from_label("Z")
    comm = x.commutator(z)
    y = PauliString.from_label("Y")
    assert len(comm) == 1
    assert np.isclose(comm.coefficient(y), -2j)


def test_commutator_matches_dense_and_antihermitian():
    rng = np.random.default_rng(5)
    for _ in range(20):
        a = random_operator(3, 6, rng, hermitian=True)
        b = random_operator(3, 6, rng, hermitian=True)
        comm = a.commutator(b)
        ca = dense_operator(a)
        cb = dense_operator(b)
        assert np.allclose(dense_operator(comm), ca @ cb - cb @ ca, atol=1e-10)
        # commutator of Hermitians is anti-Hermitian: purely imaginary coeffs
        assert comm.is_anti_hermitian()


def test_operator_product_matches_dense():
    rng = np.random.default_rng(9)
    for _ in range(20):
        a = random_operator(3, 5, rng)
        b = random_operator(3, 5, rng)
        assert np.allclose(
            dense_operator(a * b), dense_operator(a) @ dense_operator(b), atol=1e-10
        )


def test_hermiticity_predicate():
    rng = np.random.default_rng(13)
    h = random_operator(3, 8, rng, hermitian=True)
    assert h.is_hermitian()
    assert not (1j * h).is_hermitian() or len(h) == 0


def test_text_roundtrip():
    rng = np.random.default_rng(17)
    op = random_operator(4, 10, rng)
    back = QubitOperator.from_lines(op.to_lines())
    assert np.allclose(dense_operator(op), dense_operator(back))


def test_deterministic_iteration_order():
    rng = np.random.default_rng(19)
    op = random_operator(4, 12, rng)
    keys = [ps.sort_key() for ps, _ in op.items()]
    assert keys == sorted(keys)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 255), st.integers(0, 255))
def test_every_string_squares_to_identity(x, z):
    p = PauliString(8, x, z)
    out, phase = pauli_mul(p, p)
    assert out.is_identity and phase == 1.0
