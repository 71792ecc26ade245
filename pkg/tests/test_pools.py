import numpy as np
import pytest

from vqebench.pools import (
    generalized_pool,
    mp2_amplitudes,
    mp2_energy,
    qubit_pool,
    spatial_generalized_pool,
    uccsd_pool,
    uscc_screen,
)

from .conftest import problem


def test_uccsd_pool_sizes_match_benchmark_table(manifest):
    # the deterministic parameter-count triple that defines the convention
    mi_h4, *_ = problem("h4_sto3g_1.200")
    mi_h4b, *_ = problem("h4_631g_1.200")
    mi_h2o, *_ = problem("h2o_sto3g_1.200")
    assert uccsd_pool(mi_h4).size == 26
    assert uccsd_pool(mi_h4b).size == 198
    assert uccsd_pool(mi_h2o).size == 140


def test_uccsd_pool_h2_contents(manifest):
    mi, *_ = problem("h2_sto3g_0.735")
    pool = uccsd_pool(mi)
    kinds = sorted(e.generator.kind for e in pool.entries)
    assert kinds == ["double", "single", "single"]  # frozen regression


def test_pool_operators_antihermitian_normalized(manifest):
    mi, *_ = problem("h2o_sto3g_0.950")
    for pool in (uccsd_pool(mi), spatial_generalized_pool(mi)):
        for e in pool.entries[:25]:
            assert e.operator.is_anti_hermitian()
            assert abs(e.operator.abs_coeff_sum() - 1.0) < 1e-12


def test_generalized_superset_and_counts(manifest):
    for label in ("h2_sto3g_0.735", "h4_sto3g_1.200"):
        mi, *_ = problem(label)
        up = uccsd_pool(mi)
        gp = generalized_pool(mi)
        assert up.keys() <= gp.keys()
        assert gp.size > up.size
    mi, *_ = problem("h4_sto3g_1.200")
    assert generalized_pool(mi).size == 162  # frozen regression
    for e in generalized_pool(mi).entries:
        assert e.operator.is_anti_hermitian()


def test_generalized_pool_one_orbital_empty():
    from vqebench.fermion import MolecularIntegrals

    mi = MolecularIntegrals(
        1, 1, 1, 0.0, np.array([[-1.0]]), np.zeros((1, 1, 1, 1))
    )
    assert generalized_pool(mi).size == 0


def test_qubit_pool_splits_strings(manifest):
    mi, *_ = problem("h2_sto3g_0.735")
    base = uccsd_pool(mi)
    qp = qubit_pool(base)
    assert qp.size > base.size
    for e in qp.entries:
        assert e.operator.n_terms == 1
        ((ps, coeff),) = list(e.operator.items())
        assert ps.x_mask != 0  # Z-only strings dropped
        assert np.isclose(coeff, 1j)


def test_qubit_pool_rejects_qubit_base(manifest):
    mi, *_ = problem("h2_sto3g_0.735")
    qp = qubit_pool(uccsd_pool(mi))
    with pytest.raises(ValueError):
        qubit_pool(qp)


def test_mp2_two_level_hand_value():
    # one occupied, one virtual spatial orbital with a known gap
    from vqebench.fermion import MolecularIntegrals

    h1 = np.diag([-1.0, 1.0])
    h2 = np.zeros((2, 2, 2, 2))
    # (01|01) = 0.2 couples the paired double; denominators from Fock diag
    for idx in {(0, 1, 0, 1), (1, 0, 0, 1), (0, 1, 1, 0), (1, 0, 1, 0)}:
        h2[idx] = 0.2
    mi = MolecularIntegrals(2, 1, 1, 0.0, h1, h2)
    amps = mp2_amplitudes(mi)
    # t2[0a,0b -> 1a,1b] = <01||11...>: paired double amplitude = (01|01)/(2e0-2e1)
    occ, virt = amps.occ, amps.virt
    t = amps.t2[0, 1, 0, 1]
    f = mi.h1 + 0.0
    # fock diag: f00 = h00 + 2(00|00)-(00|00) = -1; f11 = 1 + 2(11|00)-(10|01)
    e0 = -1.0
    e1 = 1.0 + 0.0 - 0.2 * 0.0  # (11|00)=0, (10|01)=0.2? -> check exchange
    # hand value: numerator <01||11> reduces to (01|01) = 0.2 for the
    # alpha-beta paired channel; denominator 2(e0 - e1)
    denom = 2 * (-1.0 - (1.0 - 0.2))
    assert np.isclose(t, 0.2 / denom, atol=1e-12)


def test_mp2_energy_negative(manifest):
    mi, *_ = problem("h2_sto3g_0.735")
    amps = mp2_amplitudes(mi)
    assert mp2_energy(mi, amps) < 0


def test_mp2_antisymmetry(manifest):
    mi, *_ = problem("h4_sto3g_1.200")
    t2 = mp2_amplitudes(mi).t2
    assert np.allclose(t2, -np.transpose(t2, (1, 0, 2, 3)), atol=1e-12)
    assert np.allclose(t2, -np.transpose(t2, (0, 1, 3, 2)), atol=1e-12)


def test_mp2_degenerate_guard():
    from vqebench.fermion import MolecularIntegrals

    h1 = np.zeros((2, 2))
    h2 = np.zeros((2, 2, 2, 2))
    for idx in {(0, 1, 0, 1), (1, 0, 0, 1), (0, 1, 1, 0), (1, 0, 1, 0)}:
        h2[idx] = 0.1
    mi = MolecularIntegrals(2, 1, 1, 0.0, h1, h2)
    with pytest.warns(UserWarning):
        amps = mp2_amplitudes(mi)
    assert np.all(amps.t2 == 0.0)
    assert amps.n_degenerate_zeroed > 0


def test_uscc_empty_at_huge_threshold(manifest):
    mi, *_ = problem("h2o_sto3g_0.950")
    pool = uscc_screen(mi, mp2_amplitudes(mi), 1e3)
    assert pool.size == 0


def test_uscc_saturates_to_uccsd(manifest):
    mi, *_ = problem("h2_sto3g_0.735")
    pool = uscc_screen(mi, mp2_amplitudes(mi), 1e-120, max_round=1)
    assert pool.keys() == uccsd_pool(mi).keys()


def test_uscc_monotone_in_threshold(manifest):
    mi, *_ = problem("h2o_sto3g_1.450")
    amps = mp2_amplitudes(mi)
    prev = None
    for eps in (1e-1, 1e-2, 1e-3, 1e-4):
        keys = uscc_screen(mi, amps, eps).keys()
        if prev is not None:
            assert prev <= keys
        prev = keys


def test_uscc_invalid_threshold(manifest):
    mi, *_ = problem("h2_sto3g_0.735")
    with pytest.raises(ValueError):
        uscc_screen(mi, mp2_amplitudes(mi), 0.0)


def test_uscc_h2_double_present_at_every_threshold(manifest):
    # the paired double carries the H2 correlation; the benchmark's flavor
    # degeneracy on H2 hinges on it passing every threshold
    for label in ("h2_sto3g_0.500", "h2_sto3g_0.735", "h2_sto3g_2.500"):
        mi, *_ = problem(label)
        amps = mp2_amplitudes(mi)
        for eps in (1e-1, 1e-2, 1e-3, 1e-4):
            pool = uscc_screen(mi, amps, eps)
            assert any(e.generator.kind == "double" for e in pool.entries)


def test_uscc_h2o_geometry_averages_match_table(manifest):
    # Table-1 row for H2O/STO-3G: {8, 32, 123, 199} within +-30%
    grid = ["h2o_sto3g_%.3f" % r for r in (0.95, 1.2, 1.45, 1.7, 1.95, 2.2)]
    targets = {1e-1: 8, 1e-2: 32, 1e-3: 123, 1e-4: 199}
    for eps, target in targets.items():
        sizes = []
        for label in grid:
            mi, *_ = problem(label)
            sizes.append(uscc_screen(mi, mp2_amplitudes(mi), eps).size)
        mean = np.mean(sizes)
        assert 0.7 * target <= mean <= 1.3 * target, (eps, mean)


def test_number_conservation_of_pool_operators(manifest):
    from vqebench.fci import check_number_conserving

    mi, *_ = problem("h2_sto3g_0.735")
    for pool in (uccsd_pool(mi), generalized_pool(mi)):
        for e in pool.entries:
            check_number_conserving(1j * e.operator)  # i*A is Hermitian-ish input
    qp = qubit_pool(uccsd_pool(mi))
    flagged = 0
    for e in qp.entries:
        try:
            check_number_conserving(1j * e.operator)
        except Exception:
            flagged += 1
    assert flagged > 0  # qubit-pool entries trade symmetry for gate economy


def test_pool_dump_jsonl(manifest):
    import json

    mi, *_ = problem("h2_sto3g_0.735")
    pool = uscc_screen(mi, mp2_amplitudes(mi), 1e-2)
    lines = pool.dump_jsonl().splitlines()
    assert len(lines) == pool.size
    row = json.loads(lines[0])
    assert set(row) == {"flavor", "generator", "screening_value", "n_pauli_terms"}
