"""Excited-state solvers: VQD deflation, folded-spectrum VQE, and qEOM."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .drivers import (
    OptimizerConfig,
    VQEResult,
    _apply_op_arrays,
    _as_ops,
    _prepare,
    _support_of,
    adapt_vqe,
    minimize,
)
from .fci import SectorBasis
from .fermion import ExcitationGenerator, MolecularIntegrals, jordan_wigner
from .pauli import QubitOperator
from .pools import OperatorPool, generalized_pool
from .statevector import Statevector, apply_operator, expectation, overlap


@dataclass
class DeflationSet:
    states: list[tuple[Statevector, float]] = field(default_factory=list)
    betas: list[float] = field(default_factory=list)

    def __post_init__(self):
        if len(self.states) != len(self.betas):
            raise ValueError("betas must match states one-to-one")
        if any(b <= 0 for b in self.betas):
            raise ValueError("penalty weights must be positive")


def default_beta(h: QubitOperator) -> float:
    """2x the coefficient-sum spectral bound: dominates any gap of H."""
    return 2.0 * h.abs_coeff_sum()


def _deflated_cost(h_apply, lower_states, betas, support):
    vecs = [s.amplitudes for s, _ in lower_states]

    def apply(amps: np.ndarray) -> np.ndarray:
        out = h_apply(amps)
        for v, beta in zip(vecs, betas):
            out = out + beta * np.vdot(v, amps) * v
        return out

    return apply


def vqd(
    h: QubitOperator,
    reference: Statevector,
    ansatz_factory,
    k: int,
    cfg: OptimizerConfig | None = None,
    sector: SectorBasis | None = None,
    betas: list[float] | None = None,
    max_retries: int = 3,
) -> list[VQEResult]:
    """States 0..k by sequentially minimizing F = <H> + sum_i beta_i |<psi|psi_i>|^2.

    ansatz_factory(level, cost_apply) returns the VQEResult of minimizing
    the given cost; overlaps are exact, and a level that collapses onto a
    lower state (|overlap|^2 > 0.5) is retried with doubled penalties.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    cfg = cfg or OptimizerConfig()
    support = _support_of(reference, sector)
    h_apply = _apply_op_arrays(h, support)
    base_beta = default_beta(h)
    results: list[VQEResult] = []
    found: list[tuple[Statevector, float]] = []

    for level in range(k + 1):
        level_betas = (
            [base_beta] * level if betas is None else [betas[i] for i in range(level)]
        )
        attempt = 0
        while True:
            cost = _deflated_cost(h_apply, found, level_betas, support)
            res = ansatz_factory(level, cost)
            psi = Statevector(
                reference.n_qubits,
                _prepare(reference, res.ansatz, res.parameters, support),
            )
            energy = float(np.real(expectation(psi, h, support)))
            overlaps = [abs(overlap(s, psi)) ** 2 for s, _ in found]
            res.energy = energy
            res.flavor = "vqd"
            res.extras.update(
                {"level": level, "betas": list(level_betas), "overlaps_sq": overlaps}
            )
            if not overlaps or max(overlaps) <= 0.5:
                break
            attempt += 1
            if attempt > max_retries:
                res.converged = False
                res.extras["collapsed"] = True
                warnings.warn(f"VQD level {level} collapsed onto a lower state")
                break
            level_betas = [2.0 * b for b in level_betas]
        results.append(res)
        found.append((psi, energy))
    return results


def adapt_ansatz_factory(
    h: QubitOperator,
    reference: Statevector,
    pool: OperatorPool,
    eps_conv: float,
    cfg: OptimizerConfig | None = None,
    sector: SectorBasis | None = None,
):
    """ADAPT growth against the deflated cost.

    Greedy growth can terminate on any eigenstate orthogonal to the
    deflated set (every eigenstate zeroes all pool gradients), so this
    factory may return a higher state than the target level; the fixed
    generalized ansatz with multistarts is the robust default.
    """

    def factory(level: int, cost_apply) -> VQEResult:
        return adapt_vqe(
            h, reference, pool, eps_conv, cfg, sector=sector,
            apply_cost=cost_apply, flavor="vqd-adapt",
        )

    return factory


def fixed_ansatz_factory(
    h: QubitOperator,
    reference: Statevector,
    ansatz,
    cfg: OptimizerConfig | None = None,
    sector: SectorBasis | None = None,
    n_starts: int = 4,
):
    """Fixed ansatz minimized from several seeded starts (per VQD level)."""

    def factory(level: int, cost_apply) -> VQEResult:
        best = None
        for s in range(max(1, n_starts)):
            local = OptimizerConfig(
                **{**(cfg.__dict__ if cfg else OptimizerConfig().__dict__)}
            )
            local.seed = (cfg.seed if cfg else 0) + 1000 * level + s
            rng = np.random.default_rng(local.seed)
            theta0 = (
                np.zeros(len(ansatz)) if s == 0
                else 0.2 * rng.standard_normal(len(ansatz))
            )
            res = minimize(h, reference, ansatz, local, theta0, sector=sector,
                           apply_cost=cost_apply)
            if best is None or res.extras["cost_value"] < best.extras["cost_value"]:
                best = res
        return best

    return factory


def fs_vqe(
    h: QubitOperator,
    reference: Statevector,
    ansatz,
    omega: float,
    cfg: OptimizerConfig | None = None,
    sector: SectorBasis | None = None,
    n_starts: int = 4,
) -> VQEResult:
    """Minimize the folded-spectrum cost F = ||(H - omega)|psi>||^2.

    The cost is evaluated as a squared norm via two operator applications,
    never expanding (H - omega)^2 into Pauli terms; the reported energy is
    <psi|H|psi> at the optimum.
    """
    cfg = cfg or OptimizerConfig()
    support = _support_of(reference, sector)
    shifted = h - QubitOperator.identity(h.n_qubits, omega)
    sh_apply = _apply_op_arrays(shifted, support)
    h_apply = _apply_op_arrays(h, support)

    def cost(amps):
        return sh_apply(sh_apply(amps))

    ops = _as_ops(ansatz)
    best = None
    for s in range(max(1, n_starts)):
        rng = np.random.default_rng(cfg.seed + s)
        theta0 = np.zeros(len(ops)) if s == 0 else 0.3 * rng.standard_normal(len(ops))
        res = minimize(h, reference, ops, cfg, theta0, sector=sector,
                       apply_cost=cost, flavor="fs-vqe")
        if best is None or res.extras["cost_value"] < best.extras["cost_value"]:
            best = res
    psi = _prepare(reference, ops, best.parameters, support)
    best.energy = float(np.real(np.vdot(psi, h_apply(psi))))
    best.extras.update({"omega": omega, "fs_cost": best.extras["cost_value"]})
    return best


# -- qEOM ----------------------------------------------------------------------


@dataclass
class EomBasis:
    """Excitation operators E_mu (JW images of T, not anti-Hermitized)."""

    operators: list[QubitOperator]
    labels: list[str]

    @classmethod
    def singles_doubles(cls, mi: MolecularIntegrals) -> "EomBasis":
        from itertools import combinations

        from .fermion import FermionOperator

        ops, labels = [], []
        occ = mi.occupied_spin_orbitals()
        virt = mi.virtual_spin_orbitals()
        for i in occ:
            for a in virt:
                if (i & 1) != (a & 1):
                    continue
                gen = ExcitationGenerator("single", (i,), (a,), "uccsd")
                op = jordan_wigner(
                    FermionOperator([(((a, True), (i, False)), 1.0)]), mi.n_qubits
                )
                if op:
                    ops.append(op)
                    labels.append(gen.describe())
        for (i, j) in combinations(occ, 2):
            for (a, b) in combinations(virt, 2):
                if tuple(sorted((i & 1, j & 1))) != tuple(sorted((a & 1, b & 1))):
                    continue
                gen = ExcitationGenerator("double", (i, j), (a, b), "uccsd")
                op = jordan_wigner(
                    FermionOperator(
                        [(((a, True), (b, True), (j, False), (i, False)), 1.0)]
                    ),
                    mi.n_qubits,
                )
                if op:
                    ops.append(op)
                    labels.append(gen.describe())
        return cls(ops, labels)


@dataclass
class EomMatrices:
    m: np.ndarray
    q: np.ndarray
    v: np.ndarray
    w: np.ndarray


class MetricSingularError(RuntimeError):
    pass


def eom_matrices(
    h: QubitOperator, ground: Statevector, basis: EomBasis, support=None
) -> EomMatrices:
    """M, Q, V, W from exact expectations on the ground state.

    M_uv = <0|[E_u^+, [H, E_v]]|0>      Q_uv = -<0|[E_u^+, [H, E_v^+]]|0>
    V_uv = <0|[E_u^+, E_v]|0>           W_uv = -<0|[E_u^+, E_v^+]|0>
    computed from cached vectors E_u|0>, E_u^+|0>, H E_u^(+)|0>.
    """
    n = len(basis.operators)
    sup = _support_of(ground, None) if support is None else support
    h_apply = _apply_op_arrays(h, sup)
    psi = ground.amplitudes
    w_vec = h_apply(psi)
    u, d, hu, hd = [], [], [], []
    e_apply, edag_apply = [], []
    for op in basis.operators:
        ap = _apply_op_arrays(op, sup)
        adp = _apply_op_arrays(op.dagger(), sup)
        e_apply.append(ap)
        edag_apply.append(adp)
        u.append(ap(psi))
        d.append(adp(psi))
        hu.append(h_apply(u[-1]))
        hd.append(h_apply(d[-1]))
    m = np.zeros((n, n), dtype=np.complex128)
    q = np.zeros((n, n), dtype=np.complex128)
    v = np.zeros((n, n), dtype=np.complex128)
    w = np.zeros((n, n), dtype=np.complex128)
    for mu in range(n):
        for nu in range(n):
            # [H, E_nu]|0> and the re-ordered term through E_mu^+|0>
            c_nu = hu[nu] - e_apply[nu](w_vec)
            m[mu, nu] = np.vdot(u[mu], c_nu) - (
                np.vdot(w_vec, e_apply[nu](d[mu])) - np.vdot(d[nu], hd[mu])
            )
            cdag_nu = hd[nu] - edag_apply[nu](w_vec)
            q[mu, nu] = -(
                np.vdot(u[mu], cdag_nu)
                - (np.vdot(w_vec, edag_apply[nu](d[mu])) - np.vdot(u[nu], hd[mu]))
            )
            v[mu, nu] = np.vdot(u[mu], u[nu]) - np.vdot(d[nu], d[mu])
            w[mu, nu] = -(np.vdot(u[mu], d[nu]) - np.vdot(u[nu], d[mu]))
    return EomMatrices(m, q, v, w)


def qeom(
    h: QubitOperator,
    ground: Statevector,
    basis: EomBasis,
    support=None,
    cond_cap: float = 1e12,
) -> tuple[list[float], EomMatrices]:
    """Positive-branch excitation energies from the paired secular problem.

    Solves [[M, Q], [Q*, M*]] (X;Y) = E [[V, W], [-W*, -V*]] (X;Y); a
    numerically singular metric is pruned by dropping null directions.
    """
    if not basis.operators:
        return [], EomMatrices(*(np.zeros((0, 0)),) * 4)
    mats = eom_matrices(h, ground, basis, support)
    herm_dev = np.max(np.abs(mats.m - mats.m.conj().T))
    if herm_dev > 1e-9:
        warnings.warn(f"qEOM M-matrix Hermiticity deviation {herm_dev:.2e}")
    big_a = np.block([[mats.m, mats.q], [mats.q.conj(), mats.m.conj()]])
    big_b = np.block([[mats.v, mats.w], [-mats.w.conj(), -mats.v.conj()]])
    cond = np.linalg.cond(big_b)
    if cond > cond_cap:
        # project out null directions of the metric
        uu, ss, vv = np.linalg.svd(big_b)
        keep = ss > ss[0] / cond_cap
        if not np.any(keep):
            raise MetricSingularError("qEOM metric is numerically zero")
        proj = vv[keep].conj().T
        big_a = proj.conj().T @ big_a @ proj
        big_b = proj.conj().T @ big_b @ proj
        warnings.warn(
            f"qEOM metric condition {cond:.2e}; pruned to {int(keep.sum())} directions"
        )
    vals = scipy.linalg.eig(big_a, big_b, right=False)
    real_vals = []
    for lam in vals:
        if not np.isfinite(lam):
            continue
        if abs(lam.imag) > 1e-6:
            continue
        if lam.real > 1e-9:
            real_vals.append(float(lam.real))
    return sorted(real_vals), mats
