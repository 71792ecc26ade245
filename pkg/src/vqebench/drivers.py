"""Ground-state drivers: plain VQE, ADAPT-VQE, USCC, nu-VQE, FMO assembly.

Gradients over product ansatzes are exact adjoint double sweeps: one
forward pass builds the prepared state, and a single backward pass peels
exponentials off both the state and the cost vector, yielding every
dE/dtheta_k at the cost of about two ansatz applications.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize as scipy_minimize

from . import _kernels
from .fci import SectorBasis
from .pauli import QubitOperator
from .pools import OperatorPool, mp2_amplitudes, uscc_screen
from .statevector import AnsatzOp, Statevector, apply_operator, expectation, overlap

VARIATIONAL_SLACK = 1e-9


@dataclass
class OptimizerConfig:
    method: str = "quasi-newton"  # or "nelder-mead"
    energy_tol: float = 1e-10
    grad_tol: float = 1e-8
    max_evals: int = 100_000
    restart_count: int = 3
    restart_scale: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.energy_tol <= 0 or self.grad_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class TraceRow:
    iteration: int
    n_ops: int
    energy: float
    gradient_norm: float
    selected: str | None = None
    selected_index: int | None = None


@dataclass
class VQEResult:
    energy: float
    parameters: np.ndarray
    ansatz: list[AnsatzOp]
    iterations: int
    gradient_norm_final: float
    trace: list[TraceRow] = field(default_factory=list)
    flavor: str = "vqe"
    converged: bool = True
    n_evals: int = 0
    extras: dict = field(default_factory=dict)

    @property
    def n_params(self) -> int:
        return len(self.parameters)


def _support_of(reference: Statevector, sector: SectorBasis | None):
    if sector is None:
        return np.arange(1 << reference.n_qubits, dtype=np.int64)
    return sector.determinants


def _as_ops(ansatz) -> list[AnsatzOp]:
    out = []
    for gen in ansatz:
        if isinstance(gen, AnsatzOp):
            out.append(gen)
        elif isinstance(gen, QubitOperator):
            out.append(AnsatzOp(gen))
        else:  # pool entry
            out.append(
                AnsatzOp(gen.operator, label=gen.describe(),
                         parts=getattr(gen, "parts", None))
            )
    return out


def _prepare(reference: Statevector, ops: list[AnsatzOp], theta, support) -> np.ndarray:
    amps = reference.amplitudes.copy()
    for op, th in zip(ops, theta):
        op.apply_exp_inplace(amps, float(th), support)
    return amps


# amplitude-stack memory allowance for the gradient sweep (complex entries)
_SWEEP_STACK_CAP = 100_000_000


def _sweep_gradient(reference, ops, theta, support, apply_cost):
    """(E-like inner product, gradient) for cost <psi|C psi> with C = apply_cost.

    apply_cost maps an amplitude array to C|psi>; the gradient returned is
    dE/dtheta_k = 2 Re <C psi | d psi/d theta_k> for the product ansatz.
    Intermediate states are stacked when memory allows, halving the number
    of exponential un-applications in the backward pass.
    """
    n = len(ops)
    dim = reference.amplitudes.shape[0]
    use_stack = n * dim <= _SWEEP_STACK_CAP
    grads = np.zeros(n)
    if use_stack:
        stack = [reference.amplitudes.copy()]
        for op, th in zip(ops, theta):
            amps = stack[-1].copy()
            op.apply_exp_inplace(amps, float(th), support)
            stack.append(amps)
        psi = stack[-1]
        lam = apply_cost(psi)
        value = float(np.real(np.vdot(psi, lam)))
        for k in range(n - 1, -1, -1):
            a_psi = ops[k].apply_generator(stack[k + 1], support)
            grads[k] = 2.0 * float(np.real(np.vdot(lam, a_psi)))
            if k > 0:
                ops[k].apply_exp_inplace(lam, -float(theta[k]), support)
        return value, grads, psi
    psi = _prepare(reference, ops, theta, support)
    lam = apply_cost(psi)
    value = float(np.real(np.vdot(psi, lam)))
    cur = psi.copy()
    for k in range(n - 1, -1, -1):
        a_psi = ops[k].apply_generator(cur, support)
        grads[k] = 2.0 * float(np.real(np.vdot(lam, a_psi)))
        if k > 0:
            ops[k].apply_exp_inplace(cur, -float(theta[k]), support)
            ops[k].apply_exp_inplace(lam, -float(theta[k]), support)
    return value, grads, psi


def _apply_op_arrays(op: QubitOperator, support):
    xs, zs, effs = op.arrays()

    def apply(amps: np.ndarray) -> np.ndarray:
        out = np.zeros_like(amps)
        _kernels.apply_terms(amps, out, xs, zs, effs, support)
        return out

    return apply


def energy_and_gradient(
    h: QubitOperator,
    reference: Statevector,
    ansatz,
    theta,
    sector: SectorBasis | None = None,
):
    """E(theta) and its exact gradient for the product ansatz."""
    ops = _as_ops(ansatz)
    support = _support_of(reference, sector)
    e, g, _ = _sweep_gradient(reference, ops, np.asarray(theta, float), support,
                              _apply_op_arrays(h, support))
    return e, g


def minimize(
    h: QubitOperator,
    reference: Statevector,
    ansatz,
    cfg: OptimizerConfig | None = None,
    theta0=None,
    sector: SectorBasis | None = None,
    flavor: str = "vqe",
    apply_cost=None,
    energy_of=None,
) -> VQEResult:
    """Quasi-Newton descent of <psi(theta)|H|psi(theta)> (or a custom cost).

    Stagnation triggers up to cfg.restart_count seeded random-perturbation
    restarts; exhausting max_evals flags the result instead of raising.
    """
    cfg = cfg or OptimizerConfig()
    ops = _as_ops(ansatz)
    support = _support_of(reference, sector)
    cost_apply = apply_cost if apply_cost is not None else _apply_op_arrays(h, support)
    theta = np.zeros(len(ops)) if theta0 is None else np.asarray(theta0, float).copy()
    if len(theta) != len(ops):
        raise ValueError("theta0 length does not match ansatz length")

    evals = [0]

    def fun(x):
        evals[0] += 1
        e, g, _ = _sweep_gradient(reference, ops, x, support, cost_apply)
        return e, g

    if not ops:
        psi = reference.amplitudes.copy()
        e0 = float(np.real(np.vdot(psi, cost_apply(psi))))
        return VQEResult(e0, np.zeros(0), [], 0, 0.0, flavor=flavor,
                         trace=[TraceRow(0, 0, e0, 0.0)])

    rng = np.random.default_rng(cfg.seed)
    best_x, best_e, best_g = None, np.inf, None
    n_iter = 0
    method = "BFGS" if cfg.method == "quasi-newton" else "Nelder-Mead"
    start = theta
    for attempt in range(cfg.restart_count + 1):
        if method == "BFGS":
            res = scipy_minimize(
                fun, start, jac=True, method="BFGS",
                options={"gtol": cfg.grad_tol, "maxiter": max(200, 30 * len(ops))},
            )
            gnorm = float(np.linalg.norm(res.jac))
        else:
            res = scipy_minimize(
                lambda x: fun(x)[0], start, method="Nelder-Mead",
                options={"xatol": 1e-10, "fatol": cfg.energy_tol,
                         "maxiter": cfg.max_evals},
            )
            gnorm = float(np.linalg.norm(fun(res.x)[1]))
        n_iter += int(res.nit)
        if res.fun < best_e:
            improvement = best_e - res.fun
            best_x, best_e, best_g = res.x, float(res.fun), gnorm
        else:
            improvement = 0.0
        # BFGS commonly terminates a factor of a few above gtol from line
        # search precision loss; restart only on genuine stagnation
        if best_g <= 50 * cfg.grad_tol or evals[0] >= cfg.max_evals:
            break
        if attempt > 0 and improvement < cfg.energy_tol:
            break
        start = best_x + cfg.restart_scale * rng.standard_normal(len(ops))
    converged = best_g <= max(50 * cfg.grad_tol, 1e-6) and evals[0] < cfg.max_evals
    energy = best_e
    if energy_of is not None:
        energy = energy_of(best_x)
    return VQEResult(
        energy=float(energy),
        parameters=best_x,
        ansatz=ops,
        iterations=n_iter,
        gradient_norm_final=best_g,
        flavor=flavor,
        converged=converged,
        n_evals=evals[0],
        trace=[TraceRow(0, len(ops), float(energy), best_g)],
        extras={"cost_value": best_e},
    )


def pool_gradients(
    h_psi: np.ndarray, psi: np.ndarray, pool: OperatorPool, support
) -> np.ndarray:
    """g_k = <psi|[H, A_k]|psi> = 2 Re <H psi|A_k psi> for every pool entry.

    Packed into one kernel call; sources iterate over the support only, so
    sector-confined states pay per-determinant rather than per-amplitude.
    """
    xs_list, zs_list, eff_list, offsets = [], [], [], [0]
    for e in pool.entries:
        xs, zs, effs = e.operator.arrays()
        xs_list.append(xs)
        zs_list.append(zs)
        eff_list.append(effs)
        offsets.append(offsets[-1] + len(xs))
    vals = _kernels.group_expectations(
        h_psi, psi,
        np.concatenate(xs_list), np.concatenate(zs_list), np.concatenate(eff_list),
        np.array(offsets, dtype=np.int64), support,
    )
    return 2.0 * np.real(vals)


def adapt_vqe(
    h: QubitOperator,
    reference: Statevector,
    pool: OperatorPool,
    eps_conv: float,
    cfg: OptimizerConfig | None = None,
    sector: SectorBasis | None = None,
    max_ops: int | None = None,
    apply_cost=None,
    flavor: str = "adapt",
    progress=None,
) -> VQEResult:
    """Iterative ansatz growth by largest pool gradient until ||g|| < eps_conv.

    The trace records, per iteration, the pool gradient norm measured on
    the current state and the energy after full re-optimization, so looser
    convergence thresholds can be read off the same run as prefixes.
    """
    if eps_conv <= 0:
        raise ValueError("eps_conv must be positive")
    if not pool.entries:
        raise ValueError("empty operator pool")
    cfg = cfg or OptimizerConfig()
    support = _support_of(reference, sector)
    cost_apply = apply_cost if apply_cost is not None else _apply_op_arrays(h, support)
    pool_ops = [
        AnsatzOp(e.operator, label=e.describe(), parts=e.parts) for e in pool.entries
    ]

    ansatz: list[AnsatzOp] = []
    theta = np.zeros(0)
    trace: list[TraceRow] = []
    psi = reference.amplitudes.copy()
    energy = float(np.real(np.vdot(psi, cost_apply(psi))))
    total_evals = 0
    total_iters = 0
    converged = False
    limit = max_ops if max_ops is not None else len(pool.entries)

    for it in range(limit + 1):
        h_psi = cost_apply(psi)
        grads = pool_gradients(h_psi, psi, pool, support)
        gnorm = float(np.linalg.norm(grads))
        trace.append(TraceRow(it, len(ansatz), energy, gnorm))
        if progress is not None:
            progress(it, len(ansatz), energy, gnorm)
        if gnorm < eps_conv:
            converged = True
            break
        if it == limit:
            break
        # argmax |g| with ties broken toward the lowest pool index
        best = 0
        best_val = -1.0
        for k, g in enumerate(np.abs(grads)):
            if g > best_val + 1e-12:
                best, best_val = k, g
        ansatz.append(pool_ops[best])
        theta = np.append(theta, 0.0)
        # re-optimization only needs enough precision to keep the pool
        # gradient trace trustworthy near eps_conv
        reopt = replace(cfg, grad_tol=max(cfg.grad_tol, 0.02 * eps_conv))
        sub = minimize(h, reference, ansatz, reopt, theta, sector=sector,
                       apply_cost=cost_apply)
        theta = sub.parameters
        energy = sub.extras.get("cost_value", sub.energy)
        total_evals += sub.n_evals
        total_iters += sub.iterations
        trace[-1].selected = pool_ops[best].label
        trace[-1].selected_index = best
        psi = _prepare(reference, ansatz, theta, support)

    if not converged and len(ansatz) >= len(pool.entries):
        warnings.warn("ADAPT exhausted the pool before reaching the threshold")
    return VQEResult(
        energy=energy,
        parameters=theta,
        ansatz=ansatz,
        iterations=total_iters,
        gradient_norm_final=trace[-1].gradient_norm,
        trace=trace,
        flavor=flavor,
        converged=converged,
        n_evals=total_evals,
        extras={"eps_conv": eps_conv, "pool_size": pool.size},
    )


def adapt_milestones(result: VQEResult, eps_list) -> dict[float, tuple[int, float]]:
    """(n_params, energy) at the first trace row satisfying each threshold.

    Valid because ADAPT's selection path is independent of the stopping
    threshold: a looser run is a prefix of a tighter one.
    """
    out = {}
    for eps in eps_list:
        for row in result.trace:
            if row.gradient_norm < eps:
                out[eps] = (row.n_ops, row.energy)
                break
    return out


def uscc_vqe(
    h: QubitOperator,
    reference: Statevector,
    mi,
    eps: float,
    cfg: OptimizerConfig | None = None,
    sector: SectorBasis | None = None,
    max_round: int = 3,
) -> VQEResult:
    """Classically prescreened fixed-pool optimization (threshold eps)."""
    pool = uscc_screen(mi, mp2_amplitudes(mi), eps, max_round=max_round)
    if not pool.entries:
        warnings.warn("USCC screening admitted no operators; returning HF energy")
        res = minimize(h, reference, [], cfg, None, sector=sector, flavor="uscc")
        res.extras.update({"eps": eps, "pool_size": 0, "empty_pool": True})
        return res
    res = minimize(h, reference, [e for e in pool.entries], cfg, None,
                   sector=sector, flavor="uscc")
    res.extras.update({"eps": eps, "pool_size": pool.size})
    return res


# -- nu-VQE -------------------------------------------------------------------


@dataclass
class JastrowParams:
    """J = 1 - sum_i alpha_i Z_i - sum_{i<j} lambda_ij Z_i Z_j."""

    alpha: np.ndarray
    lam: dict[tuple[int, int], float]

    @classmethod
    def zeros(cls, n_qubits: int) -> "JastrowParams":
        return cls(
            np.zeros(n_qubits),
            {(i, j): 0.0 for i in range(n_qubits) for j in range(i + 1, n_qubits)},
        )

    @classmethod
    def unpack(cls, n_qubits: int, vec: np.ndarray) -> "JastrowParams":
        alpha = vec[:n_qubits].copy()
        pairs = [(i, j) for i in range(n_qubits) for j in range(i + 1, n_qubits)]
        lam = {p: float(v) for p, v in zip(pairs, vec[n_qubits:])}
        return cls(alpha, lam)

    def pack(self) -> np.ndarray:
        pairs = sorted(self.lam)
        return np.concatenate([self.alpha, [self.lam[p] for p in pairs]])

    def diagonal(self, n_qubits: int) -> np.ndarray:
        """J is diagonal in the computational basis; return its diagonal."""
        dim = 1 << n_qubits
        idx = np.arange(dim, dtype=np.uint64)
        diag = np.ones(dim)
        for i in range(n_qubits):
            z = 1.0 - 2.0 * ((idx >> np.uint64(i)) & np.uint64(1)).astype(float)
            if self.alpha[i] != 0.0:
                diag -= self.alpha[i] * z
        for (i, j), v in self.lam.items():
            if v == 0.0:
                continue
            zi = 1.0 - 2.0 * ((idx >> np.uint64(i)) & np.uint64(1)).astype(float)
            zj = 1.0 - 2.0 * ((idx >> np.uint64(j)) & np.uint64(1)).astype(float)
            diag -= v * zi * zj
        return diag


NU_VQE_NORM_FLOOR = 1e-10
NU_VQE_PENALTY = 1e3


def _jastrow_basis_diagonals(n_qubits: int) -> list[np.ndarray]:
    """Diagonals of {I, Z_i, Z_i Z_j}: the linear span the Jastrow lives in."""
    dim = 1 << n_qubits
    idx = np.arange(dim, dtype=np.uint64)
    z = [
        1.0 - 2.0 * ((idx >> np.uint64(i)) & np.uint64(1)).astype(float)
        for i in range(n_qubits)
    ]
    diags = [np.ones(dim)] + z
    for i in range(n_qubits):
        for j in range(i + 1, n_qubits):
            diags.append(z[i] * z[j])
    return diags


def _best_jastrow(psi: np.ndarray, h_apply, diags) -> tuple[float, np.ndarray, np.ndarray]:
    """Exact minimum of <psi J H J psi>/<psi J^2 psi> over the Jastrow span.

    For fixed psi the quotient is a generalized Rayleigh quotient in the
    span coefficients, solved by a dense generalized eigenproblem after
    projecting out the null space of the metric.
    """
    vecs = [d * psi for d in diags]
    hvecs = [h_apply(v) for v in vecs]
    k = len(vecs)
    m = np.zeros((k, k))
    s = np.zeros((k, k))
    for a in range(k):
        for b in range(a, k):
            m[a, b] = m[b, a] = float(np.real(np.vdot(vecs[a], hvecs[b])))
            s[a, b] = s[b, a] = float(np.real(np.vdot(vecs[a], vecs[b])))
    w, u = np.linalg.eigh(s)
    keep = w > max(w.max(), 0.0) * 1e-12
    if not np.any(keep):
        return NU_VQE_PENALTY, np.zeros(k), np.zeros_like(psi)
    proj = u[:, keep] / np.sqrt(w[keep])
    mm = proj.T @ m @ proj
    vals, vv = np.linalg.eigh((mm + mm.T) / 2.0)
    coeffs = proj @ vv[:, 0]
    diag = np.zeros_like(diags[0])
    for c, d in zip(coeffs, diags):
        diag += c * d
    return float(vals[0]), coeffs, diag


def nu_vqe(
    h: QubitOperator,
    reference: Statevector,
    ansatz,
    cfg: OptimizerConfig | None = None,
    sector: SectorBasis | None = None,
    theta0=None,
    n_starts: int = 6,
) -> VQEResult:
    """Jastrow-augmented VQE: E = <psi|J H J|psi> / <psi|J^2|psi>.

    The quotient is minimized jointly over (theta, alpha, lambda): for any
    theta the optimal Jastrow coefficients solve a small generalized
    eigenproblem exactly, and the outer theta descent uses the adjoint
    sweep with the envelope-theorem cost operator (JHJ - E J^2)/<J^2>.
    A collapsing norm <J^2> surfaces as a penalty value and flag.
    """
    cfg = cfg or OptimizerConfig()
    ops = _as_ops(ansatz)
    n_qubits = reference.n_qubits
    support = _support_of(reference, sector)
    h_apply = _apply_op_arrays(h, support)
    n_theta = len(ops)
    diags = _jastrow_basis_diagonals(n_qubits)

    def fun(th):
        psi = _prepare(reference, ops, th, support)
        e, coeffs, diag = _best_jastrow(psi, h_apply, diags)
        if e >= NU_VQE_PENALTY:
            return e, np.zeros(n_theta)
        den = float(np.real(np.vdot(diag * psi, diag * psi)))

        def cost(amps):
            return (diag * h_apply(diag * amps) - e * (diag * (diag * amps))) / den

        _, g_theta, _ = _sweep_gradient(reference, ops, th, support, cost)
        return e, g_theta

    rng = np.random.default_rng(cfg.seed)
    base = np.zeros(n_theta) if theta0 is None else np.asarray(theta0, float)
    best = None
    for attempt in range(max(1, n_starts)):
        if attempt == 0:
            start = base
        elif attempt == 1 and n_theta:
            start = base + 0.3 * np.ones(n_theta)
        else:
            start = base + rng.uniform(-1.5, 1.5, n_theta)
        if n_theta:
            res = scipy_minimize(fun, start, jac=True, method="BFGS",
                                 options={"gtol": cfg.grad_tol, "maxiter": 2000})
        else:
            e0, _ = fun(np.zeros(0))
            res = type("R", (), {"x": np.zeros(0), "fun": e0, "nit": 0,
                                 "jac": np.zeros(0)})()
        if best is None or res.fun < best.fun:
            best = res
    th = best.x
    psi = _prepare(reference, ops, th, support)
    e, coeffs, diag = _best_jastrow(psi, h_apply, diags)
    flagged = e >= NU_VQE_PENALTY
    # recover the spec form J = 1 - sum alpha Z - sum lambda ZZ when the
    # constant component allows the rescaling
    jp = JastrowParams.zeros(n_qubits)
    if abs(coeffs[0]) > 1e-12:
        scaled = coeffs / coeffs[0]
        jp.alpha = -scaled[1 : 1 + n_qubits]
        pairs = sorted(jp.lam)
        for p, v in zip(pairs, -scaled[1 + n_qubits :]):
            jp.lam[p] = float(v)
    gnorm = float(np.linalg.norm(best.jac)) if n_theta else 0.0
    return VQEResult(
        energy=float(e),
        parameters=th,
        ansatz=ops,
        iterations=int(best.nit),
        gradient_norm_final=gnorm,
        flavor="nu-vqe",
        converged=bool(not flagged),
        trace=[TraceRow(0, n_theta, float(e), gnorm)],
        extras={
            "jastrow": jp,
            "jastrow_coeffs": coeffs,
            "norm_collapse": flagged,
        },
    )


def fmo_assemble(monomer_energies, dimer_energies) -> float:
    """E = sum_I E_I + sum_{I<J} (E_IJ - E_I - E_J)."""
    mono = list(monomer_energies)
    total = float(sum(mono))
    for (i, j), e_ij in dimer_energies.items():
        if not (0 <= i < j < len(mono)):
            raise KeyError(f"dimer key ({i},{j}) outside monomer range")
        total += e_ij - mono[i] - mono[j]
    return total
