"""Exact 2^n-amplitude statevector kernels.

Basis-state index bit i is qubit i's occupation (little-endian).  States
are value types; every operation returns a fresh array or mutates an
explicit copy, so independent driver runs never share mutable state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .pauli import DimensionError, PauliString, QubitOperator

NORM_TOL = 1e-10


@dataclass
class Statevector:
    n_qubits: int
    amplitudes: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise DimensionError("amplitude array length != 2^n_qubits")
        if self.amplitudes.dtype != np.complex128:
            self.amplitudes = self.amplitudes.astype(np.complex128)
        if self.normalized and abs(self.norm() - 1.0) > NORM_TOL:
            raise ValueError("normalized flag set but norm deviates from 1")

    def copy(self) -> "Statevector":
        return Statevector(self.n_qubits, self.amplitudes.copy(), self.normalized)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "Statevector":
        n = self.norm()
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        return Statevector(self.n_qubits, self.amplitudes / n, True)

    def dump_amplitudes(self, path):
        """Debug dump: little-endian (re, im) float64 pairs. Not a stable format."""
        inter = np.empty(2 * self.amplitudes.size, dtype="<f8")
        inter[0::2] = self.amplitudes.real
        inter[1::2] = self.amplitudes.imag
        inter.tofile(path)


def hf_state(n_qubits: int, occupation: int) -> Statevector:
    """Computational basis state |occupation>; bit i occupies qubit i."""
    if occupation >> n_qubits:
        raise ValueError("occupation bits beyond n_qubits")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[occupation] = 1.0
    return Statevector(n_qubits, amps)


def _full_support(n_qubits: int) -> np.ndarray:
    return np.arange(1 << n_qubits, dtype=np.int64)


def _as_support(state: Statevector, support) -> np.ndarray:
    if support is None:
        return _full_support(state.n_qubits)
    return support


def apply_pauli_exp(
    state: Statevector, p: PauliString, theta: float, support=None
) -> Statevector:
    """exp(i*theta*P)|psi> = cos(theta)|psi> + i sin(theta) P|psi>."""
    if p.n_qubits != state.n_qubits:
        raise DimensionError("qubit count mismatch")
    amps = state.amplitudes.copy()
    eff = 1j ** (p.y_count % 4)
    _kernels.pauli_exp_inplace(
        amps, np.uint64(p.x_mask), np.uint64(p.z_mask), complex(eff), float(theta),
        _as_support(state, support),
    )
    return Statevector(state.n_qubits, amps, state.normalized)


def apply_operator(state: Statevector, op: QubitOperator, support=None) -> Statevector:
    """sum_j alpha_j P_j |psi>; the result is generally not normalized."""
    if op.n_qubits != state.n_qubits:
        raise DimensionError("qubit count mismatch")
    xs, zs, effs = op.arrays()
    out = np.zeros_like(state.amplitudes)
    _kernels.apply_terms(state.amplitudes, out, xs, zs, effs, _as_support(state, support))
    return Statevector(state.n_qubits, out, normalized=False)


def expectation(state: Statevector, op: QubitOperator, support=None) -> complex:
    """<psi|O|psi> accumulated term-wise, never forming a dense matrix."""
    if op.n_qubits != state.n_qubits:
        raise DimensionError("qubit count mismatch")
    xs, zs, effs = op.arrays()
    return complex(
        _kernels.expect_terms(
            state.amplitudes, state.amplitudes, xs, zs, effs, _as_support(state, support)
        )
    )


def overlap(a: Statevector, b: Statevector) -> complex:
    """<a|b> = sum conj(a_i) b_i."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError("qubit count mismatch")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


class AnsatzOp:
    """Anti-Hermitian generator packed for exponential application.

    Writing A = sum_j (i beta_j) P_j with real beta_j, exp(theta*A) is the
    commuting product prod_j exp(i theta beta_j P_j) whenever the strings
    mutually commute (true for every fermionic singles/doubles generator
    under Jordan-Wigner, and trivially for one-string qubit-pool entries).
    Non-commuting term sets fall back to a scaled Taylor expansion of the
    exact exponential, truncated below 1e-13.
    """

    __slots__ = ("op", "label", "xs", "zs", "phases", "betas", "commuting",
                 "_strings", "parts")

    def __init__(self, op: QubitOperator, label: str = "", anti_tol: float = 1e-10,
                 parts: list[QubitOperator] | None = None):
        if not op.is_anti_hermitian(anti_tol):
            raise ValueError("generator is not anti-Hermitian")
        if not op:
            raise ValueError("zero generator")
        self.op = op
        self.label = label
        items = list(op.items())
        self._strings = [ps for ps, _ in items]
        self.xs = np.array([ps.x_mask for ps in self._strings], dtype=np.uint64)
        self.zs = np.array([ps.z_mask for ps in self._strings], dtype=np.uint64)
        # coeff = i*beta  =>  exp factor exp(i theta beta P)
        self.betas = np.array([c.imag for _, c in items], dtype=np.float64)
        self.phases = np.array(
            [1j ** (ps.y_count % 4) for ps in self._strings], dtype=np.complex128
        )
        self.commuting = all(
            a.commutes_with(b)
            for i, a in enumerate(self._strings)
            for b in self._strings[i + 1 :]
        )
        # exact factorization into mutually commuting sub-generators, either
        # supplied by the pool builder or found greedily
        if self.commuting:
            self.parts = None
        elif parts is not None:
            self.parts = [AnsatzOp(p) for p in parts]
        else:
            self.parts = _commuting_partition(op)

    @property
    def n_qubits(self) -> int:
        return self.op.n_qubits

    def apply_exp_inplace(self, amps: np.ndarray, theta: float, support: np.ndarray):
        if self.commuting:
            for j in range(len(self.betas)):
                _kernels.pauli_exp_inplace(
                    amps, self.xs[j], self.zs[j], self.phases[j],
                    theta * self.betas[j], support,
                )
        elif self.parts is not None:
            for part in self.parts:
                part.apply_exp_inplace(amps, theta, support)
        else:
            _taylor_exp_inplace(amps, self, theta, support)

    def apply_generator(self, amps: np.ndarray, support: np.ndarray) -> np.ndarray:
        """A|psi> as a fresh array."""
        out = np.zeros_like(amps)
        _kernels.apply_terms(amps, out, self.xs, self.zs, 1j * self.betas * self.phases,
                             support)
        return out


def _commuting_partition(op: QubitOperator) -> list["AnsatzOp"] | None:
    """Split A into internally-commuting parts that also commute pairwise.

    Strings are grouped greedily into classes of mutually commuting
    strings; the split is exact only if every pair of class sub-operators
    commutes as a whole, which is verified before accepting it.
    """
    items = list(op.items())
    classes: list[list[int]] = []
    for idx, (ps, _) in enumerate(items):
        placed = False
        for cls in classes:
            if all(ps.commutes_with(items[j][0]) for j in cls):
                cls.append(idx)
                placed = True
                break
        if not placed:
            classes.append([idx])
    if len(classes) <= 1 or len(classes) >= len(items):
        return None
    parts = []
    for cls in classes:
        sub = QubitOperator(op.n_qubits, {items[j][0]: items[j][1] for j in cls})
        parts.append(sub)
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            if parts[i].commutator(parts[j]).simplify(1e-12):
                return None
    return [AnsatzOp(p) for p in parts]


def _taylor_exp_inplace(amps: np.ndarray, op: AnsatzOp, theta: float, support: np.ndarray):
    """Exact exp(theta*A)|psi> by scaling + Taylor, truncation below 1e-14."""
    bound = abs(theta) * float(np.sum(np.abs(op.betas)))
    n_split = max(1, int(math.ceil(bound / 1.5)))
    effs = 1j * op.betas * op.phases
    _kernels.taylor_exp_inplace(
        amps, op.xs, op.zs, effs, theta / n_split, n_split, support, 1e-14
    )


def prepare_ansatz(
    reference: Statevector,
    ansatz: list[tuple[AnsatzOp | QubitOperator, float]],
    support=None,
    trotter: bool = False,
) -> Statevector:
    """Apply prod_k exp(theta_k A_k) to the reference, in list order.

    ``trotter=True`` forces the term-by-term product form even for
    non-commuting generators (first-order pseudo-Trotter splitting);
    by default those are applied to machine precision instead.
    """
    amps = reference.amplitudes.copy()
    sup = _as_support(reference, support)
    for gen, theta in ansatz:
        op = gen if isinstance(gen, AnsatzOp) else AnsatzOp(gen)
        if trotter and not op.commuting:
            for j in range(len(op.betas)):
                _kernels.pauli_exp_inplace(
                    amps, op.xs[j], op.zs[j], op.phases[j], theta * op.betas[j], sup
                )
        else:
            op.apply_exp_inplace(amps, float(theta), sup)
    return Statevector(reference.n_qubits, amps, reference.normalized)
