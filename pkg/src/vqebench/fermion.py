"""Molecular integrals, second-quantized Hamiltonians, Jordan-Wigner mapping.

Spin-orbital convention is interleaved: spatial orbital p maps to spin
orbitals 2p (alpha) and 2p+1 (beta).  This keeps Jordan-Wigner Z-strings
short for paired excitations and pins down the parameter-counting
convention used by the benchmark tables.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .pauli import PauliString, QubitOperator

H2_SYMMETRY_TOL = 1e-10


class FcidumpError(ValueError):
    """Malformed FCIDUMP content; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class SpinViolationError(ValueError):
    """Excitation generator does not conserve the spin of each channel."""


@dataclass
class MolecularIntegrals:
    """MO-basis integrals: h1 and chemists'-notation h2 = (pq|rs), in Hartree."""

    n_spatial: int
    n_alpha: int
    n_beta: int
    e_core: float
    h1: np.ndarray
    h2: np.ndarray
    label: str = ""

    def __post_init__(self):
        n = self.n_spatial
        if self.h1.shape != (n, n) or self.h2.shape != (n, n, n, n):
            raise ValueError("integral array shapes inconsistent with n_spatial")
        if self.n_alpha + self.n_beta > 2 * n:
            raise ValueError("electron count exceeds spin-orbital count")
        if not np.allclose(self.h1, self.h1.T, atol=H2_SYMMETRY_TOL):
            raise ValueError("h1 not symmetric")
        for perm in _CHEMIST_PERMS[1:]:
            if not np.allclose(self.h2, np.transpose(self.h2, perm), atol=H2_SYMMETRY_TOL):
                raise ValueError("h2 violates 8-fold permutational symmetry")

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_spatial

    @property
    def n_electrons(self) -> int:
        return self.n_alpha + self.n_beta

    def hf_occupation(self) -> int:
        """Bitmask of the lowest-orbital HF determinant (interleaved spins)."""
        occ = 0
        for p in range(self.n_alpha):
            occ |= 1 << (2 * p)
        for p in range(self.n_beta):
            occ |= 1 << (2 * p + 1)
        return occ

    def occupied_spin_orbitals(self) -> list[int]:
        return sorted(
            [2 * p for p in range(self.n_alpha)] + [2 * p + 1 for p in range(self.n_beta)]
        )

    def virtual_spin_orbitals(self) -> list[int]:
        occ = set(self.occupied_spin_orbitals())
        return [q for q in range(self.n_qubits) if q not in occ]


_CHEMIST_PERMS = [
    (0, 1, 2, 3), (1, 0, 2, 3), (0, 1, 3, 2), (1, 0, 3, 2),
    (2, 3, 0, 1), (3, 2, 0, 1), (2, 3, 1, 0), (3, 2, 1, 0),
]


def _canonical_h2_key(i: int, j: int, k: int, l: int) -> tuple:
    return min((i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
               (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i))


def parse_fcidump(text: str, label: str = "") -> MolecularIntegrals:
    """Parse FCIDUMP: namelist header, then ``value i j k l`` lines (1-based).

    ``i j 0 0`` sets h1[i-1][j-1]; four nonzero indices set the chemists'
    integral (ij|kl); ``0 0 0 0`` sets the core energy.  All eight
    permutation images of each h2 entry are populated; a duplicate entry
    disagreeing beyond 1e-10 is a parse error.
    """
    lines = text.splitlines()
    header_parts: list[str] = []
    body_start = None
    for ln, raw in enumerate(lines, 1):
        header_parts.append(raw)
        if re.search(r"(&END|/)\s*$", raw.strip(), flags=re.IGNORECASE):
            body_start = ln
            break
    if body_start is None:
        raise FcidumpError("missing namelist terminator (&END or /)")
    header = " ".join(header_parts)

    def _field(name: str) -> int:
        m = re.search(rf"{name}\s*=\s*(-?\d+)", header, flags=re.IGNORECASE)
        if not m:
            raise FcidumpError(f"header missing {name}", line=1)
        return int(m.group(1))

    norb = _field("NORB")
    nelec = _field("NELEC")
    ms2 = _field("MS2")
    if norb <= 0:
        raise FcidumpError("NORB must be positive", line=1)
    if (nelec + ms2) % 2 != 0 or nelec < 0:
        raise FcidumpError("inconsistent NELEC/MS2", line=1)
    n_alpha = (nelec + ms2) // 2
    n_beta = (nelec - ms2) // 2
    if min(n_alpha, n_beta) < 0 or max(n_alpha, n_beta) > norb:
        raise FcidumpError("electron counts outside orbital range", line=1)

    h1 = np.zeros((norb, norb))
    h2 = np.zeros((norb, norb, norb, norb))
    e_core = 0.0
    seen_h1: dict[tuple, tuple[float, int]] = {}
    seen_h2: dict[tuple, tuple[float, int]] = {}

    for ln in range(body_start, len(lines)):
        line = lines[ln].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5:
            raise FcidumpError("expected `value i j k l`", line=ln + 1)
        try:
            val = float(parts[0])
            i, j, k, l = (int(p) for p in parts[1:])
        except ValueError:
            raise FcidumpError("unparseable numeric field", line=ln + 1) from None
        if (i, j, k, l) == (0, 0, 0, 0):
            e_core = val
            continue
        if k == 0 and l == 0:
            if not (1 <= i <= norb and 1 <= j <= norb):
                raise FcidumpError("one-body index out of range", line=ln + 1)
            key = (min(i, j), max(i, j))
            if key in seen_h1 and abs(seen_h1[key][0] - val) > H2_SYMMETRY_TOL:
                raise FcidumpError(
                    f"conflicting h1 entry (first seen line {seen_h1[key][1]})",
                    line=ln + 1,
                )
            seen_h1[key] = (val, ln + 1)
            h1[i - 1, j - 1] = val
            h1[j - 1, i - 1] = val
            continue
        if 0 in (i, j, k, l):
            raise FcidumpError("mixed zero/nonzero two-body indices", line=ln + 1)
        if not all(1 <= t <= norb for t in (i, j, k, l)):
            raise FcidumpError("two-body index out of range", line=ln + 1)
        key = _canonical_h2_key(i, j, k, l)
        if key in seen_h2 and abs(seen_h2[key][0] - val) > H2_SYMMETRY_TOL:
            raise FcidumpError(
                f"h2 symmetry violation (first seen line {seen_h2[key][1]})",
                line=ln + 1,
            )
        seen_h2[key] = (val, ln + 1)
        a, b, c, d = i - 1, j - 1, k - 1, l - 1
        for perm in _CHEMIST_PERMS:
            idx = tuple((a, b, c, d)[t] for t in perm)
            h2[idx] = val

    return MolecularIntegrals(norb, n_alpha, n_beta, e_core, h1, h2, label=label)


def write_fcidump(mi: MolecularIntegrals) -> str:
    """Inverse of :func:`parse_fcidump`, used for round-trips and fixtures."""
    n = mi.n_spatial
    out = [
        f"&FCI NORB={n},NELEC={mi.n_electrons},MS2={mi.n_alpha - mi.n_beta},",
        " ORBSYM=" + ",".join(["1"] * n) + ",",
        " ISYM=1,",
        "&END",
    ]
    written = set()
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    key = _canonical_h2_key(i + 1, j + 1, k + 1, l + 1)
                    if key in written:
                        continue
                    written.add(key)
                    v = mi.h2[i, j, k, l]
                    if v != 0.0:
                        out.append(f"{v:23.16e} {i+1:3d} {j+1:3d} {k+1:3d} {l+1:3d}")
    for i in range(n):
        for j in range(i + 1):
            v = mi.h1[i, j]
            if v != 0.0:
                out.append(f"{v:23.16e} {i+1:3d} {j+1:3d}   0   0")
    out.append(f"{mi.e_core:23.16e}   0   0   0   0")
    return "\n".join(out) + "\n"


def load_fcidump(path, label: str | None = None) -> MolecularIntegrals:
    p = Path(path)
    return parse_fcidump(p.read_text(), label=label if label is not None else p.stem)


# -- fermionic operators -------------------------------------------------------

LadderTerm = tuple[tuple[tuple[int, bool], ...], complex]


class FermionOperator:
    """Sum of products of ladder operators; (index, True) is a creator.

    Terms need not be normal ordered; the Jordan-Wigner map handles
    arbitrary products.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: list[LadderTerm] | None = None):
        self.terms: list[LadderTerm] = list(terms) if terms else []

    def add(self, ops: tuple[tuple[int, bool], ...], coeff: complex):
        if coeff != 0:
            self.terms.append((tuple(ops), complex(coeff)))

    def __add__(self, other: "FermionOperator") -> "FermionOperator":
        return FermionOperator(self.terms + other.terms)

    def scaled(self, c: complex) -> "FermionOperator":
        return FermionOperator([(ops, coeff * c) for ops, coeff in self.terms])

    def dagger(self) -> "FermionOperator":
        out = FermionOperator()
        for ops, coeff in self.terms:
            out.add(tuple((idx, not dag) for idx, dag in reversed(ops)), coeff.conjugate())
        return out

    def max_index(self) -> int:
        return max((idx for ops, _ in self.terms for idx, _ in ops), default=-1)


def _ladder_images(n_qubits: int) -> dict[tuple[int, bool], QubitOperator]:
    """JW images a^dag_p = Z_{<p} (X_p - iY_p)/2 and the adjoint for a_p."""
    images = {}
    for p in range(n_qubits):
        zmask = (1 << p) - 1
        xs = PauliString(n_qubits, 1 << p, zmask)
        ys = PauliString(n_qubits, 1 << p, zmask | (1 << p))
        images[(p, True)] = QubitOperator(n_qubits, {xs: 0.5, ys: -0.5j})
        images[(p, False)] = QubitOperator(n_qubits, {xs: 0.5, ys: 0.5j})
    return images


_ladder_cache: dict[int, dict] = {}


def jordan_wigner(fop: FermionOperator, n_qubits: int) -> QubitOperator:
    """Map a fermionic operator to qubit space under Jordan-Wigner."""
    if fop.max_index() >= n_qubits:
        raise ValueError("spin-orbital index exceeds qubit count")
    if n_qubits not in _ladder_cache:
        _ladder_cache[n_qubits] = _ladder_images(n_qubits)
    images = _ladder_cache[n_qubits]
    total = QubitOperator(n_qubits)
    for ops, coeff in fop.terms:
        if not ops:
            total = total + QubitOperator.identity(n_qubits, coeff)
            continue
        acc = images[ops[0]] * coeff
        for key in ops[1:]:
            acc = acc * images[key]
        total = total + acc
    return total.simplify()


def build_hamiltonian(mi: MolecularIntegrals) -> FermionOperator:
    """Spin-orbital second-quantized Hamiltonian, chemists' -> physicists'.

    H = sum h_pq a^dag_{p s} a_{q s}
      + 1/2 sum (pq|rs) a^dag_{p s} a^dag_{r t} a_{s' t} a_{q s}
    with the core energy carried separately (see :func:`qubit_hamiltonian`).
    """
    n = mi.n_spatial
    fop = FermionOperator()
    for p in range(n):
        for q in range(n):
            v = mi.h1[p, q]
            if v == 0.0:
                continue
            for s in (0, 1):
                fop.add(((2 * p + s, True), (2 * q + s, False)), v)
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    v = mi.h2[p, q, r, s]
                    if v == 0.0:
                        continue
                    for sa in (0, 1):
                        for sb in (0, 1):
                            fop.add(
                                (
                                    (2 * p + sa, True),
                                    (2 * r + sb, True),
                                    (2 * s + sb, False),
                                    (2 * q + sa, False),
                                ),
                                0.5 * v,
                            )
    return fop


def qubit_hamiltonian(mi: MolecularIntegrals) -> QubitOperator:
    """JW-mapped Hamiltonian including the core-energy identity term."""
    h = jordan_wigner(build_hamiltonian(mi), mi.n_qubits)
    if mi.e_core != 0.0:
        h = h + QubitOperator.identity(mi.n_qubits, mi.e_core)
    return h


def number_operator(n_qubits: int) -> QubitOperator:
    fop = FermionOperator()
    for p in range(n_qubits):
        fop.add(((p, True), (p, False)), 1.0)
    return jordan_wigner(fop, n_qubits)


# -- excitation generators ------------------------------------------------------

GENERATOR_KINDS = ("single", "double", "triple", "quadruple", "pauli")
PROVENANCE_TAGS = ("uccsd", "generalized", "uscc-connected", "uscc-disconnected", "qubit-pool")


@dataclass(frozen=True)
class ExcitationGenerator:
    """Anti-Hermitian excitation T - T^dag, or a single-string qubit generator.

    ``occ`` lists the annihilated spin orbitals and ``virt`` the created
    ones, both in ascending order; T = a^dag_{v1}..a^dag_{vk} a_{ok}..a_{o1}.
    """

    kind: str
    occ: tuple[int, ...] = ()
    virt: tuple[int, ...] = ()
    tag: str = "uccsd"
    pauli: PauliString | None = None

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.kind == "pauli":
            if self.pauli is None:
                raise ValueError("pauli generator requires a string")
            return
        if len(self.occ) != len(self.virt) or not self.occ:
            raise ValueError("occ/virt index counts must match and be nonempty")
        if len(set(self.occ)) != len(self.occ) or len(set(self.virt)) != len(self.virt):
            raise ValueError("repeated index in generator")
        spins = sorted(i & 1 for i in self.occ)
        if spins != sorted(a & 1 for a in self.virt):
            raise SpinViolationError(f"spin multiset mismatch in {self.occ}->{self.virt}")

    def key(self) -> tuple:
        if self.kind == "pauli":
            return ("pauli", self.pauli.z_mask, self.pauli.x_mask)
        return (self.kind, tuple(sorted(self.occ)), tuple(sorted(self.virt)))

    def describe(self) -> str:
        if self.kind == "pauli":
            return f"i*{self.pauli.label()}"
        o = ",".join(map(str, self.occ))
        v = ",".join(map(str, self.virt))
        return f"{self.kind}({o}->{v})"

    def fermion_operator(self) -> FermionOperator:
        if self.kind == "pauli":
            raise ValueError("pauli generators have no fermionic form")
        ops = tuple((a, True) for a in self.virt) + tuple(
            (i, False) for i in reversed(self.occ)
        )
        t = FermionOperator([(ops, 1.0)])
        return t + t.dagger().scaled(-1.0)


def realize_generator(gen: ExcitationGenerator, n_qubits: int) -> QubitOperator:
    """JW image of T - T^dag; the result satisfies A^dag = -A."""
    if gen.kind == "pauli":
        if gen.pauli.n_qubits != n_qubits:
            raise ValueError("pauli string qubit count mismatch")
        return QubitOperator(n_qubits, {gen.pauli: 1j})
    op = jordan_wigner(gen.fermion_operator(), n_qubits)
    if not op.is_anti_hermitian():
        raise AssertionError("realized generator lost anti-Hermiticity")
    return op


# -- fixture manifests -----------------------------------------------------------

@dataclass
class FixtureRecord:
    label: str
    path: str
    molecule: str
    basis: str
    geometry: str
    r_value: float
    n_qubits: int
    n_alpha: int
    n_beta: int
    hf_energy: float
    fci_ground_energy: float | None


def load_manifest(manifest_path) -> dict[str, FixtureRecord]:
    mp = Path(manifest_path)
    data = json.loads(mp.read_text())
    out = {}
    for entry in data["fixtures"]:
        rec = FixtureRecord(
            label=entry["label"],
            path=str((mp.parent / entry["path"]).resolve()),
            molecule=entry["molecule"],
            basis=entry["basis"],
            geometry=entry.get("geometry", ""),
            r_value=float(entry.get("r_value", 0.0)),
            n_qubits=int(entry["n_qubits"]),
            n_alpha=int(entry["n_alpha"]),
            n_beta=int(entry["n_beta"]),
            hf_energy=float(entry["hf_energy"]),
            fci_ground_energy=(
                float(entry["fci_ground_energy"])
                if entry.get("fci_ground_energy") is not None
                else None
            ),
        )
        out[rec.label] = rec
    return out
