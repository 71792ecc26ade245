"""Exact algebra over Pauli strings and complex-weighted sums of them.

A Pauli string is stored symplectically as a pair of bitmasks: bit i of
(x_mask, z_mask) encodes the factor on qubit i as (0,0)=I, (1,0)=X,
(1,1)=Y, (0,1)=Z.  Strings carry no phase; a string with c Y factors is
the matrix i^c * X^x * Z^z, and all phase bookkeeping lives in the
complex coefficients of :class:`QubitOperator`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

DEFAULT_PRUNE_TOL = 1e-12

_PHASES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)
_CHAR_TO_XZ = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_XZ_TO_CHAR = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}


class DimensionError(ValueError):
    """Raised when operands act on different qubit counts."""


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True, order=False)
class PauliString:
    """Tensor product of single-qubit Paulis on ``n_qubits`` qubits."""

    n_qubits: int
    x_mask: int
    z_mask: int

    def __post_init__(self):
        limit = 1 << self.n_qubits
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise ValueError("mask bits beyond n_qubits")

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Build from a word like ``"XIZY"``; character i acts on qubit i."""
        x = z = 0
        for i, ch in enumerate(label):
            try:
                xb, zb = _CHAR_TO_XZ[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli character {ch!r}") from None
            x |= xb << i
            z |= zb << i
        return cls(len(label), x, z)

    @classmethod
    def single(cls, n_qubits: int, qubit: int, kind: str) -> "PauliString":
        xb, zb = _CHAR_TO_XZ[kind]
        if qubit >= n_qubits:
            raise ValueError("qubit index beyond n_qubits")
        return cls(n_qubits, xb << qubit, zb << qubit)

    def label(self) -> str:
        return "".join(
            _XZ_TO_CHAR[((self.x_mask >> i) & 1, (self.z_mask >> i) & 1)]
            for i in range(self.n_qubits)
        )

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    @property
    def weight(self) -> int:
        return _popcount(self.x_mask | self.z_mask)

    @property
    def y_count(self) -> int:
        return _popcount(self.x_mask & self.z_mask)

    def sort_key(self) -> tuple:
        return (self.z_mask, self.x_mask)

    def commutes_with(self, other: "PauliString") -> bool:
        if self.n_qubits != other.n_qubits:
            raise DimensionError("qubit count mismatch")
        anti = _popcount(self.x_mask & other.z_mask) + _popcount(self.z_mask & other.x_mask)
        return anti % 2 == 0

    def __repr__(self):
        return f"PauliString({self.label()!r})"


def pauli_mul(a: PauliString, b: PauliString) -> tuple[PauliString, complex]:
    """Product of two strings: a*b == phase * result, phase in {1, i, -1, -i}."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError("qubit count mismatch")
    x = a.x_mask ^ b.x_mask
    z = a.z_mask ^ b.z_mask
    out = PauliString(a.n_qubits, x, z)
    # i^{ca+cb-cc} from the Y = iXZ bookkeeping, (-1)^{|z_a & x_b|} from
    # commuting Z^{z_a} past X^{x_b}.
    k = (a.y_count + b.y_count - out.y_count + 2 * _popcount(a.z_mask & b.x_mask)) % 4
    return out, _PHASES[k]


class QubitOperator:
    """Complex-weighted sum of Pauli strings on a fixed qubit count.

    Term iteration is deterministic (lexicographic on (z_mask, x_mask)) so
    that downstream energies and tie-breaks are reproducible.
    """

    __slots__ = ("n_qubits", "_terms", "_arrays")

    def __init__(self, n_qubits: int, terms: dict[PauliString, complex] | None = None):
        self.n_qubits = n_qubits
        self._terms: dict[PauliString, complex] = {}
        self._arrays = None
        if terms:
            for ps, c in terms.items():
                if ps.n_qubits != n_qubits:
                    raise DimensionError("term qubit count mismatch")
                self._add_term(ps, complex(c))
            self._prune(DEFAULT_PRUNE_TOL)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def zero(cls, n_qubits: int) -> "QubitOperator":
        return cls(n_qubits)

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> "QubitOperator":
        return cls(n_qubits, {PauliString.identity(n_qubits): coeff})

    @classmethod
    def from_term(cls, ps: PauliString, coeff: complex = 1.0) -> "QubitOperator":
        return cls(ps.n_qubits, {ps: coeff})

    @classmethod
    def from_label(cls, label: str, coeff: complex = 1.0) -> "QubitOperator":
        return cls.from_term(PauliString.from_label(label), coeff)

    # -- internals ------------------------------------------------------------

    def _add_term(self, ps: PauliString, coeff: complex):
        cur = self._terms.get(ps)
        if cur is None:
            self._terms[ps] = coeff
        else:
            self._terms[ps] = cur + coeff

    def _prune(self, tol: float):
        if tol > 0:
            dead = [ps for ps, c in self._terms.items() if abs(c) <= tol]
            for ps in dead:
                del self._terms[ps]
        else:
            dead = [ps for ps, c in self._terms.items() if c == 0]
            for ps in dead:
                del self._terms[ps]
        self._arrays = None

    def _check_dims(self, other: "QubitOperator"):
        if self.n_qubits != other.n_qubits:
            raise DimensionError("operator qubit count mismatch")

    # -- inspection -----------------------------------------------------------

    def items(self) -> Iterator[tuple[PauliString, complex]]:
        """Terms in deterministic order."""
        for ps in sorted(self._terms, key=PauliString.sort_key):
            yield ps, self._terms[ps]

    def coefficient(self, ps: PauliString) -> complex:
        return self._terms.get(ps, 0.0 + 0.0j)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def n_terms(self) -> int:
        return len(self._terms)

    def abs_coeff_sum(self) -> float:
        """Sum of |coefficients|, an upper bound on the spectral norm."""
        return float(sum(abs(c) for c in self._terms.values()))

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        # Pauli strings are Hermitian, so Hermitian <=> real coefficients.
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def is_anti_hermitian(self, tol: float = 1e-10) -> bool:
        return all(abs(c.real) <= tol for c in self._terms.values())

    # -- algebra --------------------------------------------------------------

    def copy(self) -> "QubitOperator":
        out = QubitOperator(self.n_qubits)
        out._terms = dict(self._terms)
        return out

    def __add__(self, other: "QubitOperator") -> "QubitOperator":
        self._check_dims(other)
        out = self.copy()
        for ps, c in other._terms.items():
            out._add_term(ps, c)
        out._prune(DEFAULT_PRUNE_TOL)
        return out

    def __sub__(self, other: "QubitOperator") -> "QubitOperator":
        return self + (other * -1.0)

    def __mul__(self, other):
        if isinstance(other, QubitOperator):
            self._check_dims(other)
            out = QubitOperator(self.n_qubits)
            for pa, ca in self._terms.items():
                for pb, cb in other._terms.items():
                    ps, phase = pauli_mul(pa, pb)
                    out._add_term(ps, ca * cb * phase)
            out._prune(DEFAULT_PRUNE_TOL)
            return out
        out = self.copy()
        c = complex(other)
        for ps in out._terms:
            out._terms[ps] *= c
        out._prune(0.0)
        return out

    def __rmul__(self, scalar) -> "QubitOperator":
        return self * scalar

    def dagger(self) -> "QubitOperator":
        out = QubitOperator(self.n_qubits)
        out._terms = {ps: c.conjugate() for ps, c in self._terms.items()}
        return out

    def commutator(self, other: "QubitOperator") -> "QubitOperator":
        """[self, other] = self*other - other*self, simplified."""
        return self * other - other * self

    def simplify(self, tol: float = DEFAULT_PRUNE_TOL) -> "QubitOperator":
        if tol < 0:
            raise ValueError("tolerance must be >= 0")
        out = self.copy()
        out._prune(tol)
        return out

    # -- kernel-facing packed form ---------------------------------------------

    def arrays(self):
        """(x_masks, z_masks, eff_coeffs) as numpy arrays in deterministic order.

        eff_coeffs absorb the i^{y_count} string phase so kernels only track
        the (-1)^{parity(z & index)} sign.  Cached; operators are treated as
        immutable once this is called.
        """
        if self._arrays is None:
            items = list(self.items())
            xs = np.array([ps.x_mask for ps, _ in items], dtype=np.uint64)
            zs = np.array([ps.z_mask for ps, _ in items], dtype=np.uint64)
            effs = np.array(
                [c * _PHASES[ps.y_count % 4] for ps, c in items], dtype=np.complex128
            )
            self._arrays = (xs, zs, effs)
        return self._arrays

    # -- text serialization -----------------------------------------------------

    def to_lines(self) -> str:
        """One term per line: ``coeff_re coeff_im PAULI_WORD``."""
        return "\n".join(
            f"{c.real:.17g} {c.imag:.17g} {ps.label()}" for ps, c in self.items()
        )

    @classmethod
    def from_lines(cls, text: str, n_qubits: int | None = None) -> "QubitOperator":
        terms: dict[PauliString, complex] = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            re_s, im_s, word = line.split()
            ps = PauliString.from_label(word)
            if n_qubits is None:
                n_qubits = ps.n_qubits
            elif ps.n_qubits != n_qubits:
                raise DimensionError("inconsistent word lengths")
            terms[ps] = terms.get(ps, 0.0) + complex(float(re_s), float(im_s))
        if n_qubits is None:
            raise ValueError("empty operator text and no qubit count given")
        return cls(n_qubits, terms)

    def __repr__(self):
        if not self._terms:
            return f"QubitOperator(zero, n={self.n_qubits})"
        parts = [f"({c:.6g})*{ps.label()}" for ps, c in list(self.items())[:4]]
        more = "" if len(self) <= 4 else f" ... ({len(self)} terms)"
        return " + ".join(parts) + more


def op_sum(ops: Iterable[QubitOperator], n_qubits: int) -> QubitOperator:
    out = QubitOperator(n_qubits)
    for op in ops:
        out = out + op
    return out
