"""Dense complex linear algebra over labeled qubit registers.

A register is an ordered tuple of distinct wire labels.  Amplitudes are stored
flat, with the first listed label as the most significant bit, so a basis
string written in register order maps directly onto an array index.  Canonical
storage order is ascending data label with machine wires last; any other
printed ordering is a view produced by ``permuted``/``reordered``, never a
second storage format.  All values are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Tolerance policy: 1e-12 for algebraic identities (norms, isometry checks,
# Hermiticity), 1e-10 for positive-semidefinite / zero classification.
ATOL_ALGEBRA = 1e-12
ATOL_PSD = 1e-10

PARTIES = ("A", "B", "C")


class InvariantViolation(Exception):
    """A constructed value failed one of its defining numerical invariants."""


@dataclass(frozen=True)
class QubitLabel:
    """A register wire: a data qubit "1".."9" or a machine wire "M<party><round>"."""

    name: str

    def __post_init__(self) -> None:
        n = self.name
        is_data = len(n) == 1 and n.isdigit() and n != "0"
        is_machine = len(n) == 3 and n[0] == "M" and n[1] in PARTIES and n[2] in "12"
        if not (is_data or is_machine):
            raise ValueError(f"bad qubit label {n!r}")

    @classmethod
    def data(cls, index: int) -> "QubitLabel":
        return cls(str(index))

    @classmethod
    def machine(cls, party: str, round_no: int) -> "QubitLabel":
        return cls(f"M{party}{round_no}")

    @property
    def is_machine(self) -> bool:
        return self.name[0] == "M"

    @property
    def is_data(self) -> bool:
        return not self.is_machine

    @property
    def index(self) -> int:
        if self.is_machine:
            raise ValueError(f"{self.name} is not a data wire")
        return int(self.name)

    @property
    def party(self) -> str:
        if self.is_data:
            raise ValueError(f"{self.name} is not a machine wire")
        return self.name[1]

    @property
    def round_no(self) -> int:
        if self.is_data:
            raise ValueError(f"{self.name} is not a machine wire")
        return int(self.name[2])

    @property
    def sort_key(self) -> tuple:
        if self.is_machine:
            return (1, self.round_no, self.party)
        return (0, self.index, "")

    def __lt__(self, other: "QubitLabel") -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return self.name


def canonical_order(labels: Iterable[QubitLabel]) -> tuple[QubitLabel, ...]:
    """Sort wires into canonical storage order (data ascending, machines last)."""
    return tuple(sorted(labels, key=lambda l: l.sort_key))


def _freeze(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class StateVector:
    """Pure state of a labeled register, stored as a flat amplitude array."""

    labels: tuple[QubitLabel, ...]
    amps: np.ndarray

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels in register: {self._names(labels)}")
        amps = _freeze(self.amps)
        if amps.shape != (2 ** len(labels),):
            raise ValueError(
                f"amplitude array of shape {amps.shape} does not fit "
                f"{len(labels)} qubits"
            )
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "amps", amps)

    @staticmethod
    def _names(labels: Iterable[QubitLabel]) -> str:
        return ",".join(str(l) for l in labels)

    @classmethod
    def basis(cls, labels: Sequence[QubitLabel], bits: str) -> "StateVector":
        """Computational basis state |bits> in the given label order."""
        labels = tuple(labels)
        if len(bits) != len(labels):
            raise ValueError("bit string length does not match register size")
        amps = np.zeros(2 ** len(labels), dtype=complex)
        amps[int(bits, 2) if bits else 0] = 1.0
        return cls(labels, amps)

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n < ATOL_ALGEBRA:
            raise ValueError("cannot normalize a zero state")
        return StateVector(self.labels, self.amps / n)

    def axis(self, label: QubitLabel) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"label {label} not in register {self._names(self.labels)}") from None

    def tensor(self) -> np.ndarray:
        return self.amps.reshape((2,) * self.n_qubits)

    def permuted(self, order: Sequence[QubitLabel]) -> "StateVector":
        """View of the same state with wires listed in a different order."""
        order = tuple(order)
        if set(order) != set(self.labels) or len(order) != len(self.labels):
            raise ValueError("permutation must list exactly the register labels")
        perm = [self.labels.index(l) for l in order]
        return StateVector(order, self.tensor().transpose(perm).reshape(-1))

    def sorted_canonical(self) -> "StateVector":
        return self.permuted(canonical_order(self.labels))

    def amplitude(self, bits: str, order: Sequence[QubitLabel] | None = None) -> complex:
        """Amplitude of |bits>, read in the given label order (default: storage order)."""
        view = self if order is None else self.permuted(order)
        if len(bits) != view.n_qubits:
            raise ValueError("bit string length does not match register size")
        return complex(view.amps[int(bits, 2) if bits else 0])


@dataclass(frozen=True)
class Operator:
    """An isometry on a fixed number of qubits, optionally bound to wire names.

    The matrix has shape (2**n_out, 2**n_in) with n_out >= n_in and must
    satisfy M^dagger M = identity; square operators are therefore unitary.
    """

    matrix: np.ndarray
    in_labels: tuple[QubitLabel, ...] | None = None
    out_labels: tuple[QubitLabel, ...] | None = None

    def __post_init__(self) -> None:
        m = _freeze(self.matrix)
        rows, cols = m.shape
        n_out, n_in = int(np.log2(rows)), int(np.log2(cols))
        if 2 ** n_out != rows or 2 ** n_in != cols or rows < cols:
            raise ValueError(f"operator shape {m.shape} is not a qubit isometry shape")
        gram = m.conj().T @ m
        dev = float(np.max(np.abs(gram - np.eye(cols))))
        if dev > ATOL_ALGEBRA:
            raise ValueError(f"matrix is not an isometry (max |M^dag M - I| = {dev:.3e})")
        if self.in_labels is not None and len(self.in_labels) != n_in:
            raise ValueError("in_labels length does not match matrix shape")
        if self.out_labels is not None and len(self.out_labels) != n_out:
            raise ValueError("out_labels length does not match matrix shape")
        object.__setattr__(self, "matrix", m)
        if self.in_labels is not None:
            object.__setattr__(self, "in_labels", tuple(self.in_labels))
        if self.out_labels is not None:
            object.__setattr__(self, "out_labels", tuple(self.out_labels))

    @property
    def n_in(self) -> int:
        return int(np.log2(self.matrix.shape[1]))

    @property
    def n_out(self) -> int:
        return int(np.log2(self.matrix.shape[0]))

    @property
    def is_unitary(self) -> bool:
        return self.matrix.shape[0] == self.matrix.shape[1]

    def bound_to(
        self, in_labels: Sequence[QubitLabel], out_labels: Sequence[QubitLabel]
    ) -> "Operator":
        return Operator(self.matrix, tuple(in_labels), tuple(out_labels))


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class DensityMatrix:
    """Mixed state of a labeled register; Hermitian, unit trace, PSD by construction."""

    labels: tuple[QubitLabel, ...]
    rho: np.ndarray

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate labels in register")
        rho = _freeze(self.rho)
        dim = 2 ** len(labels)
        if rho.shape != (dim, dim):
            raise ValueError(f"matrix shape {rho.shape} does not fit {len(labels)} qubits")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "rho", rho)
        self.validate()

    def validate(self) -> None:
        """Re-check Hermiticity, unit trace and positivity; raise on failure."""
        herm_dev = float(np.max(np.abs(self.rho - self.rho.conj().T)))
        if herm_dev > ATOL_ALGEBRA:
            raise InvariantViolation(f"density matrix not Hermitian (dev {herm_dev:.3e})")
        trace_dev = abs(complex(np.trace(self.rho)) - 1.0)
        if trace_dev > ATOL_ALGEBRA:
            raise InvariantViolation(f"density matrix trace off by {trace_dev:.3e}")
        low = float(np.min(np.linalg.eigvalsh(self.rho)))
        if low < -ATOL_PSD:
            raise InvariantViolation(f"density matrix has eigenvalue {low:.3e} < -{ATOL_PSD}")

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.rho)

    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))

    def reordered(self, order: Sequence[QubitLabel]) -> "DensityMatrix":
        """View of the same state with wires listed in a different order."""
        order = tuple(order)
        if set(order) != set(self.labels) or len(order) != len(self.labels):
            raise ValueError("permutation must list exactly the register labels")
        n = self.n_qubits
        perm = [self.labels.index(l) for l in order]
        t = self.rho.reshape((2,) * (2 * n))
        t = t.transpose(perm + [p + n for p in perm])
        return DensityMatrix(order, t.reshape(2 ** n, 2 ** n))

    def element(
        self, bra: str, ket: str, order: Sequence[QubitLabel] | None = None
    ) -> complex:
        """Matrix element <bra|rho|ket> with bit strings read in the given order."""
        view = self if order is None else self.reordered(order)
        if len(bra) != view.n_qubits or len(ket) != view.n_qubits:
            raise ValueError("bit string length does not match register size")
        return complex(view.rho[int(bra, 2) if bra else 0, int(ket, 2) if ket else 0])


def tensor_product(a: StateVector, b: StateVector) -> StateVector:
    """Combine two registers; the result lists a's labels then b's."""
    overlap = set(a.labels) & set(b.labels)
    if overlap:
        raise ValueError(
            f"registers share labels: {StateVector._names(canonical_order(overlap))}"
        )
    return StateVector(a.labels + b.labels, np.kron(a.amps, b.amps))


def apply_to_targets(
    state: StateVector, op: Operator, targets: Sequence[QubitLabel]
) -> StateVector:
    """Apply an operator to named wires, identity elsewhere.

    Square operators replace the target wires in place.  Proper isometries grow
    the register: the operator must be bound, and every output label beyond the
    targets must be absent from the register (fresh labels are always supplied
    explicitly, never invented here).  The result is re-sorted to canonical
    label order.
    """
    targets = tuple(targets)
    if len(set(targets)) != len(targets):
        raise ValueError("duplicate target labels")
    for t in targets:
        if t not in state.labels:
            raise ValueError(f"target {t} not in register")
    if len(targets) != op.n_in:
        raise ValueError(
            f"operator acts on {op.n_in} qubits but {len(targets)} targets given"
        )
    if op.in_labels is not None and op.in_labels != targets:
        raise ValueError("operator is bound to different input labels")

    if op.is_unitary:
        out_labels = targets
    else:
        if op.out_labels is None:
            raise ValueError("isometry application requires bound output labels")
        out_labels = op.out_labels
        fresh = [l for l in out_labels if l not in targets]
        for l in fresh:
            if l in state.labels:
                raise ValueError(f"fresh output label {l} already in register")
        if len(set(out_labels)) != len(out_labels):
            raise ValueError("duplicate output labels")

    spectators = [l for l in state.labels if l not in targets]
    target_axes = [state.axis(t) for t in targets]
    m = op.matrix.reshape((2,) * (op.n_out + op.n_in))
    out = np.tensordot(m, state.tensor(), axes=(list(range(op.n_out, op.n_out + op.n_in)), target_axes))

    labels_after = tuple(out_labels) + tuple(spectators)
    perm = sorted(range(len(labels_after)), key=lambda i: labels_after[i].sort_key)
    new_labels = tuple(labels_after[i] for i in perm)
    return StateVector(new_labels, out.transpose(perm).reshape(-1))


def partial_trace(
    state: StateVector | DensityMatrix, keep: Iterable[QubitLabel]
) -> DensityMatrix:
    """Reduced density matrix over the kept wires, labels in canonical order."""
    keep_set = set(keep)
    if not keep_set:
        raise ValueError("must keep at least one qubit")
    for l in keep_set:
        if l not in state.labels:
            raise ValueError(f"label {l} not in register")
    kept = canonical_order(keep_set)
    k = len(kept)
    n = state.n_qubits
    kept_axes = [state.labels.index(l) for l in kept]
    traced_axes = [i for i in range(n) if state.labels[i] not in keep_set]

    if isinstance(state, StateVector):
        m = state.tensor().transpose(kept_axes + traced_axes).reshape(2 ** k, -1)
        rho = m @ m.conj().T
    else:
        t = state.rho.reshape((2,) * (2 * n))
        perm = (
            kept_axes
            + traced_axes
            + [a + n for a in kept_axes]
            + [a + n for a in traced_axes]
        )
        r = t.transpose(perm).reshape(2 ** k, -1, 2 ** k, 2 ** (n - k))
        rho = np.trace(r, axis1=1, axis2=3)

    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(kept, rho)


def partial_transpose(rho: DensityMatrix, subsystem: QubitLabel) -> np.ndarray:
    """Partial transpose of a two-qubit state over one wire (a plain matrix,
    since the result is generally not positive)."""
    if rho.n_qubits != 2:
        raise ValueError("partial transpose is defined here for two-qubit states only")
    if subsystem not in rho.labels:
        raise ValueError(f"label {subsystem} not in register")
    t = rho.rho.reshape(2, 2, 2, 2)
    if subsystem == rho.labels[1]:
        out = t.transpose(0, 3, 2, 1)
    else:
        out = t.transpose(2, 1, 0, 3)
    return out.reshape(4, 4)


def hermitian_spectrum(matrix: np.ndarray) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix."""
    matrix = np.asarray(matrix, dtype=complex)
    dev = float(np.max(np.abs(matrix - matrix.conj().T)))
    if dev > ATOL_PSD:
        raise ValueError(f"matrix is not Hermitian (max asymmetry {dev:.3e})")
    return np.linalg.eigvalsh(0.5 * (matrix + matrix.conj().T))
