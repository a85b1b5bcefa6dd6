"""Dense state-vector core for small qubit registers.

Representation: a register of ``n`` qubits (n <= 8) is a normalized
complex128 array of length ``2**n``. Qubits are numbered 1..n and qubit 1
is the MOST significant bit of the basis-state index, so kets read
left-to-right: ``|100>`` on three qubits is index 4. States are immutable;
every operation returns a new value.

Measurements are supported in the computational (Z) basis, the Hadamard
(X) basis with outcomes encoded as bits (0 for ``|+>``, 1 for ``|->``),
and the Bell basis on an ordered qubit pair. Bell measurement is done by
direct projection onto the four Bell states, which keeps branch
probabilities exact. ``distribution`` returns the full exact outcome
distribution (zero-probability outcomes included); ``measure`` samples one
branch and returns the collapsed state together with the exact branch
probability.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import (
    CapacityExceeded,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidBasis,
    NonUnitaryGate,
    SameQubit,
    ZeroVector,
)

QUBIT_CAPACITY = 8

# tolerance for exact algebra (all amplitudes are small rationals over
# sqrt(2), sqrt(3), sqrt(6), so double precision holds them to ~1e-16)
ATOL = 1e-12

# inputs with norm below this are rejected rather than renormalized
MIN_NORM = 1e-9

# branch probabilities below this are treated as exact zeros
ZERO_PROB = 1e-15


@dataclass(frozen=True)
class StateVector:
    """Immutable normalized amplitude vector over ``num_qubits`` qubits."""

    num_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def bit_position(self, qubit: int) -> int:
        """Index-bit position of a 1-based qubit (qubit 1 = MSB)."""
        if not 1 <= qubit <= self.num_qubits:
            raise IndexOutOfRange(
                f"qubit {qubit} outside 1..{self.num_qubits}"
            )
        return self.num_qubits - qubit


def _wrap(num_qubits: int, amplitudes: np.ndarray) -> StateVector:
    """Package an already-normalized array without copying or checking."""
    amplitudes.setflags(write=False)
    return StateVector(num_qubits=num_qubits, amplitudes=amplitudes)


def make_state(num_qubits: int, amplitudes: Sequence[complex]) -> StateVector:
    """Validate, normalize and freeze an amplitude sequence.

    Rejects length mismatches and vectors of norm below ``MIN_NORM``;
    anything else is scaled to unit norm.
    """
    if not 1 <= num_qubits <= QUBIT_CAPACITY:
        raise CapacityExceeded(
            f"num_qubits must be in 1..{QUBIT_CAPACITY}, got {num_qubits}"
        )
    arr = np.asarray(amplitudes, dtype=np.complex128).reshape(-1).copy()
    if arr.shape[0] != 1 << num_qubits:
        raise DimensionMismatch(
            f"expected {1 << num_qubits} amplitudes for {num_qubits} qubits, "
            f"got {arr.shape[0]}"
        )
    norm = np.linalg.norm(arr)
    if norm < MIN_NORM:
        raise ZeroVector("amplitude vector has (near-)zero norm")
    return _wrap(num_qubits, arr / norm)


def basis_ket(bits: str) -> StateVector:
    """Computational basis state from a bit string, e.g. ``'010'``."""
    n = len(bits)
    if not 1 <= n <= QUBIT_CAPACITY:
        raise CapacityExceeded(f"ket width must be in 1..{QUBIT_CAPACITY}, got {n}")
    arr = np.zeros(1 << n, dtype=np.complex128)
    arr[int(bits, 2)] = 1.0
    return _wrap(n, arr)


# ---------------------------------------------------------------------------
# gates


@dataclass(frozen=True)
class Gate1Q:
    """A 2x2 unitary, checked at construction."""

    entries: np.ndarray = field(repr=False)
    name: str = ""

    def __post_init__(self) -> None:
        mat = np.asarray(self.entries, dtype=np.complex128)
        if mat.shape != (2, 2):
            raise DimensionMismatch("single-qubit gate must be 2x2")
        if np.max(np.abs(mat @ mat.conj().T - np.eye(2))) > ATOL:
            raise NonUnitaryGate(f"gate {self.name or mat} is not unitary")
        mat.setflags(write=False)
        object.__setattr__(self, "entries", mat)

    def dagger(self) -> "Gate1Q":
        return Gate1Q(self.entries.conj().T.copy(), name=self.name + "+")


_SQRT2_INV = 1.0 / np.sqrt(2.0)

IDENTITY = Gate1Q(np.array([[1, 0], [0, 1]], dtype=complex), name="I")
# flips both the computational and the Hadamard basis (up to sign):
# |0> -> -|1>, |1> -> |0>, |+> -> |->, |-> -> -|+>
FLIP = Gate1Q(np.array([[0, 1], [-1, 0]], dtype=complex), name="U")
HADAMARD = Gate1Q(np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV, name="H")
PAULI_X = Gate1Q(np.array([[0, 1], [1, 0]], dtype=complex), name="X")
PAULI_Z = Gate1Q(np.array([[1, 0], [0, -1]], dtype=complex), name="Z")


# ---------------------------------------------------------------------------
# bases and outcomes


class BasisKind(str, Enum):
    Z = "z"
    X = "x"
    BELL = "bell"


class BellLabel(str, Enum):
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"


# kernel outcome order; the component table itself lives in _kernels
BELL_ORDER = (
    BellLabel.PSI_PLUS,
    BellLabel.PSI_MINUS,
    BellLabel.PHI_PLUS,
    BellLabel.PHI_MINUS,
)


@dataclass(frozen=True)
class MeasurementBasis:
    """Z or X on a set of qubits, or the Bell basis on an ordered pair."""

    kind: BasisKind
    qubits: tuple[int, ...]

    def validate(self, state: StateVector) -> None:
        _measured_positions(self, state.num_qubits)


@lru_cache(maxsize=None)
def z_basis(*qubits: int) -> MeasurementBasis:
    """Z basis on the given qubits; outcome bits in ascending qubit order."""
    return MeasurementBasis(BasisKind.Z, tuple(sorted(qubits)))


@lru_cache(maxsize=None)
def x_basis(*qubits: int) -> MeasurementBasis:
    """X basis on the given qubits; outcome bit 0 is ``|+>``, 1 is ``|->``."""
    return MeasurementBasis(BasisKind.X, tuple(sorted(qubits)))


@lru_cache(maxsize=None)
def bell_basis(first: int, second: int) -> MeasurementBasis:
    return MeasurementBasis(BasisKind.BELL, (first, second))


@dataclass(frozen=True)
class Outcome:
    """Measurement result: bit string for Z/X, Bell label for Bell."""

    kind: BasisKind
    value: str

    def __str__(self) -> str:
        return self.value


# ---------------------------------------------------------------------------
# state operations


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Tensor product; ``a``'s qubits become the high-order qubits."""
    total = a.num_qubits + b.num_qubits
    if total > QUBIT_CAPACITY:
        raise CapacityExceeded(
            f"{total} qubits exceed the {QUBIT_CAPACITY}-qubit capacity"
        )
    # kron of two vectors, without np.kron's shape machinery
    out = (a.amplitudes[:, None] * b.amplitudes[None, :]).ravel()
    return _wrap(total, out)


def apply_1q(state: StateVector, qubit: int, gate: Gate1Q) -> StateVector:
    """Apply a single-qubit unitary to one tensor factor."""
    pos = state.bit_position(qubit)
    out = _kernels.apply_gate_1q(state.amplitudes, pos, gate.entries)
    return _wrap(state.num_qubits, out)


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    """Flip the target bit on every basis state whose control bit is 1."""
    if control == target:
        raise SameQubit("control and target must differ")
    cpos = state.bit_position(control)
    tpos = state.bit_position(target)
    out = _kernels.apply_cnot(state.amplitudes, cpos, tpos)
    return _wrap(state.num_qubits, out)


@lru_cache(maxsize=None)
def _measured_positions(basis: MeasurementBasis, num_qubits: int) -> np.ndarray:
    """Validated bit positions of a basis on a register size, cached since
    the same few bases are measured millions of times."""
    if len(set(basis.qubits)) != len(basis.qubits):
        raise InvalidBasis(f"duplicate qubit in {basis.qubits}")
    if basis.kind is BasisKind.BELL and len(basis.qubits) != 2:
        raise InvalidBasis("Bell basis requires exactly two qubits")
    if not basis.qubits:
        raise InvalidBasis("empty qubit set")
    for q in basis.qubits:
        if not 1 <= q <= num_qubits:
            raise IndexOutOfRange(f"qubit {q} outside 1..{num_qubits}")
    positions = np.array([num_qubits - q for q in basis.qubits], dtype=np.int64)
    positions.setflags(write=False)
    return positions


def _rotate_measured(state: StateVector, basis: MeasurementBasis) -> StateVector:
    """Hadamard every measured qubit, mapping an X measurement onto Z."""
    out = state
    for q in basis.qubits:
        out = apply_1q(out, q, HADAMARD)
    return out


@lru_cache(maxsize=None)
def _pair_rest_indices(num_qubits: int, qa: int, qb: int) -> np.ndarray:
    """Flat indices by (bit_a, bit_b, rest); rest bits keep qubit order."""
    rest = [q for q in range(1, num_qubits + 1) if q not in (qa, qb)]
    rest_positions = [num_qubits - q for q in rest]
    m = len(rest)
    r = np.arange(1 << m, dtype=np.int64)
    base = np.zeros(1 << m, dtype=np.int64)
    for j, p in enumerate(rest_positions):
        base |= ((r >> (m - 1 - j)) & 1) << p
    pos_a = num_qubits - qa
    pos_b = num_qubits - qb
    idx = np.empty((2, 2, 1 << m), dtype=np.int64)
    for ba in (0, 1):
        for bb in (0, 1):
            idx[ba, bb] = base | (ba << pos_a) | (bb << pos_b)
    idx.setflags(write=False)
    return idx


def _bell_probs(state: StateVector, qa: int, qb: int) -> np.ndarray:
    """Probabilities of the four Bell outcomes, in ``BELL_ORDER``."""
    idx = _pair_rest_indices(state.num_qubits, qa, qb)
    return _kernels.bell_probabilities(state.amplitudes, idx)


def _bell_project(state: StateVector, qa: int, qb: int, which: int) -> StateVector:
    idx = _pair_rest_indices(state.num_qubits, qa, qb)
    return _wrap(state.num_qubits, _kernels.bell_collapse(state.amplitudes, idx, which))


def _zx_probabilities(state: StateVector, basis: MeasurementBasis) -> np.ndarray:
    work = state if basis.kind is BasisKind.Z else _rotate_measured(state, basis)
    return _kernels.z_probabilities(
        work.amplitudes, _measured_positions(basis, state.num_qubits)
    )


def _zx_collapse(
    state: StateVector, basis: MeasurementBasis, outcome_index: int
) -> StateVector:
    work = state if basis.kind is BasisKind.Z else _rotate_measured(state, basis)
    collapsed = _kernels.collapse_z(
        work.amplitudes, _measured_positions(basis, state.num_qubits), outcome_index
    )
    result = _wrap(state.num_qubits, collapsed)
    if basis.kind is BasisKind.X:
        result = _rotate_measured(result, basis)
    return result


def _bits_outcome(basis: MeasurementBasis, outcome_index: int) -> Outcome:
    return Outcome(basis.kind, format(outcome_index, f"0{len(basis.qubits)}b"))


def distribution(state: StateVector, basis: MeasurementBasis) -> dict[Outcome, float]:
    """Exact outcome distribution, zero-probability outcomes included."""
    _measured_positions(basis, state.num_qubits)
    if basis.kind is BasisKind.BELL:
        qa, qb = basis.qubits
        probs = _bell_probs(state, qa, qb)
        return {
            Outcome(BasisKind.BELL, label.value): float(probs[i])
            for i, label in enumerate(BELL_ORDER)
        }
    probs = _zx_probabilities(state, basis)
    return {
        _bits_outcome(basis, i): float(p) for i, p in enumerate(probs)
    }


def project(
    state: StateVector, basis: MeasurementBasis, outcome: Outcome
) -> tuple[float, StateVector | None]:
    """Exact probability of one outcome and the collapsed state (None if 0)."""
    _measured_positions(basis, state.num_qubits)
    if outcome.kind is not basis.kind:
        raise InvalidBasis(
            f"outcome kind {outcome.kind} does not match basis {basis.kind}"
        )
    if basis.kind is BasisKind.BELL:
        qa, qb = basis.qubits
        which = BELL_ORDER.index(BellLabel(outcome.value))
        prob = float(_bell_probs(state, qa, qb)[which])
        if prob <= ZERO_PROB:
            return 0.0, None
        return prob, _bell_project(state, qa, qb, which)
    if len(outcome.value) != len(basis.qubits) or set(outcome.value) - {"0", "1"}:
        raise InvalidBasis(
            f"outcome {outcome.value!r} is not a {len(basis.qubits)}-bit string"
        )
    outcome_index = int(outcome.value, 2)
    probs = _zx_probabilities(state, basis)
    prob = float(probs[outcome_index])
    if prob <= ZERO_PROB:
        return 0.0, None
    return prob, _zx_collapse(state, basis, outcome_index)


def branches(
    state: StateVector, basis: MeasurementBasis
) -> list[tuple[Outcome, StateVector, float]]:
    """All nonzero-probability branches as (outcome, collapsed, probability)."""
    out = []
    for outcome, prob in distribution(state, basis).items():
        if prob > ZERO_PROB:
            _, collapsed = project(state, basis, outcome)
            out.append((outcome, collapsed, prob))
    return out


def _sample_index(probs: np.ndarray, u: float) -> int:
    """Index drawn from ``probs``; zero-probability entries are unreachable."""
    acc = 0.0
    last_positive = -1
    for i, p in enumerate(probs):
        if p <= ZERO_PROB:
            continue
        acc += p
        last_positive = i
        if u < acc:
            return i
    return last_positive


def measure(
    state: StateVector, basis: MeasurementBasis, rng
) -> tuple[Outcome, StateVector, float]:
    """Sample one branch: (outcome, collapsed state, exact branch probability).

    ``rng`` needs only a ``random()`` method (``numpy.random.Generator``
    works). Outcomes with exactly zero probability are never returned.
    """
    _measured_positions(basis, state.num_qubits)
    u = float(rng.random())
    if basis.kind is BasisKind.BELL:
        qa, qb = basis.qubits
        probs = _bell_probs(state, qa, qb)
        i = _sample_index(probs, u)
        collapsed = _bell_project(state, qa, qb, i)
        return Outcome(BasisKind.BELL, BELL_ORDER[i].value), collapsed, float(probs[i])
    probs = _zx_probabilities(state, basis)
    i = _sample_index(probs, u)
    collapsed = _zx_collapse(state, basis, i)
    return _bits_outcome(basis, i), collapsed, float(probs[i])


# ---------------------------------------------------------------------------
# comparison


def phase_deviation(a: StateVector, b: StateVector) -> float:
    """Max amplitude deviation after aligning the best global phase."""
    if a.num_qubits != b.num_qubits:
        raise DimensionMismatch(
            f"cannot compare {a.num_qubits}- and {b.num_qubits}-qubit states"
        )
    inner = np.vdot(b.amplitudes, a.amplitudes)
    mag = abs(inner)
    phase = inner / mag if mag > 0.0 else 1.0
    return float(np.max(np.abs(a.amplitudes - phase * b.amplitudes)))


def states_equal(a: StateVector, b: StateVector, tol: float = ATOL) -> bool:
    """True iff ``a`` equals ``b`` up to a global phase, within ``tol``."""
    return phase_deviation(a, b) <= tol
