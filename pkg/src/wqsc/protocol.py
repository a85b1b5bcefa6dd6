"""Executable round engines for the two W-state communication schemes.

Present scheme (three qubits, identifiers ``present``): the sender keeps
qubits 1,2 and transmits qubit 3. Each round starts from ``phi1`` or
``phi2`` chosen at random. Message rounds encode a bit on qubit 3 before
transmission (identity for 0, the double-basis flip for 1); after the
initial state is announced the receiver Hadamards qubit 3 when it was
``phi2``. Check rounds carry no encoding: both sides measure in the
computational basis and test the correlation (sender ``10``/``01`` forces
receiver ``0``, sender ``00`` forces ``1``). Message rounds publish the
sender's two-qubit result and the receiver recovers the bit from the
correlation table.

Cao scheme (four qubits, identifier ``cao``): each round is a fresh
``w4`` with qubits 3,4 in transit. Check rounds measure both pairs in a
randomly chosen basis (Z, X or Bell) and flag outcomes that are
impossible for the ideal state; the impossible set is derived from the
exact distribution, never hard-coded. Key rounds Bell-measure both pairs,
map the sender's label to a key bit (``psi+`` -> 0, ``phi+/-`` -> 1) and
the receiver's to the complementary map, then demonstrate one-time-pad
transfer of a message bit through the announced ciphertext.

Every round is a pure function of (config, rng stream) and returns a full
:class:`RoundRecord` trace.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

from .attacks import (
    AttackModel,
    CAO_ATTACKS,
    EveNote,
    NO_ATTACK,
    PRESENT_ATTACKS,
    PublicTranscript,
    apply_attack,
    eve_guess,
)
from .errors import BasisMismatch, InvalidConfig, InvalidOutcome
from .qstate import (
    BasisKind,
    BellLabel,
    FLIP,
    HADAMARD,
    MeasurementBasis,
    Outcome,
    ZERO_PROB,
    apply_1q,
    bell_basis,
    branches,
    distribution,
    measure,
    x_basis,
    z_basis,
)
from .states import StateLabel, build

CHECK_BASES = ("z", "x", "bell")

# Bell-label key maps for the Cao scheme
_ALICE_KEY = {BellLabel.PSI_PLUS.value: 0, BellLabel.PHI_PLUS.value: 1, BellLabel.PHI_MINUS.value: 1}
_BOB_KEY = {BellLabel.PHI_PLUS.value: 0, BellLabel.PHI_MINUS.value: 0, BellLabel.PSI_PLUS.value: 1}


@dataclass(frozen=True)
class PresentRoundConfig:
    initial: str = "random"  # "phi1", "phi2" or "random"
    mode: str = "check"  # "check" or "message"
    message_bit: int | None = None
    attack: AttackModel = NO_ATTACK

    def __post_init__(self) -> None:
        if self.initial not in ("random", StateLabel.PHI1.value, StateLabel.PHI2.value):
            raise InvalidConfig(f"initial must be phi1/phi2/random, got {self.initial!r}")
        if self.mode not in ("check", "message"):
            raise InvalidConfig(f"mode must be check or message, got {self.mode!r}")
        if (self.message_bit is not None) != (self.mode == "message"):
            raise InvalidConfig("message_bit is required exactly in message mode")
        if self.message_bit is not None and self.message_bit not in (0, 1):
            raise InvalidConfig(f"message_bit must be 0 or 1, got {self.message_bit!r}")
        if self.attack.kind not in PRESENT_ATTACKS:
            raise InvalidConfig(
                f"attack {self.attack.kind.value} does not apply to the present scheme"
            )


@dataclass(frozen=True)
class CaoRoundConfig:
    mode: str = "check"  # "check" or "key"
    check_basis: str | None = "random"  # "z", "x", "bell" or "random"
    message_bit: int | None = None
    attack: AttackModel = NO_ATTACK

    def __post_init__(self) -> None:
        if self.mode not in ("check", "key"):
            raise InvalidConfig(f"mode must be check or key, got {self.mode!r}")
        if self.mode == "check":
            if self.check_basis not in ("random", *CHECK_BASES):
                raise InvalidConfig(f"check_basis must be z/x/bell/random, got {self.check_basis!r}")
            if self.message_bit is not None:
                raise InvalidConfig("check rounds carry no message bit")
        else:
            if self.check_basis is not None:
                raise InvalidConfig("check_basis applies only to check rounds")
            if self.message_bit not in (0, 1):
                raise InvalidConfig(f"key rounds need message_bit 0 or 1, got {self.message_bit!r}")
        if self.attack.kind not in CAO_ATTACKS:
            raise InvalidConfig(
                f"attack {self.attack.kind.value} does not apply to the Cao scheme"
            )


@dataclass(frozen=True)
class RoundRecord:
    """Full trace of one protocol round."""

    scheme: str
    mode: str
    initial: str
    message_bit: int | None
    alice_encoding: str | None
    eve_note: EveNote | None
    bob_decoded: bool
    alice_outcome: Outcome
    bob_outcome: Outcome
    check_basis: str | None
    check_pass: bool | None
    recovered_bit: int | None
    alice_key: int | None
    bob_key: int | None
    ciphertext: int | None
    eve_guess: int | None  # None = unknown


# ---------------------------------------------------------------------------
# correlation rules (present scheme)


def _require_z(outcome: Outcome, width: int, who: str) -> str:
    if outcome.kind is not BasisKind.Z or len(outcome.value) != width:
        raise InvalidOutcome(f"{who} outcome must be a {width}-bit Z result, got {outcome}")
    return outcome.value


def check_consistent(alice_outcome: Outcome, bob_outcome: Outcome) -> bool:
    """Ideal-channel correlation: sender 10/01 pairs with receiver 0,
    sender 00 with receiver 1."""
    alice = _require_z(alice_outcome, 2, "alice")
    bob = _require_z(bob_outcome, 1, "bob")
    if alice == "11":
        # zero amplitude under every modeled evolution; reaching it means
        # the simulator itself is broken
        raise InvalidOutcome("alice outcome 11 is impossible in a valid run")
    if alice not in ("10", "01", "00"):
        raise InvalidOutcome(f"alice outcome {alice!r} invalid")
    return bob == ("0" if alice in ("10", "01") else "1")


def recover_bit(alice_outcome: Outcome, bob_outcome: Outcome) -> int:
    """Receiver's message bit from the published sender result."""
    alice = _require_z(alice_outcome, 2, "alice")
    bob = _require_z(bob_outcome, 1, "bob")
    if alice == "11":
        raise InvalidOutcome("alice outcome 11 is impossible in a valid run")
    if alice not in ("10", "01", "00"):
        raise InvalidOutcome(f"alice outcome {alice!r} invalid")
    bob_bit = int(bob)
    return bob_bit if alice in ("10", "01") else 1 - bob_bit


# ---------------------------------------------------------------------------
# present-scheme round


def present_round(config: PresentRoundConfig, rng) -> RoundRecord:
    """Execute one round of the three-qubit scheme."""
    if config.initial == "random":
        initial = StateLabel.PHI1.value if rng.random() < 0.5 else StateLabel.PHI2.value
    else:
        initial = config.initial
    state = build(initial)

    encoding: str | None = None
    if config.mode == "message":
        encoding = "I" if config.message_bit == 0 else "U"
        if encoding == "U":
            state = apply_1q(state, 3, FLIP)

    state, note = apply_attack(config.attack, state, (3,), rng)

    bob_decoded = initial == StateLabel.PHI2.value
    if bob_decoded:
        state = apply_1q(state, 3, HADAMARD)

    alice_outcome, state, _ = measure(state, z_basis(1, 2), rng)
    bob_outcome, state, _ = measure(state, z_basis(3), rng)

    check_pass = None
    recovered = None
    guess = None
    if config.mode == "check":
        check_pass = check_consistent(alice_outcome, bob_outcome)
    else:
        recovered = recover_bit(alice_outcome, bob_outcome)
        if note is not None and note.ancilla_qubit is not None:
            # Eve measures her ancilla only now, at guess time
            eps, state, _ = measure(state, z_basis(note.ancilla_qubit), rng)
            note = replace(note, ancilla_outcome=int(eps.value))
        transcript = PublicTranscript(
            scheme="present",
            mode=config.mode,
            initial_label=initial,
            alice_published=alice_outcome,
            bob_announced=bob_outcome,
        )
        guess = eve_guess(config.attack, note, transcript)

    return RoundRecord(
        scheme="present",
        mode=config.mode,
        initial=initial,
        message_bit=config.message_bit,
        alice_encoding=encoding,
        eve_note=note,
        bob_decoded=bob_decoded,
        alice_outcome=alice_outcome,
        bob_outcome=bob_outcome,
        check_basis=None,
        check_pass=check_pass,
        recovered_bit=recovered,
        alice_key=None,
        bob_key=None,
        ciphertext=None,
        eve_guess=guess,
    )


# ---------------------------------------------------------------------------
# Cao-scheme round


def _pair_basis(kind: str, qa: int, qb: int) -> MeasurementBasis:
    if kind == "z":
        return z_basis(qa, qb)
    if kind == "x":
        return x_basis(qa, qb)
    return bell_basis(qa, qb)


@lru_cache(maxsize=None)
def _allowed_joint_outcomes(kind: str) -> frozenset[tuple[str, str]]:
    """Joint (sender pair, receiver pair) outcomes of nonzero probability
    for the ideal four-qubit state, derived from the exact distribution."""
    ideal = build(StateLabel.W4)
    allowed: set[tuple[str, str]] = set()
    if kind in ("z", "x"):
        basis = z_basis(1, 2, 3, 4) if kind == "z" else x_basis(1, 2, 3, 4)
        for outcome, prob in distribution(ideal, basis).items():
            if prob > ZERO_PROB:
                allowed.add((outcome.value[:2], outcome.value[2:]))
    else:
        for alice_out, collapsed, _ in branches(ideal, bell_basis(1, 2)):
            for bob_out, prob in distribution(collapsed, bell_basis(3, 4)).items():
                if prob > ZERO_PROB:
                    allowed.add((alice_out.value, bob_out.value))
    return frozenset(allowed)


def cao_check_error(basis: str, alice_outcome: Outcome, bob_outcome: Outcome) -> bool:
    """True iff the joint pair outcome is impossible for the ideal state."""
    if basis not in CHECK_BASES:
        raise BasisMismatch(f"basis must be one of {CHECK_BASES}, got {basis!r}")
    expected_kind = {"z": BasisKind.Z, "x": BasisKind.X, "bell": BasisKind.BELL}[basis]
    if alice_outcome.kind is not expected_kind or bob_outcome.kind is not expected_kind:
        raise BasisMismatch(
            f"outcomes {alice_outcome.kind.value}/{bob_outcome.kind.value} "
            f"do not match check basis {basis}"
        )
    return (alice_outcome.value, bob_outcome.value) not in _allowed_joint_outcomes(basis)


def cao_round(config: CaoRoundConfig, rng) -> RoundRecord:
    """Execute one round of the four-qubit scheme."""
    state = build(StateLabel.W4)
    state, note = apply_attack(config.attack, state, (3, 4), rng)

    if config.mode == "check":
        if config.check_basis == "random":
            basis_kind = CHECK_BASES[int(rng.random() * 3.0) % 3]
        else:
            basis_kind = config.check_basis
        alice_outcome, state, _ = measure(state, _pair_basis(basis_kind, 1, 2), rng)
        bob_outcome, state, _ = measure(state, _pair_basis(basis_kind, 3, 4), rng)
        check_pass = not cao_check_error(basis_kind, alice_outcome, bob_outcome)
        return RoundRecord(
            scheme="cao",
            mode="check",
            initial=StateLabel.W4.value,
            message_bit=None,
            alice_encoding=None,
            eve_note=note,
            bob_decoded=False,
            alice_outcome=alice_outcome,
            bob_outcome=bob_outcome,
            check_basis=basis_kind,
            check_pass=check_pass,
            recovered_bit=None,
            alice_key=None,
            bob_key=None,
            ciphertext=None,
            eve_guess=None,
        )

    alice_outcome, state, _ = measure(state, bell_basis(1, 2), rng)
    bob_outcome, state, _ = measure(state, bell_basis(3, 4), rng)
    if alice_outcome.value not in _ALICE_KEY or bob_outcome.value not in _BOB_KEY:
        raise InvalidOutcome(
            f"Bell outcomes ({alice_outcome}, {bob_outcome}) have no key "
            "encoding; impossible under the modeled channels"
        )
    alice_key = _ALICE_KEY[alice_outcome.value]
    bob_key = _BOB_KEY[bob_outcome.value]
    ciphertext = alice_key ^ config.message_bit
    recovered = bob_key ^ ciphertext
    transcript = PublicTranscript(
        scheme="cao",
        mode="key",
        ciphertext=ciphertext,
    )
    guess = eve_guess(config.attack, note, transcript)
    return RoundRecord(
        scheme="cao",
        mode="key",
        initial=StateLabel.W4.value,
        message_bit=config.message_bit,
        alice_encoding=None,
        eve_note=note,
        bob_decoded=False,
        alice_outcome=alice_outcome,
        bob_outcome=bob_outcome,
        check_basis=None,
        check_pass=None,
        recovered_bit=recovered,
        alice_key=alice_key,
        bob_key=bob_key,
        ciphertext=ciphertext,
        eve_guess=guess,
    )
