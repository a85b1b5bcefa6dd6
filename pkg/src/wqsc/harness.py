"""Exact branch-tree analyzer, deterministic Monte Carlo runner, statistics.

The exact analyzer multiplies its way through every branch of a round
(initial-state choice x attack outcome x both parties' measurement
outcomes x, for the entangling probe, the ancilla outcome) and therefore
produces check-error and leak rates with no sampling error. The Monte
Carlo runner executes independent rounds whose randomness comes from a
keyed counter generator: Philox keyed by the master seed, with every
round owning a fixed block of counter positions. Results are therefore
bit-identical for a given config no matter how rounds are chunked or
parallelized.

Rate conventions: ``error_rate`` is a check-round statistic;
``recovery_accuracy`` and ``eve_leak_rate`` are message-round statistics.
Leak excludes rounds where Eve abstains ("unknown") from both numerator
and denominator by default and reports the abstention fraction
separately; set ``unknown_as_half`` to score abstentions as coin flips
instead.

Serialization: every public result type has a ``*_to_dict`` companion,
numbers are emitted with 12 significant digits, and ``to_json``/``to_csv``
render those dicts. The flat :func:`round_record_to_dict` schema is the
stable wire format for round traces.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .attacks import (
    AttackKind,
    AttackModel,
    CAO_ATTACKS,
    PRESENT_ATTACKS,
    PublicTranscript,
    attack_branches,
    eve_guess,
)
from .errors import InvalidConfig, InvalidCounts, UnsupportedPair
from .protocol import (
    CHECK_BASES,
    CaoRoundConfig,
    PresentRoundConfig,
    RoundRecord,
    _ALICE_KEY,
    _BOB_KEY,
    _pair_basis,
    cao_check_error,
    cao_round,
    check_consistent,
    present_round,
    recover_bit,
)
from .qstate import HADAMARD, Outcome, apply_1q, bell_basis, branches, z_basis
from .states import IdentityReport, StateLabel, build

SCHEMES = ("present", "cao")

_MODE_STREAM_TAG = 0xFFFFFFFFFFFFFFFF
_DRAW_STREAM_TAG = 0xFFFFFFFFFFFFFFFE


# ---------------------------------------------------------------------------
# configuration and results


@dataclass(frozen=True)
class RunConfig:
    scheme: str
    attack: str = AttackKind.NONE.value
    rounds: int = 100_000
    check_fraction: float = 0.5
    master_seed: int = 0
    init_policy: str = "random"  # present scheme: "random", "phi1", "phi2"
    check_basis_policy: str = "random"  # cao scheme: "random", "z", "x", "bell"
    output_format: str = "json"
    unknown_as_half: bool = False

    def __post_init__(self) -> None:
        _validate_pair(self.scheme, self.attack)
        if self.rounds < 1:
            raise InvalidConfig(f"rounds must be >= 1, got {self.rounds}")
        if not 0.0 < self.check_fraction < 1.0:
            raise InvalidConfig(
                f"check_fraction must lie in (0, 1), got {self.check_fraction}"
            )
        if self.rounds * self.check_fraction < 1.0:
            raise InvalidConfig("check_fraction must yield at least one check round")
        if not 0 <= self.master_seed < 2**64:
            raise InvalidConfig("master_seed must fit in 64 bits")
        if self.init_policy not in ("random", "phi1", "phi2"):
            raise InvalidConfig(f"init_policy {self.init_policy!r} invalid")
        if self.check_basis_policy not in ("random", *CHECK_BASES):
            raise InvalidConfig(f"check_basis_policy {self.check_basis_policy!r} invalid")
        if self.output_format not in ("json", "csv"):
            raise InvalidConfig(f"output_format {self.output_format!r} invalid")


@dataclass(frozen=True)
class RunStats:
    """Aggregated Monte Carlo counts and rates for one run."""

    scheme: str
    attack: str
    rounds_total: int
    check_rounds: int
    check_errors: int
    message_rounds: int
    error_rate: float
    error_rate_ci95: tuple[float, float]
    recovery_accuracy: float
    eve_leak_rate: float
    unknown_fraction: float


@dataclass(frozen=True)
class ExactResult:
    """Sampling-free rates from full branch enumeration."""

    scheme: str
    attack: str
    total_error_rate: float
    conditional_error_rates: dict[str, float]
    leak_rate: float
    unknown_fraction: float
    conditional_leak_rates: dict[str, float]
    recovery_accuracy: float


def _validate_pair(scheme: str, attack: str) -> AttackModel:
    if scheme not in SCHEMES:
        raise UnsupportedPair(f"unknown scheme {scheme!r}")
    try:
        kind = AttackKind(attack)
    except ValueError:
        raise UnsupportedPair(f"unknown attack {attack!r}") from None
    allowed = PRESENT_ATTACKS if scheme == "present" else CAO_ATTACKS
    if kind not in allowed:
        raise UnsupportedPair(f"attack {attack!r} does not apply to scheme {scheme!r}")
    return AttackModel(kind)


def binomial_ci(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Normal-approximation binomial interval, clamped to [0, 1]."""
    if trials < 1:
        raise InvalidCounts(f"trials must be >= 1, got {trials}")
    if not 0 <= successes <= trials:
        raise InvalidCounts(f"successes {successes} outside 0..{trials}")
    p = successes / trials
    half = z * math.sqrt(p * (1.0 - p) / trials)
    return (max(0.0, p - half), min(1.0, p + half))


# ---------------------------------------------------------------------------
# exact analyzer


class _LeakTally:
    """Probability mass bookkeeping for Eve's guesses and Bob's recovery."""

    def __init__(self) -> None:
        self.total = 0.0
        self.known = 0.0
        self.correct = 0.0
        self.recovered = 0.0

    def add(self, mass: float, guess: int | None, bit: int, recovered_ok: bool) -> None:
        self.total += mass
        if recovered_ok:
            self.recovered += mass
        if guess is not None:
            self.known += mass
            if guess == bit:
                self.correct += mass

    def leak_rate(self) -> float:
        return self.correct / self.known if self.known > 0.0 else 0.0

    def unknown_fraction(self) -> float:
        return 1.0 - self.known / self.total if self.total > 0.0 else 1.0

    def recovery(self) -> float:
        return self.recovered / self.total if self.total > 0.0 else 1.0


def _present_check_error(initial: str, model: AttackModel) -> float:
    error = 0.0
    state = build(initial)
    for forwarded, _, p_attack in attack_branches(model, state, (3,)):
        decoded = (
            apply_1q(forwarded, 3, HADAMARD)
            if initial == StateLabel.PHI2.value
            else forwarded
        )
        for alice_out, after_alice, p_alice in branches(decoded, z_basis(1, 2)):
            for bob_out, _, p_bob in branches(after_alice, z_basis(3)):
                if not check_consistent(alice_out, bob_out):
                    error += p_attack * p_alice * p_bob
    return error


def _present_message_tally(initial: str, model: AttackModel, tally: _LeakTally, weight: float) -> None:
    from .qstate import FLIP

    for bit in (0, 1):
        state = build(initial)
        if bit == 1:
            state = apply_1q(state, 3, FLIP)
        for forwarded, note, p_attack in attack_branches(model, state, (3,)):
            decoded = (
                apply_1q(forwarded, 3, HADAMARD)
                if initial == StateLabel.PHI2.value
                else forwarded
            )
            for alice_out, after_alice, p_alice in branches(decoded, z_basis(1, 2)):
                transcript = PublicTranscript(
                    scheme="present",
                    mode="message",
                    initial_label=initial,
                    alice_published=alice_out,
                )
                for bob_out, after_bob, p_bob in branches(after_alice, z_basis(3)):
                    mass = weight * 0.5 * p_attack * p_alice * p_bob
                    recovered_ok = recover_bit(alice_out, bob_out) == bit
                    if note is not None and note.ancilla_qubit is not None:
                        for eps_out, _, p_eps in branches(
                            after_bob, z_basis(note.ancilla_qubit)
                        ):
                            full_note = replace(
                                note, ancilla_outcome=int(eps_out.value)
                            )
                            guess = eve_guess(model, full_note, transcript)
                            tally.add(mass * p_eps, guess, bit, recovered_ok)
                    else:
                        guess = eve_guess(model, note, transcript)
                        tally.add(mass, guess, bit, recovered_ok)


def _exact_present(model: AttackModel, init_policy: str) -> ExactResult:
    if init_policy == "random":
        initials = [(StateLabel.PHI1.value, 0.5), (StateLabel.PHI2.value, 0.5)]
    else:
        initials = [(init_policy, 1.0)]

    conditional_error: dict[str, float] = {}
    conditional_leak: dict[str, float] = {}
    total_error = 0.0
    overall = _LeakTally()
    for initial, weight in initials:
        err = _present_check_error(initial, model)
        conditional_error[initial] = err
        total_error += weight * err

        per_init = _LeakTally()
        _present_message_tally(initial, model, per_init, 1.0)
        conditional_leak[initial] = per_init.leak_rate()
        overall.total += weight * per_init.total
        overall.known += weight * per_init.known
        overall.correct += weight * per_init.correct
        overall.recovered += weight * per_init.recovered

    return ExactResult(
        scheme="present",
        attack=model.kind.value,
        total_error_rate=total_error,
        conditional_error_rates=conditional_error,
        leak_rate=overall.leak_rate(),
        unknown_fraction=overall.unknown_fraction(),
        conditional_leak_rates=conditional_leak,
        recovery_accuracy=overall.recovery(),
    )


def _cao_check_error_for_basis(basis: str, model: AttackModel) -> float:
    error = 0.0
    state = build(StateLabel.W4)
    for forwarded, _, p_attack in attack_branches(model, state, (3, 4)):
        for alice_out, after_alice, p_alice in branches(
            forwarded, _pair_basis(basis, 1, 2)
        ):
            for bob_out, _, p_bob in branches(after_alice, _pair_basis(basis, 3, 4)):
                if cao_check_error(basis, alice_out, bob_out):
                    error += p_attack * p_alice * p_bob
    return error


def _cao_message_tally(model: AttackModel, tally: _LeakTally) -> None:
    state = build(StateLabel.W4)
    for bit in (0, 1):
        for forwarded, note, p_attack in attack_branches(model, state, (3, 4)):
            for alice_out, after_alice, p_alice in branches(forwarded, bell_basis(1, 2)):
                alice_key = _ALICE_KEY[alice_out.value]
                ciphertext = alice_key ^ bit
                transcript = PublicTranscript(
                    scheme="cao", mode="key", ciphertext=ciphertext
                )
                guess = eve_guess(model, note, transcript)
                for bob_out, _, p_bob in branches(after_alice, bell_basis(3, 4)):
                    bob_key = _BOB_KEY[bob_out.value]
                    recovered_ok = (bob_key ^ ciphertext) == bit
                    mass = 0.5 * p_attack * p_alice * p_bob
                    tally.add(mass, guess, bit, recovered_ok)


def _exact_cao(model: AttackModel, basis_policy: str) -> ExactResult:
    if basis_policy == "random":
        bases = [(b, 1.0 / 3.0) for b in CHECK_BASES]
    else:
        bases = [(basis_policy, 1.0)]

    conditional_error: dict[str, float] = {}
    total_error = 0.0
    for basis, weight in bases:
        err = _cao_check_error_for_basis(basis, model)
        conditional_error[basis] = err
        total_error += weight * err

    tally = _LeakTally()
    _cao_message_tally(model, tally)
    return ExactResult(
        scheme="cao",
        attack=model.kind.value,
        total_error_rate=total_error,
        conditional_error_rates=conditional_error,
        leak_rate=tally.leak_rate(),
        unknown_fraction=tally.unknown_fraction(),
        conditional_leak_rates={"w4": tally.leak_rate()},
        recovery_accuracy=tally.recovery(),
    )


def exact_analyze(
    scheme: str,
    attack: str,
    init_policy: str = "random",
    check_basis_policy: str = "random",
) -> ExactResult:
    """Exact rates for a (scheme, attack) pair by full branch enumeration."""
    model = _validate_pair(scheme, attack)
    if scheme == "present":
        if init_policy not in ("random", "phi1", "phi2"):
            raise InvalidConfig(f"init_policy {init_policy!r} invalid")
        return _exact_present(model, init_policy)
    if check_basis_policy not in ("random", *CHECK_BASES):
        raise InvalidConfig(f"check_basis_policy {check_basis_policy!r} invalid")
    return _exact_cao(model, check_basis_policy)


# ---------------------------------------------------------------------------
# Monte Carlo runner

# each round owns a fixed block of uniforms; Philox emits 4 doubles per
# 128-bit counter step, so 8 draws = 2 counter steps keeps blocks aligned
_DRAWS_PER_ROUND = 8
_BLOCKS_PER_ROUND = 2


class _RoundStream:
    """Positional uniform stream over one round's draw block."""

    __slots__ = ("_row", "_pos")

    def __init__(self, row: np.ndarray) -> None:
        self._row = row
        self._pos = 0

    def random(self) -> float:
        value = self._row[self._pos]
        self._pos += 1
        return float(value)


def _draw_block(master_seed: int, start: int, count: int) -> np.ndarray:
    """Uniform matrix for rounds [start, start+count): row i of the full
    run's draw table, regardless of chunking."""
    bitgen = np.random.Philox(key=np.array([master_seed, _DRAW_STREAM_TAG], dtype=np.uint64))
    bitgen.advance(_BLOCKS_PER_ROUND * start)
    return np.random.Generator(bitgen).random((count, _DRAWS_PER_ROUND))


def _check_flags(config: RunConfig) -> np.ndarray:
    """Per-round check/message assignment from the master mode stream."""
    master = np.random.Generator(
        np.random.Philox(key=np.array([config.master_seed, _MODE_STREAM_TAG], dtype=np.uint64))
    )
    flags = master.random(config.rounds) < config.check_fraction
    if not flags.any():
        flags[0] = True
    return flags


def _run_chunk(config: RunConfig, start: int, flags: np.ndarray) -> dict[str, int]:
    model = AttackModel(AttackKind(config.attack))
    draws = _draw_block(config.master_seed, start, len(flags))
    if config.scheme == "present":
        check_cfg = PresentRoundConfig(
            initial=config.init_policy, mode="check", attack=model
        )
        message_cfg = {
            bit: PresentRoundConfig(
                initial=config.init_policy, mode="message", message_bit=bit, attack=model
            )
            for bit in (0, 1)
        }
        run_round = present_round
    else:
        check_cfg = CaoRoundConfig(
            mode="check", check_basis=config.check_basis_policy, attack=model
        )
        message_cfg = {
            bit: CaoRoundConfig(mode="key", check_basis=None, message_bit=bit, attack=model)
            for bit in (0, 1)
        }
        run_round = cao_round

    counts = {
        "check_rounds": 0,
        "check_errors": 0,
        "message_rounds": 0,
        "recovered_correct": 0,
        "guesses_known": 0,
        "guesses_correct": 0,
    }
    for offset, is_check in enumerate(flags):
        rng = _RoundStream(draws[offset])
        if is_check:
            record = run_round(check_cfg, rng)
            counts["check_rounds"] += 1
            if not record.check_pass:
                counts["check_errors"] += 1
        else:
            bit = 0 if rng.random() < 0.5 else 1
            record = run_round(message_cfg[bit], rng)
            counts["message_rounds"] += 1
            if record.recovered_bit == record.message_bit:
                counts["recovered_correct"] += 1
            if record.eve_guess is not None:
                counts["guesses_known"] += 1
                if record.eve_guess == record.message_bit:
                    counts["guesses_correct"] += 1
    return counts


def run_monte_carlo(config: RunConfig, workers: int = 1) -> RunStats:
    """Execute ``config.rounds`` independent rounds and aggregate counts.

    Every round draws from its own counter-keyed stream, and the counts
    merge is a plain sum, so the result is identical for any ``workers``
    value or chunking order.
    """
    flags = _check_flags(config)
    if workers <= 1:
        counts = _run_chunk(config, 0, flags)
    else:
        bounds = np.linspace(0, config.rounds, workers + 1, dtype=int)
        jobs = [
            (config, int(lo), flags[lo:hi])
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        counts = {}
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for partial in pool.map(_run_chunk, *zip(*jobs)):
                for key, value in partial.items():
                    counts[key] = counts.get(key, 0) + value

    check_rounds = counts["check_rounds"]
    message_rounds = counts["message_rounds"]
    error_rate = counts["check_errors"] / check_rounds if check_rounds else 0.0
    ci = binomial_ci(counts["check_errors"], check_rounds) if check_rounds else (0.0, 0.0)
    recovery = counts["recovered_correct"] / message_rounds if message_rounds else 1.0
    known = counts["guesses_known"]
    if config.unknown_as_half and message_rounds:
        leak = (counts["guesses_correct"] + 0.5 * (message_rounds - known)) / message_rounds
    else:
        leak = counts["guesses_correct"] / known if known else 0.0
    unknown_fraction = 1.0 - known / message_rounds if message_rounds else 1.0

    return RunStats(
        scheme=config.scheme,
        attack=config.attack,
        rounds_total=config.rounds,
        check_rounds=check_rounds,
        check_errors=counts["check_errors"],
        message_rounds=message_rounds,
        error_rate=error_rate,
        error_rate_ci95=ci,
        recovery_accuracy=recovery,
        eve_leak_rate=leak,
        unknown_fraction=unknown_fraction,
    )


# ---------------------------------------------------------------------------
# serialization


def _sig12(value):
    if isinstance(value, float):
        return float(f"{value:.12g}")
    return value


def run_stats_to_dict(stats: RunStats) -> dict:
    return {
        "scheme": stats.scheme,
        "attack": stats.attack,
        "rounds_total": stats.rounds_total,
        "check_rounds": stats.check_rounds,
        "check_errors": stats.check_errors,
        "message_rounds": stats.message_rounds,
        "error_rate": _sig12(stats.error_rate),
        "error_rate_ci95": [_sig12(stats.error_rate_ci95[0]), _sig12(stats.error_rate_ci95[1])],
        "recovery_accuracy": _sig12(stats.recovery_accuracy),
        "eve_leak_rate": _sig12(stats.eve_leak_rate),
        "unknown_fraction": _sig12(stats.unknown_fraction),
    }


def exact_result_to_dict(result: ExactResult) -> dict:
    return {
        "scheme": result.scheme,
        "attack": result.attack,
        "total_error_rate": _sig12(result.total_error_rate),
        "conditional_error_rates": {
            k: _sig12(v) for k, v in result.conditional_error_rates.items()
        },
        "leak_rate": _sig12(result.leak_rate),
        "unknown_fraction": _sig12(result.unknown_fraction),
        "conditional_leak_rates": {
            k: _sig12(v) for k, v in result.conditional_leak_rates.items()
        },
        "recovery_accuracy": _sig12(result.recovery_accuracy),
    }


def identity_reports_to_dict(reports: list[IdentityReport]) -> dict:
    return {
        "reports": [
            {
                "identity_id": r.identity_id,
                "description": r.description,
                "deviation": _sig12(r.deviation),
                "passed": r.passed,
                "expect": r.expect,
            }
            for r in reports
        ],
        "all_passed": all(r.passed for r in reports),
    }


def round_record_to_dict(record: RoundRecord) -> dict:
    """Stable flat wire format for one round trace."""

    def outcome_str(outcome: Outcome | None) -> str | None:
        return None if outcome is None else outcome.value

    note = record.eve_note
    return {
        "scheme": record.scheme,
        "mode": record.mode,
        "initial": record.initial,
        "message_bit": record.message_bit,
        "alice_encoding": record.alice_encoding,
        "eve_basis": None if note is None else note.basis,
        "eve_observed": None if note is None else note.observed,
        "eve_ancilla_outcome": None if note is None else note.ancilla_outcome,
        "bob_decoded": record.bob_decoded,
        "alice_outcome": outcome_str(record.alice_outcome),
        "bob_outcome": outcome_str(record.bob_outcome),
        "check_basis": record.check_basis,
        "check_pass": record.check_pass,
        "recovered_bit": record.recovered_bit,
        "alice_key": record.alice_key,
        "bob_key": record.bob_key,
        "ciphertext": record.ciphertext,
        "eve_guess": "unknown" if record.eve_guess is None else record.eve_guess,
    }


def to_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=False)


def _flatten(payload: dict) -> dict:
    flat: dict = {}
    for key, value in payload.items():
        if isinstance(value, dict):
            for sub, inner in value.items():
                flat[f"{key}_{sub}"] = inner
        elif isinstance(value, (list, tuple)) and len(value) == 2 and all(
            isinstance(v, (int, float)) for v in value
        ):
            flat[f"{key}_low"], flat[f"{key}_high"] = value
        else:
            flat[key] = value
    return flat


def to_csv(payload: dict) -> str:
    """Single-object payloads become header+row; report lists become rows."""
    if "reports" in payload:
        lines = ["identity_id,description,deviation,passed,expect"]
        for report in payload["reports"]:
            desc = '"%s"' % report["description"].replace('"', '""')
            lines.append(
                f"{report['identity_id']},{desc},{report['deviation']},"
                f"{report['passed']},{report['expect']}"
            )
        return "\n".join(lines) + "\n"
    flat = _flatten(payload)
    header = ",".join(flat)
    row = ",".join("" if v is None else str(v) for v in flat.values())
    return f"{header}\n{row}\n"
