"""Exception hierarchy shared by all wqsc modules."""


class WqscError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(WqscError):
    """Amplitude count or qubit count does not match the declared shape."""


class ZeroVector(WqscError):
    """Input amplitudes have (near-)zero norm and cannot be normalized."""


class CapacityExceeded(WqscError):
    """Operation would produce a register larger than the supported maximum."""


class IndexOutOfRange(WqscError):
    """Qubit index outside the 1..num_qubits range."""


class SameQubit(WqscError):
    """Two-qubit operation given identical control and target."""


class NonUnitaryGate(WqscError):
    """Gate matrix fails the unitarity check."""


class InvalidBasis(WqscError):
    """Measurement basis malformed for the given state."""


class UnknownLabel(WqscError):
    """No state constructor registered for the requested label."""


class InvalidConfig(WqscError):
    """Round or run configuration violates its invariants."""


class InvalidOutcome(WqscError):
    """Measurement outcome outside the set a protocol rule accepts."""


class BasisMismatch(WqscError):
    """Outcome was produced in a different basis than the rule expects."""


class ArityMismatch(WqscError):
    """Attack applied to the wrong number of transit qubits."""


class MissingTranscript(WqscError):
    """Eve's guess requested before the needed public announcements exist."""


class UnsupportedPair(WqscError):
    """No analyzer for the requested (scheme, attack) combination."""


class InvalidCounts(WqscError):
    """Success/trial counts outside the valid range for interval estimation."""
