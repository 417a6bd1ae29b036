"""Exception hierarchy.

Every protocol failure carries a short machine-readable ``reason`` that
the simulator and scenario ``expect`` clauses match against.
"""


class ProtocolError(Exception):
    reason = "protocol-error"

    def __init__(self, message: str = "", reason: str | None = None):
        if reason is not None:
            self.reason = reason
        super().__init__(message or self.reason)


class KeygenError(ProtocolError):
    reason = "exponent-not-invertible"


class NotInvertible(ProtocolError):
    reason = "j-not-invertible"


class ChallengeOutOfRange(ProtocolError):
    reason = "challenge-out-of-range"


class UnsolvablePuzzle(ProtocolError):
    reason = "unsolvable-puzzle"


class BudgetExceeded(ProtocolError):
    reason = "budget-exceeded"


class MalformedFrame(ProtocolError):
    reason = "malformed"


class TruncatedFrame(MalformedFrame):
    reason = "truncated"


class InvalidSignature(ProtocolError):
    reason = "invalid-signature"


class UnknownConversation(ProtocolError):
    reason = "unknown-conversation"


class BootstrapUnreachable(ProtocolError):
    reason = "bootstrap-unreachable"


class SignatureDenied(ProtocolError):
    reason = "signature-denied"


class ChallengePending(ProtocolError):
    reason = "challenge-pending"


class ReplayedPuzzle(ProtocolError):
    reason = "replayed-x"


class UnknownPuzzle(ProtocolError):
    reason = "unknown-x"


class ReusedPuzzle(ProtocolError):
    reason = "reused-x"


class TagFailure(ProtocolError):
    reason = "bad-tag"


class UnknownID(ProtocolError):
    reason = "unknown-id"


class AlreadyRegistered(ProtocolError):
    reason = "already-registered"


class AddressInUse(ProtocolError):
    reason = "address-in-use"


class BrokenPath(ProtocolError):
    reason = "broken-path"


class ScenarioError(Exception):
    """Script parse or execution error, tagged with its 1-based line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")
