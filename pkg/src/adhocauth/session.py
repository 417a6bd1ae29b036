"""Initiator and responder state machines for one private conversation.

Phase 2 binds an ID to the conversation (variants 1-3). Each later
message costs one Phase-3 round: puzzle set -> challenge -> response plus
the message sealed under the solved puzzle's F(X).
"""

from __future__ import annotations

import hashlib
import hmac
import random
from dataclasses import dataclass, field

from . import gqid
from .errors import (BootstrapUnreachable, ChallengePending, InvalidSignature,
                     ReplayedPuzzle, ReusedPuzzle, TagFailure, UnknownConversation,
                     UnknownPuzzle)
from .frames import AuthenticatedMessage, ChallengeMessage, InitMessage, PuzzleSet
from .puzzle import PuzzleParams, PuzzleSecret, keystream, make_puzzle_set, solve_one, xor

TAG_LEN = 32


@dataclass(frozen=True)
class ProtocolConfig:
    puzzles: PuzzleParams = field(default_factory=PuzzleParams)
    # None means the full range [1, N]
    challenge_bound: int | None = None


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    reason: str | None = None
    message: bytes | None = None

    def __bool__(self) -> bool:
        return self.accepted

    @property
    def label(self) -> str:
        return "accept" if self.accepted else f"reject:{self.reason}"


def seal(m: bytes, fx: bytes) -> bytes:
    """Encrypt-then-tag under keys derived from F(X)."""
    enc_key = hashlib.sha256(fx + b"enc").digest()
    mac_key = hashlib.sha256(fx + b"mac").digest()
    c = xor(m, keystream(enc_key, len(m)))
    return c + hashlib.sha256(mac_key + c).digest()


def open_sealed(sealed: bytes, fx: bytes) -> bytes:
    if len(sealed) < TAG_LEN:
        raise TagFailure("sealed body shorter than its tag")
    c, tag = sealed[:-TAG_LEN], sealed[-TAG_LEN:]
    mac_key = hashlib.sha256(fx + b"mac").digest()
    if not hmac.compare_digest(tag, hashlib.sha256(mac_key + c).digest()):
        raise TagFailure("integrity tag mismatch")
    enc_key = hashlib.sha256(fx + b"enc").digest()
    return xor(c, keystream(enc_key, len(c)))


def h_message(m: bytes) -> bytes:
    return hashlib.sha256(m).digest()


def identity_digest(identity: bytes, h_m: bytes) -> bytes:
    """What the bootstrap signs for a variant-3 init: H(ID || h(m))."""
    return hashlib.sha256(identity + h_m).digest()


def init_conversation(variant: int, cred: gqid.Credential, m: bytes, bootstrap,
                      conversation_id: bytes) -> InitMessage:
    """Build the first private message; variants 2 and 3 need the bootstrap."""
    if variant == 1:
        return InitMessage(1, conversation_id, m, identity=cred.ID)
    if variant not in (2, 3):
        raise ValueError(f"unknown init variant {variant}")
    if bootstrap is None or not bootstrap.reachable:
        raise BootstrapUnreachable("variant %d needs the bootstrap" % variant)
    if variant == 2:
        bootstrap.register_conversation(conversation_id, cred.ID)
        return InitMessage(2, conversation_id, m)
    h_m = h_message(m)
    sig = bootstrap.sign_identity(cred.ID, h_m)
    return InitMessage(3, conversation_id, m, identity=cred.ID, h_m=h_m, signature=sig)


def accept_init(msg: InitMessage, params: gqid.PublicParams, bootstrap=None,
                config: ProtocolConfig | None = None) -> ResponderSession:
    if msg.variant == 1:
        identity = msg.identity
    elif msg.variant == 2:
        if bootstrap is None or not bootstrap.reachable:
            raise BootstrapUnreachable("variant 2 needs the bootstrap")
        identity = bootstrap.lookup_conversation(msg.conversation_id)
        if identity is None:
            raise UnknownConversation("no registry entry for this conversation")
    elif msg.variant == 3:
        h_m = h_message(msg.message)
        if not hmac.compare_digest(h_m, msg.h_m) or not gqid.verify_sig(
                params, msg.signature, identity_digest(msg.identity, h_m)):
            raise InvalidSignature("bootstrap signature does not cover (ID, h(m))")
        identity = msg.identity
    else:
        raise ValueError(f"unknown init variant {msg.variant}")
    return ResponderSession(msg.conversation_id, gqid.Identity.from_id(identity, params),
                            params, config or ProtocolConfig())


@dataclass
class _Pending:
    x: bytes
    fx: bytes
    u: int
    b: int


class InitiatorSession:
    """P_I's side. Keeps r for every outstanding u; each puzzle set answers once."""

    def __init__(self, credential: gqid.Credential, conversation_id: bytes,
                 params: gqid.PublicParams, f_secret: bytes,
                 config: ProtocolConfig | None = None):
        self.credential = credential
        self.conversation_id = conversation_id
        self.params = params
        self.f_secret = f_secret
        self.config = config or ProtocolConfig()
        self.secrets: dict[bytes, PuzzleSecret] = {}
        self._set_of: dict[bytes, int] = {}
        self._members: dict[int, list[bytes]] = {}
        self._next_set = 0
        self._ready: list[bytes] = []
        self.consumed: set[bytes] = set()

    def _generate(self, rng: random.Random) -> bytes:
        puzzles, secrets = make_puzzle_set(self.config.puzzles, self.params, self.f_secret, rng)
        set_id = self._next_set
        self._next_set += 1
        self._members[set_id] = [s.x for s in secrets]
        for s in secrets:
            self.secrets[s.x] = s
            self._set_of[s.x] = set_id
        return PuzzleSet(tuple(puzzles)).encode()

    def precompute(self, count: int, rng: random.Random) -> None:
        """Build puzzle sets ahead of need; no peer is required."""
        for _ in range(count):
            self._ready.append(self._generate(rng))

    def begin_message(self, rng: random.Random) -> bytes:
        if self._ready:
            return self._ready.pop(0)
        return self._generate(rng)

    def answer_challenge(self, ch: ChallengeMessage, m: bytes) -> AuthenticatedMessage:
        if ch.conversation_id != self.conversation_id:
            raise UnknownConversation("challenge for another conversation")
        if ch.x in self.consumed:
            raise ReusedPuzzle("puzzle already answered")
        secret = self.secrets.get(ch.x)
        if secret is None:
            raise UnknownPuzzle("puzzle not issued by this session")
        v = gqid.respond(self.credential, secret.r, ch.b, self.params, self.config.challenge_bound)
        # the whole set is spent: siblings must not answer a replayed set
        for x in self._members.pop(self._set_of[ch.x]):
            self.secrets.pop(x, None)
            self._set_of.pop(x, None)
        self.consumed.add(ch.x)
        return AuthenticatedMessage(self.conversation_id, v, seal(m, secret.fx))


class ResponderSession:
    """P_S's side, bound to one Identity during Phase 2."""

    def __init__(self, conversation_id: bytes, identity: gqid.Identity,
                 params: gqid.PublicParams, config: ProtocolConfig | None = None):
        self.conversation_id = conversation_id
        self.identity = identity
        self.params = params
        self.config = config or ProtocolConfig()
        self.pending: _Pending | None = None
        self.consumed: set[bytes] = set()
        self.last_trials = 0

    def make_challenge(self, frame: bytes | PuzzleSet, rng: random.Random) -> ChallengeMessage:
        if self.pending is not None:
            self.pending = None
            raise ChallengePending("a challenge was already outstanding; round reset")
        pset = PuzzleSet.decode(frame) if isinstance(frame, (bytes, bytearray)) else frame
        sol = solve_one(list(pset.puzzles), self.config.puzzles, rng)
        self.last_trials = sol.trials
        if sol.x in self.consumed:
            raise ReplayedPuzzle("puzzle id already consumed")
        b = gqid.draw_challenge(self.params, rng, self.config.challenge_bound)
        self.pending = _Pending(sol.x, sol.fx, sol.u, b)
        return ChallengeMessage(self.conversation_id, sol.x, b)

    def verify_and_open(self, am: AuthenticatedMessage) -> Verdict:
        pending, self.pending = self.pending, None
        if pending is None:
            return Verdict(False, "no-pending")
        if am.conversation_id != self.conversation_id:
            return Verdict(False, "unknown-conversation")
        if not gqid.verify(self.identity.J, pending.b, am.v, pending.u, self.params):
            return Verdict(False, "bad-proof")
        try:
            m = open_sealed(am.sealed, pending.fx)
        except TagFailure:
            return Verdict(False, "bad-tag")
        self.consumed.add(pending.x)
        return Verdict(True, message=m)
