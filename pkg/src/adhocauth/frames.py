"""Tagged protocol frames.

    0x01 Init       variant(1) conv(16) fields...
    0x02 PuzzleSet  count(4) {len(4) ciphertext}*
    0x03 Challenge  conv(16) X(16) int b
    0x04 AuthMsg    conv(16) int v  len(4) sealed
    0x05 Broadcast  len(4) text

Init fields by variant: 1 -> ID, m; 2 -> m; 3 -> ID, h(m)(32), int sig, m.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MalformedFrame
from .puzzle import TAG_PUZZLES, X_LEN, Puzzle, decode_puzzle_set, encode_puzzle_set
from .wire import Reader, encode_bytes, encode_int

TAG_INIT = 0x01
TAG_CHALLENGE = 0x03
TAG_AUTH = 0x04
TAG_BROADCAST = 0x05
CONV_LEN = 16
DIGEST_LEN = 32

TAG_NAMES = {TAG_INIT: "init", TAG_PUZZLES: "puzzles", TAG_CHALLENGE: "challenge",
             TAG_AUTH: "auth", TAG_BROADCAST: "sall"}


def _conv(conversation_id: bytes) -> bytes:
    if len(conversation_id) != CONV_LEN:
        raise ValueError("conversation id must be 16 bytes")
    return conversation_id


@dataclass(frozen=True)
class InitMessage:
    variant: int
    conversation_id: bytes
    message: bytes
    identity: bytes | None = None
    h_m: bytes | None = None
    signature: int | None = None

    def encode(self) -> bytes:
        out = bytes([TAG_INIT, self.variant]) + _conv(self.conversation_id)
        if self.variant == 1:
            out += encode_bytes(self.identity) + encode_bytes(self.message)
        elif self.variant == 2:
            out += encode_bytes(self.message)
        elif self.variant == 3:
            if len(self.h_m) != DIGEST_LEN:
                raise ValueError("h(m) must be 32 bytes")
            out += (encode_bytes(self.identity) + self.h_m + encode_int(self.signature)
                    + encode_bytes(self.message))
        else:
            raise ValueError(f"unknown init variant {self.variant}")
        return out

    @classmethod
    def decode(cls, data: bytes) -> InitMessage:
        rd = Reader(data)
        if rd.byte() != TAG_INIT:
            raise MalformedFrame("not an init frame")
        variant = rd.byte()
        conv = rd.take(CONV_LEN)
        if variant == 1:
            msg = cls(1, conv, identity=rd.bytes(), message=rd.bytes())
        elif variant == 2:
            msg = cls(2, conv, message=rd.bytes())
        elif variant == 3:
            identity, h_m, sig = rd.bytes(), rd.take(DIGEST_LEN), rd.int()
            msg = cls(3, conv, message=rd.bytes(), identity=identity, h_m=h_m, signature=sig)
        else:
            raise MalformedFrame(f"unknown init variant {variant}")
        rd.finish()
        if msg.identity is not None and not msg.identity:
            raise MalformedFrame("empty identity")
        return msg


@dataclass(frozen=True)
class ChallengeMessage:
    conversation_id: bytes
    x: bytes
    b: int

    def encode(self) -> bytes:
        if len(self.x) != X_LEN:
            raise ValueError("puzzle id must be 16 bytes")
        return bytes([TAG_CHALLENGE]) + _conv(self.conversation_id) + self.x + encode_int(self.b)

    @classmethod
    def decode(cls, data: bytes) -> ChallengeMessage:
        rd = Reader(data)
        if rd.byte() != TAG_CHALLENGE:
            raise MalformedFrame("not a challenge frame")
        msg = cls(rd.take(CONV_LEN), rd.take(X_LEN), rd.int())
        rd.finish()
        return msg


@dataclass(frozen=True)
class AuthenticatedMessage:
    conversation_id: bytes
    v: int
    sealed: bytes

    def encode(self) -> bytes:
        return (bytes([TAG_AUTH]) + _conv(self.conversation_id) + encode_int(self.v)
                + encode_bytes(self.sealed))

    @classmethod
    def decode(cls, data: bytes) -> AuthenticatedMessage:
        rd = Reader(data)
        if rd.byte() != TAG_AUTH:
            raise MalformedFrame("not an authenticated-message frame")
        msg = cls(rd.take(CONV_LEN), rd.int(), rd.bytes())
        rd.finish()
        return msg


@dataclass(frozen=True)
class Broadcast:
    text: bytes

    def encode(self) -> bytes:
        return bytes([TAG_BROADCAST]) + encode_bytes(self.text)

    @classmethod
    def decode(cls, data: bytes) -> Broadcast:
        rd = Reader(data)
        if rd.byte() != TAG_BROADCAST:
            raise MalformedFrame("not a broadcast frame")
        msg = cls(rd.bytes())
        rd.finish()
        return msg


@dataclass(frozen=True)
class PuzzleSet:
    puzzles: tuple[Puzzle, ...]

    def encode(self) -> bytes:
        return encode_puzzle_set(list(self.puzzles))

    @classmethod
    def decode(cls, data: bytes) -> PuzzleSet:
        return cls(tuple(decode_puzzle_set(data)))


Frame = InitMessage | PuzzleSet | ChallengeMessage | AuthenticatedMessage | Broadcast

_DECODERS = {TAG_INIT: InitMessage, TAG_PUZZLES: PuzzleSet, TAG_CHALLENGE: ChallengeMessage,
             TAG_AUTH: AuthenticatedMessage, TAG_BROADCAST: Broadcast}


def decode_frame(data: bytes) -> Frame:
    if not data:
        raise MalformedFrame("empty frame")
    try:
        cls = _DECODERS[data[0]]
    except KeyError:
        raise MalformedFrame(f"unknown frame tag {data[0]:#04x}") from None
    return cls.decode(data)
