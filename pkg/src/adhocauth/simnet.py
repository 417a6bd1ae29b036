"""Deterministic discrete-event ad-hoc network.

Frames are source-routed along explicit address paths. Every hop is one
event on a single global queue, and every transmission is appended to the
transcript. Intermediate nodes may carry an adversary behavior that sees,
records, rewrites, or drops what it relays.
"""

from __future__ import annotations

import dataclasses
import heapq
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

from .errors import AddressInUse, BrokenPath, MalformedFrame
from .frames import TAG_NAMES, decode_frame
from .puzzle import Puzzle

ADDR_LEN = 4
ROLES = ("honest", "bootstrap", "adversary")
ADVERSARY_KINDS = ("eavesdrop", "mitm", "replay", "spoof")


@dataclass(frozen=True)
class Packet:
    src: bytes
    dst: bytes
    path: tuple[bytes, ...]
    frame: bytes

    @property
    def reply_path(self) -> tuple[bytes, ...]:
        return tuple(reversed(self.path))


@dataclass(frozen=True)
class TranscriptRecord:
    step: int
    frm: bytes
    to: bytes
    action: str
    frame: bytes

    def line(self) -> str:
        return f"{self.step} {self.frm.hex()} {self.to.hex()} {self.action} {self.frame.hex()}"


class Transcript:
    def __init__(self):
        self.records: list[TranscriptRecord] = []

    def append(self, record: TranscriptRecord) -> None:
        self.records.append(record)

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def dumps(self) -> str:
        return "".join(r.line() + "\n" for r in self.records)


# -- adversaries -------------------------------------------------------------

class Adversary:
    kind = "passive"
    action = "fwd"

    def __init__(self):
        self.memory: list[Packet] = []

    def relay(self, packet: Packet, rng: random.Random) -> tuple[bytes | None, str]:
        self.memory.append(packet)
        return packet.frame, self.action

    def dump(self) -> bytes:
        """Everything this adversary has learned, as one byte string."""
        return b"".join(p.src + p.dst + p.frame for p in self.memory)


class Eavesdropper(Adversary):
    kind = "eavesdrop"
    action = "eavesdrop"


class Replayer(Adversary):
    kind = "replay"


class Spoofer(Adversary):
    kind = "spoof"


_FIELDS = {
    "init": {"id": "identity", "m": "message", "hm": "h_m", "sig": "signature",
             "conv": "conversation_id"},
    "challenge": {"x": "x", "b": "b", "conv": "conversation_id"},
    "auth": {"v": "v", "sealed": "sealed", "conv": "conversation_id"},
    "sall": {"text": "text"},
    "puzzles": {"ct": "puzzles"},
}
_OPS = ("flip", "add", "set", "random")


@dataclass(frozen=True)
class MitmRule:
    """``<tag>.<field>=<op>[:<arg>]``, e.g. ``auth.sealed=flip:3``."""
    tag: str
    field: str
    op: str
    arg: str | None = None

    @classmethod
    def parse(cls, text: str) -> MitmRule:
        try:
            target, opspec = text.split("=", 1)
            tag, fld = target.split(".", 1)
        except ValueError:
            raise ValueError(f"bad mitm rule {text!r}") from None
        op, _, arg = opspec.partition(":")
        if tag not in _FIELDS or fld not in _FIELDS[tag]:
            raise ValueError(f"unknown mitm target {target!r}")
        if op not in _OPS:
            raise ValueError(f"unknown mitm op {op!r}")
        if op in ("flip", "add", "set") and not arg:
            raise ValueError(f"mitm op {op!r} needs an argument")
        return cls(tag, fld, op, arg or None)

    def __str__(self):
        return f"{self.tag}.{self.field}={self.op}" + (f":{self.arg}" if self.arg else "")

    def _bytes(self, value: bytes, rng: random.Random) -> bytes:
        if self.op == "flip":
            i = int(self.arg)
            if i >= len(value):
                return value
            return value[:i] + bytes([value[i] ^ 0x01]) + value[i + 1:]
        if self.op == "set":
            return bytes.fromhex(self.arg)
        if self.op == "random":
            return rng.randbytes(len(value))
        raise ValueError(f"op {self.op!r} does not apply to byte fields")

    def _int(self, value: int, rng: random.Random) -> int:
        if self.op == "flip":
            return value ^ (1 << int(self.arg))
        if self.op == "add":
            return value + int(self.arg)
        if self.op == "set":
            return int(self.arg, 0)
        return rng.getrandbits(max(value.bit_length(), 1))

    def apply(self, frame: bytes, rng: random.Random) -> bytes:
        if TAG_NAMES.get(frame[0] if frame else -1) != self.tag:
            return frame
        try:
            msg = decode_frame(frame)
        except MalformedFrame:
            return frame
        attr = _FIELDS[self.tag][self.field]
        value = getattr(msg, attr)
        if value is None:
            return frame
        if attr == "puzzles":
            new = tuple(Puzzle(self._bytes(p.ciphertext, rng)) for p in value)
        elif isinstance(value, int):
            new = self._int(value, rng)
        else:
            new = self._bytes(value, rng)
        return dataclasses.replace(msg, **{attr: new}).encode()


class ManInTheMiddle(Adversary):
    kind = "mitm"

    def __init__(self, rules: list[MitmRule] | None = None):
        super().__init__()
        self.rules = list(rules or [])

    def relay(self, packet, rng):
        self.memory.append(packet)
        frame, fired = packet.frame, []
        for rule in self.rules:
            new = rule.apply(frame, rng)
            if new != frame:
                fired.append(str(rule))
                frame = new
        return frame, ("mitm:" + ",".join(fired)) if fired else "fwd"


def make_adversary(kind: str, rules: list[str] = ()) -> Adversary:
    if kind == "mitm":
        return ManInTheMiddle([MitmRule.parse(r) for r in rules])
    if rules:
        raise ValueError(f"{kind} adversary takes no rules")
    try:
        return {"eavesdrop": Eavesdropper, "replay": Replayer, "spoof": Spoofer}[kind]()
    except KeyError:
        raise ValueError(f"unknown adversary kind {kind!r}") from None


# -- network -----------------------------------------------------------------

@dataclass
class Node:
    address: bytes
    role: str = "honest"
    adversary: Adversary | None = None
    handler: Callable[[Packet], None] | None = None
    inbox: deque = field(default_factory=deque)


class Network:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.nodes: dict[bytes, Node] = {}
        self.transcript = Transcript()
        self.step = 0
        self.time = 0
        self._queue: list = []
        self._seq = 0

    def add_node(self, role: str = "honest", adversary: Adversary | None = None,
                 address: bytes | None = None,
                 handler: Callable[[Packet], None] | None = None) -> bytes:
        if role not in ROLES:
            raise ValueError(f"unknown role {role!r}")
        if address is None:
            address = self.rng.randbytes(ADDR_LEN)
            while address in self.nodes:
                address = self.rng.randbytes(ADDR_LEN)
        elif address in self.nodes:
            raise AddressInUse(address.hex())
        if len(address) != ADDR_LEN:
            raise ValueError("addresses are 4 bytes")
        self.nodes[address] = Node(address, role, adversary, handler)
        return address

    def remove_node(self, address: bytes) -> Node:
        return self.nodes.pop(address)

    def send_via(self, path, frame: bytes, src: bytes | None = None,
                 action: str = "send") -> Packet:
        """Enqueue ``frame`` along ``path``; ``src`` may be forged."""
        path = tuple(path)
        if len(path) < 2:
            raise BrokenPath("a path needs a sender and a receiver")
        missing = [a.hex() for a in path if a not in self.nodes]
        if missing:
            raise BrokenPath("no node at " + ", ".join(missing))
        packet = Packet(path[0] if src is None else src, path[-1], path, frame)
        self._push(self.time, packet, 0, action)
        return packet

    def _push(self, time: int, packet: Packet, hop: int, action: str | None = None) -> None:
        heapq.heappush(self._queue, (time, self._seq, packet, hop, action))
        self._seq += 1

    def run(self) -> list[Packet]:
        """Process events until the queue drains; returns delivered packets."""
        delivered = []
        while self._queue:
            self.time, _, packet, hop, action = heapq.heappop(self._queue)
            self.step += 1
            here = packet.path[hop]
            node = self.nodes.get(here)
            if hop == len(packet.path) - 1:
                if node is None:
                    continue
                node.inbox.append(packet)
                delivered.append(packet)
                if node.handler is not None:
                    node.handler(packet)
                continue
            frame = packet.frame
            if node is None:
                continue
            if hop > 0:
                action = "fwd"
                if node.adversary is not None:
                    frame, action = node.adversary.relay(packet, self.rng)
            nxt = packet.path[hop + 1]
            if frame is None:
                self.transcript.append(TranscriptRecord(self.step, here, nxt, "drop", packet.frame))
                continue
            self.transcript.append(TranscriptRecord(self.step, here, nxt, action, frame))
            if nxt in self.nodes:
                self._push(self.time + 1, dataclasses.replace(packet, frame=frame), hop + 1)
        return delivered
