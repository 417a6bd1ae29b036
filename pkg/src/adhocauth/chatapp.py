"""Model chat: open SALL broadcasts and authenticated SPRIV conversations.

A conversation belongs to the (initiator address, responder) pair that
opened it; Phase 3 is what stops anyone else who later holds that address.
The responder keeps one append-only log per conversation:

    <step> <IN|OUT> <hex-conversationId> <text>
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

from . import gqid
from .bootstrap import Bootstrap
from .errors import MalformedFrame, ProtocolError
from .frames import (AuthenticatedMessage, Broadcast, ChallengeMessage, InitMessage,
                     PuzzleSet, decode_frame)
from .puzzle import (X_LEN, Puzzle, PuzzlePayload, g_encrypt, secret_function, solve_all)
from .session import (InitiatorSession, ProtocolConfig, ResponderSession, accept_init,
                      init_conversation, seal)
from .simnet import Adversary, Network, Packet


def escape_text(text: bytes) -> str:
    return text.decode("utf-8", "backslashreplace").encode("unicode_escape").decode("ascii")


@dataclass
class Conversation:
    conversation_id: bytes
    session: ResponderSession
    initiator_address: bytes
    log_path: Path | None = None
    messages: list[bytes] = field(default_factory=list)
    lines: list[str] = field(default_factory=list)

    @property
    def bound_identity(self) -> gqid.Identity:
        return self.session.identity

    def append_log(self, step: int, direction: str, text: bytes) -> None:
        if direction not in ("IN", "OUT"):
            raise ValueError("direction is IN or OUT")
        line = f"{step} {direction} {self.conversation_id.hex()} {escape_text(text)}"
        self.lines.append(line)
        if direction == "IN":
            self.messages.append(text)
        if self.log_path is not None:
            with self.log_path.open("a", encoding="ascii") as fh:
                fh.write(line + "\n")


@dataclass
class Outgoing:
    receiver: str
    variant: int
    session: InitiatorSession
    opened: bool = False
    queue: deque = field(default_factory=deque)


@dataclass
class _Rogue:
    """State for answering a challenge without a credential."""
    fx: bytes
    v: int
    text: bytes


class ChatPeer:
    def __init__(self, app: ChatApp, name: str, address: bytes,
                 adversary: Adversary | None = None):
        self.app = app
        self.name = name
        self.address = address
        self.adversary = adversary
        self.rng = app.rng(f"peer:{name}")
        self.f_secret = self.rng.randbytes(32)
        self.credentials: list[gqid.Credential] = []
        self._spare: deque[gqid.Credential] = deque()
        self.outgoing: dict[str, Outgoing] = {}
        self.outgoing_by_conv: dict[bytes, Outgoing] = {}
        self.incoming: dict[bytes, Conversation] = {}
        self.incoming_by_conv: dict[bytes, Conversation] = {}
        self.rogue: dict[bytes, _Rogue] = {}
        self.broadcasts: list[tuple[bytes, bytes]] = []

    def add_credentials(self, creds: list[gqid.Credential]) -> None:
        self.credentials.extend(creds)
        self._spare.extend(creds)

    def take_credential(self) -> gqid.Credential:
        if not self._spare:
            raise ValueError(f"{self.name} has no unused credential; issue more")
        return self._spare.popleft()

    # -- receive path --------------------------------------------------------

    def handle(self, packet: Packet) -> None:
        try:
            msg = decode_frame(packet.frame)
        except MalformedFrame as exc:
            self.app.record(f"reject:{exc.reason}")
            return
        try:
            if isinstance(msg, Broadcast):
                self.broadcasts.append((packet.src, msg.text))
            elif isinstance(msg, InitMessage):
                self._on_init(packet, msg)
            elif isinstance(msg, PuzzleSet):
                self._on_puzzles(packet, msg)
            elif isinstance(msg, ChallengeMessage):
                self._on_challenge(packet, msg)
            elif isinstance(msg, AuthenticatedMessage):
                self._on_auth(msg)
        except ProtocolError as exc:
            self.app.record(f"reject:{exc.reason}")

    def _on_init(self, packet: Packet, msg: InitMessage) -> None:
        if packet.src in self.incoming or msg.conversation_id in self.incoming_by_conv:
            self.app.record("reject:conversation-exists")
            return
        session = accept_init(msg, self.app.params, self.app.bootstrap, self.app.config)
        log_path = None
        if self.app.log_dir is not None:
            log_path = self.app.log_dir / f"{msg.conversation_id.hex()}.log"
            log_path.write_text("")
        conv = Conversation(msg.conversation_id, session, packet.src, log_path)
        self.incoming[packet.src] = conv
        self.incoming_by_conv[msg.conversation_id] = conv
        self.app.conversations.append(conv)
        self.app.last_conversation = conv
        conv.append_log(self.app.net.step, "IN", msg.message)
        self.app.record("accept")

    def _on_puzzles(self, packet: Packet, msg: PuzzleSet) -> None:
        conv = self.incoming.get(packet.src)
        if conv is None:
            self.app.record("reject:unknown-conversation")
            return
        self.app.last_conversation = conv
        ch = conv.session.make_challenge(msg, self.rng)
        self.app.net.send_via(packet.reply_path, ch.encode())

    def _on_challenge(self, packet: Packet, ch: ChallengeMessage) -> None:
        out = self.outgoing_by_conv.get(ch.conversation_id)
        if out is None:
            rogue = self.rogue.pop(packet.src, None)
            if rogue is None:
                self.app.record("reject:unknown-conversation")
                return
            am = AuthenticatedMessage(ch.conversation_id, rogue.v, seal(rogue.text, rogue.fx))
            self.app.net.send_via(packet.reply_path, am.encode(),
                                  src=self.app.claimed_src(self), action="inject")
            return
        if not out.queue:
            self.app.record("reject:unexpected-challenge")
            return
        am = out.session.answer_challenge(ch, out.queue.popleft())
        self.app.net.send_via(packet.reply_path, am.encode())

    def _on_auth(self, am: AuthenticatedMessage) -> None:
        conv = self.incoming_by_conv.get(am.conversation_id)
        if conv is None:
            self.app.record("reject:unknown-conversation")
            return
        self.app.last_conversation = conv
        verdict = conv.session.verify_and_open(am)
        if verdict:
            conv.append_log(self.app.net.step, "IN", verdict.message)
        self.app.record(verdict.label)


class ChatApp:
    """A whole simulated deployment: bootstrap, network, and chat peers."""

    def __init__(self, seed: int = 0, config: ProtocolConfig | None = None,
                 gq_bits: int = 512, exponent: int = 65537,
                 keys: gqid.BootstrapKeys | None = None, log_dir: Path | None = None):
        self.seed = seed
        self.config = config or ProtocolConfig()
        if keys is None:
            keys = gqid.keygen(gq_bits, exponent, self.rng("keygen"))
        self.bootstrap = Bootstrap(keys, self.rng("bootstrap"))
        self.params = keys.public
        self.net = Network(self.rng("net"))
        self.log_dir = Path(log_dir) if log_dir is not None else None
        if self.log_dir is not None:
            self.log_dir.mkdir(parents=True, exist_ok=True)
        self.peers: dict[str, ChatPeer] = {}
        self.paths: dict[tuple[str, str], tuple[str, ...]] = {}
        self.conversations: list[Conversation] = []
        self.verdicts: list[str] = []
        self.size_stats: list[tuple[int, int]] = []
        self.forged_src: dict[str, bytes] = {}
        self.last_conversation: Conversation | None = None

    def rng(self, label: str) -> random.Random:
        return random.Random(f"{self.seed}:{label}")

    def record(self, label: str) -> None:
        self.verdicts.append(label)

    def _outcome(self) -> str:
        return self.verdicts[-1] if self.verdicts else "none"

    def claimed_src(self, peer: ChatPeer) -> bytes | None:
        return self.forged_src.get(peer.name)

    # -- topology ------------------------------------------------------------

    def add_node(self, name: str, adversary: Adversary | None = None) -> ChatPeer:
        if name in self.peers:
            raise ValueError(f"node {name!r} already exists")
        role = "honest" if adversary is None else "adversary"
        address = self.net.add_node(role, adversary)
        peer = ChatPeer(self, name, address, adversary)
        self.net.nodes[address].handler = peer.handle
        self.peers[name] = peer
        return peer

    def peer(self, name: str) -> ChatPeer:
        try:
            return self.peers[name]
        except KeyError:
            raise ValueError(f"unknown node {name!r}") from None

    def remove(self, name: str) -> None:
        peer = self.peers.pop(name) if name in self.peers else self.peer(name)
        self.net.remove_node(peer.address)

    def spoof(self, name: str, victim: str) -> str:
        """Knock ``victim`` off the network and re-register ``name`` at its address."""
        attacker, target = self.peer(name), self.peer(victim)
        address = target.address
        self.remove(victim)
        node = self.net.remove_node(attacker.address)
        self.net.add_node(node.role, node.adversary, address=address, handler=node.handler)
        attacker.address = address
        return "accept"

    def set_path(self, names: list[str]) -> None:
        if len(names) < 2:
            raise ValueError("a path needs two endpoints")
        self.paths[(names[0], names[-1])] = tuple(names)
        self.paths[(names[-1], names[0])] = tuple(reversed(names))

    def route(self, a: str, b: str) -> list[bytes]:
        names = self.paths.get((a, b), (a, b))
        return [self.peer(n).address for n in names]

    # -- credentials and conversations ---------------------------------------

    def issue(self, name: str, count: int, user: str | None = None) -> list[gqid.Credential]:
        creds = self.bootstrap.issue_batch(user or name, count)
        self.peer(name).add_credentials(creds)
        return creds

    def open_conversation(self, a: str, b: str, variant: int) -> Outgoing:
        sender = self.peer(a)
        self.peer(b)
        if b in sender.outgoing:
            raise ValueError(f"{a} already has a conversation with {b}")
        if variant not in (1, 2, 3):
            raise ValueError("variant must be 1, 2 or 3")
        conv_id = sender.rng.randbytes(16)
        session = InitiatorSession(sender.take_credential(), conv_id, self.params,
                                   sender.f_secret, self.config)
        out = Outgoing(b, variant, session)
        sender.outgoing[b] = out
        sender.outgoing_by_conv[conv_id] = out
        return out

    # -- chat operations -------------------------------------------------------

    def sall(self, sender: str, text: bytes) -> int:
        """Broadcast to every other node; returns the delivery count."""
        self.verdicts = []
        src = self.peer(sender)
        frame = Broadcast(text).encode()
        for name in sorted(self.peers, key=lambda n: self.peers[n].address):
            if name != sender:
                self.net.send_via(self.route(sender, name), frame)
        delivered = self.net.run()
        self.record("accept")
        return sum(1 for p in delivered if p.src == src.address and p.frame == frame)

    def spriv(self, sender: str, receiver: str, text: bytes) -> str:
        self.verdicts = []
        peer = self.peer(sender)
        out = peer.outgoing.get(receiver)
        path = self.route(sender, receiver)
        if out is None:
            if peer.adversary is None:
                raise ValueError(f"{sender} has no conversation with {receiver}")
            self._send_rogue(peer, path, None, text)
        elif not out.opened:
            try:
                init = init_conversation(out.variant, out.session.credential, text,
                                         self.bootstrap, out.session.conversation_id)
            except ProtocolError as exc:
                return f"reject:{exc.reason}"
            out.opened = True
            self.net.send_via(path, init.encode())
        else:
            frame = out.session.begin_message(peer.rng)
            self.size_stats.append((len(frame), len(text)))
            out.queue.append(text)
            self.net.send_via(path, frame)
        self.net.run()
        return self._outcome()

    # -- attacks -----------------------------------------------------------------

    def attack(self, kind: str, name: str) -> str:
        self.verdicts = []
        peer = self.peer(name)
        if peer.adversary is None:
            raise ValueError(f"{name} is not an adversary")
        memory = peer.adversary.memory
        if kind == "replay":
            pkt = _last(memory, AuthenticatedMessage)
            self.net.send_via(_from_here(pkt, peer.address), pkt.frame, src=pkt.src,
                              action="inject")
        elif kind == "replay-proof":
            self._replay_proof(peer, memory)
        elif kind == "impersonate":
            pkt = _last(memory, (InitMessage, PuzzleSet, AuthenticatedMessage))
            self._send_rogue(peer, _from_here(pkt, peer.address), pkt.src, b"forged")
        else:
            raise ValueError(f"unknown attack {kind!r}")
        self.net.run()
        return self._outcome()

    def _rogue_puzzle(self, peer: ChatPeer, u: int) -> tuple[bytes, bytes]:
        """One-puzzle set embedding ``u``; returns (frame, fx)."""
        pp = self.config.puzzles
        x = peer.rng.randbytes(X_LEN)
        fx = secret_function(peer.f_secret, x)
        key = peer.rng.getrandbits(pp.k) if pp.k else 0
        ct = g_encrypt(PuzzlePayload(pp.k_const, x, fx, u).to_bytes(), key)
        return PuzzleSet((Puzzle(ct),)).encode(), fx

    def _send_rogue(self, peer: ChatPeer, path: list[bytes], src: bytes | None,
                    text: bytes) -> None:
        # fresh commitment, but with no sigma the best guess is v = r
        c = gqid.commit(self.params, peer.rng)
        frame, fx = self._rogue_puzzle(peer, c.u)
        peer.rogue[path[-1]] = _Rogue(fx, c.r, text)
        self._inject(peer, path, frame, src)

    def _replay_proof(self, peer: ChatPeer, memory: list[Packet]) -> None:
        auth_pkt = _last(memory, AuthenticatedMessage)
        am = AuthenticatedMessage.decode(auth_pkt.frame)
        ch = next(ChallengeMessage.decode(p.frame) for p in reversed(memory)
                  if _is(p, ChallengeMessage)
                  and ChallengeMessage.decode(p.frame).conversation_id == am.conversation_id)
        pset = next(PuzzleSet.decode(p.frame) for p in reversed(memory)
                    if _is(p, PuzzleSet) and p.src == auth_pkt.src)
        cracked = solve_all(list(pset.puzzles), self.config.puzzles)
        u = next(pl.u for pl in cracked.payloads if pl.x == ch.x)
        frame, fx = self._rogue_puzzle(peer, u)
        path = _from_here(auth_pkt, peer.address)
        peer.rogue[path[-1]] = _Rogue(fx, am.v, b"replayed proof")
        self._inject(peer, path, frame, auth_pkt.src)

    def _inject(self, peer: ChatPeer, path: list[bytes], frame: bytes,
                src: bytes | None) -> None:
        if src is not None:
            self.forged_src[peer.name] = src
        self.net.send_via(path, frame, src=src, action="inject")


def _is(packet: Packet, cls) -> bool:
    try:
        return isinstance(decode_frame(packet.frame), cls)
    except MalformedFrame:
        return False


def _last(memory: list[Packet], cls) -> Packet:
    for packet in reversed(memory):
        if _is(packet, cls):
            return packet
    raise ValueError("adversary has observed nothing to attack")


def _from_here(packet: Packet, here: bytes) -> list[bytes]:
    """The remainder of ``packet``'s route starting at this node."""
    try:
        i = packet.path.index(here)
    except ValueError:
        raise ValueError("adversary was not on the observed path") from None
    return list(packet.path[i:])
