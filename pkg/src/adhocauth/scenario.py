"""Line-oriented scenario scripts driving one deterministic simulation.

    seed <u64>
    param <key> <value>
    node <name> [adversary=<kind>] [rule=<mitm-rule>]...
    remove <name>
    spoof <name> <victim>
    path <a> <hop>* <b>
    issue <name> <count> [user=<realIdentity>]
    conv <a> <b> variant=<1|2|3>
    spriv <a> <b> "<text>" [repeat=<n>]
    sall <a> "<text>" [repeat=<n>]
    attack <replay|replay-proof|impersonate> <node>
    expect <accept|reject[:<reason>]|revokes-to:<user>>

``#`` starts a comment. ``param`` and ``seed`` must precede everything else.
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .chatapp import ChatApp
from .errors import ProtocolError, ScenarioError
from .frames import InitMessage, decode_frame
from .puzzle import PuzzleParams
from .session import ProtocolConfig
from .simnet import ADVERSARY_KINDS, make_adversary

PARAMS = {
    "gq.bits": 512,
    "gq.exponent": 65537,
    "puzzles.n": 16,
    "puzzles.k": 12,
    "challenge.bound": None,
    "bootstrap.reachable": True,
}
ATTACKS = ("replay", "replay-proof", "impersonate")
_ARITY = {"seed": (1, 1), "param": (2, 2), "node": (1, 99), "remove": (1, 1),
          "spoof": (2, 2), "path": (2, 99), "issue": (2, 3), "conv": (3, 3),
          "spriv": (3, 4), "sall": (2, 3), "attack": (2, 2), "expect": (1, 1)}


@dataclass(frozen=True)
class Directive:
    line: int
    name: str
    args: tuple[str, ...]


@dataclass
class ScenarioScript:
    name: str
    seed: int = 0
    params: dict = field(default_factory=lambda: dict(PARAMS))
    directives: list[Directive] = field(default_factory=list)

    def config(self) -> ProtocolConfig:
        return ProtocolConfig(PuzzleParams(n=self.params["puzzles.n"], k=self.params["puzzles.k"]),
                              challenge_bound=self.params["challenge.bound"])


@dataclass(frozen=True)
class ExpectResult:
    line: int
    expected: str
    actual: str
    passed: bool

    def __str__(self):
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark} line {self.line}: expect {self.expected} (got {self.actual})"


@dataclass
class ScenarioResult:
    script: ScenarioScript
    app: ChatApp
    expects: list[ExpectResult]

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.expects)

    @property
    def transcript(self) -> str:
        return self.app.net.transcript.dumps()

    def logs(self) -> dict[str, str]:
        return {c.conversation_id.hex() + ".log": "".join(l + "\n" for l in c.lines)
                for c in self.app.conversations}


def _kv(token: str, key: str, line: int) -> str:
    prefix = key + "="
    if not token.startswith(prefix):
        raise ScenarioError(line, f"expected {prefix}<value>, got {token!r}")
    return token[len(prefix):]


def _param_value(key: str, raw: str, line: int):
    if key not in PARAMS:
        raise ScenarioError(line, f"unknown param {key!r}")
    if key == "bootstrap.reachable":
        if raw not in ("true", "false"):
            raise ScenarioError(line, "bootstrap.reachable is true or false")
        return raw == "true"
    if key == "challenge.bound" and raw == "N":
        return None
    try:
        return int(raw, 0)
    except ValueError:
        raise ScenarioError(line, f"param {key} needs an integer") from None


def parse(text: str, name: str = "scenario") -> ScenarioScript:
    script = ScenarioScript(name)
    started = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        try:
            tokens = shlex.split(raw, comments=True)
        except ValueError as exc:
            raise ScenarioError(lineno, str(exc)) from None
        if not tokens:
            continue
        head, args = tokens[0], tuple(tokens[1:])
        if head not in _ARITY:
            raise ScenarioError(lineno, f"unknown directive {head!r}")
        lo, hi = _ARITY[head]
        if not lo <= len(args) <= hi:
            raise ScenarioError(lineno, f"{head} takes {lo}..{hi} arguments, got {len(args)}")
        if head in ("seed", "param"):
            if started:
                raise ScenarioError(lineno, f"{head} must come before other directives")
            if head == "seed":
                try:
                    script.seed = int(args[0])
                except ValueError:
                    raise ScenarioError(lineno, "seed must be an integer") from None
                if not 0 <= script.seed < 1 << 64:
                    raise ScenarioError(lineno, "seed must be a u64")
            else:
                script.params[args[0]] = _param_value(args[0], args[1], lineno)
            continue
        started = True
        _check(head, args, lineno)
        script.directives.append(Directive(lineno, head, args))
    return script


def _check(head: str, args: tuple[str, ...], line: int) -> None:
    if head == "node":
        for tok in args[1:]:
            if tok.startswith("adversary="):
                if tok.split("=", 1)[1] not in ADVERSARY_KINDS:
                    raise ScenarioError(line, f"unknown adversary kind in {tok!r}")
            elif not tok.startswith("rule="):
                raise ScenarioError(line, f"unexpected node option {tok!r}")
    elif head == "issue":
        if not args[1].isdigit() or int(args[1]) < 1:
            raise ScenarioError(line, "issue count must be a positive integer")
        if len(args) == 3:
            _kv(args[2], "user", line)
    elif head == "conv":
        if _kv(args[2], "variant", line) not in ("1", "2", "3"):
            raise ScenarioError(line, "variant must be 1, 2 or 3")
    elif head in ("spriv", "sall") and len(args) == (4 if head == "spriv" else 3):
        rep = _kv(args[-1], "repeat", line)
        if not rep.isdigit() or int(rep) < 1:
            raise ScenarioError(line, "repeat must be a positive integer")
    elif head == "attack" and args[0] not in ATTACKS:
        raise ScenarioError(line, f"unknown attack {args[0]!r}")
    elif head == "expect":
        e = args[0]
        if not (e in ("accept", "reject") or e.startswith("reject:")
                or e.startswith("revokes-to:")):
            raise ScenarioError(line, f"bad expectation {e!r}")


def _text(args: tuple[str, ...], n_fixed: int) -> bytes:
    text = args[n_fixed].encode("utf-8")
    if len(args) > n_fixed + 1:
        text *= int(args[n_fixed + 1].split("=", 1)[1])
    return text


def _matches(expected: str, actual: str) -> bool:
    if expected == "reject":
        return actual.startswith("reject:")
    return expected == actual


def run_scenario(script: ScenarioScript, out_dir: Path | None = None) -> ScenarioResult:
    p = script.params
    app = ChatApp(script.seed, script.config(), gq_bits=p["gq.bits"],
                  exponent=p["gq.exponent"], log_dir=out_dir)
    app.bootstrap.reachable = p["bootstrap.reachable"]
    outcome, identity = "none", None
    expects = []
    for d in script.directives:
        try:
            if d.name == "node":
                opts = [t.split("=", 1) for t in d.args[1:]]
                kind = next((v for k, v in opts if k == "adversary"), None)
                rules = [v for k, v in opts if k == "rule"]
                if rules and kind != "mitm":
                    raise ValueError("rule= needs adversary=mitm")
                app.add_node(d.args[0], make_adversary(kind, rules) if kind else None)
            elif d.name == "remove":
                app.remove(d.args[0])
            elif d.name == "spoof":
                outcome = app.spoof(*d.args)
            elif d.name == "path":
                app.set_path(list(d.args))
            elif d.name == "issue":
                user = d.args[2].split("=", 1)[1] if len(d.args) == 3 else None
                app.issue(d.args[0], int(d.args[1]), user)
            elif d.name == "conv":
                app.open_conversation(d.args[0], d.args[1], int(d.args[2].split("=")[1]))
            elif d.name == "sall":
                app.sall(d.args[0], _text(d.args, 1))
                outcome = "accept"
            elif d.name == "spriv":
                app.last_conversation = None
                outcome = app.spriv(d.args[0], d.args[1], _text(d.args, 2))
                identity = _identity_of(app, d.args[0], d.args[1])
            elif d.name == "attack":
                app.last_conversation = None
                outcome = app.attack(d.args[0], d.args[1])
                identity = _identity_of(app, None, None)
            elif d.name == "expect":
                expected = d.args[0]
                if expected.startswith("revokes-to:"):
                    user = app.bootstrap.revoke(identity) if identity else None
                    actual = f"revokes-to:{user}"
                    ok = actual == expected
                else:
                    actual, ok = outcome, _matches(expected, outcome)
                expects.append(ExpectResult(d.line, expected, actual, ok))
        except (ValueError, ProtocolError, StopIteration) as exc:
            raise ScenarioError(d.line, str(exc) or type(exc).__name__) from None
    if out_dir is not None:
        out_dir = Path(out_dir)
        (out_dir / "transcript.txt").write_text(app.net.transcript.dumps())
        app.bootstrap.write_audit(out_dir / "audit.log")
    return ScenarioResult(script, app, expects)


def _identity_of(app: ChatApp, sender: str | None, receiver: str | None) -> bytes | None:
    if app.last_conversation is not None:
        return app.last_conversation.bound_identity.ID
    if sender is not None:
        out = app.peers[sender].outgoing.get(receiver) if sender in app.peers else None
        if out is not None:
            return out.session.credential.ID
    return None


def load(path: Path | str) -> ScenarioScript:
    path = Path(path)
    return parse(path.read_text(encoding="utf-8"), path.stem)


def bundled() -> list[Path]:
    root = resources.files("adhocauth") / "scenarios"
    return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".scn"))


def observed_ids(app: ChatApp) -> set[bytes]:
    """IDs carried by frames as their honest origin sent them."""
    ids = set()
    for rec in app.net.transcript:
        if rec.action != "send" or rec.frame[:1] != b"\x01":
            continue
        msg = decode_frame(rec.frame)
        assert isinstance(msg, InitMessage)
        if msg.identity is not None:
            ids.add(msg.identity)
        else:
            looked = app.bootstrap.lookup_conversation(msg.conversation_id)
            if looked is not None:
                ids.add(looked)
    return ids
