import pytest

from adhocauth.chatapp import ChatApp, escape_text
from adhocauth.puzzle import PuzzleParams
from adhocauth.session import ProtocolConfig
from adhocauth.simnet import Eavesdropper

CONFIG = ProtocolConfig(PuzzleParams(n=4, k=8))


@pytest.fixture
def app(keys512, tmp_path):
    app = ChatApp(seed=5, config=CONFIG, keys=keys512, log_dir=tmp_path / "logs")
    for name in ("pi", "ps", "pj"):
        app.add_node(name)
    return app


def test_escape_text():
    assert escape_text(b"a b\n\\") == "a b\\n\\\\"
    assert escape_text("é".encode()) == "\\xe9"


def test_sall_reaches_everyone(app):
    assert app.sall("pi", b"hello all") == 2
    assert app.peer("ps").broadcasts == [(app.peer("pi").address, b"hello all")]
    app.add_node("pk")
    assert app.sall("ps", b"again") == 3


def test_private_chat_and_logs(app):
    app.issue("pi", 1, user="realm:p")
    app.open_conversation("pi", "ps", 3)
    assert app.spriv("pi", "ps", b"first") == "accept"
    assert app.spriv("pi", "ps", b"second") == "accept"
    conv = app.conversations[0]
    assert conv.messages == [b"first", b"second"]
    text = (app.log_dir / f"{conv.conversation_id.hex()}.log").read_text()
    lines = text.splitlines()
    assert [l.split(" ", 3)[1:] for l in lines] == [
        ["IN", conv.conversation_id.hex(), "first"], ["IN", conv.conversation_id.hex(), "second"]]
    steps = [int(l.split()[0]) for l in lines]
    assert steps == sorted(steps)
    assert app.size_stats and app.size_stats[0][1] == len(b"second")


def test_conversations_do_not_mix(app):
    app.issue("pi", 1)
    app.issue("pj", 1)
    app.open_conversation("pi", "ps", 1)
    app.open_conversation("pj", "ps", 2)
    for i in range(3):
        assert app.spriv("pi", "ps", b"i%d" % i) == "accept"
        assert app.spriv("pj", "ps", b"j%d" % i) == "accept"
    by_conv = {c.initiator_address: c.messages for c in app.conversations}
    assert by_conv[app.peer("pi").address] == [b"i0", b"i1", b"i2"]
    assert by_conv[app.peer("pj").address] == [b"j0", b"j1", b"j2"]


def test_multi_hop_path(app):
    app.add_node("relay")
    app.set_path(["pi", "relay", "ps"])
    app.issue("pi", 1)
    app.open_conversation("pi", "ps", 1)
    app.spriv("pi", "ps", b"a")
    assert app.spriv("pi", "ps", b"b") == "accept"
    assert "fwd" in {r.action for r in app.net.transcript}


def test_eavesdropper_learns_no_secrets(keys512):
    app = ChatApp(seed=6, config=CONFIG, keys=keys512)
    app.add_node("pi")
    eve = Eavesdropper()
    app.add_node("eve", eve)
    app.add_node("ps")
    app.set_path(["pi", "eve", "ps"])
    cred = app.issue("pi", 1)[0]
    out = app.open_conversation("pi", "ps", 1)
    for m in (b"open", b"secret one", b"secret two"):
        assert app.spriv("pi", "ps", m) == "accept"
    dump = eve.dump()
    pi = app.peer("pi")
    secrets = [cred.sigma.to_bytes((cred.sigma.bit_length() + 7) // 8, "big"), pi.f_secret,
               b"secret one"]
    secrets += [s.fx for s in out.session.secrets.values()]
    for s in secrets:
        assert s not in dump


def test_misuse_raises(app):
    with pytest.raises(ValueError):
        app.add_node("pi")
    with pytest.raises(ValueError):
        app.open_conversation("pi", "ps", 1)  # no credential
    app.issue("pi", 1)
    with pytest.raises(ValueError):
        app.open_conversation("pi", "ps", 4)
    with pytest.raises(ValueError):
        app.spriv("pi", "pj", b"x")
    with pytest.raises(ValueError):
        app.attack("replay", "pi")
