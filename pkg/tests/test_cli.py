import json

from adhocauth.cli import keys_from_json, keys_to_json, main
from adhocauth.scenario import bundled


def scenario(name):
    return next(str(p) for p in bundled() if p.stem == name)


def test_run_ok(tmp_path, capsys):
    assert main(["run", scenario("honest_chat"), "--out", str(tmp_path)]) == 0
    assert "honest_chat: ok" in capsys.readouterr().out
    assert (tmp_path / "honest_chat" / "transcript.txt").exists()


def test_run_failing_and_broken(tmp_path, capsys):
    bad = tmp_path / "bad.scn"
    bad.write_text("param gq.bits 128\nnode a\nnode b\nsall a 'x'\nexpect reject\n")
    assert main(["run", str(bad)]) == 1
    bad.write_text("node a\nfrob\n")
    assert main(["run", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_keygen_fixture_and_determinism(tmp_path, capsys):
    assert main(["keygen", "--p", "5", "--q", "11", "--exponent", "3"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert (d["N"], d["K_P"], d["k_p"]) == (55, 3, 27)
    out = tmp_path / "k.json"
    assert main(["keygen", "--bits", "128", "--seed", "4", "--out", str(out)]) == 0
    first = out.read_text()
    main(["keygen", "--bits", "128", "--seed", "4", "--out", str(out)])
    assert out.read_text() == first
    keys = keys_from_json(first)
    keys.check()
    assert keys_to_json(keys) == first
    assert main(["keygen", "--p", "7", "--q", "11", "--exponent", "3"]) == 1


def test_bench_keyless(capsys):
    assert main(["bench-puzzles", "--bits", "0", "--count", "4", "--seeds", "3"]) == 0
    out = capsys.readouterr().out
    row = next(l for l in out.splitlines() if l.startswith("honest-one"))
    assert float(row.split()[1]) == 1.0
    assert "2^31 = 2147483648" in out


def test_size_report(capsys):
    assert main(["size-report", scenario("reference")]) == 0
    last = capsys.readouterr().out.strip().splitlines()[-1]
    assert last.startswith("total ratio: ") and float(last.split()[-1]) <= 0.01
