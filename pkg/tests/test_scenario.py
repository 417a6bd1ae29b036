import pytest

from adhocauth.errors import ScenarioError
from adhocauth.scenario import bundled, load, parse, run_scenario

SMALL = """
seed 3
param gq.bits 128
param puzzles.n 2
param puzzles.k 6
node a   # comment
node b
issue a 1 user=realm:a
conv a b variant=1
spriv a b "hi there"
expect accept
spriv a b 'x' repeat=3
expect accept
expect revokes-to:realm:a
"""


def test_parse_small():
    script = parse(SMALL)
    assert script.seed == 3 and script.params["puzzles.n"] == 2
    assert [d.name for d in script.directives][:3] == ["node", "node", "issue"]
    assert script.directives[0].line == 6


def test_run_small(tmp_path):
    result = run_scenario(parse(SMALL), tmp_path)
    assert result.passed, [str(e) for e in result.expects]
    assert (tmp_path / "transcript.txt").read_text() == result.transcript
    assert "ISSUE realm:a" in (tmp_path / "audit.log").read_text()
    (log,) = result.logs()
    assert (tmp_path / log).read_text().endswith(" xxx\n")


@pytest.mark.parametrize("text, line", [
    ("node a\nbogus 1", 2),
    ("node a\nseed 4", 2),
    ("param gq.colour 3", 1),
    ("param puzzles.k ten", 1),
    ("seed -1", 1),
    ("node a\nconv a b variant=9", 2),
    ("node a adversary=ghost", 1),
    ("node a\n\nissue a zero", 3),
    ('spriv a b "open', 1),
    ("attack nuke m", 1),
    ("expect maybe", 1),
    ("sall a 'x' repeat=0", 1),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ScenarioError) as info:
        parse(text)
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}")


def test_runtime_errors_carry_line():
    with pytest.raises(ScenarioError) as info:
        run_scenario(parse("param gq.bits 128\nnode a\nspriv a b 'x'\n"))
    assert info.value.line == 3


def test_failed_expectation_reported():
    result = run_scenario(parse(SMALL.replace("expect revokes-to:realm:a", "expect reject")))
    assert not result.passed
    assert "FAIL" in str(result.expects[-1])


def test_bundled_scenarios_pass():
    paths = bundled()
    assert len(paths) >= 8
    for path in paths:
        result = run_scenario(load(path))
        assert result.passed, (path.name, [str(e) for e in result.expects])
