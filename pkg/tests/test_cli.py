import json
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from orbigpd import cli, fixture_path
from orbigpd.errors import IsomorphismFailure, ParseError, ValidationError
from orbigpd.gspace import isotropy_lineage
from orbigpd.scenario import parse_scenario, serialize_scenario

D2 = str(fixture_path("d2_circle.json"))
S3 = str(fixture_path("s3_hexagon.json"))


def run(*args):
    return subprocess.run([sys.executable, "-m", "orbigpd", *args], capture_output=True, text=True)


def records(capsys, cmd, scenario=D2, *extra):
    code = cli.main(["--scenario", scenario, "--command", json.dumps(cmd), "--format", "machine", *extra])
    lines = capsys.readouterr().out.splitlines()
    return code, [json.loads(l) for l in lines]


def test_minimal_document():
    s = parse_scenario('{"groups":{"e":{"table":[[0]]}}}')
    assert s.group("e").order == 1


def test_fixture_lineage(d2):
    assert [L.members for L in isotropy_lineage(d2.complex("d2_octagon"))] == [(0,), (0, 1), (0, 2)]


def test_nonassociative_document():
    t = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(ValidationError) as exc:
        parse_scenario(json.dumps({"schema": 1, "groups": {"bad": {"table": t}}}))
    assert exc.value.entity == "groups.bad"


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as exc:
        parse_scenario('{"groups":\n  {"e": }}')
    assert exc.value.line == 2
    with pytest.raises(ParseError):
        parse_scenario('{"groups": {"e": {"table": [[0.5]]}}}')


def test_bad_references():
    with pytest.raises(ValidationError):
        parse_scenario(json.dumps({"schema": 1, "complexes": {"x": {"group": "nope", "vertices": 1}}}))
    with pytest.raises(ValidationError):
        parse_scenario(json.dumps({"schema": 2}))


def test_round_trip(d2, s3):
    for s in (d2, s3):
        text = serialize_scenario(s)
        again = parse_scenario(text)
        assert again == s and serialize_scenario(again) == text


def test_bredon_example(capsys):
    code, recs = records(capsys, {"cmd": "bredon", "groupoid": "z2_square", "system": "constZ"})
    assert code == 0
    assert [(r["degree"], r["group"]) for r in recs] == [(0, "Z"), (1, "0")]
    code, recs = records(capsys, {"cmd": "bredon", "groupoid": "z2_square", "system": "constZ"}, D2, "--oracle")
    assert [r["group"] for r in recs] == ["Z", "0"] and recs[0]["cmd"] == "bredon"


def test_coeff_check_example(capsys):
    code, (rec,) = records(capsys, {"cmd": "coeff-check", "groupoid": "d2_octagon", "system": "distinct_sigma"})
    assert code == 0 and rec["result"]["orbifold"] is False
    assert [v["pair"] for v in rec["violations"]] == [[["e", "s1"], ["e", "s2"]]]


def test_validate_all(capsys):
    for path in (D2, S3):
        code, (rec,) = records(capsys, {"cmd": "validate", "target": "all"}, path)
        assert code == 0 and rec["violations"] == []


@pytest.mark.parametrize("cmd", [
    {"cmd": "subgroups", "group": "D2"},
    {"cmd": "fixed", "groupoid": "d2_octagon", "subgroup": ["e", "s1"]},
    {"cmd": "quotient", "groupoid": "d2_octagon", "subgroup": ["e", "s1s2"]},
    {"cmd": "induce", "groupoid": "z2_point", "group": "D2", "hom": [0, 1]},
    {"cmd": "ess-check", "map": "q"},
    {"cmd": "decompose", "map": "q"},
    {"cmd": "fibre-product", "left": "q", "right": "q"},
    {"cmd": "compose-spans", "first": {"right": "q"}, "second": {"left": None, "right": None, "space": "z2_square"}},
    {"cmd": "hs-roundtrip", "map": "q"},
    {"cmd": "orbit-category", "group": "D2"},
    {"cmd": "rep-system", "group": "D2"},
    {"cmd": "bredon-oracle", "groupoid": "d2_octagon", "system": "R_D2"},
    {"cmd": "compare", "left": {"groupoid": "d2_octagon", "system": "R_D2"},
     "right": {"groupoid": "z2_square", "system": "R_Z2"}, "path": [{"map": "q", "direction": "forward"}]},
])
def test_commands_succeed(capsys, cmd):
    code, recs = records(capsys, cmd)
    assert code == 0 and all(r["status"] == "ok" for r in recs)


def test_specific_payloads(capsys):
    _, (rec,) = records(capsys, {"cmd": "quotient", "groupoid": "d2_octagon", "subgroup": ["e", "s1s2"]})
    assert rec["result"]["fixed_vertices"] == [0, 2]
    _, (rec,) = records(capsys, {"cmd": "fibre-product", "left": "q", "right": "q"})
    assert rec["result"]["group_order"] == 16 and rec["result"]["witness_valid"]
    _, (rec,) = records(capsys, {"cmd": "ess-check", "map": "collapse"})
    assert rec["result"]["essential"] is False


def test_input_errors_exit_2(capsys, tmp_path):
    code, (rec,) = records(capsys, {"cmd": "nope"})
    assert code == 2 and rec["result"]["error"] == "UnknownCommand"
    code, (rec,) = records(capsys, {"cmd": "bredon", "groupoid": "missing", "system": "constZ"})
    assert code == 2
    code, (rec,) = records(capsys, {"cmd": "compare", "left": {"groupoid": "z2_point", "system": "R_Z2"},
                                    "right": {"groupoid": "d2_two_points", "system": "constZ_D2"},
                                    "path": [{"map": "j"}]})
    assert code == 2 and rec["result"]["error"] == "PathInvalid"
    code, (rec,) = records(capsys, {"cmd": "subgroups", "group": "D2"}, D2, "--max-group-order", "2")
    assert code == 2 and rec["result"]["error"] == "ValidationError"
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    code, (rec,) = records(capsys, {"cmd": "validate"}, str(bad))
    assert code == 2 and rec["result"]["error"] == "ParseError"


def test_math_failure_exit_1(capsys, monkeypatch):
    def boom(*args, **kwargs):
        raise IsomorphismFailure("degree 0 differs", witness={"degree": 0})
    monkeypatch.setattr(cli, "compare_presentations", boom)
    code, (rec,) = records(capsys, {"cmd": "compare", "left": {"groupoid": "z2_square", "system": "constZ"},
                                    "right": {"groupoid": "z2_square", "system": "constZ"}})
    assert code == 1 and rec["status"] == "failure"


def test_command_file_and_output(tmp_path):
    cmds = tmp_path / "cmds.json"
    cmds.write_text(json.dumps([{"cmd": "ess-check", "map": "q"}, {"cmd": "bredon", "groupoid": "z2_square", "system": "constZ"}]))
    out = tmp_path / "report.txt"
    assert cli.main(["--scenario", D2, "--command", f"@{cmds}", "--output", str(out)]) == 0
    text = out.read_text()
    assert "essential: true" in text and "degree  group" in text


def test_reports_are_byte_identical():
    args = ["--scenario", D2, "--command", json.dumps([
        {"cmd": "bredon", "groupoid": "d2_octagon", "system": "R_D2"},
        {"cmd": "coeff-check", "groupoid": "d2_octagon", "system": "distinct_sigma"},
        {"cmd": "fibre-product", "left": "q", "right": "q"}])]
    for fmt in ("human", "machine"):
        a, b = run(*args, "--format", fmt), run(*args, "--format", fmt)
        assert a.returncode == 0 and a.stdout == b.stdout and a.stdout


@settings(max_examples=20, deadline=None)
@given(st.dictionaries(st.sampled_from(["A", "B", "C"]), st.sampled_from(["Z", "Z/2", "0"]), min_size=1))
def test_round_trip_generated_documents(labels):
    torsion = {"Z": [], "Z/2": [2], "0": []}
    doc = {"schema": 1, "groups": {"Z2": {"table": [[0, 1], [1, 0]], "generators": [1]}},
           "systems": {name: {"group": "Z2", "kind": "constant",
                              "value": {"label": lab, "rank": int(lab == "Z"), "torsion": torsion[lab]}}
                       for name, lab in labels.items()}}
    s = parse_scenario(json.dumps(doc))
    assert parse_scenario(serialize_scenario(s)) == s
