import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from conftest import MODELS
from paramdes import __version__
from paramdes.cli import main, parse_events

FIVE = str(MODELS / "five_state.json")
FIVE_ISO = str(MODELS / "five_state_iso.json")
GE5 = "(>= x1 5)"
PROGS = MODELS / "programs"


def schema(name):
    return json.loads(resources.files("paramdes").joinpath(f"schemas/{name}.schema.json").read_text())


def cli(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


# -- check -------------------------------------------------------------------------


def test_check_reports_violation_with_witness(capsys):
    code, out = cli(capsys, "check", FIVE, "--property", "cso", "--secret", "q2", "--nonsecret", "q0,q1,q3,q4", "--theta", GE5)
    assert code == 1
    assert out.splitlines() == ["not opaque (current-state)", "witness estimate: {q2}", "observation: <5>"]


def test_check_json_matches_schema(capsys):
    code, out = cli(capsys, "check", FIVE, "--property", "cso", "--secret", "q2", "--theta", GE5, "--format", "json")
    report = json.loads(out)
    jsonschema.validate(report, schema("verdict"))
    assert report == {"property": "current_state", "opaque": False, "witness": {"state": ["q2"], "observation": [[5]]}}


@pytest.mark.parametrize(
    "argv, expected",
    [
        ([FIVE_ISO, "--property", "iso", "--secret", "q2", "--nonsecret", "q0,q1"], 0),
        ([FIVE, "--property", "inf", "--secret", "q3", "--nonsecret", "q4"], 0),
        ([FIVE, "--property", "inf", "--secret", "q2", "--nonsecret", "q3"], 1),
        ([FIVE, "--property", "cso", "--secret", "q3", "--nonsecret", "q4"], 0),
        ([FIVE, "--property", "iso", "--secret", "q2", "--initial", "q0,q1,q2"], 1),
    ],
)
def test_check_exit_codes(capsys, argv, expected):
    code, out = cli(capsys, "check", *argv, "--theta", GE5, "--format", "json")
    assert code == expected
    jsonschema.validate(json.loads(out), schema("verdict"))


def test_theta_from_file(capsys):
    code, _ = cli(capsys, "check", FIVE, "--property", "cso", "--secret", "q2", "--theta", MODELS / "theta_ge5.json")
    assert code == 1


def test_errors_exit_with_two(capsys, tmp_path):
    assert main(["check", str(tmp_path / "missing.json"), "--property", "cso"]) == 2
    assert main(["check", FIVE, "--property", "cso", "--secret", "q9"]) == 2
    assert main(["check", FIVE, "--property", "nope"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["check", str(bad), "--property", "cso"]) == 2


# -- observer -------------------------------------------------------------------------


def test_observer_dot_is_byte_stable(capsys, tmp_path):
    a, b = tmp_path / "a.dot", tmp_path / "b.dot"
    assert main(["observer", FIVE, "--theta", GE5, "-o", str(a)]) == 0
    assert main(["observer", FIVE, "--theta", GE5, "--jobs", "3", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().count("shape=box") == 6


def test_observer_json_matches_schema(capsys):
    _, out = cli(capsys, "observer", FIVE, "--theta", GE5, "--emit", "json", "--reverse")
    obj = json.loads(out)
    jsonschema.validate(obj, schema("observer"))
    assert len(obj["states"]) == 4
    assert len(obj["transitions"]) == 8


def test_observer_minterm_edges(capsys):
    _, out = cli(capsys, "observer", FIVE, "--theta", GE5, "--minterms")
    assert out.count("->") - 1 == 11


def test_observer_state_cap(capsys):
    assert main(["observer", FIVE, "--theta", GE5, "--max-states", "2"]) == 2


# -- oracle -------------------------------------------------------------------------------


def test_oracle_check_finds_violation(capsys):
    code, out = cli(capsys, "oracle", "check", FIVE, "--property", "cso", "--secret", "q2", "--theta", GE5, "--window", "0:9", "--max-events", "2")
    assert code == 1
    assert out.splitlines()[0] == "violation within window (state q2)"


def test_oracle_check_json(capsys):
    code, out = cli(
        capsys, "oracle", "check", FIVE, "--property", "inf", "--secret", "q3", "--nonsecret", "q4",
        "--theta", GE5, "--window", "0:9", "--format", "json",
    )
    assert code == 0
    report = json.loads(out)
    jsonschema.validate(report, schema("oracle"))
    assert report["violation"] is False


def test_oracle_selftest(capsys):
    code, out = cli(capsys, "oracle", "selftest", "--seed", "3", "--count", "3")
    assert code == 0
    assert [line.split(":")[0] for line in out.splitlines()] == ["seed 3", "seed 4", "seed 5"]
    assert all("agree" in line for line in out.splitlines())


# -- EFA commands -----------------------------------------------------------------------------


def test_encode_and_reach(capsys, tmp_path):
    efa = tmp_path / "inc.json"
    assert main(["encode-2cm", str(PROGS / "inc.prog"), "-o", str(efa)]) == 0
    jsonschema.validate(json.loads(efa.read_text()), schema("efa"))
    code, out = cli(capsys, "reach", efa, "--target", "q3", "--depth", "3", "--bound", "4", "--format", "json")
    assert code == 0
    report = json.loads(out)
    jsonschema.validate(report, schema("reach"))
    assert report["data_string"] == [[[0, 0, 1]], [[1, 0, 2]], [[1, 0, 2]]]


def test_reach_unreachable_exit(capsys, tmp_path):
    efa = tmp_path / "loop.json"
    main(["encode-2cm", str(PROGS / "loop.prog"), "-o", str(efa)])
    code, out = cli(capsys, "reach", efa, "--target", "q3", "--depth", "7", "--bound", "4")
    assert code == 1
    assert out.strip() == "unreachable within depth 7"


def test_encode_rejects_bad_start(capsys):
    assert main(["encode-2cm", str(PROGS / "inc.prog"), "--start", "0,1"]) == 2


def test_simulate_ep_efa(capsys):
    code, out = cli(capsys, "simulate", FIVE, "--events", "sigma2(6,5) sigma4(3)")
    assert code == 0
    assert out.splitlines()[-1] == "sigma4(3): {q4}"


def test_simulate_efa(capsys):
    code, out = cli(capsys, "simulate", MODELS / "registration_efa.json", "--events", "sigma1(0) sigma2(2) sigma3(2)")
    assert code == 0
    assert out.splitlines()[-1].endswith("{q3:2}")


def test_simulate_dead_end(capsys):
    code, _ = cli(capsys, "simulate", FIVE, "--events", "sigma1(9)")
    assert code == 1


def test_parse_events_forms():
    assert parse_events("a(1,2) eps() b([1,2,3])") == [("a", (1, 2)), ("eps", ()), ("b", ((1, 2, 3),))]


def test_embed_flatten_reverse(capsys, tmp_path):
    emb = tmp_path / "emb.json"
    assert main(["embed", str(MODELS / "registration.json"), "-o", str(emb)]) == 0
    _, out = cli(capsys, "flatten", emb)
    flat = json.loads(out)
    jsonschema.validate(flat, schema("efa"))
    assert all(t["k"] == 1 for t in flat["transitions"])
    _, out = cli(capsys, "reverse", FIVE)
    jsonschema.validate(json.loads(out), schema("model"))


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "paramdes", "--version"], capture_output=True, text=True)
    assert out.returncode == 0
    assert __version__ in out.stdout
