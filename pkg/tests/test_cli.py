import json
from fractions import Fraction
from pathlib import Path

import pytest

from latcount.cli import run
from latcount.param_count import build_representation, evaluate
from latcount.polyhedron import system_from_json

NEST = Path(__file__).resolve().parents[1] / "demos" / "example.nest"


def write(tmp_path, name, payload):
    p = tmp_path / name
    p.write_text(payload if isinstance(payload, str) else json.dumps(payload))
    return str(p)


SEGMENT = {"A": [[-1], [1]], "B": [[0], [1]], "b": [0, 0]}
SQUARE = {"A": [[1, 0], [-1, 0], [0, 1], [0, -1]], "b": [1, 0, 1, 0]}


def out_json(capsys):
    return json.loads(capsys.readouterr().out)


def test_count_fixed(tmp_path, capsys):
    path = write(tmp_path, "sq.json", SQUARE)
    assert run(["count", path, "--format", "json"]) == 0
    assert out_json(capsys)["count"] == "4"


def test_count_parametric_and_standard(tmp_path, capsys):
    path = write(tmp_path, "seg.json", SEGMENT)
    assert run(["--format", "json", "count", path, "--y", "7/2"]) == 0
    assert out_json(capsys)["count"] == "4"
    std = write(tmp_path, "std.json", {"form": "standard", "A": [[1, 1]], "B": [[1]], "b": [0]})
    assert run(["count", std, "--y", "3", "--format", "json"]) == 0
    assert out_json(capsys)["count"] == "4"  # x1 + x2 = 3, x >= 0


def test_build_then_eval_matches_in_process(tmp_path, capsys):
    sysd = {"A": [[-1, 0], [0, -1], [1, 2], [2, 1]], "B": [[0, 0], [0, 0], [1, 0], [0, 1]], "b": [0, 0, 0, 0]}
    path = write(tmp_path, "tri.json", sysd)
    rep_path = str(tmp_path / "rep.json")
    assert run(["build", path, "-o", rep_path, "--format", "json"]) == 0
    assert out_json(capsys)["chambers"] > 0
    rep = build_representation(system_from_json(sysd))
    for y in [("5", "7"), ("5/2", "3"), ("-1", "4")]:
        assert run(["eval", rep_path, "--y", *y, "--format", "json"]) == 0
        want = evaluate(rep, [Fraction(v) for v in y])
        assert out_json(capsys)["count"] == str(want)


def test_ehrhart(tmp_path, capsys):
    path = write(tmp_path, "seg.json", {"A": [[-2], [2]], "B": [[0], [1]], "b": [0, 0]})
    rep_path = str(tmp_path / "rep.json")
    run(["build", path, "-o", rep_path])
    capsys.readouterr()
    assert run(["ehrhart", rep_path, "--chamber-of", "5", "--format", "json"]) == 0
    got = out_json(capsys)
    assert got["coefficients"] == {"(0)": "1/2", "(1)": "1/2"}
    assert run(["ehrhart", rep_path, "--chamber-of", "4", "--j", "1", "--complete", "--format", "json"]) == 0
    got = out_json(capsys)
    assert got["a(1)"] == "1/2" and got["modulus"] == 2
    assert got["table"] == {"0": {"(0)": "1", "(1)": "1/2"}, "1": {"(0)": "1/2", "(1)": "1/2"}}


def test_chambers_table_output(tmp_path, capsys):
    path = write(tmp_path, "min.json", {"A": [[-1], [1], [1]], "B": [[0, 0], [1, 0], [0, 1]], "b": [0, 0, 0]})
    assert run(["chambers", path]) == 0
    assert capsys.readouterr().out.startswith("3 hyperplanes, 6 chambers")


def test_loopnest(capsys, tmp_path):
    assert run(["loopnest", str(NEST), "--eval", "5", "4", "3", "--format", "json"]) == 0
    got = out_json(capsys)
    assert got["match"] is True and got["count"] == str(got["simulated"])
    assert run(["loopnest", str(NEST), "--format", "json"]) == 0
    assert out_json(capsys)["parameters"] == ["n", "m", "p"]
    rep_path = str(tmp_path / "nest.json")
    assert run(["loopnest", str(NEST), "--build", rep_path]) == 0
    capsys.readouterr()
    assert run(["eval", rep_path, "--y", "0", "0", "1", "--format", "json"]) == 0
    assert out_json(capsys)["count"] == "2"


def test_selftest(capsys):
    assert run(["selftest", "--n", "20", "--format", "json"]) == 0
    got = out_json(capsys)
    assert got["fixed_fail"] == 0 and got["parametric_fail"] == 0


@pytest.mark.parametrize("argv_builder, code", [
    (lambda d: [], 1),
    (lambda d: ["count"], 1),
    (lambda d: ["count", d["seg"], "--y", "0.5"], 2),
    (lambda d: ["count", d["missing"]], 2),
    (lambda d: ["count", d["garbage"]], 2),
    (lambda d: ["build", d["unbounded"], "-o", d["out"]], 3),
    (lambda d: ["loopnest", d["badnest"]], 2),
    (lambda d: ["eval", d["garbage"], "--y", "1"], 2),
])
def test_exit_codes(tmp_path, capsys, argv_builder, code):
    d = {
        "seg": write(tmp_path, "seg.json", SEGMENT),
        "missing": str(tmp_path / "nope.json"),
        "garbage": write(tmp_path, "garbage.json", "{not json"),
        "unbounded": write(tmp_path, "unb.json", {"A": [[-1]], "B": [[1]], "b": [0]}),
        "badnest": write(tmp_path, "bad.nest", "for i := to n do S"),
        "out": str(tmp_path / "o.json"),
    }
    assert run(argv_builder(d)) == code


def test_ehrhart_outside_point(tmp_path, capsys):
    # a point outside the projection is reported as OUTSIDE
    path = write(tmp_path, "seg.json", SEGMENT)
    rep_path = str(tmp_path / "rep.json")
    run(["build", path, "-o", rep_path])
    assert run(["ehrhart", rep_path, "--chamber-of", "-3"]) == 0
    assert "OUTSIDE" in capsys.readouterr().out
