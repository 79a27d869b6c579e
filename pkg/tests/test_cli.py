import json

import pytest
from click.testing import CliRunner

from conftest import make_higgs
from simpson_lab.cli import main
from simpson_lab.instances import higgs_to_json
from simpson_lab.ring import ring_for

R = ring_for(3, 1, 8, 2)


@pytest.fixture
def runner():
    return CliRunner()


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj, encoding="utf-8")
    return str(p)


def test_verify_correspondence_example(runner):
    args = ["verify", "correspondence", "--p", "3", "--n", "1", "--e", "8", "--d", "1", "--rank", "2",
            "--D", "12", "--seed", "7", "--instances", "10"]
    a = runner.invoke(main, args)
    b = runner.invoke(main, args)
    assert a.exit_code == 0, a.output
    assert a.output == b.output
    assert json.loads(a.output)["summary"]["fail"] == 0


def test_verify_hitchin_locus_negatives(runner):
    res = runner.invoke(main, ["verify", "hitchin-locus", "--text"])
    assert res.exit_code == 0
    assert res.output.count("expected-negative fixture reported NOT in locus") == 2


def test_verify_invalid_flags(runner):
    assert runner.invoke(main, ["verify", "sz", "--d", "7"]).exit_code == 2
    assert runner.invoke(main, ["verify", "nope"]).exit_code == 2
    assert runner.invoke(main, ["verify", "sz", "--p", "4"]).exit_code == 2


def test_malformed_json_exits_2(runner, tmp_path):
    f = write(tmp_path, "bad.json", '{"rank": 1, "theta": [')
    for cmd in (["correspond", f, "--to-rep"], ["cohomology", f], ["hitchin", f]):
        assert runner.invoke(main, cmd).exit_code == 2


def test_correspond_zero_field_is_identity(runner, tmp_path):
    f = write(tmp_path, "zero.json", {"rank": 2, "chart": {"d": 1}, "theta": [[[0, 0], [0, 0]]]})
    res = runner.invoke(main, ["correspond", f, "--to-rep"])
    assert res.exit_code == 0
    out = json.loads(res.output)
    assert out["roundtrip"]["ok"] and out["rank"] == 2
    g = out["gamma"][0]
    assert [[x["coeffs"] for x in row] for row in g] == [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]


def test_correspond_round_trip_through_files(runner, tmp_path):
    H = make_higgs(R, 2, 2, 17)
    f = write(tmp_path, "h.json", higgs_to_json(H))
    out = str(tmp_path / "rep.json")
    assert runner.invoke(main, ["correspond", f, "--to-rep", "--out", out]).exit_code == 0
    res = runner.invoke(main, ["correspond", out, "--to-higgs"])
    assert res.exit_code == 0
    back = json.loads(res.output)
    assert back["roundtrip"]["ok"]
    assert back["rank"] == 2


def test_correspond_not_small_exits_3(runner, tmp_path):
    f = write(tmp_path, "big.json", {"rank": 1, "chart": {"d": 1}, "theta": [[[1]]]})
    assert runner.invoke(main, ["correspond", f, "--to-rep"]).exit_code == 3


def test_correspond_needs_direction(runner, tmp_path):
    f = write(tmp_path, "zero.json", {"rank": 1, "chart": {"d": 1}, "theta": [[[0]]]})
    assert runner.invoke(main, ["correspond", f]).exit_code == 2
    assert runner.invoke(main, ["correspond", f, "--to-higgs"]).exit_code == 2


def test_cohomology_with_eta(runner, tmp_path):
    H = make_higgs(R, 1, 2, 3)
    f = write(tmp_path, "h.json", higgs_to_json(H))
    res = runner.invoke(main, ["cohomology", f, "--eta", "rho"])
    assert res.exit_code == 0
    out = json.loads(res.output)
    assert out["ranks"] == out["eta"]["ranks"] == [2, 2]
    assert runner.invoke(main, ["cohomology", f, "--eta", "nonsense"]).exit_code == 2


def test_cohomology_of_explicit_complex(runner, tmp_path):
    f = write(tmp_path, "c.json", {"ranks": [1, 1], "diff": [[[{"coeffs": [3, 0], "floor": 8}]]]})
    res = runner.invoke(main, ["cohomology", f, "--text"])
    assert res.exit_code == 0
    assert "H^1: free 0, torsion [2]" in res.output


def test_hitchin_command(runner, tmp_path):
    f = write(tmp_path, "neg.json", {"rank": 1, "chart": {"d": 1}, "theta": [[[[-1, 1]]]]})
    res = runner.invoke(main, ["hitchin", f])
    assert res.exit_code == 0
    assert json.loads(res.output)["in_small_locus"] is False
