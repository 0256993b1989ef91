import json

import pytest

from arboreal.cli import SCHEMA, run


def report(capsys, argv, code=0):
    assert run(argv) == code
    return json.loads(capsys.readouterr().out)


def test_enumerate(capsys):
    r = report(capsys, ["enumerate", "b(a,c)"])
    assert r["schema"] == SCHEMA and r["verdict"] == "pass"
    assert r["result"]["count"] == 11 == r["result"]["formula"]


def test_nerve_json_and_dot(capsys):
    r = report(capsys, ["nerve", "b(a,c)"])
    assert r["result"]["counts"] == {"0": 11, "1": 22, "2": 12}
    assert r["result"]["total"] == 45
    assert run(["nerve", "b(a)", "--format", "dot"]) == 0
    assert capsys.readouterr().out.startswith("graph")


def test_json_tree_file(tmp_path, capsys):
    f = tmp_path / "t.json"
    f.write_text(json.dumps({"vertices": ["a", "b", "c"], "edges": [["a", "b"], ["b", "c"]], "root": "b"}))
    r = report(capsys, ["orient", str(f)])
    assert r["result"]["end_omega_dim"] == 1


def test_malformed_json(tmp_path, capsys):
    f = tmp_path / "bad.json"
    f.write_text('{"vertices": ["a",\n')
    assert run(["nerve", str(f)]) == 2
    err = capsys.readouterr().err
    assert "line 2 column 1" in err


def test_bad_compact_tree(capsys):
    assert run(["enumerate", "b(a,"]) == 2
    assert "column" in capsys.readouterr().err


def test_unrooted_json_rejected(tmp_path, capsys):
    f = tmp_path / "t.json"
    f.write_text(json.dumps({"vertices": ["a", "b"], "edges": [["a", "b"]]}))
    assert run(["orient", str(f)]) == 2


def test_size_cap(capsys):
    with pytest.raises(SystemExit) as e:
        run(["sweep", "--max-tree-size", "7"])
    assert e.value.code == 2


def test_bad_field():
    with pytest.raises(SystemExit):
        run(["enumerate", "b(a)", "--field", "6"])


def test_out_file_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["comb", "--trials", "5", "--seed", "4", "--out", str(a)]) == 0
    assert run(["comb", "--trials", "5", "--seed", "4", "--out", str(b)]) == 0
    assert a.read_text() == b.read_text()
    assert json.loads(a.read_text())["config"]["seed"] == 4


def test_homsheaf(capsys):
    r = report(capsys, ["homsheaf", "b(a,c)", "--alpha", "b", "--beta", "a"])
    assert r["result"]["global_sections"] == {"0": 1}
    r = report(capsys, ["homsheaf", "b(a,c)", "--alpha", "a", "--beta", "c"])
    assert r["result"]["global_sections"] == {}
    assert run(["homsheaf", "b(a,c)", "--alpha", "z", "--beta", "c"]) == 2


def test_hochschild_prime(capsys):
    r = report(capsys, ["hochschild", "b(a,c)", "--field", "7", "--degree-bound", "3"])
    assert r["result"]["hochschild"]["dims"] == {"0": 3, "1": 0, "2": 0, "3": 0}


@pytest.mark.parametrize("cmd", [["dualizing", "b(a,c)"], ["nondegen", "b(a,c)", "--orientation-sign", "-1"],
                                 ["circle", "--trials", "10"], ["stokes-link", "--n", "3", "--r", "2"],
                                 ["sweep", "--max-tree-size", "3"]])
def test_commands_pass(cmd, capsys):
    assert report(capsys, cmd)["verdict"] == "pass"


def test_w1_report(capsys):
    r = report(capsys, ["w1", "--spokes", "0:1,1/2:-1", "--reverse-at", "1"])
    assert r["result"]["w1"]["cycle_products"] == [-1]
    assert run(["w1", "--spokes", "0:3"]) == 2
    assert run(["w1", "--spokes", "zero"]) == 2


def test_stokes_trefoil(capsys):
    r = report(capsys, ["stokes-link", "--n", "2", "--r", "3", "--half-integer"])
    assert r["result"]["components"] == 1 and r["result"]["name"] == "trefoil"
