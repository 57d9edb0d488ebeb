import json

import pytest

from lbx.cli import main
from lbx.fracmatch import FractionalMatching, encode_fm
from lbx.graph_core import encode_graph, make_graph


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def _write_graph(path, g):
    path.write_text(encode_graph(g))
    return str(path)


def test_adversary_certificate(workdir, capsys):
    assert main(["adversary", "--delta", "4", "--algo", "greedy:k=4"]) == 0
    assert "pairs: 3/3 verified; min runtime ≥ 3" in capsys.readouterr().out
    doc = json.loads((workdir / "cert.json").read_text())
    assert len(doc["pairs"]) == 3
    assert main(["verify-cert", "cert.json"]) == 0


def test_adversary_failure_witness(workdir):
    assert main(["adversary", "--delta", "3", "--algo", "trunc:greedy:k=3:t=1"]) == 1
    assert (workdir / "failure-witness.json").exists()
    # a confirmed failure witness verifies as a failure
    assert main(["verify-cert", "failure-witness.json"]) == 1


def test_tampered_certificate_rejected(workdir):
    assert main(["adversary", "--delta", "4", "--algo", "greedy:k=4", "--out", "c.json"]) == 0
    doc = json.loads((workdir / "c.json").read_text())
    doc["pairs"][1]["c"] = 1 if doc["pairs"][1]["c"] != 1 else 2
    (workdir / "c.json").write_text(json.dumps(doc))
    assert main(["verify-cert", "c.json"]) == 1


def test_guardrail_flag(workdir):
    assert main(["adversary", "--delta", "5", "--algo", "greedy:k=5", "--max-delta", "4"]) == 2


def test_verify_fm(workdir, capsys):
    k2 = make_graph("EC", [(0, 1, 1)])
    gp = _write_graph(workdir / "g.json", k2)
    (workdir / "full.json").write_text(encode_fm(FractionalMatching(k2, {0: 1})))
    (workdir / "half.json").write_text(encode_fm(FractionalMatching(k2, {0: "1/2"})))
    assert main(["verify-fm", gp, "full.json"]) == 0
    assert "maximal: yes" in capsys.readouterr().out
    assert main(["verify-fm", gp, "half.json"]) == 1


def test_run_and_simulate(workdir):
    g = make_graph("EC", [(0, 0, 1), (0, 1, 2), (1, 1, 1)], k=2)
    gp = _write_graph(workdir / "g.json", g)
    assert main(["run", "--algo", "greedy:k=2", gp, "--out", "fm.json"]) == 0
    assert main(["verify-fm", gp, "fm.json"]) == 0
    assert main(["simulate", "--chain", "ec-po-oi", "--algo", "oi-greedy:k=2", gp]) == 0


def test_factor_cover_lift(workdir):
    cycle = make_graph("EC", [(0, 1, 1), (1, 2, 2), (2, 3, 1), (3, 0, 2)])
    gp = _write_graph(workdir / "c.json", cycle)
    assert main(["factor", gp, "--out", "f.json", "--map-out", "m.json"]) == 0
    assert len(json.loads((workdir / "f.json").read_text())["nodes"]) == 1
    assert main(["cover", "f.json", "--node", "0", "--radius", "2", "--out", "ball.json"]) == 0
    assert len(json.loads((workdir / "ball.json").read_text())["graph"]["nodes"]) == 5
    assert main(["lift", "f.json", "--copies", "4", "--seed", "1", "--out", "l.json"]) == 0
    assert len(json.loads((workdir / "l.json").read_text())["nodes"]) == 4
    # two loops cannot be unfolded into a simple graph with only two copies
    assert main(["lift", "f.json", "--copies", "2"]) == 2


def test_order_check(workdir):
    assert main(["order-check", "--d", "2", "--radius", "2"]) == 0
    assert main(["order-check", "--d", "2", "--radius", "2", "--tamper"]) == 1


def test_ramsey(workdir, capsys):
    assert main(["ramsey", "--algo", "parity", "--universe", "6", "--q", "3"]) == 0
    assert "2, 4, 6" in capsys.readouterr().out
    assert main(["ramsey", "--algo", "parity", "--universe", "6", "--q", "4"]) == 1


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["adversary", "--delta", "3", "--algo", "nope:k=1"],
    ["verify-fm", "missing.json", "missing.json"],
    ["cover", "missing.json", "--node", "x", "--radius", "1"],
])
def test_usage_errors(workdir, argv):
    assert main(argv) == 2


def test_parse_error(workdir):
    (workdir / "bad.json").write_text("{not json")
    (workdir / "fm.json").write_text("{}")
    assert main(["verify-fm", "bad.json", "fm.json"]) == 2
