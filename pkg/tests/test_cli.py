import json
import subprocess
import sys

from cyclicchar.cli import main

TORUS = {"kind": "Torus", "dim": 2, "matrix": [["0", "h"], ["-h", "0"]]}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(p)


def test_verify_single_suite(capsys):
    code, out = run(capsys, "verify", "--suite", "hochschild", "--seed", "3", "--scale", "0.2")
    rep = json.loads(out)
    assert code == 0
    assert rep["schema_version"] == 1 and rep["command"] == "verify"
    assert rep["summary"]["failed"] == 0 and rep["summary"]["sign_conflicts"] == 3
    assert {c["status"] for c in rep["checks"]} == {"pass", "conflict_confirmed"}


def test_verify_is_deterministic(capsys):
    args = ("verify", "--suite", "coefficients,star", "--seed", "11", "--scale", "0.2")
    assert run(capsys, *args) == run(capsys, *args)


def test_verify_table_and_bad_suite(capsys):
    code, out = run(capsys, "verify", "--suite", "graphs", "--samples", "2000", "--out", "table", "--scale", "0.2")
    assert code == 0 and out.startswith("verify") and "passed" in out
    assert run(capsys, "verify", "--suite", "nope")[0] == 2


def test_ahat(capsys, tmp_path):
    f = write(tmp_path, "r.json", {"size": 2, "entries": [["0", "x2"], ["-x2", "0"]]})
    code, out = run(capsys, "ahat", f)
    rep = json.loads(out)
    assert code == 0
    text = json.dumps(rep)
    assert "1/24*x2^2" in text and "7/5760*x2^4" in text


def test_transport(capsys, tmp_path):
    data = {"family": dict(TORUS, matrix=[["0", "3/2*h"], ["-3/2*h", "0"]]),
            "cycle": {"tensors": [{"coeff": "1", "slots": ["1", "z1", "z2"]},
                                  {"coeff": "-1", "slots": ["1", "z2", "z1"]}]},
            "t": "1"}
    code, out = run(capsys, "transport", write(tmp_path, "t.json", data))
    rep = json.loads(out)
    assert code == 0 and rep["ok"]
    bad = dict(data, cycle={"tensors": [{"coeff": "1", "slots": ["z1", "z2"]}]})
    code, out = run(capsys, "transport", write(tmp_path, "b.json", bad))
    assert code == 1 and json.loads(out)["error"] == "NotACycle"


def test_graphs_counts_match_oracle(capsys):
    code, out = run(capsys, "graphs", "--m", "1", "--n", "1", "--out-degrees", "2")
    rep = json.loads(out)
    assert code == 0 and rep["count"] == rep["oracle_count"] == 1
    code, out = run(capsys, "graphs", "--m", "2", "--n", "0", "--weights", "--samples", "5000")
    rep = json.loads(out)
    assert code == 0 and all("weight" in g for g in rep["graphs"])
    assert run(capsys, "graphs", "--m", "1", "--out-degrees", "x")[0] == 2
    assert run(capsys, "graphs", "--m", "3", "--n", "3", "--out-degrees", "3,3,3", "--size-limit", "10")[0] == 2


def test_index(capsys, tmp_path):
    data = {"family": TORUS, "volume": {"dx1^dx2": "3/2"}, "cycle": {"tensors": [{"coeff": "1", "slots": ["1"]}]}}
    code, out = run(capsys, "index", write(tmp_path, "i.json", data))
    rep = json.loads(out)
    assert code == 0 and rep["lhs"] == rep["rhs"] == "3/2"
    assert rep["certificates"]["graph_vanishing"]["all_vanish"]
    code, out = run(capsys, "index", write(tmp_path, "n.json", dict(data, volume={"dx1^dx2": "z1"})))
    assert code == 1 and json.loads(out)["error"] == "NotUnimodular"
    curved = dict(data, curvature={"size": 2, "entries": [["0", "x1"], ["-x1", "0"]]})
    assert run(capsys, "index", write(tmp_path, "c.json", curved))[0] == 2


def test_config_errors(capsys, tmp_path):
    assert run(capsys, "index", write(tmp_path, "bad.json", "{bad"))[0] == 2
    assert run(capsys, "index", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "verify", "--samples", "0")[0] == 2
    assert run(capsys, "verify", "--seed", str(1 << 64))[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    bad_lit = {"family": dict(TORUS, matrix=[["0", "x9"], ["-h", "0"]])}
    assert run(capsys, "index", write(tmp_path, "l.json", bad_lit))[0] == 2


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "cyclicchar", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "0.1.0" in res.stdout
