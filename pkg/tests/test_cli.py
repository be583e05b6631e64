import json
import os
import subprocess
import sys

import pytest

from limitpower import cli, kernels

PRODUCT = {"base": 3, "provenance": "product",
           "factors": [{"base": 3, "provenance": "omega"}, {"base": 3, "provenance": "omega"}]}
ULTRA = {"base": 3, "provenance": "limit_reduced_power", "filter": {"ground": 2, "generators": [[[0], [1]]]},
         "Z": {"members": [[0], [0, 1]]}}
NON_ULTRA = dict(ULTRA, Z={"members": [[0, 1]]})
TWO_VALUE_TEXT = "forall x. op_i(x) = c0 | op_i(x) = c1"


@pytest.fixture(autouse=True)
def _restore_backend():
    before = kernels.BACKEND
    yield
    kernels.use(before)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def dump(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_verify_summary(capsys):
    code, out, _ = run(capsys, "verify", "thm2", "--base", "2", "--index", "2")
    assert code == cli.EXIT_OK
    rep = json.loads(out)
    assert rep["suite"] == "thm2" and rep["ok"] and rep["failures"] == 0
    assert "cases" not in rep


def test_verify_full_and_out(capsys, tmp_path):
    out_file = tmp_path / "rep.json"
    code, out, _ = run(capsys, "verify", "ba", "--index", "3", "--full", "--out", str(out_file))
    assert code == 0
    shown = json.loads(out)
    assert len(shown["cases"]) == shown["count"] == 1 + 2 + 5
    assert json.loads(out_file.read_text()) == shown


def test_verify_thm1_records_seed(capsys):
    code, out, _ = run(capsys, "verify", "thm1", "--base", "3", "--index", "2", "--trials", "5", "--seed", "7")
    rep = json.loads(out)
    assert code == 0 and rep["seed"] == 7 and rep["count"] == 5


def test_verify_colimit_spec(capsys, tmp_path):
    system = {"target": PRODUCT, "poset": [[0, 1]],
              "stages": [{"index_size": 1, "alpha": [5]}, {"index_size": 2, "alpha": [5, 1]}]}
    path = dump(tmp_path, "sys.json", [system, system])
    code, out, _ = run(capsys, "verify", "colimit", "--spec", path)
    assert code == 0
    assert json.loads(out)["count"] == 2


def test_verify_violation_exit(capsys, monkeypatch):
    monkeypatch.setitem(cli.SUITES, "thm2", lambda **kw: {"suite": "thm2", "ok": False, "cases": [{"ok": False}]})
    code, out, _ = run(capsys, "verify", "thm2")
    assert code == cli.EXIT_VIOLATION
    assert json.loads(out)["ok"] is False


def test_bad_descriptor_is_usage_error(capsys, tmp_path):
    system = {"target": {"base": 3, "provenance": "nonsense"}, "stages": []}
    code, _, err = run(capsys, "verify", "colimit", "--spec", dump(tmp_path, "bad.json", system))
    assert code == cli.EXIT_USAGE
    assert "unknown provenance" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "nope"])
    assert exc.value.code == cli.EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == cli.EXIT_USAGE
    code, _, err = run(capsys, "eval", "--algebra", "/nonexistent.json", "--formula", "c0 = c0")
    assert code == cli.EXIT_USAGE


def test_eval(capsys, tmp_path):
    path = dump(tmp_path, "p.json", PRODUCT)
    code, out, _ = run(capsys, "eval", "--algebra", path, "--formula", TWO_VALUE_TEXT)
    res = json.loads(out)
    assert code == 0 and res["holds"] is False and res["size"] == 9
    code, out, _ = run(capsys, "eval", "--algebra", dump(tmp_path, "o.json", {"base": 3, "provenance": "omega"}),
                       "--formula", TWO_VALUE_TEXT)
    assert json.loads(out)["holds"] is True


def test_eval_with_registry(capsys, tmp_path):
    reg = {"base": 3, "tables": {"succ": {"arity": 1, "entries": [1, 2, 0]}}}
    alg = dump(tmp_path, "o.json", {"base": 3, "provenance": "omega"})
    code, out, _ = run(capsys, "eval", "--algebra", alg, "--registry", dump(tmp_path, "r.json", reg),
                       "--formula", "forall x. !succ(x) = x")
    assert code == 0 and json.loads(out)["holds"] is True


def test_eval_parse_errors(capsys, tmp_path):
    alg = dump(tmp_path, "o.json", {"base": 3, "provenance": "omega"})
    code, _, err = run(capsys, "eval", "--algebra", alg, "--formula", "forall x. op_zz(x) = x")
    assert code == cli.EXIT_USAGE and "unknown symbol" in err
    code, _, err = run(capsys, "eval", "--algebra", alg, "--formula", "x = c0")
    assert code == cli.EXIT_USAGE and "free variables" in err
    code, _, err = run(capsys, "eval", "--algebra", alg, "--formula", "c0 = ")
    assert code == cli.EXIT_USAGE and "position 5" in err


def test_los(capsys, tmp_path):
    code, out, _ = run(capsys, "los", "--power", dump(tmp_path, "u.json", ULTRA), "--count", "30", "--seed", "3")
    rep = json.loads(out)
    assert code == 0 and rep["ok"] and rep["count"] == 30 and rep["seed"] == 3


def test_los_with_corpus_file(capsys, tmp_path):
    corpus = {"seed": 1, "sentences": ["c0 = c0", TWO_VALUE_TEXT]}
    code, out, _ = run(capsys, "los", "--power", dump(tmp_path, "u.json", ULTRA),
                       "--corpus", dump(tmp_path, "c.json", corpus), "--full")
    rep = json.loads(out)
    assert code == 0 and [c["sentence"] for c in rep["cases"]] == corpus["sentences"]


def test_los_rejects_non_ultra_and_non_lrp(capsys, tmp_path):
    code, _, err = run(capsys, "los", "--power", dump(tmp_path, "n.json", NON_ULTRA))
    assert code == cli.EXIT_USAGE and "ultrapowers" in err
    code, _, err = run(capsys, "los", "--power", dump(tmp_path, "p.json", PRODUCT))
    assert code == cli.EXIT_USAGE


def test_export_lattice(capsys, tmp_path):
    out_file = tmp_path / "l.dot"
    code, _, _ = run(capsys, "export", "--what", "lattice", "--index", "3", "--out", str(out_file))
    text = out_file.read_text()
    assert code == 0 and text.startswith("digraph") and text.count("->") == 6


def test_export_ba(capsys):
    F = json.dumps({"ground": 3, "generators": [[[0], [1, 2]]]})
    code, out, _ = run(capsys, "export", "--what", "ba", "--filter", F)
    assert code == 0 and out.startswith("digraph")


def test_backend_switch(capsys):
    code, out, _ = run(capsys, "--backend", "python", "verify", "ba", "--index", "2")
    assert code == 0 and json.loads(out)["backend"] == "python"


def test_module_entry_point(tmp_path):
    env = dict(os.environ, LIMITPOWER_PURE="1")
    proc = subprocess.run([sys.executable, "-m", "limitpower", "verify", "thm2", "--base", "2", "--index", "2"],
                          capture_output=True, text=True, env=env, timeout=120)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["backend"] == "python"
    proc = subprocess.run([sys.executable, "-m", "limitpower", "bogus"], capture_output=True, text=True, timeout=120)
    assert proc.returncode == 2
