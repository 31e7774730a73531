import json
import os
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from stratisat import encoders as E
from stratisat.cli import CONSTRUCTS, run
from stratisat.parser import parse
from stratisat.semantics import Interpretation, evaluate

HERE = Path(__file__).parent
GOLDEN = json.loads((HERE / "golden" / "cli.json").read_text())


@pytest.fixture(autouse=True)
def _in_tests_dir(monkeypatch):
    monkeypatch.chdir(HERE)
    monkeypatch.delenv("STRATISAT_BUDGET", raising=False)


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("case", sorted(GOLDEN))
def test_golden_outputs(case, capsys):
    g = GOLDEN[case]
    code, out, _ = call(capsys, *g["argv"])
    assert (code, out) == (g["exit"], g["stdout"])


def test_unsat_file(capsys):
    code, out, _ = call(capsys, "solve", "data/unsat1.3lqst")
    assert code == 1 and json.loads(out) == {"result": "unsat"}


def test_zkey_syntactic(capsys):
    code, out, _ = call(capsys, "check", "data/zkey.3lqst")
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "in-fragment"
    assert [o["method"] for o in doc["obligations"]] == ["syntactic"]


def test_unlinked_counterexample(capsys):
    code, out, _ = call(capsys, "check", "data/unlinked.3lqst")
    (ob,) = json.loads(out)["obligations"]
    assert code == 3 and ob["verdict"] == "invalid"
    M = Interpretation.from_json(ob["counterexample"])
    assert not evaluate(M, parse("sort0 z; sort1 X Z; assert ~(z in X -> z in Z) -> z in Z."))


def test_solved_model_reverifies(capsys):
    code, out, _ = call(capsys, "solve", "data/pow.3lqst")
    M = Interpretation.from_json(json.loads(out)["model"])
    assert code == 0 and evaluate(M, parse((HERE / "data" / "pow.3lqst").read_text()))


def test_resource_limit_exit(capsys):
    code, out, _ = call(capsys, "solve", "data/zkey.3lqst", "--max-m", "1", "--budget", "0")
    assert code in (0, 2)
    f = HERE / "data" / "three.3lqst"
    code, out, _ = call(capsys, "solve", str(f), "--max-m", "2")
    assert code == 2 and json.loads(out)["stage"] == "domain-size"


def test_budget_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("STRATISAT_BUDGET", "0")
    code, out, _ = call(capsys, "solve", "data/three.3lqst", "--no-symmetry")
    assert code == 2 and json.loads(out)["result"] == "resource-limit"
    monkeypatch.setenv("STRATISAT_BUDGET", "many")
    code, _, err = call(capsys, "solve", "data/three.3lqst")
    assert code == 64 and "STRATISAT_BUDGET" in err


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["solve"],
    ["solve", "data/missing.3lqst"],
    ["solve", "data/unsat1.3lqst", "--max-m", "0"],
    ["solve", "data/unsat1.3lqst", "--jobs", "0"],
    ["encode"],
    ["encode", "nope"],
    ["encode", "card-le", "Z"],
    ["encode", "card-le", "Z", "two"],
    ["encode", "union0", "X", "Y"],
    ["encode", "--report", "other"],
    ["encode", "--report", "ucp", "--n-max", "9"],
    ["relativize", "data/member.3lqst", "data/unsat1.3lqst"],
])
def test_usage_errors(argv, capsys):
    code, out, err = call(capsys, *argv)
    assert code == 64 and out == "" and err.startswith("stratisat: error:")


def test_parse_error_is_usage(capsys, tmp_path):
    bad = tmp_path / "bad.3lqst"
    bad.write_text("sort0 x; assert x in.")
    code, _, err = call(capsys, "solve", str(bad))
    assert code == 64 and "bad.3lqst" in err


def test_relativize_rejects_non_model(capsys, tmp_path):
    model = tmp_path / "m.json"
    model.write_text(json.dumps({"m": 2, "sort0": {"x": 1}, "sort2": {"A": [[0]]}}))
    code, _, err = call(capsys, "relativize", "data/member.3lqst", str(model))
    assert code == 64 and "does not satisfy" in err


@pytest.mark.parametrize("name", sorted(CONSTRUCTS))
def test_every_construct_encodes(name, capsys):
    build, sorts, takes_int = CONSTRUCTS[name]
    names = {1: ["X1", "X2", "X3"], 2: ["A", "B1", "B2"]}
    fixed = [s for s in sorts if s != "..."]
    argv = [names[int(s)][i] if int(s) == 1 else names[2][i] for i, s in enumerate(fixed)]
    if "..." in sorts:
        argv.append("X2")
    if takes_int:
        argv.append("1")
    code, out, _ = call(capsys, "encode", name, *argv)
    assert code == 0
    parse(out)


def test_encode_then_solve_pipeline():
    enc = subprocess.run([sys.executable, "-m", "stratisat", "encode", "ucp-partition", "A", "X1", "X2", "X3"],
                         capture_output=True, text=True, check=True)
    res = subprocess.run([sys.executable, "-m", "stratisat", "solve", "-"], input=enc.stdout,
                         capture_output=True, text=True)
    assert res.returncode == 0
    M = Interpretation.from_json(json.loads(res.stdout)["model"])
    A, xs = E.ucp_variables(3)
    assert M.value(A) == E.ucp_oracle([M.value(X) for X in xs])


def test_bench_is_deterministic(capsys):
    code, out1, _ = call(capsys, "bench", "--count", "4", "--seed", "3", "--max-m", "3")
    _, out2, _ = call(capsys, "bench", "--count", "4", "--seed", "3", "--max-m", "3")
    rows = [line.split(",") for line in out1.splitlines()]
    assert code == 0 and rows[0] == ["id", "result", "m", "bound", "seconds"] and len(rows) == 5
    strip = lambda text: [line.rsplit(",", 1)[0] for line in text.splitlines()]
    assert strip(out1) == strip(out2)


def test_console_script_installed():
    exe = shutil.which("stratisat")
    if exe is None:
        pytest.skip("console script not on this interpreter's path")
    res = subprocess.run([exe, "solve", "data/unsat1.3lqst"], capture_output=True, text=True,
                         cwd=HERE, env=dict(os.environ))
    assert res.returncode == 1
