import io
import json
import subprocess
import sys

import pytest

from ncycle.cli import main
from ncycle.model import MarginalModel, model_to_json, to_probability
from ncycle.polytope import contextual_vertices, noncontextual_vertices


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def write_model(tmp_path, mm, name="model.json", probability=False):
    path = tmp_path / name
    model = to_probability(mm) if probability else mm
    path.write_text(json.dumps(model_to_json(model)))
    return str(path)


def test_inequalities_csv():
    code, out = run("inequalities", "--n", "4", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "gamma_0,gamma_1,gamma_2,gamma_3,bound"
    assert len(lines) == 9
    assert all(line.endswith(",2") for line in lines[1:])


def test_inequalities_n3_and_json():
    code, out = run("inequalities", "--n", "3")
    assert code == 0 and len(out.strip().splitlines()) == 5
    code, out = run("inequalities", "--n", "3", "--format", "json")
    data = json.loads(out)
    assert data["schema"] == "ncycle/1" and len(data["inequalities"]) == 4


def test_inequalities_bad_n(capsys):
    code, out = run("inequalities", "--n", "2")
    assert code == 2 and out == ""
    assert "n=2" in capsys.readouterr().err


def test_usage_errors():
    assert run("vertices", "--n", "4", "--family", "bogus")[0] == 2
    assert run("nosuchcommand")[0] == 2
    assert run("verify", "--n", "4", "--which", "nonsense")[0] == 2


def test_vertices():
    code, out = run("vertices", "--n", "5", "--family", "all", "--format", "json")
    data = json.loads(out)
    assert code == 0 and len(data["vertices"]) == 48
    code, out = run("vertices", "--n", "4", "--family", "ctx", "--format", "json")
    verts = json.loads(out)["vertices"]
    assert len(verts) == 8
    assert all(v["family"] == "ctx" and set(v["local"]) == {"0/1"} for v in verts)
    code, out = run("vertices", "--n", "3", "--family", "nc", "--format", "json")
    assert len(json.loads(out)["vertices"]) == 8


def test_check_exit_codes(tmp_path):
    nc = write_model(tmp_path, noncontextual_vertices(4)[3].model, "nc.json")
    assert run("check", nc)[0] == 0
    ctx = write_model(tmp_path, contextual_vertices(4)[0].model, "ctx.json")
    code, out = run("check", ctx, "--format", "json")
    rep = json.loads(out)
    assert code == 3
    viol = rep["payload"]["violations"]
    assert len(viol) == 1 and viol[0]["kind"] == "inequality" and viol[0]["margin"] == "2/1"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 3, "representation": "expectation",
                               "local": [0, 0, 0], "correlations": ["3/2", 0, 0]}))
    assert run("check", str(bad))[0] == 4


def test_check_parse_failure(tmp_path):
    p = tmp_path / "junk.json"
    p.write_text("{not json")
    assert run("check", str(p))[0] == 2
    assert run("check", str(tmp_path / "missing.json"))[0] == 2


def test_check_cross_check_and_fine(tmp_path):
    path = write_model(tmp_path, contextual_vertices(4)[2].model, probability=True)
    code, out = run("check", path, "--cross-check", "--fine", "--format", "json")
    rep = json.loads(out)
    assert code == 3
    assert rep["payload"]["lp_member"] is False
    assert rep["payload"]["global_extension"]["certificate_verified"] is True
    zero = write_model(tmp_path, MarginalModel(5, (0,) * 5, (0,) * 5), "zero.json")
    code, out = run("check", zero, "--cross-check", "--fine", "--format", "json")
    assert code == 0 and json.loads(out)["status"] == "pass"


def test_fine_command(tmp_path):
    path = write_model(tmp_path, noncontextual_vertices(3)[5].model)
    code, out = run("fine", path)
    data = json.loads(out)
    assert code == 0 and data["n"] == 3 and sum(1 for _ in data["weights"]) >= 1
    path = write_model(tmp_path, contextual_vertices(3)[0].model, "c.json")
    code, out = run("fine", path)
    assert code == 3 and json.loads(out)["certificate_verified"]


def test_verify_n4():
    code, out = run("verify", "--n", "4", "--which", "facets,elimination,oracle,bound",
                    "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["status"] == "pass" and rep["failed_checks"] == []
    assert [c["command"] for c in rep["payload"]["checks"]] == [
        "verify:facets", "verify:elimination", "verify:oracle", "verify:bound"]


def test_verify_oracle_n5():
    code, out = run("verify", "--n", "5", "--which", "oracle", "--format", "json")
    check = json.loads(out)["payload"]["checks"][0]
    assert code == 0 and check["payload"]["vertices_found"] == 48


def test_verify_facets_n6():
    code, out = run("verify", "--n", "6", "--which", "facets", "--format", "json")
    check = json.loads(out)["payload"]["checks"][0]
    assert code == 0
    assert check["payload"]["confirmed"] == 32
    assert check["payload"]["affine_ranks"] == [11]


def test_verify_range_guards():
    assert run("verify", "--n", "7", "--which", "oracle")[0] == 2
    assert run("verify", "--n", "4", "--which", "fine-sweep")[0] == 2


def test_verify_fine_sweep():
    code, out = run("verify", "--n", "4", "--which", "fine-sweep", "--seed", "3",
                    "--samples", "20", "--format", "json")
    assert code == 0 and json.loads(out)["status"] == "pass"


def test_output_is_reproducible():
    a = run("verify", "--n", "4", "--which", "bound,fine-sweep", "--seed", "1",
            "--samples", "10", "--format", "json")
    b = run("verify", "--n", "4", "--which", "bound,fine-sweep", "--seed", "1",
            "--samples", "10", "--format", "json")
    assert a == b
    assert run("quantum", "--n", "5", "--format", "json") == run("quantum", "--n", "5", "--format", "json")


def test_quantum_n5():
    code, out = run("quantum", "--n", "5", "--format", "json")
    p = json.loads(out)["payload"]
    assert code == 0
    assert abs(p["omega"] - 3.944272) < 1e-6 and p["classical_bound"] == 3
    assert abs(p["margin"] - 0.944272) < 1e-6 and p["violation"] and p["agreement"]


def test_quantum_n4_and_n3():
    p = json.loads(run("quantum", "--n", "4", "--format", "json")[1])["payload"]
    assert abs(p["omega"] - 2.828427) < 1e-6 and p["classical_bound"] == 2
    code, out = run("quantum", "--n", "3")
    assert code == 0 and "no violation" in out


def test_quantum_floats_have_12_significant_digits():
    p = json.loads(run("quantum", "--n", "5", "--format", "json")[1])["payload"]
    assert p["omega"] == float(f"{p['omega']:.12g}")
    assert p["omega"] == 3.94427191


def test_quantum_export(tmp_path):
    path = tmp_path / "qr.json"
    code, _ = run("quantum", "--n", "6", "--export", str(path), "--quiet")
    data = json.loads(path.read_text())
    assert code == 0 and data["dim"] == 4 and len(data["state"]) == 4
    assert all(len(pair) == 2 for pair in data["state"])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ncycle", "inequalities", "--n", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and len(proc.stdout.splitlines()) == 5
