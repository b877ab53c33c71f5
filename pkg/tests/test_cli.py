import csv
import json
import subprocess
import sys

import jsonschema
import pytest

from ggsub import __version__
from ggsub.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def validate(doc, name, schema, schema_registry):
    validator = jsonschema.Draft202012Validator(schema(name), registry=schema_registry)
    validator.validate(doc)


# ---------------------------------------------------------------- density

def test_density_eval_example(capsys, schema, schema_registry):
    code, out, _ = run(["density", "eval", "--law", "qaqa", "--mu", "0.5", "--gamma", "2", "--t", "1", "--x", "0"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["value"] == pytest.approx(0.6366198, abs=1e-7)
    validate(doc, "density_eval.schema.json", schema, schema_registry)


def test_density_eval_params_and_several_points(capsys, schema, schema_registry):
    code, out, _ = run(["density", "eval", "--law", "multi_bg1", "--params", "mu=1.3,n=2", "--t", "1",
                        "--x", "0.3,0.4", "--x", "0.5"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert len(doc) == 2 and doc[0]["value"] == doc[1]["value"]
    validate(doc, "density_eval.schema.json", schema, schema_registry)


def test_density_list(capsys):
    code, out, _ = run(["density", "list"], capsys)
    assert code == 0
    ids = {row["law"] for row in json.loads(out)}
    assert {"qaqa", "bg1", "gtilde", "bivariate_gamma"} <= ids


def test_missing_required_flag(capsys):
    code, _, err = run(["density", "eval", "--law", "qaqa", "--t", "1"], capsys)
    assert code == 2
    assert "usage" in err


@pytest.mark.parametrize("argv", [
    ["density", "eval", "--law", "nope", "--t", "1", "--x", "1"],
    ["density", "eval", "--law", "qaqa", "--t", "1", "--x", "1", "--params", "zeta=1"],
    ["density", "eval", "--law", "gg", "--t", "1", "--x", "-1"],
    ["sample", "--expr", "compose(gg(1,1)", "--t", "1", "--n", "5", "--seed", "1"],
    ["hfox", "eval", "--m", "1", "--n", "0", "--p", "0", "--q", "2", "--lower", "0:1", "--x", "1"],
    ["mellin", "prove", "no_such_case"],
    ["mellin", "prove", "propSomma"],
    ["verify", "run", "--suite", "mellin", "--case", "no_such_case"],
    [],
])
def test_usage_errors(argv, capsys):
    code, _, _ = run(argv, capsys)
    assert code == 2


def test_unwritable_output(capsys, tmp_path):
    target = tmp_path / "missing_dir" / "out.json"
    code, _, _ = run(["density", "eval", "--law", "qaqa", "--t", "1", "--x", "0", "--out", str(target)], capsys)
    assert code == 3


def test_version(capsys):
    code, out, _ = run(["--version"], capsys)
    assert code == 0 and __version__ in out


# ---------------------------------------------------------------- sample

def test_sample_csv(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, _ = run(["sample", "--expr", "compose(ggt(2,0.5), ggt(-2,0.5))", "--t", "1", "--n", "1000",
                      "--seed", "3", "--out", str(out)], capsys)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# expr_digest=") and "seed=3" in lines[0]
    assert len(lines) == 1001
    assert all(float(v) >= 0 for v in lines[1:])


def test_sample_is_independent_of_jobs(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["sample", "--expr", "split(ggt(2,0.5), bsq(3))", "--t", "1.5", "--n", "200000", "--seed", "8"]
    assert run(base + ["--jobs", "1", "--out", str(a)], capsys)[0] == 0
    assert run(base + ["--jobs", "4", "--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


# ---------------------------------------------------------------- hfox and mellin

def test_hfox_eval(capsys, schema, schema_registry):
    code, out, _ = run(["hfox", "eval", "--m", "2", "--n", "0", "--p", "0", "--q", "2",
                        "--lower", "0.5:1,0.5:1", "--x", "1"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["value"] == pytest.approx(0.22778774549906683, rel=1e-10)
    validate(doc, "hfox_eval.schema.json", schema, schema_registry)


def test_mellin_prove(capsys, schema, schema_registry):
    code, out, _ = run(["mellin", "prove", "P4P"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["equal"] and doc["max_rel_dev"] < 1e-9
    assert len(doc["grid"]) == 105
    validate(doc, "mellin_prove.schema.json", schema, schema_registry)


def test_mellin_prove_negative_control(capsys):
    code, out, _ = run(["mellin", "prove", "neg_gg_vs_ggt"], capsys)
    doc = json.loads(out)
    assert code == 0 and not doc["equal"] and doc["max_rel_dev"] > 1e-3


def test_mellin_list(capsys):
    code, out, _ = run(["mellin", "list"], capsys)
    assert code == 0
    assert any(row["id"] == "qBn" for row in json.loads(out))


# ---------------------------------------------------------------- verify and report

def _strip_meta(doc):
    return {k: v for k, v in doc.items() if k != "metadata"}


def test_verify_mellin_suite(tmp_path, capsys, schema, schema_registry):
    out = tmp_path / "out.json"
    code, _, _ = run(["verify", "run", "--suite", "mellin", "--json", str(out)], capsys)
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["summary"]["passed"] == doc["summary"]["total"] > 0
    validate(doc, "verification_report.schema.json", schema, schema_registry)


def test_verify_json_is_bit_stable(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    base = ["verify", "run", "--suite", "mc", "--case", "qBn", "--seed-set", "1-3", "--n", "20000", "--quiet"]
    assert run(base + ["--jobs", "1", "--json", str(a)], capsys)[0] == 0
    assert run(base + ["--jobs", "4", "--json", str(b)], capsys)[0] == 0
    da, db = json.loads(a.read_text()), json.loads(b.read_text())
    assert json.dumps(_strip_meta(da)) == json.dumps(_strip_meta(db))
    # and textually identical outside the metadata block
    ta = a.read_text().split('"config"', 1)[1]
    tb = b.read_text().split('"config"', 1)[1]
    assert ta == tb


def test_verify_failure_exit_code(tmp_path, capsys):
    # with alpha = 1 every KS p-value fails the "p > alpha" rule
    code, _, _ = run(["verify", "run", "--suite", "mc", "--case", "iiio", "--seed-set", "1,2", "--n", "2000",
                      "--alpha", "1", "--quiet"], capsys)
    assert code == 1


def test_report_merges(tmp_path, capsys):
    a, b, out = tmp_path / "a.json", tmp_path / "b.json", tmp_path / "summary.csv"
    assert run(["verify", "run", "--suite", "mellin", "--json", str(a), "--quiet"], capsys)[0] == 0
    assert run(["verify", "run", "--suite", "cov", "--case", "gamma_rho_mu1_rho0.2", "--json", str(b),
                "--quiet"], capsys)[0] == 0
    assert run(["report", str(a), str(b), "--out", str(out)], capsys)[0] == 0
    rows = list(csv.reader(out.read_text().splitlines()))
    assert rows[0][:3] == ["source", "case_id", "method"]
    n = len(json.loads(a.read_text())["reports"]) + 1
    assert rows[-1][0] == "TOTAL" and rows[-1][1] == f"{n}/{n}"


def test_report_missing_input(capsys, tmp_path):
    assert run(["report", str(tmp_path / "nope.json")], capsys)[0] == 3


# ---------------------------------------------------------------- config

def test_config_supplies_defaults(tmp_path, capsys):
    cfg = tmp_path / "cfg.ini"
    cfg.write_text("[density]\nlaw = qaqa\nt = 1\nmu = 0.5\ngamma = 2\n")
    code, out, _ = run(["--config", str(cfg), "density", "eval", "--x", "0"], capsys)
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(2 / 3.141592653589793, rel=1e-14)


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.ini"
    cfg.write_text("[density]\nlaw = qaqa\nt = 1\n")
    code, out, _ = run(["--config", str(cfg), "density", "eval", "--x", "0", "--t", "2"], capsys)
    assert code == 0
    assert json.loads(out)["t"] == 2


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.ini"
    cfg.write_text("[density]\nbogus = 1\n")
    assert run(["--config", str(cfg), "density", "list"], capsys)[0] == 2


def test_config_missing_file(tmp_path, capsys):
    assert run(["--config", str(tmp_path / "none.ini"), "density", "list"], capsys)[0] == 3


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ggsub", "density", "eval", "--law", "cauchy", "--t", "1", "--x", "0"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["value"] == pytest.approx(1 / 3.141592653589793)
