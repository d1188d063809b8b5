import csv
import io
import json
import math

import jsonschema
import pytest

from pthill import cli
from pthill.errors import ModelViolation


@pytest.fixture(scope="module")
def schema():
    return cli.output_schema()


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, schema, *argv):
    code, out = run(capsys, *argv)
    doc = json.loads(out)
    jsonschema.validate(doc, schema)
    return code, doc


def test_spectrum_free_case(capsys, schema):
    code, doc = run_json(capsys, schema, "spectrum", "--V", "0.5", "--lambda-max", "20")
    assert code == 0
    vals = [e["value"]["re"] for e in doc["result"]["periodic"] + doc["result"]["antiperiodic"]]
    assert sorted(vals) == pytest.approx([0, 1, 1, 4, 4, 9, 9, 16, 16])


def test_spectrum_past_threshold(capsys, schema):
    _, doc = run_json(capsys, schema, "spectrum", "--V", "0.7")
    per = {e["label"]: e["value"] for e in doc["result"]["periodic"]}
    anti = {e["label"]: e["value"] for e in doc["result"]["antiperiodic"]}
    assert per["0"]["im"] == 0 and per["2-"]["im"] == 0
    assert anti["1-"]["im"] == pytest.approx(-anti["1+"]["im"]) and anti["1+"]["im"] > 0


def test_spectrum_at_degeneration_point(capsys, schema):
    _, crit = run_json(capsys, schema, "critical", "--k", "2")
    r = crit["result"]["r"]
    _, doc = run_json(capsys, schema, "spectrum", "--a-imag", repr(r))
    per = {e["label"]: e["value"] for e in doc["result"]["periodic"]}
    assert math.hypot(per["0"]["re"] - per["2-"]["re"], per["0"]["im"] - per["2-"]["im"]) < 1e-3


def test_critical_k1_exact(capsys, schema):
    _, doc = run_json(capsys, schema, "critical", "--k", "1")
    assert doc["result"]["V_k"] == 0.5


def test_critical_k3_has_verification(capsys, schema):
    _, doc = run_json(capsys, schema, "critical", "--k", "3")
    assert doc["result"]["verification"]["F_prime_abs"] < 1e-6
    assert doc["result"]["collided_pair"] == ["2+", "4-"]


def test_discriminant_command(capsys, schema):
    _, doc = run_json(capsys, schema, "discriminant", "--V", "0.5", "--lambda", "4", "--lambda", "2+1j",
                      "--tol", "1e-12")
    v = doc["result"]["values"]
    assert v[0]["F"]["re"] == pytest.approx(2.0, abs=1e-9)
    assert v[1]["lambda"] == {"re": 2.0, "im": 1.0}


def test_bands_case1_and_case3(capsys, schema):
    _, doc = run_json(capsys, schema, "bands", "--V", "0.7", "--n-max", "2", "--t-steps", "64")
    res = doc["result"]
    assert [b["index"] for b in res["bands"]] == [1, 2]
    assert res["components"][0]["index"] == 1 and res["singularities"][0]["n"] == 1
    _, doc = run_json(capsys, schema, "bands", "--V", "1.0", "--n-max", "4", "--t-steps", "64")
    assert [c["index"] for c in doc["result"]["components"]] == [2]
    assert [s["n"] for s in doc["result"]["singularities"]] == [2]


def test_bands_csv(capsys):
    code, out = run(capsys, "bands", "--V", "0.85", "--n-max", "2", "--t-steps", "64", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["kind", "index", "t", "re", "im", "lo", "hi"]
    kinds = {r[0] for r in rows[1:]}
    assert kinds == {"band", "component", "singularity"}


def test_verify_exit_codes(capsys, schema):
    code, doc = run_json(capsys, schema, "verify", "--V", "0.7")
    assert code == 0 and doc["result"]["passed"]
    code, doc = run_json(capsys, schema, "verify", "--V", "0.4")
    assert code == 0 and doc["result"]["phase"] is None
    code, doc = run_json(capsys, schema, "verify", "--V", "0.5001")
    assert code == 0
    assert doc["result"]["checks"][0]["name"].startswith("lambda_1")


def test_usage_errors(capsys):
    code, _ = run(capsys, "spectrum", "--V", "0.5", "--a-imag", "1.0")
    assert code == 2
    code, _ = run(capsys, "spectrum")
    assert code == 2
    code, out = run(capsys, "bands", "--V", "0.7", "--t-steps", "10")
    assert code == 2 and json.loads(out)["error"]["type"] == "usage"


def test_numerical_failure_exit_code(capsys, schema):
    # near the first threshold the gaps are below double precision: bands cannot be isolated
    code, doc = run_json(capsys, schema, "bands", "--V", "0.5001", "--n-max", "4")
    assert code == 4 and doc["error"]["type"] == "numerical_failure"


def test_model_violation_exit_code(capsys, schema, monkeypatch):
    def boom(cfg):
        raise ModelViolation("synthetic")

    monkeypatch.setitem(cli.HANDLERS, "spectrum", boom)
    code, doc = run_json(capsys, schema, "spectrum", "--V", "0.7")
    assert code == 3 and doc["error"]["message"] == "synthetic"


def test_deterministic_output(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.THREADS_ENV, "1")
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert cli.main(["bands", "--V", "0.7", "--n-max", "2", "--t-steps", "64", "--output", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_twelve_significant_digits(capsys):
    _, out = run(capsys, "spectrum", "--V", "0.7", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    digits = max(len(r["re"].replace("-", "").replace(".", "").lstrip("0").split("e")[0]) for r in rows)
    assert digits <= 12
