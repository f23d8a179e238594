import csv
import io
import json

import pytest

from markov_clt.cli import main

C2 = {"Q": [[-1, 1], [1, -1]], "f": [1, -1]}
C3 = {"Q": [[-1, 0.5, 0.5], [0.5, -1, 0.5], [0.5, 0.5, -1]], "f": [1, 0, -1]}


def _write(tmp_path, doc, name="chain.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(p)


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_c2(tmp_path, capsys):
    code, out, _ = _run(capsys, "analyze", "--input", _write(tmp_path, C2))
    assert code == 0
    doc = json.loads(out)
    assert doc["sigma2"] == pytest.approx(1.0, abs=1e-10)
    assert doc["mw_integral"] == pytest.approx(2.50663, abs=1e-4)
    assert doc["all_passed"] is True
    assert set(doc["conditions"]) == {"kv1", "kv2", "bt_identity", "auxbound", "brackets", "mw",
                                      "summability", "laplace", "lemma_chain"}


def test_analyze_is_byte_identical(tmp_path, capsys):
    path = _write(tmp_path, C3)
    _, a, _ = _run(capsys, "analyze", "--input", path, "--seed", "3")
    _, b, _ = _run(capsys, "analyze", "--input", path, "--seed", "3")
    assert a == b


def test_output_file(tmp_path, capsys):
    out = tmp_path / "report.json"
    code, stdout, _ = _run(capsys, "validate", "--input", _write(tmp_path, C2), "--output", str(out))
    assert code == 0 and stdout == ""
    assert json.loads(out.read_text())["valid"] is True


def test_validate_rejects_negative_rate(tmp_path, capsys):
    bad = {"Q": [[-1, 1, 0], [-0.5, 0, 0.5], [1, 0, -1]], "f": [0, 0, 0]}
    code, _, err = _run(capsys, "validate", "--input", _write(tmp_path, bad))
    assert code == 1
    assert "NotAGenerator" in err


@pytest.mark.parametrize("doc,code,kind", [
    ("{not json", 3, "ParseError"),
    ({"Q": [[-1, 1], [1, -1]]}, 4, "SchemaError"),
    ({"Q": [[-1, 1], [1, -1]], "f": [1, -1], "extra": 1}, 4, "SchemaError"),
    ({"Q": [[-1, 1, 0, 0], [1, -1, 0, 0], [0, 0, -1, 1], [0, 0, 1, -1]], "f": [1, -1, 1, -1]},
     1, "Reducible"),
    ({"Q": [[-1, 1], [1, -1]], "f": [1, -1], "pi": [0.6, 0.4]}, 1, "DegenerateStationary"),
    ({"Q": [[-1, 1], [1, -1]], "f": [1, 0]}, 1, "NotCentered"),
    ({"Q": [[-1, 1], [1, -1]], "f": [1, -1, 0]}, 4, "SchemaError"),
])
def test_analyze_error_codes(tmp_path, capsys, doc, code, kind):
    got, _, err = _run(capsys, "analyze", "--input", _write(tmp_path, doc))
    assert got == code
    assert kind in err


def test_center_flag(tmp_path, capsys):
    path = _write(tmp_path, {"Q": [[-1, 1], [1, -1]], "f": [2, 0]})
    code, out, _ = _run(capsys, "analyze", "--input", path, "--center")
    assert code == 0
    assert json.loads(out)["sigma2"] == pytest.approx(1.0, abs=1e-10)


def test_missing_input(capsys):
    code, _, _ = _run(capsys, "analyze", "--input", "/nonexistent/chain.json")
    assert code == 1


def test_gamma_csv(capsys):
    code, out, _ = _run(capsys, "gamma", "--delta", "0.5", "--points", "25")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 25
    assert all(float(r["sum"]) <= float(r["bound"]) for r in rows)


def test_sweep_csv(tmp_path, capsys):
    code, out, _ = _run(capsys, "sweep", "--input", _write(tmp_path, C2), "--k-max", "10")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "k,lambda,norm_u,sqrt_lambda_norm_u,cross_increment"
    assert len(lines) == 12
    k, lam, nu = (float(x) for x in lines[1].split(",")[:3])
    assert (k, lam) == (0, 1.0) and nu == pytest.approx(1 / 3, abs=1e-12)


def test_sweep_json(tmp_path, capsys):
    code, out, _ = _run(capsys, "sweep", "--input", _write(tmp_path, C2), "--k-max", "5",
                        "--format", "json")
    assert code == 0
    assert len(json.loads(out)["rows"]) == 6


def test_tolerance_override_fails_verdict(tmp_path, capsys):
    code, out, _ = _run(capsys, "analyze", "--input", _write(tmp_path, C2), "--tol-kv1", "1e-30")
    assert code == 2
    doc = json.loads(out)
    assert doc["conditions"]["kv1"]["passed"] is False
    assert doc["config"]["tol"]["kv1"] == 1e-30


@pytest.mark.slow
def test_simulate_with_dumps(tmp_path, capsys):
    paths_csv = tmp_path / "paths.csv"
    samples_csv = tmp_path / "samples.csv"
    code, out, _ = _run(capsys, "simulate", "--input", _write(tmp_path, C2), "--paths", "500",
                        "--horizon", "200", "--seed", "7", "--paths-csv", str(paths_csv),
                        "--samples-csv", str(samples_csv))
    doc = json.loads(out)
    assert code == (0 if doc["all_passed"] else 2)
    assert doc["clt"]["n_paths"] == 500
    rows = list(csv.DictReader(io.StringIO(paths_csv.read_text())))
    assert len(rows) == 500 and rows[0].keys() == {"path_index", "M_T", "integral_f"}
    assert len(samples_csv.read_text().splitlines()) == 500


def test_simulate_rejects_zero_variance(tmp_path, capsys):
    code, _, err = _run(capsys, "simulate", "--input",
                        _write(tmp_path, {"Q": [[-1, 1], [1, -1]], "f": [0, 0]}), "--paths", "200")
    assert code == 1 and "SigmaZero" in err
