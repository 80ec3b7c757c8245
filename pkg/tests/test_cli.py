import csv
import json
import math

import pytest

from bootperc.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_beta_command(capsys):
    code, out, _ = run(capsys, "beta", "--k", "1", "--u", "0.5")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("config:")
    assert float(lines[-1]) == pytest.approx((1 + math.sqrt(5)) / 4, abs=1e-6)


def test_beta_domain_error(capsys):
    code, _, err = run(capsys, "beta", "--k", "0", "--u", "0.5")
    assert code == 1
    assert "error" in err


def test_g_command(capsys):
    code, out, _ = run(capsys, "g", "--k", "2", "--z", "1.0")
    assert code == 0
    assert float(out.strip().splitlines()[-1]) > 0


def test_lambda_command(capsys):
    code, out, _ = run(capsys, "lambda", "--d", "2", "--r", "2")
    assert code == 0
    assert float(out.strip().splitlines()[-1]) == pytest.approx(
        math.pi ** 2 / 18, abs=1e-6)


def test_lambda_convergence_error(capsys):
    code, _, err = run(capsys, "lambda", "--d", "2", "--r", "2",
                       "--tol", "1e-300")
    assert code == 2
    assert "numeric" in err


def test_lambda_table_command(capsys, tmp_path):
    out_file = tmp_path / "table.csv"
    code, out, _ = run(capsys, "lambda-table", "--dmax", "3",
                       "--out", str(out_file))
    assert code == 0
    with open(out_file) as handle:
        rows = list(csv.DictReader(handle))
    assert [(r["d"], r["r"]) for r in rows] == [("2", "2"), ("3", "2"), ("3", "3")]


def test_lgap_exact_and_mc(capsys):
    code, out, _ = run(capsys, "lgap", "--ell", "1", "--m", "4", "--u", "0.5",
                       "--exact")
    assert code == 0
    exact = float(out.strip().splitlines()[-1])
    code, out, _ = run(capsys, "lgap", "--ell", "1", "--m", "4", "--u", "0.5",
                       "--trials", "20000", "--seed", "3")
    assert code == 0
    assert "seed=3" in out
    phat = float(out.strip().splitlines()[-1].split()[0].split("=")[1])
    assert abs(phat - exact) < 0.02
    # Missing trials/seed without --exact is a config error.
    code, _, err = run(capsys, "lgap", "--ell", "1", "--m", "4", "--u", "0.5")
    assert code == 1


def write_grid(tmp_path):
    grid = {
        "structure": {"family": "plain", "n": 4, "d": 2, "r": 2},
        "infected": [[1, 1], [2, 2], [3, 3], [4, 4]],
    }
    path = tmp_path / "grid.json"
    path.write_text(json.dumps(grid))
    return str(path)


def test_closure_command(capsys, tmp_path):
    code, out, _ = run(capsys, "closure", "--input", write_grid(tmp_path))
    assert code == 0
    payload = json.loads(out.strip().splitlines()[-1])
    assert payload["percolates"] is True
    assert len(payload["closure"]) == 16


def test_span_command(capsys, tmp_path):
    code, out, _ = run(capsys, "span", "--input", write_grid(tmp_path))
    assert code == 0
    payload = json.loads(out.strip().splitlines()[-1])
    assert payload["rectangles"] == [[[1, 1], [4, 4]]]


def test_witness_command(capsys, tmp_path):
    code, out, _ = run(capsys, "witness", "--input", write_grid(tmp_path),
                       "--L", "2")
    assert code == 0
    payload = json.loads(out.strip().splitlines()[-1])
    lo, hi = payload["rectangle"]
    assert 2 <= max(b - a + 1 for a, b in zip(lo, hi)) <= 4
    assert payload["component"] is not None


def test_missing_input_is_io_error(capsys, tmp_path):
    code, _, err = run(capsys, "closure", "--input",
                       str(tmp_path / "nope.json"))
    assert code == 3
    assert "I/O" in err


def test_malformed_json_is_config_error(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, _ = run(capsys, "closure", "--input", str(bad))
    assert code == 1


def test_estimate_command(capsys, tmp_path):
    struct = tmp_path / "s.json"
    struct.write_text(json.dumps({"family": "plain", "n": 3, "d": 2, "r": 2}))
    code, out, _ = run(capsys, "estimate", "--event", "percolates",
                       "--structure", str(struct), "--p", "0.5",
                       "--trials", "200", "--seed", "9")
    assert code == 0
    assert "seed=9" in out
    assert "pHat=" in out


def test_threshold_command(capsys, tmp_path):
    struct = tmp_path / "s.json"
    struct.write_text(json.dumps({"family": "plain", "n": 2, "d": 2, "r": 2}))
    code, out, _ = run(capsys, "threshold", "--alpha", "0.5",
                       "--structure", str(struct), "--event", "percolates",
                       "--trials", "2000", "--seed", "17", "--ptol", "0.02")
    assert code == 0
    value = float(out.strip().splitlines()[-1].split()[0].split("=")[1])
    assert abs(value - 0.54120) < 0.05


def test_sweep_command(capsys, tmp_path):
    config = {
        "masterSeed": 5,
        "grid": [{"structure": {"family": "plain", "n": 3, "d": 2, "r": 2},
                  "event": {"kind": "percolates"},
                  "p": 0.4, "trials": 100}],
    }
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps(config))
    out_file = tmp_path / "rows.csv"
    code, out, _ = run(capsys, "sweep", "--config", str(cfg),
                       "--out", str(out_file))
    assert code == 0
    with open(out_file) as handle:
        rows = list(csv.DictReader(handle))
    assert len(rows) == 1 and rows[0]["event"] == "percolates"
