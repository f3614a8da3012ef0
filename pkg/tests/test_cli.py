import csv
import io
import json
import subprocess
import sys

import pytest

from golden import EXPERIMENT_A
from mmmm.cli import main
from mmmm.render import round_half_up


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_transient_exact_json(capsys):
    code, out, _ = run(capsys, "transient", "--lambda0", "0.4", "--mu", "0.1", "--m", "1", "--t", "0.5", "--method", "exact")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "mmmm/1"
    assert set(doc) >= {"schema", "params", "n0", "t", "method", "probabilities", "error_bound", "truncation"}
    assert doc["params"] == {"lambda0": 0.4, "mu": 0.1, "m": 1}
    assert doc["probabilities"] == [0.823041, 0.176959]


def test_transient_oracle_at_zero(capsys):
    code, out, _ = run(capsys, "transient", "--lambda0", "3", "--mu", "1", "--m", "5", "--t", "0", "--n0", "2")
    assert code == 0
    assert json.loads(out)["probabilities"] == [0, 0, 1, 0, 0, 0]


def test_transient_series_reports_truncation(capsys):
    code, out, _ = run(capsys, "transient", "--lambda0", "2", "--mu", "1", "--m", "10", "--t", "0.1",
                       "--method", "series", "--tol", "1e-3")
    doc = json.loads(out)
    assert doc["truncation"] == {"F": 11, "phi": 13552, "theta": 13400}
    assert round_half_up(doc["error_bound"], 4) <= 0.0005
    assert sum(doc["probabilities"]) == pytest.approx(1, abs=1e-5)


def test_transient_asymptotic_lists_regimes(capsys):
    code, out, _ = run(capsys, "transient", "--lambda0", "25", "--mu", "1", "--m", "50", "--t", "1",
                       "--method", "asymptotic")
    doc = json.loads(out)
    assert code == 0
    assert doc["regimes"][25] == "R1B" and doc["regimes"][50] == "BLOCK0"


def test_transient_csv(capsys):
    code, out, _ = run(capsys, "transient", "--lambda0", "2", "--mu", "1", "--m", "10", "--t", "0.1",
                       "--method", "series", "--tol", "1e-3", "--output", "csv")
    table = rows(out)
    assert len(table) == 11
    assert table[0]["F"] == "11"
    assert sum(float(r["probability"]) for r in table) == pytest.approx(1, abs=1e-5)


def test_stationary(capsys):
    code, out, _ = run(capsys, "stationary", "--lambda0", "0.4", "--mu", "0.1", "--m", "2")
    doc = json.loads(out)
    assert doc["probabilities"] == pytest.approx([1 / 13, 4 / 13, 8 / 13], abs=1e-6)
    assert doc["erlang_b"] == pytest.approx(8 / 13, abs=1e-6)


def test_experiment_a(capsys):
    code, out, _ = run(capsys, "experiment", "--table", "A")
    table = rows(out)
    assert len(table) == 13
    assert [int(r["F"]) for r in table] == [row[2] for row in EXPERIMENT_A]
    assert table[0]["error_ub"] == "0.0005"


def test_experiment_c_first_row(capsys):
    code, out, _ = run(capsys, "experiment", "--table", "C")
    first = rows(out)[0]
    assert (first["F"], first["phi"], first["theta"]) == ("16", "139612", "139295")


def test_experiment_d_early_times_agree(capsys):
    code, out, _ = run(capsys, "experiment", "--table", "D", "--case", "2")
    for r in rows(out):
        if float(r["t"]) <= 1.0:
            assert r["exact"] == r["approximate"]


def test_experiment_json(capsys):
    code, out, _ = run(capsys, "experiment", "--table", "E", "--case", "2", "--output", "json")
    doc = json.loads(out)
    assert doc["table"] == "E" and len(doc["rows"]) == 45


def test_experiment_bad_case(capsys):
    code, _, err = run(capsys, "experiment", "--table", "A", "--case", "1")
    assert code == 2 and "no case" in err


def test_compare_bulk_identity(capsys):
    code, out, _ = run(capsys, "compare", "--lambda0", "25", "--mu", "1", "--m", "50", "--t", "1",
                       "--n", "25", "--methods", "asymptotic,infinite")
    (r,) = rows(out)
    assert r["regime"] == "R1B"
    assert float(r["asymptotic"]) == pytest.approx(float(r["infinite"]), rel=1e-6)


def test_compare_one_server_methods_agree(capsys):
    code, out, _ = run(capsys, "compare", "--lambda0", "0.4", "--mu", "0.1", "--m", "1", "--t", "0.5,2.5",
                       "--n", "0,1", "--methods", "exact,series")
    table = rows(out)
    assert len(table) == 4
    for r in table:
        assert float(r["exact_abs_dev"]) < 1e-9
        assert float(r["series_abs_dev"]) < 1e-8


def test_compare_empty_grid(capsys):
    code, _, err = run(capsys, "compare", "--lambda0", "1", "--mu", "1", "--m", "3", "--t", "", "--n", "1")
    assert code == 2 and "empty" in err


@pytest.mark.parametrize("argv", [
    ["transient", "--lambda0", "1", "--mu", "1", "--m", "3", "--t", "1", "--method", "exact"],
    ["transient", "--lambda0", "1", "--mu", "1", "--m", "3", "--t", "-1"],
    ["transient", "--lambda0", "1", "--mu", "0", "--m", "3", "--t", "1"],
    ["transient", "--lambda0", "1", "--mu", "1", "--m", "3", "--t", "1", "--n0", "4"],
    ["transient", "--lambda0", "-1", "--mu", "1", "--m", "3", "--t", "1"],
    ["transient", "--lambda0", "300", "--mu", "1", "--m", "200", "--t", "1", "--method", "asymptotic"],
])
def test_invalid_arguments_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == "" and err


def test_server_cap(capsys, monkeypatch):
    monkeypatch.setenv("MMMM_MAX_M", "5")
    code, _, err = run(capsys, "transient", "--lambda0", "1", "--mu", "1", "--m", "6", "--t", "1")
    assert code == 2 and "MMMM_MAX_M" in err


def test_numerical_failure_exit_3(capsys):
    code, out, err = run(capsys, "transient", "--lambda0", "2", "--mu", "1", "--m", "10", "--t", "1e6",
                         "--method", "series")
    assert code == 3
    assert out == "" and "numerical failure" in err


def test_out_file_and_determinism(capsys, tmp_path):
    argv = ["experiment", "--table", "B"]
    target = tmp_path / "b.csv"
    assert main(argv + ["--out", str(target)]) == 0
    assert capsys.readouterr().out == ""
    _, again, _ = run(capsys, *argv)
    assert target.read_bytes() == again.encode()


def test_precision_flag(capsys):
    _, out, _ = run(capsys, "transient", "--lambda0", "0.4", "--mu", "0.1", "--m", "1", "--t", "0.5",
                    "--method", "exact", "--output", "csv", "--precision", "3")
    assert rows(out)[0]["probability"] == "0.823"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mmmm", "stationary", "--lambda0", "1", "--mu", "1", "--m", "1", "--output", "csv"],
        capture_output=True, text=True, check=True,
    )
    assert proc.stdout.splitlines() == ["n,probability", "0,0.500000", "1,0.500000"]
