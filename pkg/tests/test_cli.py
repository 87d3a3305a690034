import csv
import io
import json

import pytest

from pbca_lab.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_exact_four_sites_in_state_order(capsys):
    code, out, _ = run_cli(capsys, "exact", "-L", "4", "-m", "2", "--alpha", "1/2", "--rational")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["state", "probability"]
    assert rows[1:] == [["0011", "1/8"], ["0110", "1/8"], ["1100", "1/8"], ["1001", "1/8"],
                        ["0101", "1/4"], ["1010", "1/4"]]


def test_exact_lumped_extensions(capsys, tmp_path):
    code, out, err = run_cli(capsys, "exact", "--model", "epbca1", "-L", "8", "-m", "4", "--lump")
    assert code == 0
    assert "default alpha=0.8, beta=0.1" in err
    assert len(out.splitlines()) == 11
    matrix = tmp_path / "p.csv"
    code, out, _ = run_cli(capsys, "exact", "--model", "epbca2", "--init", "00AABAAB",
                           "--alpha", "0.3", "--beta", "0.6", "--lump", "--format", "json",
                           "--matrix", str(matrix))
    assert code == 0
    classes = json.loads(out)
    assert len(classes) == 12
    assert sum(c["class_size"] for c in classes) == 84
    assert matrix.read_text().startswith("row,col,prob\n")


def test_simulate_is_byte_identical(capsys, tmp_path):
    outs = []
    for i in range(2):
        stats, hist = tmp_path / f"s{i}.json", tmp_path / f"h{i}.csv"
        code, _, _ = run_cli(capsys, "simulate", "-L", "8", "-m", "4", "--alpha", "0.5",
                             "--steps", "20000", "--seed", "7", "--out", str(stats),
                             "--histogram", str(hist))
        assert code == 0
        outs.append((stats.read_bytes(), hist.read_bytes()))
    assert outs[0] == outs[1]
    doc = json.loads(outs[0][0])
    assert doc["seed"] == 7 and doc["m"] == 4
    lines = outs[0][1].decode().splitlines()
    assert lines[0] == "state,count"
    assert len(lines) == 71


def test_simulate_frozen_ring(capsys):
    code, out, _ = run_cli(capsys, "simulate", "--init", "1111", "--seed", "1", "--steps", "100")
    assert code == 0
    assert json.loads(out)["flux"] == 0.0


def test_simulate_species_ring(capsys):
    code, out, _ = run_cli(capsys, "simulate", "--model", "epbca2", "-L", "12", "--mA", "3",
                           "--mB", "2", "--seed", "4", "--steps", "500")
    assert code == 0
    doc = json.loads(out)
    assert (doc["mA"], doc["mB"]) == (3, 2)


def test_simulate_requires_seed(capsys, tmp_path):
    target = tmp_path / "never.json"
    code, _, err = run_cli(capsys, "simulate", "-L", "8", "-m", "4", "--out", str(target))
    assert code == 2
    assert "seed" in err
    assert not target.exists()


@pytest.mark.parametrize("argv", [
    ["exact", "-L", "4", "-m", "5"],
    ["exact", "--model", "epbca1", "-L", "8", "-m", "4", "--alpha", "0.5"],
    ["exact", "-L", "4", "-m", "2", "--alpha", "1.5"],
    ["exact", "--model", "nope"],
    ["fd", "--model", "epbca2", "-L", "10"],
])
def test_parameter_errors(capsys, argv):
    assert run_cli(capsys, *argv)[0] == 2


def test_ergodicity_error_exit(capsys):
    code, _, err = run_cli(capsys, "exact", "-L", "4", "-m", "2", "--alpha", "0")
    assert code == 4
    assert "closed communicating classes" in err


def test_verify_pbca_and_epbca1(capsys):
    code, out, err = run_cli(capsys, "verify", "--model", "pbca", "--max-L", "7")
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] and doc["max_rel_dev"] <= 1e-9
    assert "skipping degenerate m=0" in err
    code, out, _ = run_cli(capsys, "verify", "--model", "epbca1", "--max-L", "6")
    assert code == 0


def test_verify_species_with_random_rings(capsys):
    code, out, _ = run_cli(capsys, "verify", "--model", "epbca2", "--random", "3",
                           "--max-L", "7", "--seed", "1")
    assert code == 0
    assert len(json.loads(out)["instances"]) == 2 * 5


def test_verify_tolerance_breach(capsys):
    code, _, err = run_cli(capsys, "verify", "--max-L", "5", "--tol", "0")
    assert code == 3
    assert "verification failed" in err


def test_fd_outputs(capsys):
    code, out, _ = run_cli(capsys, "fd", "-L", "10", "--alpha", "0.8", "--mc-overlay",
                           "--steps", "2000", "--seed", "1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 18
    assert {r["provenance"] for r in rows} == {"closed-form", "monte-carlo"}
    code, out, _ = run_cli(capsys, "fd", "--limit", "--alpha", "0.8", "--points", "11",
                           "--format", "json")
    rows = json.loads(out)
    assert len(rows) == 11 and rows[0]["L"] == "inf"
    code, out, _ = run_cli(capsys, "fd", "--model", "epbca2", "-L", "6", "--alpha", "0.3",
                           "--beta", "0.6", "--grid", "rhoA,rhoB")
    assert code == 0
    assert len(out.splitlines()) == 1 + 20


def test_gkz_audit_and_limit(capsys):
    code, out, _ = run_cli(capsys, "gkz", "--max-L", "20")
    assert code == 0
    assert json.loads(out)["passed"]
    code, out, _ = run_cli(capsys, "gkz", "--limit", "--alpha", "0.8", "--rho", "0.5")
    lim = json.loads(out)["limit"]
    assert round(lim["gkz"], 7) == round(lim["closed_form"], 7) == 0.2763932
    code, _, err = run_cli(capsys, "gkz", "--max-L", "8", "--lam", "1")
    assert code == 0 and "lam=1" in err


def test_run_file(capsys, tmp_path):
    spec = tmp_path / "job.txt"
    spec.write_text("# four-site job\nL = 4\nm = 2\nalpha = 1/2\nrational = true\n")
    code, out, _ = run_cli(capsys, "exact", "--run-file", str(spec))
    assert code == 0
    assert "0101,1/4" in out
