import json
import subprocess
import sys

import pytest

from xorgame import cli
from xorgame.certify import certify_LK_grid
from xorgame.constants import c_star


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_constants_json(capsys):
    code, out, _ = run(capsys, "constants", "--K", "3", "--json")
    assert code == 0
    d = json.loads(out)
    assert d["c_star"] == pytest.approx(2.75381, abs=1e-5)
    assert set(d) >= {"K", "lambda", "c_star", "tilde_c", "beta", "alpha_star"}


def test_constants_text(capsys):
    code, out, _ = run(capsys, "constants", "--K", "5")
    assert code == 0 and "c_star" in out


def test_solve_sat_and_unsat(tmp_path, capsys):
    sat = tmp_path / "sat.txt"
    sat.write_text("2 3\n110\n011\n10\n")
    code, out, _ = run(capsys, "solve", "--input", str(sat))
    assert code == 0 and out.startswith("SAT ")
    x = [int(b) for b in out.split()[1]]
    assert (x[0] ^ x[1], x[1] ^ x[2]) == (1, 0)
    unsat = tmp_path / "unsat.txt"
    unsat.write_text("2 2\n11\n11\n01\n")
    code, out, _ = run(capsys, "solve", "--input", str(unsat))
    assert code == 0 and out.strip() == "UNSAT"


def test_solve_malformed_and_missing(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("2 3\n1x0\n")
    assert run(capsys, "solve", "--input", str(bad))[0] == 2
    assert run(capsys, "solve", "--input", str(tmp_path / "nope.txt"))[0] == 2


def test_sample_then_peel(tmp_path, capsys):
    path = tmp_path / "inst.txt"
    code, _, _ = run(capsys, "sample", "--K", "3", "--n", "8", "--m", "20", "--seed", "1", "--out", str(path))
    assert code == 0
    first = path.read_text().splitlines()[0]
    assert first == "20 24"
    code, out, _ = run(capsys, "peel", "--input", str(path))
    assert code == 0 and out.startswith("core ")
    again = tmp_path / "inst2.txt"
    run(capsys, "sample", "--K", "3", "--n", "8", "--m", "20", "--seed", "1", "--out", str(again))
    assert again.read_text() == path.read_text()


def test_core_stats_below_threshold_note(capsys):
    code, out, err = run(capsys, "core-stats", "--K", "3", "--n", "500", "--c", "1.5", "--trials", "2", "--seed", "0")
    assert code == 0
    assert out.splitlines()[0].startswith("K,n,c,trial,core_m")
    assert "empty core" in err


def test_bounds_csv(capsys):
    code, out, _ = run(capsys, "bounds", "--K", "3", "--c", "2.5", "--curve", "sqrt", "--alpha-grid", "5")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "alpha,J,L" and len(lines) == 6


def test_bounds_domain_error(capsys):
    code, _, err = run(capsys, "bounds", "--K", "3", "--c", "3.5", "--curve", "hat")
    assert code == 2 and "error" in err


def test_certify_json_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "certify", "--region", "lk4", "--json", str(a), "--no-timing")[0] == 0
    assert run(capsys, "certify", "--region", "lk4", "--json", str(b), "--no-timing", "--workers", "4")[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["verdict"] == "pass"


def test_certify_failure_exit_code(monkeypatch, capsys):
    monkeypatch.setattr(cli, "certify_region", lambda name, workers=1: certify_LK_grid(4, threshold=-1.0))
    code, out, _ = run(capsys, "certify", "--region", "lk4")
    assert code == 1 and "fail" in out


def test_certify_tail(capsys):
    code, out, _ = run(capsys, "certify", "--region", "tail", "--K", "3", "--c", "2.5")
    assert code == 0 and out.startswith("tail: pass")
    assert run(capsys, "certify", "--region", "tail")[0] == 2


def test_sweep_writes_csv(tmp_path, capsys):
    out_path = tmp_path / "s.csv"
    code, _, err = run(capsys, "sweep", "--K", "3", "--n", "50", "--c", "1.8,2.5,3.5", "--trials", "4", "--seed", "2", "--out", str(out_path))
    assert code == 0
    assert len(out_path.read_text().splitlines()) == 4
    assert "outside" in err


def test_sweep_parallel_matches(tmp_path, capsys):
    paths = []
    for par in ("1", "4"):
        p = tmp_path / f"s{par}.csv"
        run(capsys, "sweep", "--K", "3", "--n", "60", "--c", "2.5,3.0", "--trials", "6", "--seed", "9", "--parallel", par, "--out", str(p))
        paths.append(p.read_bytes())
    assert paths[0] == paths[1]


def test_checks(capsys):
    code, out, _ = run(capsys, "checks", "--m-max", "50")
    assert code == 0 and "FAIL" not in out


def test_usage_error_exit():
    with pytest.raises(SystemExit) as exc:
        cli.main(["constants"])
    assert exc.value.code == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "xorgame", "constants", "--K", "4", "--json"], capture_output=True, text=True, check=True)
    assert json.loads(r.stdout)["c_star"] == pytest.approx(c_star(4))
