import csv
import io

import pytest

from dynastic_olg.cli import SOLVE_COLUMNS, main, schema_line
from dynastic_olg.statics import SweepRow

from conftest import BASELINE_TEXT


def read_csv(path):
    text = path.read_text()
    first, rest = text.split("\n", 1)
    assert first.startswith("# schema-sha256=")
    rows = list(csv.DictReader(io.StringIO(rest)))
    return first, rows


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_config(tmp_path, extra="", text=BASELINE_TEXT, name="s.cfg"):
    path = tmp_path / name
    path.write_text(text + extra)
    return path


class TestSolve:
    def test_writes_one_row(self, tmp_path, capsys, baseline_config):
        out = tmp_path / "solve.csv"
        code, _, err = run(capsys, "solve", "--config", baseline_config, "--out", out)
        assert code == 0 and err == ""
        header, rows = read_csv(out)
        assert header + "\n" == schema_line(SOLVE_COLUMNS)
        assert list(rows[0]) == list(SOLVE_COLUMNS)
        assert len(rows) == 1
        row = rows[0]
        assert float(row["mh_share"]) == pytest.approx(0.2 / 0.6, rel=1e-12)
        assert abs(float(row["w"]) - 0.008) <= 1e-10
        assert float(row["residual_norm"]) <= 1e-10
        assert "\r" not in out.read_text()

    def test_shortest_round_trip_numbers(self, tmp_path, capsys, baseline_config):
        out = tmp_path / "solve.csv"
        run(capsys, "solve", "--config", baseline_config, "--out", out)
        _, rows = read_csv(out)
        for key in ("n", "c1", "lambda"):
            assert repr(float(rows[0][key])) == rows[0][key]

    def test_byte_identical(self, tmp_path, capsys, baseline_config):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, "solve", "--config", baseline_config, "--out", a)
        run(capsys, "solve", "--config", baseline_config, "--out", b)
        assert a.read_bytes() == b.read_bytes()

    def test_divergent(self, tmp_path, capsys):
        text = BASELINE_TEXT.replace("alpha = 0.4", "alpha = 2")
        cfg = write_config(tmp_path, "n_min = 0.6\nn_max = 5\n", text=text)
        code, _, err = run(capsys, "solve", "--config", cfg, "--out", tmp_path / "x.csv")
        assert code == 3
        assert err.startswith("DivergentDynasty:")
        assert err.count("\n") == 1
        assert not (tmp_path / "x.csv").exists()

    def test_invalid_config(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "eps = 0.5\n".replace("eps", "kappa"))
        code, _, err = run(capsys, "solve", "--config", cfg, "--out", tmp_path / "x.csv")
        assert code == 2
        assert err.startswith("ConfigError:") and "kappa" in err

    def test_validation_error(self, tmp_path, capsys):
        text = BASELINE_TEXT.replace("theta = 0.2", "theta = 0.7")
        cfg = write_config(tmp_path, text=text)
        code, _, err = run(capsys, "solve", "--config", cfg, "--out", tmp_path / "x.csv")
        assert code == 2 and err.startswith("ValidationError:")

    def test_missing_file(self, tmp_path, capsys):
        code, _, err = run(capsys, "solve", "--config", tmp_path / "nope.cfg", "--out", tmp_path / "x.csv")
        assert code == 2 and err.startswith("ConfigError:")

    def test_no_bracket_exit(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "n_min = 0.001\nn_max = 0.005\n")
        code, _, err = run(capsys, "solve", "--config", cfg, "--out", tmp_path / "x.csv")
        assert code == 3 and err.startswith("NoBracket:")


class TestSweep:
    def test_tau_sweep(self, tmp_path, capsys, baseline_config):
        out = tmp_path / "sweep.csv"
        code, _, _ = run(capsys, "sweep", "--config", baseline_config, "--param", "tau",
                         "--from", 0.1, "--to", 0.4, "--steps", 7, "--out", out)
        assert code == 0
        _, rows = read_csv(out)
        assert len(rows) == 7
        assert list(rows[0]) == list(SweepRow.columns())
        share = [float(r["mh_share"]) for r in rows]
        assert max(share) - min(share) <= 1e-12
        assert all(r["status"] == "Converged" for r in rows)

    def test_byte_identical(self, tmp_path, capsys, baseline_config):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for p in paths:
            run(capsys, "sweep", "--config", baseline_config, "--param", "phi",
                "--from", 0.05, "--to", 0.5, "--steps", 10, "--out", p)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_partial_failure_keeps_status(self, tmp_path, capsys, baseline_config):
        out = tmp_path / "sweep.csv"
        code, _, _ = run(capsys, "sweep", "--config", baseline_config, "--param", "theta",
                         "--from", 0.2, "--to", 0.45, "--steps", 2, "--out", out)
        assert code == 0
        _, rows = read_csv(out)
        assert [r["status"] for r in rows] == ["Converged", "NonInterior"]

    def test_invalid_grid(self, tmp_path, capsys, baseline_config):
        code, _, err = run(capsys, "sweep", "--config", baseline_config, "--param", "theta",
                           "--from", 0.1, "--to", 0.9, "--steps", 3, "--out", tmp_path / "x.csv")
        assert code == 2 and err.startswith("InvalidGrid:")

    def test_all_points_fail(self, tmp_path, capsys, baseline_config):
        code, _, _ = run(capsys, "sweep", "--config", baseline_config, "--param", "wbar",
                         "--from", 1e-4, "--to", 1e-3, "--steps", 2, "--out", tmp_path / "x.csv")
        assert code == 3


class TestReport:
    def test_report_rows(self, tmp_path, capsys, baseline_config):
        out = tmp_path / "report.csv"
        code, _, _ = run(capsys, "report", "--config", baseline_config, "--out", out)
        assert code == 0
        _, rows = read_csv(out)
        assert len(rows) == 16
        assert list(rows[0])[:7] == ["parameter", "outcome", "expected", "observed",
                                     "derivative", "step", "agree"]
        cells = {(r["parameter"], r["outcome"]): r for r in rows}
        c = cells["theta", "mh_share"]
        assert (c["expected"], c["observed"], c["agree"]) == ("+", "+", "true")
        c = cells["tau", "human_capital"]
        assert c["expected"] == "-" and c["agree"] in ("true", "false")
        for r in rows:
            if r["expected"] == "?":
                assert r["agree"] == "true"


@pytest.mark.slow
class TestVerify:
    def test_baseline_agrees(self, capsys, baseline_config):
        code, out, _ = run(capsys, "verify", "--config", baseline_config)
        assert code == 0
        assert "result=agree" in out
        for name in ("r_c1", "r_by", "r_w", "r_V"):
            assert name in out

    def test_zero_horizon_disagrees(self, capsys, baseline_config):
        code, out, err = run(capsys, "verify", "--config", baseline_config, "--horizon", 0)
        assert code == 5
        assert err.startswith("OracleDisagreement:")
        assert "result=disagree" in out

    def test_coarse_grid_terminates(self, tmp_path, capsys, baseline_config):
        out = tmp_path / "verify.txt"
        code, text, _ = run(capsys, "verify", "--config", baseline_config, "--grid", 3,
                            "--refine", 1, "--out", out)
        assert code in (0, 5)
        assert "rel_diff" in text
        assert out.read_text() == text

    def test_bad_grid(self, capsys, baseline_config):
        code, _, _ = run(capsys, "verify", "--config", baseline_config, "--grid", 2)
        assert code == 2


def test_module_entry_point(tmp_path, baseline_config):
    import subprocess
    import sys
    out = tmp_path / "m.csv"
    proc = subprocess.run([sys.executable, "-m", "dynastic_olg", "solve", "--config",
                           str(baseline_config), "--out", str(out)], capture_output=True)
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
