"""Unit tests for the command line interface."""

import numpy as np

from srbeam import cli, harness


class TestOracleCommand:
    def test_scalar(self, capsys):
        code = cli.main(["oracle", "--scalar", "1,1,1", "--budget", "3", "--rt", "0"])
        out = capsys.readouterr().out
        assert code == 0
        assert "r_b = 2" in out

    def test_scalar_infeasible(self, capsys):
        code = cli.main(["oracle", "--scalar", "0,1,1", "--budget", "3", "--rt", "1"])
        assert code == 0
        assert "infeasible" in capsys.readouterr().out

    def test_missing_scalar_errors(self, capsys):
        code = cli.main(["oracle", "--budget", "3"])
        assert code == 2
        assert "error" in capsys.readouterr().err


class TestRunCommand:
    def test_small_run_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "results.csv"
        code = cli.main(
            [
                "run",
                "--trials", "1",
                "--methods", "mrt-g,mrt-h",
                "--snr-db", "10",
                "--out", str(out),
            ]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == harness.CSV_HEADER
        assert len(lines) == 3

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("trials = 2\nmethods = mrt-g\nsnr_db = 10\nout = unused.csv\n")
        out = tmp_path / "from_flag.csv"
        code = cli.main(["run", "--config", str(cfg), "--out", str(out), "--trials", "1"])
        assert code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 2  # one trial, one snr, one method

    def test_unknown_config_key_errors(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("bogus = 1\n")
        code = cli.main(["run", "--config", str(cfg)])
        assert code == 2
        assert "unknown config keys" in capsys.readouterr().err

    def test_bad_output_path_errors(self, tmp_path):
        code = cli.main(
            [
                "run",
                "--trials", "1",
                "--methods", "mrt-g",
                "--snr-db", "10",
                "--out", str(tmp_path / "no_dir" / "x.csv"),
            ]
        )
        assert code == 2
