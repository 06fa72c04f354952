"""Tests for the command-line interface, exit codes, and config files."""

import numpy as np
import pytest

import pam4mpi.sweep as sweep_mod
from pam4mpi import DivergenceError, cli
from pam4mpi.sweep import CSV_HEADER


def test_run_prints_summary(capsys):
    code = cli.main(
        [
            "run", "--num-symbols", "30000", "--train-len", "2000",
            "--sir-db", "20", "--phi", "1", "--seed", "7",
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "ber=" in out and "ci95=" in out


def test_run_writes_csv_row(tmp_path, capsys):
    target = tmp_path / "point.csv"
    code = cli.main(
        [
            "run", "--num-symbols", "30000", "--train-len", "2000",
            "--no-mpi", "--delay-symbols", "0", "--out", str(target),
        ]
    )
    assert code == 0
    lines = target.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 2


def test_sweep_writes_csv_and_plots(tmp_path, capsys):
    out_dir = tmp_path / "out"
    code = cli.main(
        [
            "sweep", "--phi", "0,1", "--sir-db", "20", "--l-over-lc", "0.1",
            "--num-symbols", "30000", "--train-len", "2000",
            "--out", str(out_dir), "--parallelism", "1",
        ]
    )
    assert code == 0
    csv_path = out_dir / "results.csv"
    assert csv_path.exists()
    assert len(csv_path.read_text().splitlines()) == 3
    assert (out_dir / "ber_vs_sir_l_over_lc_0.1.svg").exists()


def test_sweep_parallelism_matches_serial(tmp_path):
    args = [
        "sweep", "--phi", "0,1", "--sir-db", "20,24", "--l-over-lc", "0.1",
        "--num-symbols", "25000", "--train-len", "2000", "--no-plots",
    ]
    out1, out2 = tmp_path / "s1", tmp_path / "s2"
    assert cli.main(args + ["--out", str(out1), "--parallelism", "1"]) == 0
    assert cli.main(args + ["--out", str(out2), "--parallelism", "3"]) == 0
    assert (out1 / "results.csv").read_bytes() == (out2 / "results.csv").read_bytes()


def test_sweep_config_file_with_cli_override(tmp_path):
    config = tmp_path / "sweep.cfg"
    config.write_text(
        "# grid for a quick regression\n"
        "phi = 0,1\n"
        "sir_db = 20,24\n"
        "l_over_lc = 0.1\n"
        "num_symbols = 25000\n"
        "snr_db = 18\n"
        "seed = 4\n"
        "parallelism = 1\n"
        "diagnostics = false\n"
    )
    out_dir = tmp_path / "cfg_out"
    code = cli.main(
        [
            "sweep", "--config", str(config), "--sir-db", "22",
            "--train-len", "2000", "--out", str(out_dir), "--no-plots",
        ]
    )
    assert code == 0
    rows = (out_dir / "results.csv").read_text().splitlines()[1:]
    # file grid: 2 phis; CLI narrowed the SIR list to one value
    assert len(rows) == 2
    assert all(row.split(",")[2] == "22.0" for row in rows)


def test_config_file_rejects_unknown_key(tmp_path):
    config = tmp_path / "bad.cfg"
    config.write_text("frobnicate = 1\n")
    code = cli.main(["sweep", "--config", str(config)])
    assert code == 2


def test_waveform_writes_table(tmp_path):
    target = tmp_path / "wave.csv"
    code = cli.main(
        [
            "waveform", "--phi", "1", "--sir-db", "20", "--num-symbols", "5000",
            "--start", "10", "--count", "25", "--out", str(target),
        ]
    )
    assert code == 0
    lines = target.read_text().splitlines()
    assert lines[0] == "n,y,truth_level,r0,r1,r2,r3"
    assert len(lines) == 26
    assert lines[1].split(",")[0] == "10"


def test_plot_regenerates_from_csv(tmp_path):
    out_dir = tmp_path / "sw"
    assert cli.main(
        [
            "sweep", "--phi", "0", "--sir-db", "20", "--l-over-lc", "0.1",
            "--num-symbols", "25000", "--train-len", "2000",
            "--out", str(out_dir), "--no-plots",
        ]
    ) == 0
    plots_dir = tmp_path / "plots"
    code = cli.main(
        ["plot", "--csv", str(out_dir / "results.csv"), "--out", str(plots_dir)]
    )
    assert code == 0
    assert list(plots_dir.glob("*.svg"))


def test_config_error_exit_code(capsys):
    code = cli.main(["run", "--bias-vb", "1.0", "--num-symbols", "30000",
                     "--train-len", "2000"])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_divergence_exit_code(monkeypatch, capsys):
    def exploding(config, keep_mpi_term=False):
        raise DivergenceError("synthetic divergence", symbol_index=123)

    monkeypatch.setattr(sweep_mod, "run_point", exploding)
    code = cli.main(["run", "--num-symbols", "30000", "--train-len", "2000"])
    assert code == 3
    assert "divergence" in capsys.readouterr().err


def test_io_error_exit_code(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    code = cli.main(
        [
            "waveform", "--num-symbols", "5000", "--count", "10",
            "--out", str(blocker / "wave.csv"),
        ]
    )
    assert code == 4


def test_sweep_partial_manifest_on_failure(tmp_path, monkeypatch, capsys):
    real_run_point = sweep_mod.run_point
    calls = {"n": 0}

    def flaky(config, keep_mpi_term=False):
        calls["n"] += 1
        if calls["n"] == 2:
            raise DivergenceError("synthetic divergence", symbol_index=9)
        return real_run_point(config, keep_mpi_term)

    monkeypatch.setattr(sweep_mod, "run_point", flaky)
    out_dir = tmp_path / "partial"
    code = cli.main(
        [
            "sweep", "--phi", "0,0.5,1", "--sir-db", "20", "--l-over-lc", "0.1",
            "--num-symbols", "25000", "--train-len", "2000",
            "--out", str(out_dir), "--parallelism", "1",
        ]
    )
    assert code == 3
    manifest = out_dir / "results.partial.csv"
    assert manifest.exists()
    assert len(manifest.read_text().splitlines()) == 2  # header + 1 completed point
