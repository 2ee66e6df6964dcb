"""Command-line surface: formats, determinism, exit codes."""

import csv
import json
import shutil
import subprocess

import numpy as np
import pytest

from cavityqe.cli import main

import _oracles as orc

BASE = ["--g0-ghz", "8", "--kappa-ghz", "8", "--gamma-ghz", "0.16"]


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


class TestEfficiencyCommand:
    def test_text_output(self, capsys):
        code, out, _ = run(capsys, ["efficiency", *BASE])
        assert code == 0
        assert "eta_q=0.961168781" in out
        assert "coupling=strong" in out
        assert "cavity=optimal" in out
        assert "law_kimble_error=0.0192233756" in out

    def test_purcell_fields_appear_with_gamma0(self, capsys):
        code, out, _ = run(capsys, ["efficiency", *BASE, "--gamma0-ghz", "0.001"])
        assert code == 0
        assert "purcell_factor=8000" in out
        assert "beta=0.980392157" in out

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, ["efficiency", *BASE, "--format", "json"])
        assert code == 0
        payload = json.loads(out)
        assert payload["eta_q"] == pytest.approx(orc.ETA_Q, rel=1e-12)
        assert payload["cavity"] == "optimal"

    def test_csv_format(self, capsys):
        code, out, _ = run(capsys, ["efficiency", *BASE, "--format", "csv"])
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("eta_q,eta_c,eta_extr,law_kimble")
        assert lines[1].startswith("0.961168781,")


class TestSimulateCommand:
    def test_csv_columns_and_meta(self, tmp_path, capsys):
        out_path = tmp_path / "run.csv"
        code, out, _ = run(
            capsys, ["simulate", *BASE, "--out", str(out_path), "--with-analytic-ref"]
        )
        assert code == 0
        header, rows = read_csv(out_path)
        assert header == [
            "t_ns", "re_E", "im_E", "re_C", "im_C", "abs2_E", "abs2_C",
            "P_out", "P_spont", "n_rate", "ledger_residual",
            "re_E_ref", "im_E_ref", "re_C_ref", "im_C_ref",
        ]
        assert rows[0][0] == "0"
        assert rows[0][1] == "1"
        # closed-form reference columns stay glued to the integration
        for row in rows[:: len(rows) // 7]:
            assert float(row[1]) == pytest.approx(float(row[11]), abs=1e-6)
            assert float(row[4]) == pytest.approx(float(row[14]), abs=1e-6)
        meta = json.loads((tmp_path / "run.csv.meta.json").read_text())
        assert meta["tool"] == "cavityqe"
        assert meta["command"] == "simulate"
        assert meta["config"]["g0_ghz"] == 8.0
        assert "wrote" in out

    def test_byte_determinism(self, tmp_path, capsys):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert run(capsys, ["simulate", *BASE, "--out", str(a)])[0] == 0
        assert run(capsys, ["simulate", *BASE, "--out", str(b)])[0] == 0
        assert a.read_bytes() == b.read_bytes()
        meta_a = json.loads((tmp_path / "a.csv.meta.json").read_text())
        meta_b = json.loads((tmp_path / "b.csv.meta.json").read_text())
        # sidecars record their own output path; all else must match
        assert meta_a["config"].pop("out") != meta_b["config"].pop("out")
        assert meta_a == meta_b

    def test_final_probability_matches_oracle(self, tmp_path, capsys):
        out_path = tmp_path / "run.csv"
        run(capsys, ["simulate", *BASE, "--out", str(out_path)])
        _, rows = read_csv(out_path)
        assert float(rows[-1][7]) == pytest.approx(orc.ETA_Q, abs=1e-6)
        assert abs(float(rows[-1][10])) < 1e-8  # ledger residual column

    def test_json_format(self, capsys):
        code, out, _ = run(
            capsys,
            ["simulate", *BASE, "--t-max-ns", "0.01", "--format", "json"],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["t_ns"][0] == 0.0
        assert len(payload["re_E"]) == len(payload["t_ns"])

    def test_analytic_ref_requires_resonance(self, capsys):
        code, _, err = run(
            capsys,
            ["simulate", *BASE, "--delta-ghz", "1", "--with-analytic-ref"],
        )
        assert code == 2
        assert "resonance" in err


class TestSweepCommand:
    def test_csv_contract(self, tmp_path, capsys):
        out_path = tmp_path / "sweep.csv"
        code, out, _ = run(
            capsys,
            [
                "sweep", *BASE,
                "--axis", "kappa", "--values", "3.2,8.0,16",
                "--out", str(out_path),
            ],
        )
        assert code == 0
        header, rows = read_csv(out_path)
        assert header == ["axis_value", "eta_q", "fwhm_ns", "peak_time_ns", "regime", "error"]
        assert [r[0] for r in rows] == ["3.2", "8", "16"]
        expected = [orc.ETA_Q_KAPPA_3P2, orc.ETA_Q, orc.ETA_Q_KAPPA_16]
        for row, eta in zip(rows, expected):
            assert float(row[1]) == pytest.approx(eta, rel=1e-8)
            assert row[5] == ""
        assert rows[1][4] == "strong/optimal"
        assert "fwhm in" in out and "ps" in out  # human summary uses ps

    def test_error_rows_keep_going(self, capsys):
        code, out, _ = run(
            capsys,
            ["sweep", *BASE, "--axis", "gamma", "--values=-1,0.16"],
        )
        assert code == 0
        lines = out.splitlines()
        bad = next(l for l in lines if l.startswith("-1,"))
        good = next(l for l in lines if l.startswith("0.16,"))
        assert "gamma" in bad
        assert bad.split(",")[1] == ""
        assert float(good.split(",")[1]) == pytest.approx(orc.ETA_Q, rel=1e-8)

    def test_missing_axis_is_validation_error(self, capsys):
        code, _, err = run(capsys, ["sweep", *BASE, "--values", "1,2"])
        assert code == 2
        assert "axis" in err

    def test_json_format(self, capsys):
        code, out, _ = run(
            capsys,
            [
                "sweep", *BASE,
                "--axis", "delta", "--values=-8,0,8", "--format", "json",
            ],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["route"] == "numeric"
        etas = [pt["eta_q"] for pt in payload["points"]]
        assert etas[0] == pytest.approx(etas[2], rel=1e-6)
        assert etas[1] == pytest.approx(orc.ETA_Q, abs=1e-6)


class TestOptimizeCommand:
    def test_csv_contract(self, capsys):
        code, out, _ = run(
            capsys, ["optimize", "--g0-ghz", "8", "--gamma-ghz", "0.16"]
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "kappa_star_ghz,eta_q_star,iterations"
        kappa_star, eta_star, iterations = lines[1].split(",")
        assert float(kappa_star) == pytest.approx(8.0, rel=1e-3)
        assert float(eta_star) == pytest.approx(orc.ETA_STAR, rel=1e-9)
        assert int(iterations) > 0

    def test_json_reports_flags(self, capsys):
        code, out, _ = run(
            capsys,
            [
                "optimize", "--g0-ghz", "8", "--gamma-ghz", "0.16",
                "--bracket-lo-ghz", "20", "--bracket-hi-ghz", "40",
                "--format", "json",
            ],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["boundary"] is True
        assert payload["kappa_star_ghz"] == pytest.approx(20.0, rel=1e-3)

    def test_kappa_not_required(self, capsys):
        code, _, err = run(capsys, ["optimize", "--g0-ghz", "8"])
        assert code == 2
        assert "gamma_ghz" in err


class TestSpectrumCommand:
    def test_csv_contract_and_normalization(self, tmp_path, capsys):
        out_path = tmp_path / "spectrum.csv"
        code, _, _ = run(capsys, ["spectrum", *BASE, "--out", str(out_path)])
        assert code == 0
        header, rows = read_csv(out_path)
        assert header == ["delta_ghz", "S"]
        deltas = np.array([float(r[0]) for r in rows])
        density = np.array([float(r[1]) for r in rows])
        integral = float(np.sum(density) * (deltas[1] - deltas[0]))
        assert integral == pytest.approx(orc.ETA_Q, rel=1e-3)
        assert np.all(density >= 0.0)

    def test_numeric_route_matches_analytic(self, capsys):
        args = ["spectrum", *BASE, "--span-ghz", "40", "--points", "321"]
        code_a, out_a, _ = run(capsys, [*args, "--route", "analytic"])
        code_n, out_n, _ = run(capsys, [*args, "--route", "numeric"])
        assert code_a == 0 and code_n == 0
        rows_a = [line.split(",") for line in out_a.splitlines()[1:]]
        rows_n = [line.split(",") for line in out_n.splitlines()[1:]]
        dense_a = np.array([float(r[1]) for r in rows_a])
        dense_n = np.array([float(r[1]) for r in rows_n])
        assert np.abs(dense_a - dense_n).max() / dense_a.max() < 1e-3

    def test_detuned_analytic_route_rejected(self, capsys):
        code, _, err = run(capsys, ["spectrum", *BASE, "--delta-ghz", "3"])
        assert code == 2
        assert "resonance" in err


class TestConfigAndErrors:
    def test_config_file_drives_a_run(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "g0_ghz = 8\nkappa_ghz = 8\ngamma_ghz = 0.16\n# comment\n",
            encoding="utf-8",
        )
        code, out, _ = run(capsys, ["efficiency", "--config", str(cfg)])
        assert code == 0
        assert "eta_q=0.961168781" in out

    def test_cli_overrides_config(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "g0_ghz = 8\nkappa_ghz = 3.2\ngamma_ghz = 0.16\n", encoding="utf-8"
        )
        code, out, _ = run(
            capsys, ["efficiency", "--config", str(cfg), "--kappa-ghz", "8"]
        )
        assert code == 0
        assert "eta_q=0.961168781" in out

    def test_missing_parameter_exit_2(self, capsys):
        code, _, err = run(capsys, ["efficiency", "--g0-ghz", "8"])
        assert code == 2
        assert "kappa_ghz" in err or "gamma_ghz" in err

    def test_unknown_config_key_exit_2(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("volume = 11\n", encoding="utf-8")
        code, _, err = run(capsys, ["efficiency", "--config", str(cfg)])
        assert code == 2
        assert "volume" in err

    def test_ledger_violation_exit_3(self, capsys):
        with pytest.warns(UserWarning):
            code, _, err = run(
                capsys, ["simulate", *BASE, "--dt-ns", "0.1", "--t-max-ns", "1"]
            )
        assert code == 3
        assert "ledger" in err

    def test_horizon_error_exit_3(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("tail_extension = none\nt_max_ns = 0.05\n", encoding="utf-8")
        code, _, err = run(
            capsys,
            ["spectrum", *BASE, "--config", str(cfg), "--route", "numeric"],
        )
        assert code == 3
        assert "horizon" in err.lower() or "decay exponents" in err

    def test_missing_config_exit_4(self, capsys):
        code, _, err = run(capsys, ["efficiency", "--config", "/nope/run.cfg"])
        assert code == 4

    def test_unwritable_out_exit_4(self, tmp_path, capsys):
        code, _, err = run(
            capsys,
            ["efficiency", *BASE, "--out", str(tmp_path / "missing" / "x.csv")],
        )
        assert code == 4

    def test_text_format_only_for_efficiency(self, capsys):
        code, _, err = run(capsys, ["simulate", *BASE, "--format", "text"])
        assert code == 2
        assert "format" in err

    def test_seedless_flag_is_accepted(self, capsys):
        code, out, _ = run(capsys, ["efficiency", *BASE, "--seedless"])
        assert code == 0
        assert "eta_q=" in out

    def test_detuned_efficiency_exit_2(self, capsys):
        code, _, err = run(capsys, ["efficiency", *BASE, "--delta-ghz", "0.5"])
        assert code == 2
        assert "resonance" in err


@pytest.mark.skipif(shutil.which("cavityqe") is None, reason="entry point not installed")
def test_installed_entry_point():
    proc = subprocess.run(
        ["cavityqe", "efficiency", *BASE],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert proc.returncode == 0
    assert "eta_q=0.961168781" in proc.stdout
