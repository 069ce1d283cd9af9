"""Configuration parsing, validation, sweeps, and the CSV contract."""

import os
import subprocess
import sys

import pytest

from fsorf.cli import (SweepRequest, run_sweep, validate_config, main,
                       CSV_HEADER, PRESET_NAMES, _grid)
from fsorf.config import Config, ConfigError, DEFAULTS


class TestConfigParsing:
    def test_empty_gives_full_defaults(self, tmp_path):
        p = tmp_path / "empty.cfg"
        p.write_text("")
        cfg = Config.from_path(p)
        assert cfg.values == DEFAULTS
        assert not cfg.explicit

    def test_comments_and_values(self):
        cfg = Config.from_text("# top\nfso.xi = 1.1  # inline\nrf.m = 2\n")
        assert cfg.get("fso.xi") == 1.1
        assert cfg.get("rf.m") == 2
        assert cfg.explicit == {"fso.xi", "rf.m"}

    def test_unknown_key_names_location(self):
        with pytest.raises(ConfigError, match=r"<config>:2.*fso\.apperture"):
            Config.from_text("fso.xi = 1.1\nfso.apperture = 3\n")

    def test_bad_value_names_location(self):
        with pytest.raises(ConfigError, match=":1"):
            Config.from_text("rf.m = two\n")

    def test_missing_equals_sign(self):
        with pytest.raises(ConfigError, match="expected"):
            Config.from_text("fso.xi 1.1\n")

    def test_system_resolution(self):
        cfg = Config.from_text("fso.gain_model = aperture\n")
        s = cfg.system(ptx_dbm=20.0)
        assert s.fso.gamma_bar_r == pytest.approx(2336393.67, rel=1e-6)
        assert s.rf.gamma_bar_u == pytest.approx(49.8054810170079, rel=1e-9)

    def test_pinned_power_overrides_sweep(self):
        cfg = Config.from_text("fso.p_s_dbm = 31\n")
        s = cfg.system(ptx_dbm=0.0)
        cfg2 = Config.from_text("")
        s2 = cfg2.system(ptx_dbm=31.0)
        assert s.fso.gamma_bar_r == pytest.approx(s2.fso.gamma_bar_r)
        assert s.rf.gamma_bar_u < s2.rf.gamma_bar_u


class TestValidate:
    def test_empty_file_echoes_defaults(self, tmp_path):
        p = tmp_path / "empty.cfg"
        p.write_text("")
        report, level = validate_config(p)
        assert level == 0
        assert "fso.a_fs_db = 268.0" in report
        assert "rf.b_r = 20000000.0" in report

    def test_alpha_t_violation_named(self, tmp_path):
        p = tmp_path / "bad.cfg"
        p.write_text("rf.alpha_t = 5\n")
        report, level = validate_config(p)
        assert level == 2
        assert "rf.alpha_t" in report

    def test_im_dd_aser_scope_warning(self, tmp_path):
        p = tmp_path / "imdd.cfg"
        p.write_text("fso.detector = im_dd\n")
        report, level = validate_config(p)
        assert "coherent detector" in report


class TestSweep:
    def test_degenerate_grid_single_row(self):
        req = SweepRequest(metric="outage", ptx_dbm=(20.0, 20.0, 1.0))
        csv = run_sweep(req)
        lines = csv.strip().split("\n")
        assert lines[0] == CSV_HEADER
        assert len(lines) == 2

    def test_grid_step(self):
        assert _grid(-10.0, -4.0, 2.0) == [-10.0, -8.0, -6.0, -4.0]

    def test_compare_populates_mc_columns(self):
        req = SweepRequest(metric="outage", ptx_dbm=(24.0, 26.0, 2.0),
                           compare=True, samples=20_000, seed=5)
        csv = run_sweep(req)
        row = csv.strip().split("\n")[1].split(",")
        assert row[3] != "" and row[4] != "" and row[5] == "20000"

    def test_analytic_only_leaves_mc_empty(self):
        req = SweepRequest(metric="outage", ptx_dbm=(24.0, 24.0, 1.0))
        row = run_sweep(req).strip().split("\n")[1].split(",")
        assert row[3] == "" and row[4] == "" and row[5] == ""

    def test_byte_identical_rerun(self):
        req = SweepRequest(metric="aser", ptx_dbm=(22.0, 26.0, 2.0),
                           constellation=__import__("fsorf.metrics",
                                                    fromlist=["x"])
                           .ConstellationSpec.from_string("hqam:16"),
                           compare=True, samples=30_000, seed=21)
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            a = run_sweep(req)
            b = run_sweep(req)
        assert a == b

    def test_effective_requires_theta(self):
        req = SweepRequest(metric="effective", ptx_dbm=(20.0, 20.0, 1.0))
        with pytest.raises(RuntimeError, match="theta"):
            run_sweep(req)

    def test_aser_requires_constellation(self):
        req = SweepRequest(metric="aser", ptx_dbm=(20.0, 20.0, 1.0))
        with pytest.raises(RuntimeError, match="constellation"):
            run_sweep(req)

    def test_request_validation(self):
        with pytest.raises(ValueError):
            SweepRequest(ptx_dbm=(10.0, 0.0, 1.0))
        with pytest.raises(ValueError):
            SweepRequest(ptx_dbm=(0.0, 10.0, 0.0))
        with pytest.raises(ValueError):
            SweepRequest(metric="ber")

    def test_all_presets_load_and_run_one_point(self, monkeypatch):
        import fsorf.cli as cli
        for name in PRESET_NAMES:
            fields, base, curves = cli._load_preset(name)
            assert curves, name
            assert fields.get("metric") in cli.METRICS


class TestMainEntry:
    def test_sweep_to_file(self, tmp_path):
        out = tmp_path / "o.csv"
        rc = main(["sweep", "--metric", "outage", "--ptx-dbm", "20:22:2",
                   "--out", str(out)])
        assert rc == 0
        text = out.read_text()
        assert text.startswith(CSV_HEADER)
        assert text.endswith("\n") and "\r" not in text

    def test_validate_exit_code(self, tmp_path):
        p = tmp_path / "bad.cfg"
        p.write_text("rf.alpha_t = 9\n")
        assert main(["validate", "--config", str(p)]) == 2

    def test_error_reporting_names_point(self, tmp_path, capsys):
        rc = main(["sweep", "--metric", "effective", "--ptx-dbm", "20:20:1"])
        assert rc == 1
        assert "theta" in capsys.readouterr().err

    def test_installed_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "fsorf.cli", "sweep", "--metric",
             "outage", "--ptx-dbm", "25:25:1"],
            capture_output=True, text=True,
            env=dict(os.environ, PYTHONPATH="src"))
        assert proc.returncode == 0
        assert proc.stdout.startswith(CSV_HEADER)
