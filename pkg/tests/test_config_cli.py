"""Configuration loading, flag precedence and the CSV-emitting commands."""

import math
import subprocess
import sys

import pytest

from qrepeater.channel import initial_fidelity
from qrepeater.cli import (
    BELL_VIOLATION_FIDELITY,
    cmd_fixed_point,
    cmd_headline,
    cmd_link,
    cmd_simulate,
    cmd_sweep,
    main,
)
from qrepeater.config import RunConfig, load_config, parse_config_file


def data_rows(csv_text):
    lines = [l for l in csv_text.splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    return header, [line.split(",") for line in lines[1:]]


class TestLoadConfig:
    def test_defaults_are_replication_values(self):
        cfg = load_config(None)
        assert cfg.l0_km == 20.0
        assert cfg.attenuation_db_per_km == 0.2
        assert cfg.p == 0.995 and cfg.eta == 0.995
        assert cfg.upsilon == 0.0
        assert cfg.m == 3

    def test_empty_file_keeps_defaults(self, tmp_path):
        path = tmp_path / "empty.cfg"
        path.write_text("")
        assert load_config(path) == load_config(None)

    def test_file_values_and_sections(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(
            "[link]\nl0_km = 10\np_em = 0.08\n\n[noise]\np = 0.99  # gate errors\n"
        )
        cfg = load_config(path)
        assert cfg.l0_km == 10.0
        assert cfg.p_em == 0.08
        assert cfg.p == 0.99

    def test_flags_override_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("m = 3\n")
        cfg = load_config(path, {"m": 1})
        assert cfg.m == 1

    def test_unknown_key_rejected_with_line(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("l0_km = 10\nbogus_key = 2\n")
        with pytest.raises(ValueError, match=r"run\.cfg:2.*bogus_key"):
            parse_config_file(path)

    def test_unparsable_value_has_context(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("m = three\n")
        with pytest.raises(ValueError, match=r"run\.cfg:1.*'m'"):
            parse_config_file(path)

    def test_duplicate_key_rejected(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("m = 3\nm = 1\n")
        with pytest.raises(ValueError, match="duplicate"):
            parse_config_file(path)

    def test_out_of_range_value_names_field(self):
        with pytest.raises(ValueError, match="p_em"):
            load_config(None, {"p_em": 1.5})

    def test_unknown_override_rejected(self):
        with pytest.raises(ValueError, match="unknown"):
            load_config(None, {"coherence_time": 1.0})


class TestCmdLink:
    def test_closed_form_row(self):
        cfg = RunConfig(p_em=0.05, eps_local=0.3, l0_km=20.0, attenuation_db_per_km=0.2)
        header, rows = data_rows(cmd_link(cfg))
        values = dict(zip(header, map(float, rows[0])))
        assert values["efficiency"] == pytest.approx(0.3 * 10 ** (-0.2), rel=1e-10)
        assert values["initial_fidelity"] == pytest.approx(
            initial_fidelity(0.05, 0.3 * 10 ** (-0.2)), rel=1e-10
        )
        assert values["success_prob"] == pytest.approx(
            0.5 * (1 - math.exp(-0.05 * 0.3 * 10 ** (-0.2) / 2)), rel=1e-10
        )

    def test_perfect_channel_fidelity_one(self):
        cfg = RunConfig(eps_local=1.0, attenuation_db_per_km=0.0)
        header, rows = data_rows(cmd_link(cfg))
        values = dict(zip(header, map(float, rows[0])))
        assert values["initial_fidelity"] == 1.0

    def test_oracle_columns(self):
        cfg = RunConfig(trials=100_000, seed=7)
        header, rows = data_rows(cmd_link(cfg, oracle=True))
        assert "mc_success_prob" in header and "mc_fidelity_se" in header
        values = dict(zip(header, map(float, rows[0])))
        assert values["mc_success_prob"] == pytest.approx(
            values["success_prob"], abs=4 * values["mc_success_se"]
        )


class TestCmdSimulate:
    def test_perfect_world_column(self):
        cfg = RunConfig(attenuation_db_per_km=0.0, eps_local=1.0, p=1.0, eta=1.0,
                        target_span=7)
        header, rows = data_rows(cmd_simulate(cfg))
        fid_col = header.index("fidelity")
        assert all(float(r[fid_col]) == 1.0 for r in rows)

    def test_m_zero_chain_closed_form(self):
        cfg = RunConfig(f0=0.99, m=0, p=1.0, eta=1.0, target_span=15)
        header, rows = data_rows(cmd_simulate(cfg))
        span_col, fid_col = header.index("span_segments"), header.index("fidelity")
        for row in rows:
            span, fid = int(row[span_col]), float(row[fid_col])
            assert fid == pytest.approx((1 + 0.98**span) / 2, abs=1e-9)

    def test_default_curve_saturates(self):
        cfg = RunConfig(f0=0.98, target_span=127, tc_s=70e-6)
        header, rows = data_rows(cmd_simulate(cfg))
        fid_col = header.index("fidelity")
        fids = [float(r[fid_col]) for r in rows[1:]]
        assert fids[-2] - fids[-1] <= 0.02

    def test_time_in_link_units(self):
        cfg = RunConfig(target_span=3)
        header, rows = data_rows(cmd_simulate(cfg))
        t_col = header.index("time_in_t0_units")
        assert float(rows[0][t_col]) == pytest.approx(1.0, rel=1e-9)


class TestCmdFixedPoint:
    def test_perfect_world_all_ones(self):
        cfg = RunConfig(attenuation_db_per_km=0.0, eps_local=1.0, p=1.0, eta=1.0,
                        target_span=7)
        header, rows = data_rows(cmd_fixed_point(cfg))
        for col in ("f_fp", "f_inf"):
            idx = header.index(col)
            assert all(abs(float(r[idx]) - 1.0) < 1e-9 for r in rows)

    def test_upsilon_axis_ordering(self):
        cfg = RunConfig(f0=0.99, target_span=15, tc_s=70e-6)
        header, rows = data_rows(
            cmd_fixed_point(cfg, axes={"upsilon": [0.0, 0.1, 0.2, 0.3]})
        )
        idx = header.index("f_inf")
        values = [float(r[idx]) for r in rows]
        assert all(a + 1e-9 >= b for a, b in zip(values, values[1:]))
        assert all(v > 0.5 for v in values)


class TestCmdSweep:
    def test_grid_shape_and_ordering(self):
        cfg = RunConfig(f0=0.98, target_span=7, tc_s=70e-6)
        header, rows = data_rows(
            cmd_sweep(cfg, axes={"f0": [0.97, 0.99], "m": [1, 2]})
        )
        assert [r[:2] for r in rows] == [
            ["0.97", "1"],
            ["0.97", "2"],
            ["0.99", "1"],
            ["0.99", "2"],
        ]

    def test_requires_axes(self):
        with pytest.raises(ValueError):
            cmd_sweep(RunConfig(), axes={})


class TestCmdHeadline:
    def test_scenario_report(self):
        cfg = RunConfig(p_em=0.08, eps_local=0.5, m=1, tc_s=70e-6)
        header, rows = data_rows(cmd_headline(cfg))
        values = dict(zip(header, map(float, rows[0])))
        assert values["span_segments"] == 63
        assert values["efficiency"] >= 0.2
        assert values["fidelity"] >= 0.75
        assert values["violates_bell"] == 1.0
        assert 0.3 <= values["expected_time_s"] <= 30.0

    def test_perfect_world_trivially_violates(self):
        cfg = RunConfig(attenuation_db_per_km=0.0, eps_local=1.0, p=1.0, eta=1.0, m=1)
        header, rows = data_rows(cmd_headline(cfg))
        values = dict(zip(header, map(float, rows[0])))
        assert values["fidelity"] == 1.0
        assert values["violates_bell"] == 1.0

    def test_threshold_documented_value(self):
        assert BELL_VIOLATION_FIDELITY == 0.78

    def test_vanishing_efficiency_reports_impractical_time(self):
        # collection efficiency near zero: the pair quality is fine but
        # the heralding time diverges, which the report makes obvious
        cfg = RunConfig(p_em=0.08, eps_local=1e-9, m=1, tc_s=70e-6)
        header, rows = data_rows(cmd_headline(cfg))
        values = dict(zip(header, map(float, rows[0])))
        assert values["expected_time_s"] > 1e6


class TestMainEntry:
    def test_print_config(self, capsys):
        code = main(["link", "--print-config", "--m", "1"])
        out = capsys.readouterr().out
        assert code == 0
        assert "m = 1" in out

    def test_flag_overrides_file(self, tmp_path, capsys):
        path = tmp_path / "run.cfg"
        path.write_text("m = 3\n")
        code = main(["link", "--config", str(path), "--m", "1", "--print-config"])
        assert code == 0
        assert "m = 1" in capsys.readouterr().out

    def test_validation_error_exit_code(self, capsys):
        code = main(["link", "--p-em", "1.5"])
        assert code == 2
        assert "p_em" in capsys.readouterr().err

    def test_headline_defaults(self, capsys):
        code = main(["headline", "--print-config"])
        out = capsys.readouterr().out
        assert code == 0
        assert "p_em = 0.08" in out and "m = 1" in out

    def test_csv_written_to_out(self, tmp_path):
        out_path = tmp_path / "link.csv"
        code = main(["link", "--out", str(out_path)])
        assert code == 0
        text = out_path.read_text()
        assert text.startswith("# qrepeater link\n")
        assert "efficiency,success_prob" in text

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["simulate", "--target-span", "7", "--f0", "0.98", "--seed", "7"]
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_console_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "qrepeater.cli", "link"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "efficiency" in proc.stdout
