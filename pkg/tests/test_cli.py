import json
import math

import numpy as np
import pytest

from twogroupbf.cli import parse_and_run, read_raw_csv
from twogroupbf.datamodel import SummaryCi, derive_stats
from twogroupbf.engine import CauchyPrior, TestSpec, get_bf, infer_bf, super_bf
from twogroupbf.oracle import GridSpec, default_span, grid_bf
from twogroupbf.report import render_text

INFER_ARGS = [
    "infer", "--n-x", "193", "--n-y", "205", "--mean-x", "4.7", "--mean-y", "4.8",
    "--ci-margin", "0.19", "--ci-level", "0.95", "--ni-margin", "1",
    "--direction", "low",
]


class TestInferInvocation:
    def test_matches_engine_output_byte_for_byte(self, capsys):
        assert parse_and_run(INFER_ARGS) == 0
        out = capsys.readouterr().out
        expected = render_text(
            infer_bf(SummaryCi(193, 205, 4.7, 4.8, ci_margin=0.19, ci_level=0.95),
                     TestSpec.non_inferiority(1.0, direction="low"))
        )
        assert out == expected
        assert "Non-inferiority margin:       1.04 (standardised)" in out
        assert "                              1.00 (unstandardised)" in out
        assert "Cauchy prior scale:           0.707" in out

    def test_deterministic_across_runs(self, capsys):
        parse_and_run(INFER_ARGS)
        first = capsys.readouterr().out
        parse_and_run(INFER_ARGS)
        second = capsys.readouterr().out
        assert first == second

    def test_json_format(self, capsys):
        assert parse_and_run(INFER_ARGS + ["--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["design"] == "non_inferiority"
        assert payload["direction"] == "low"
        engine = infer_bf(SummaryCi(193, 205, 4.7, 4.8, ci_margin=0.19, ci_level=0.95),
                          TestSpec.non_inferiority(1.0, direction="low"))
        assert payload["log_bf"] == engine.log_bf


class TestRawCsv:
    def _write(self, path, rows, header="group,value"):
        path.write_text(header + "\n" + "\n".join(rows) + ("\n" if rows else ""))
        return str(path)

    def test_minimal_file(self, tmp_path):
        path = self._write(tmp_path / "d.csv", ["x,1.0", "x,2.0", "y,1.5", "y,2.5"])
        raw = read_raw_csv(path)
        assert list(raw.x) == [1.0, 2.0]
        assert list(raw.y) == [1.5, 2.5]

    def test_row_order_irrelevant(self, tmp_path):
        a = read_raw_csv(self._write(tmp_path / "a.csv",
                                     ["x,1", "y,5", "x,2", "y,6"]))
        b = read_raw_csv(self._write(tmp_path / "b.csv",
                                     ["x,1", "x,2", "y,5", "y,6"]))
        assert list(a.x) == list(b.x) and list(a.y) == list(b.y)

    def test_unknown_group_label(self, tmp_path, capsys):
        path = self._write(tmp_path / "d.csv", ["x,1", "x,2", "z,3", "y,4", "y,5"])
        rc = parse_and_run(["super", "--raw", path])
        assert rc == 2
        assert "unknown group label 'z'" in capsys.readouterr().err

    def test_bad_header(self, tmp_path, capsys):
        path = self._write(tmp_path / "d.csv", ["x,1"], header="grp,val")
        assert parse_and_run(["super", "--raw", path]) == 2
        assert "expected header 'group,value'" in capsys.readouterr().err

    def test_non_numeric_value(self, tmp_path, capsys):
        path = self._write(tmp_path / "d.csv", ["x,1", "x,two", "y,3", "y,4"])
        assert parse_and_run(["super", "--raw", path]) == 2
        assert "non-numeric value" in capsys.readouterr().err

    def test_group_too_small(self, tmp_path, capsys):
        path = self._write(tmp_path / "d.csv", ["x,1", "y,3", "y,4"])
        assert parse_and_run(["super", "--raw", path]) == 2
        assert "fewer than 2 rows" in capsys.readouterr().err

    def test_missing_file(self, capsys):
        assert parse_and_run(["super", "--raw", "/nonexistent/path.csv"]) == 2
        assert "cannot read raw data file" in capsys.readouterr().err

    def test_large_file_moments_match_plain_sums(self, tmp_path):
        rng = np.random.default_rng(12)
        x = rng.normal(1.0, 2.0, size=5000)
        y = rng.normal(1.3, 1.7, size=5000)
        rows = [f"x,{float(v)!r}" for v in x] + [f"y,{float(v)!r}" for v in y]
        raw = read_raw_csv(self._write(tmp_path / "big.csv", rows))
        stats = derive_stats(raw)
        # independent reduction: compensated sums, no numpy
        def mean_sd(vals):
            n = len(vals)
            m = math.fsum(vals) / n
            var = math.fsum((v - m) ** 2 for v in vals) / (n - 1)
            return m, math.sqrt(var)

        mx, sx = mean_sd(list(x))
        my, sy = mean_sd(list(y))
        sp = math.sqrt(((5000 - 1) * sx**2 + (5000 - 1) * sy**2) / 9998)
        t = (my - mx) / (sp * math.sqrt(2 / 5000))
        assert stats.t_obs == pytest.approx(t, abs=1e-10)
        assert stats.sd_pooled == pytest.approx(sp, abs=1e-10)


class TestSuperInvocation:
    def test_identical_groups_favor_the_null(self, tmp_path, capsys):
        rows = []
        values = [0.4, 1.1, 1.9, 2.6, 3.0, 3.7]
        for v in values:
            rows.append(f"x,{v}")
            rows.append(f"y,{v}")
        path = tmp_path / "same.csv"
        path.write_text("group,value\n" + "\n".join(rows) + "\n")
        rc = parse_and_run(["super", "--raw", str(path), "--alternative", "two_sided"])
        assert rc == 0
        out = capsys.readouterr().out
        bf_line = [l for l in out.splitlines() if "BF10 (superiority)" in l][0]
        bf = float(bf_line.split("=")[1])
        assert bf < 1.0
        # the grid oracle agrees on this exact fixture
        raw = read_raw_csv(str(path))
        prior = CauchyPrior()
        oracle = grid_bf(derive_stats(raw), prior, TestSpec.superiority(),
                         GridSpec(span=default_span(prior), nodes=100_001))
        engine = get_bf(super_bf(raw, TestSpec.superiority()))
        assert engine == pytest.approx(oracle, rel=1e-6)

    def test_prior_scale_flag(self, capsys):
        rc = parse_and_run(["super", "--n-x", "100", "--n-y", "100", "--mean-x", "0",
                            "--mean-y", "0.5", "--sd-x", "1", "--sd-y", "1",
                            "--prior-scale", "0.5"])
        assert rc == 0
        assert "BF10 (superiority) = 51.58" in capsys.readouterr().out


class TestEquivInvocation:
    def test_symmetric_expansion_in_h0_line(self, capsys):
        rc = parse_and_run(["equiv", "--n-x", "10", "--n-y", "10", "--mean-x", "0",
                            "--mean-y", "0.05", "--sd-x", "1", "--sd-y", "1",
                            "--interval", "0.3", "--interval-std"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "H0 (equivalence):             delta > -0.30 AND delta < 0.30" in out
        assert "BF01 (equivalence)" in out

    def test_point_null_default(self, capsys):
        rc = parse_and_run(["equiv", "--n-x", "10", "--n-y", "10", "--mean-x", "0",
                            "--mean-y", "0.05", "--sd-x", "1", "--sd-y", "1"])
        assert rc == 0
        assert "mu_y - mu_x = 0" in capsys.readouterr().out


class TestSweepInvocation:
    def test_reports_min_and_max(self, capsys):
        rc = parse_and_run(["sweep", "--design", "super", "--scales", "0.5", "5",
                            "--n-x", "100", "--n-y", "100", "--mean-x", "0",
                            "--mean-y", "0.5", "--sd-x", "1", "--sd-y", "1"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "min BF10 (superiority) = 9.87" in out
        assert "max BF10 (superiority) = 51.58" in out

    def test_sweep_needs_margin_for_infer(self, capsys):
        rc = parse_and_run(["sweep", "--design", "infer", "--scales", "0.5",
                            "--n-x", "10", "--n-y", "10", "--mean-x", "0",
                            "--mean-y", "0.1", "--sd-x", "1", "--sd-y", "1"])
        assert rc == 2
        assert "--ni-margin is required" in capsys.readouterr().err


class TestSplitRawFiles:
    def test_two_single_column_files(self, tmp_path, capsys):
        fx = tmp_path / "x.txt"
        fy = tmp_path / "y.txt"
        fx.write_text("1.0\n2.0\n\n3.0\n")
        fy.write_text("2.5\n3.5\n4.5\n")
        rc = parse_and_run(["super", "--raw-x", str(fx), "--raw-y", str(fy)])
        assert rc == 0
        out = capsys.readouterr().out
        from twogroupbf.datamodel import RawGroups

        expected = render_text(super_bf(RawGroups(x=[1, 2, 3], y=[2.5, 3.5, 4.5]),
                                        TestSpec.superiority()))
        assert out == expected

    def test_missing_partner_file(self, tmp_path, capsys):
        fx = tmp_path / "x.txt"
        fx.write_text("1.0\n2.0\n")
        assert parse_and_run(["super", "--raw-x", str(fx)]) == 2
        assert "both --raw-x and --raw-y" in capsys.readouterr().err

    def test_conflict_with_combined_csv(self, tmp_path, capsys):
        f = tmp_path / "d.csv"
        f.write_text("group,value\nx,1\nx,2\ny,3\ny,4\n")
        fx = tmp_path / "x.txt"
        fx.write_text("1.0\n2.0\n")
        rc = parse_and_run(["super", "--raw", str(f), "--raw-x", str(fx),
                            "--raw-y", str(fx)])
        assert rc == 2
        assert "not both" in capsys.readouterr().err

    def test_non_numeric_line(self, tmp_path, capsys):
        fx = tmp_path / "x.txt"
        fy = tmp_path / "y.txt"
        fx.write_text("1.0\noops\n")
        fy.write_text("1.0\n2.0\n")
        assert parse_and_run(["super", "--raw-x", str(fx), "--raw-y", str(fy)]) == 2
        assert "non-numeric value 'oops'" in capsys.readouterr().err


class TestValidationAndExitCodes:
    def test_conflicting_input_modes(self, tmp_path, capsys):
        path = tmp_path / "d.csv"
        path.write_text("group,value\nx,1\nx,2\ny,3\ny,4\n")
        rc = parse_and_run(["super", "--raw", str(path), "--n-x", "4", "--n-y", "4",
                            "--mean-x", "0", "--mean-y", "1"])
        assert rc == 2
        assert "conflict" in capsys.readouterr().err

    def test_sd_and_ci_conflict(self, capsys):
        rc = parse_and_run(["super", "--n-x", "10", "--n-y", "10", "--mean-x", "0",
                            "--mean-y", "1", "--sd-x", "1", "--sd-y", "1",
                            "--ci-margin", "0.2"])
        assert rc == 2
        assert "not both" in capsys.readouterr().err

    def test_missing_variability(self, capsys):
        rc = parse_and_run(["super", "--n-x", "10", "--n-y", "10",
                            "--mean-x", "0", "--mean-y", "1"])
        assert rc == 2
        assert "no variability information" in capsys.readouterr().err

    def test_incomplete_sds(self, capsys):
        rc = parse_and_run(["super", "--n-x", "10", "--n-y", "10", "--mean-x", "0",
                            "--mean-y", "1", "--sd-x", "1"])
        assert rc == 2
        assert "both --sd-x and --sd-y" in capsys.readouterr().err

    def test_unknown_flag(self, capsys):
        assert parse_and_run(["super", "--bogus", "1"]) == 2

    def test_unknown_subcommand(self):
        assert parse_and_run(["frobnicate"]) == 2

    def test_invalid_numerics(self, capsys):
        rc = parse_and_run(["infer", "--n-x", "10", "--n-y", "10", "--mean-x", "0",
                            "--mean-y", "0.1", "--sd-x", "1", "--sd-y", "1",
                            "--ni-margin", "-2"])
        assert rc == 2
        assert "ni_margin" in capsys.readouterr().err

    def test_numerical_failure_maps_to_exit_3(self, capsys, monkeypatch):
        from twogroupbf import cli
        from twogroupbf.quadrature import QuadratureError

        def boom(*args, **kwargs):
            raise QuadratureError("did not converge", -1.0, 0.5)

        monkeypatch.setattr(cli, "run_test", boom)
        rc = parse_and_run(["super", "--n-x", "10", "--n-y", "10", "--mean-x", "0",
                            "--mean-y", "0.1", "--sd-x", "1", "--sd-y", "1"])
        assert rc == 3
        assert "numerical failure" in capsys.readouterr().err


class TestCurves:
    def test_curves_file_written(self, tmp_path, capsys):
        out = tmp_path / "curves.csv"
        rc = parse_and_run(["super", "--n-x", "20", "--n-y", "20", "--mean-x", "0",
                            "--mean-y", "0.4", "--sd-x", "1", "--sd-y", "1",
                            "--curves", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "delta,prior,posterior"
        assert len(lines) == 513
