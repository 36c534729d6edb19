import json
import math
import os

import pytest

from pmaxevt.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out.strip().splitlines()
    payload = json.loads(out[-1]) if out else None
    return code, payload


class TestLawCommand:
    def test_cdf(self, capsys):
        code, out = run_cli(capsys, "law", "cdf", "--family", "3", "--x", "1.0")
        assert code == 0
        assert out["op"] == "cdf" and out["family"] == 3
        assert abs(out["value"] - math.exp(-1)) < 1e-15

    def test_quantile(self, capsys):
        code, out = run_cli(capsys, "law", "quantile", "--family", "2", "--alpha", "1", "--x", "0.25")
        assert code == 0 and out["value"] == 0.25

    def test_kcdf(self, capsys):
        code, out = run_cli(capsys, "law", "kcdf", "--family", "2", "--alpha", "1", "--k", "2", "--x", str(math.exp(-1)))
        assert code == 0
        assert abs(out["value"] - 2 * math.exp(-1)) < 1e-12

    def test_norming_sources(self, capsys):
        code, out = run_cli(capsys, "law", "norming", "--family", "6", "--n", "10", "--source", "tabulated")
        assert code == 0
        assert out["value"] == {"a_n": 0.1, "b_n": 1.0}
        code, out = run_cli(capsys, "law", "norming", "--family", "3", "--n", "10", "--source", "derived")
        assert out["value"] == {"a_n": 10.0, "b_n": 1.0}

    def test_invalid_family_is_an_error_exit(self, capsys):
        code = main(["law", "cdf", "--family", "9", "--x", "1.0"])
        captured = capsys.readouterr()
        assert code == 1
        assert "error" in captured.err


class TestGlogpdCommand:
    def test_cdf(self, capsys):
        code, out = run_cli(capsys, "glogpd", "cdf", "--family", "3", "--x", "2.0")
        assert code == 0 and out["value"] == 0.5

    def test_vonmises(self, capsys):
        code, out = run_cli(capsys, "glogpd", "vonmises", "--branch", "v1", "--gamma", "1.0", "--x", str(math.e))
        assert code == 0 and abs(out["value"] - 0.5) < 1e-15

    def test_fig1_writes_table_and_figure(self, capsys, tmp_path):
        out_csv = str(tmp_path / "fig1.csv")
        code, out = run_cli(
            capsys, "glogpd", "fig1", "--grid-start", "1.1", "--grid-end", "10", "--points", "40", "--out", out_csv
        )
        assert code == 0
        lines = open(out_csv, encoding="utf-8").read().splitlines()
        assert lines[0] == "label,x,density"
        assert len(lines) - 1 == out["rows"] == 5 * 40
        png = out_csv.replace(".csv", ".png")
        assert os.path.getsize(png) > 1000

    def test_fig1_negative_side(self, capsys, tmp_path):
        out_csv = str(tmp_path / "fig1neg.csv")
        code, out = run_cli(
            capsys, "fig1", "--grid-start", "-0.99", "--grid-end", "-0.01", "--points", "30", "--out", out_csv, "--no-figures"
        )
        assert code == 0 and out["rows"] == 5 * 30
        assert not os.path.exists(out_csv.replace(".csv", ".png"))

    def test_fig1_mixed_grid_rejected(self, capsys):
        with pytest.raises(SystemExit):
            main(["fig1", "--grid-start", "-1", "--grid-end", "5", "--out", "x.csv"])


class TestModelCommand:
    def test_exactcdf(self, capsys):
        code, out = run_cli(
            capsys, "model", "exactcdf", "--base", "glogpd", "--family", "3", "--n", "50", "--k", "1", "--x", "1.0",
            "--norming", "derived",
        )
        assert code == 0
        assert abs(out["value"] - (1 - 1 / 50) ** 50) < 1e-12

    def test_sample_csv(self, capsys, tmp_path):
        out_csv = str(tmp_path / "draws.csv")
        code, out = run_cli(
            capsys, "model", "sample", "--base", "uniform", "--family", "2", "--alpha", "1",
            "--n", "20", "--k", "2", "--m", "7", "--seed", "42", "--out", out_csv,
        )
        assert code == 0 and out["draws"] == 7
        rows = [line.split(",") for line in open(out_csv, encoding="utf-8").read().splitlines()]
        assert len(rows) == 7 and all(len(r) == 2 for r in rows)
        assert all(float(r[0]) >= float(r[1]) for r in rows)

    def test_sample_deterministic(self, capsys, tmp_path):
        a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        for path in (a, b):
            run_cli(
                capsys, "model", "sample", "--base", "uniform", "--family", "2", "--alpha", "1",
                "--n", "10", "--m", "20", "--seed", "7", "--out", path,
            )
        assert open(a, "rb").read() == open(b, "rb").read()


class TestDistanceCommand:
    def test_hellinger_report_mirrors_dataclass(self, capsys):
        code, out = run_cli(capsys, "distance", "hellinger", "--base", "zero", "--family", "3", "--n", "100")
        assert code == 0
        for key in ("kind", "value", "error_estimate", "n", "k", "bound", "converged"):
            assert key in out
        assert out["bound"]["total"] >= out["value"]

    def test_bound_subcommand(self, capsys):
        code, out = run_cli(
            capsys, "distance", "bound", "--which", "topk", "--base", "envelope", "--family", "2", "--alpha", "1",
            "--delta", "0.5", "--n", "10", "--k", "2", "--mc-samples", "20000",
        )
        assert code == 0
        assert out["total"] > 0 and out["tail_term"] >= 0

    def test_tabulated_flag(self, capsys):
        code, out = run_cli(
            capsys, "distance", "ks", "--base", "zero", "--family", "3", "--n", "50", "--norming", "tabulated"
        )
        assert code == 0
        assert out["value"] > 0.1  # the published-table constants do not stabilize family 3


class TestRateCommand:
    def _write_cfg(self, tmp_path, seed=7):
        cfg = {
            "base": {"g_choice": "zero", "family": 3},
            "n_grid": [10, 31, 100],
            "kinds": ["hellinger"],
            "tol": 1e-8,
            "seed": seed,
        }
        path = str(tmp_path / "cfg.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(cfg, fh)
        return path

    def test_rate_writes_csv_and_png(self, capsys, tmp_path):
        cfg = self._write_cfg(tmp_path)
        out_csv = str(tmp_path / "results.csv")
        code, out = run_cli(capsys, "rate", "--config", cfg, "--out", out_csv)
        assert code == 0
        assert out["all_converged"] is True
        assert os.path.exists(out_csv) and os.path.getsize(out_csv.replace(".csv", ".png")) > 1000
        assert -1.3 < out["fits"][0]["slope"] < -0.7

    def test_env_seed_override(self, capsys, tmp_path, monkeypatch):
        cfg = self._write_cfg(tmp_path, seed=1)
        base = str(tmp_path / "base.csv")
        run_cli(capsys, "rate", "--config", cfg, "--out", base, "--no-figures")
        monkeypatch.setenv("PMAXEVT_SEED", "1")
        override = str(tmp_path / "override.csv")
        run_cli(capsys, "rate", "--config", self._write_cfg(tmp_path, seed=999), "--out", override, "--no-figures")
        assert open(base, "rb").read() == open(override, "rb").read()

    def test_json_output_format(self, capsys, tmp_path):
        cfg = self._write_cfg(tmp_path)
        out_json = str(tmp_path / "results.json")
        code, _ = run_cli(capsys, "rate", "--config", cfg, "--out", out_json, "--no-figures")
        assert code == 0
        import pmaxevt as pm

        with open(out_json, encoding="utf-8") as fh:
            pm.validate_report_json(json.load(fh))
