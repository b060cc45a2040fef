"""Command-line interface: exit codes, output schemas, determinism."""

import json

import numpy as np
import pytest

from hdmean import make_metro_fixture, write_csv
from hdmean.cli import main
from hdmean.spectrum import mp_edges


@pytest.fixture()
def data_csv(tmp_path):
    path = tmp_path / "rides.csv"
    data = make_metro_fixture(80, 12, seed=3)
    write_csv(path, data, header=[f"s{j}" for j in range(12)])
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestTestCommand:
    def test_decomposite_json_happy_path(self, capsys, data_csv):
        code, out, _ = run_cli(
            capsys, "test", "--input", data_csv, "--header",
            "--method", "decomposite", "--out", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["method"] == "decomposite-lw-normalized"
        assert payload["statistic"] > 0
        assert 0.0 <= payload["p_value"] <= 1.0
        assert "config" in payload and "warnings" in payload

    def test_hotelling_csv_output(self, capsys, data_csv):
        code, out, _ = run_cli(
            capsys, "test", "--input", data_csv, "--header",
            "--method", "hotelling", "--out", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "method,statistic,normalized,p_value"
        assert len(lines) == 2

    def test_unknown_method_is_usage_error(self, capsys, data_csv):
        code, _, _ = run_cli(capsys, "test", "--input", data_csv, "--method", "nosuch")
        assert code == 2

    def test_missing_file_is_computation_error(self, capsys):
        code, _, err = run_cli(capsys, "test", "--input", "/nonexistent.csv")
        assert code == 1
        assert "error" in err

    def test_bad_cell_is_computation_error(self, capsys, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,2\n3,oops\n")
        code, _, err = run_cli(capsys, "test", "--input", str(path))
        assert code == 1
        assert "row 2" in err

    def test_unknown_subcommand_is_usage_error(self, capsys):
        assert run_cli(capsys, "frobnicate")[0] == 2


class TestBootstrapCommand:
    def test_requires_seed(self, capsys, data_csv):
        code, _, err = run_cli(capsys, "bootstrap", "--input", data_csv, "--header")
        assert code == 2
        assert "--seed" in err

    def test_happy_path_and_determinism(self, capsys, data_csv):
        args = ("bootstrap", "--input", data_csv, "--header", "--reps", "80",
                "--frac", "0.95", "--tail", "two-sided", "--seed", "7")
        code1, out1, _ = run_cli(capsys, *args)
        code2, out2, _ = run_cli(capsys, *args)
        assert code1 == code2 == 0
        assert out1 == out2
        payload = json.loads(out1)
        assert payload["reps"] == 80
        assert 0.0 <= payload["p_value"] <= 1.0
        assert set(payload["quantiles"]) == {"q005", "q025", "q500", "q975", "q995"}


class TestSimulatePowerCommand:
    def test_small_run(self, capsys):
        code, out, _ = run_cli(
            capsys, "simulate-power", "--p", "5", "--n", "25", "--rho", "0.3",
            "--reps", "40", "--k", "1", "--methods", "bs", "hotelling",
            "--seed", "5", "--out", "json")
        assert code == 0
        payload = json.loads(out)
        methods = {r["method"] for r in payload["results"]}
        assert methods == {"bs", "hotelling"}
        for r in payload["results"]:
            assert 0.0 <= r["rejection_rate"] <= 1.0
            assert r["std_err"] >= 0.0

    def test_csv_schema(self, capsys):
        code, out, _ = run_cli(
            capsys, "simulate-power", "--p", "4", "--n", "20", "--rho", "0.0",
            "--reps", "20", "--k", "2", "--methods", "bs", "--null",
            "--seed", "1", "--out", "csv")
        assert code == 0
        header = out.strip().splitlines()[0]
        assert header == "method,rho,p,n,rejection_rate,std_err,are_vs_composite"

    def test_requires_seed(self, capsys):
        code, _, _ = run_cli(
            capsys, "simulate-power", "--p", "4", "--n", "20", "--rho", "0.0")
        assert code == 2


class TestSpectrumCommand:
    def test_emits_three_columns_per_eigenvalue(self, capsys, data_csv):
        code, out, _ = run_cli(
            capsys, "spectrum", "--input", data_csv, "--header", "--out", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "eigenvalue,stein,lw"
        assert len(lines) == 1 + 12
        first = [float(v) for v in lines[1].split(",")]
        assert len(first) == 3 and all(np.isfinite(first))


class TestMpCommand:
    def test_grid_matches_closed_form(self, capsys):
        code, out, _ = run_cli(capsys, "mp", "--c", "0.25", "--points", "11")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "x,re,im,density"
        model = mp_edges(0.25)
        for line in lines[1:]:
            x, re, im, dens = (float(v) for v in line.split(","))
            assert model.lower <= x <= model.upper
            assert re == pytest.approx((1 - 0.25 - x) / (2 * 0.25 * x), rel=1e-9)
            assert dens == pytest.approx(im / np.pi, rel=1e-9)

    def test_bad_concentration(self, capsys):
        assert run_cli(capsys, "mp", "--c", "1.5")[0] == 1


class TestFixturesCommand:
    def test_generates_readable_csv(self, capsys, tmp_path):
        path = tmp_path / "fx.csv"
        code, out, _ = run_cli(
            capsys, "fixtures", "gen", "--days", "25", "--stations", "6",
            "--seed", "2", "--path", str(path))
        assert code == 0
        assert json.loads(out)["days"] == 25
        from hdmean import read_csv
        assert read_csv(path, has_header=True).shape == (25, 6)
