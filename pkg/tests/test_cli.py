import csv
import json

import numpy as np
import pytest

from amgpoly.cli import (
    EXIT_CONFIG,
    EXIT_OK,
    ConfigError,
    build_problem,
    main,
    parse_config,
)
from amgpoly.sparse import write_matrix_market

from conftest import tridiag


class TestConfigParsing:
    def test_defaults_without_file(self):
        cfg = parse_config(None, [])
        assert cfg["problem"] == "poisson3d"
        assert cfg["smoother"] == "opt_cheb1"

    def test_file_and_overrides(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text("# comment\nproblem = aniso2d\nm = 16\nepsilon = 100\n")
        cfg = parse_config(str(p), ["m=32"])
        assert cfg["problem"] == "aniso2d"
        assert cfg["m"] == "32"

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_config(None, ["nonsense=1"])

    def test_malformed_line_rejected(self, tmp_path):
        p = tmp_path / "bad.cfg"
        p.write_text("this is not a key value pair\n")
        with pytest.raises(ConfigError):
            parse_config(str(p), [])

    def test_build_problem_dispatch(self):
        A, b = build_problem(parse_config(None, ["problem=poisson3d", "m=3"]))
        assert A.nrows == 27
        A, b = build_problem(parse_config(None, ["problem=spectral", "n=8"]))
        assert A.nrows == 8


class TestExitCodes:
    def test_config_error_is_2(self, capsys):
        assert main(["solve", "--override", "bogus=1"]) == EXIT_CONFIG

    def test_bad_kmax_is_2(self, capsys):
        assert main(["optimize", "--kmax", "99"]) == EXIT_CONFIG

    def test_success_is_0(self, tmp_path, capsys):
        out = tmp_path / "t.csv"
        assert main(["optimize", "--kmax", "2", "-o", str(out)]) == EXIT_OK


class TestOptimizeCommand:
    def test_kmax_zero_header_only(self, tmp_path):
        out = tmp_path / "t.csv"
        main(["optimize", "--kmax", "0", "-o", str(out)])
        lines = out.read_text().splitlines()
        assert len(lines) == 1
        assert lines[0].startswith("k,a_star,lambda_k")

    def test_reference_digits(self, tmp_path):
        out = tmp_path / "t.csv"
        main(["optimize", "--kmax", "8", "-o", str(out)])
        rows = list(csv.DictReader(out.open()))
        assert len(rows) == 8
        assert float(rows[0]["a_star"]) == pytest.approx(1.0 / 3.0, abs=1e-12)
        assert float(rows[3]["a_star"]) == pytest.approx(0.0820780659590383, abs=1e-12)

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["optimize", "--kmax", "6", "-o", str(a)])
        main(["optimize", "--kmax", "6", "-o", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestBoundsCommand:
    def test_k4_row_and_crossover(self, tmp_path):
        out = tmp_path / "b.csv"
        main(["bounds", "--kmax", "6", "-o", str(out)])
        rows = {int(r["k"]): r for r in csv.DictReader(out.open())}
        assert float(rows[4]["gamma_cheb4"]) == pytest.approx(0.0375)
        assert float(rows[4]["lambda_1st"]) == pytest.approx(
            0.0364585625794908, rel=1e-9
        )
        assert float(rows[4]["gamma_opt4"]) == pytest.approx(
            0.0310912041257632, rel=2e-2
        )
        assert rows[1]["crossover"] == "1"
        # strict crossover holds through k=4; at k=5 the two series are within
        # one part in a hundred of each other and the first kind is above
        assert [rows[k]["crossover"] for k in range(1, 5)] == ["1"] * 4

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["bounds", "--kmax", "5", "-o", str(a)])
        main(["bounds", "--kmax", "5", "-o", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestSolveCommand:
    def test_deterministic_report(self, tmp_path, capsys):
        args = [
            "solve",
            "--override", "m=6",
            "--override", "coarsening=pairwise_matching",
        ]
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(args + ["-o", str(a)]) == EXIT_OK
        assert main(args + ["-o", str(b)]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()
        report = json.loads(a.read_text())
        assert report["solve"]["converged"] is True
        assert report["hierarchy"]["levels"][0]["size"] == 216

    def test_itmax_one_not_converged(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        main(["solve", "--override", "m=8", "--override", "itmax=1", "-o", str(out)])
        report = json.loads(out.read_text())
        assert report["solve"]["converged"] is False
        assert report["solve"]["iterations"] == 1

    def test_smoother_ordering_same_hierarchy(self, tmp_path, capsys):
        iters = {}
        for fam in ("opt_cheb1", "l1_jacobi"):
            out = tmp_path / f"{fam}.json"
            main([
                "solve",
                "--override", "m=8",
                "--override", f"smoother={fam}",
                "--override", "degree=4",
                "-o", str(out),
            ])
            iters[fam] = json.loads(out.read_text())["solve"]["iterations"]
        assert iters["opt_cheb1"] <= iters["l1_jacobi"]

    def test_spectral_problem_smoother_only(self, tmp_path, capsys):
        out = tmp_path / "s.json"
        assert main([
            "solve",
            "--override", "problem=spectral",
            "--override", "n=32",
            "--override", "tol=1e-5",
            "-o", str(out),
        ]) == EXIT_OK
        report = json.loads(out.read_text())
        assert report["solve"]["converged"] is True
        assert "hierarchy" not in report


class TestSpectrumGridCommand:
    def test_small_grid(self, tmp_path):
        out = tmp_path / "g.csv"
        assert main([
            "spectrum-grid", "--sizes", "16,32", "--degrees", "1,2", "-o", str(out)
        ]) == EXIT_OK
        rows = list(csv.DictReader(out.open()))
        assert len(rows) == 3 * 2 * 2
        for r in rows:
            assert int(r["diff"]) == int(r["iters_cheb1"]) - int(r["iters_cheb4"])

    def test_rejects_odd_sizes(self, capsys):
        assert main(["spectrum-grid", "--sizes", "15", "--degrees", "1"]) == EXIT_CONFIG

    def test_workers_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("AMGPOLY_THREADS", "2")
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        main(["spectrum-grid", "--sizes", "16", "--degrees", "1,2,3", "-o", str(a)])
        monkeypatch.setenv("AMGPOLY_THREADS", "1")
        main(["spectrum-grid", "--sizes", "16", "--degrees", "1,2,3", "-o", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestImportCommand:
    def test_summary(self, tmp_path, capsys):
        p = tmp_path / "m.mtx"
        write_matrix_market(p, tridiag(6), symmetric=True)
        assert main(["import", "--matrix", str(p)]) == EXIT_OK
        info = json.loads(capsys.readouterr().out)
        assert info["nrows"] == 6
        assert info["nnz"] == 16
        assert info["symmetric"] is True
        assert info["positive_diagonal"] is True

    def test_missing_file_is_config_error(self, capsys):
        assert main(["import", "--matrix", "/nonexistent.mtx"]) == EXIT_CONFIG
