"""
Unit tests for the command-line interface
"""

import json

import pytest

from eulerboundary import __version__
from eulerboundary.cli import EXIT_ERROR, EXIT_FAILED, EXIT_OK, main
from eulerboundary.core.config import OUTPUT_DIR_ENV
from eulerboundary.storage.sqlite_backend import SQLiteRecordStore


@pytest.fixture
def run_cli(capsys):
    """Run the CLI and return (exit status, parsed JSON or raw text)"""

    def _run(*argv, parse=True):
        status = main(list(argv))
        out = capsys.readouterr().out
        return status, (json.loads(out) if parse and out else out)

    return _run


@pytest.fixture
def column_file(tmp_path):
    def _write(*values, name="column.txt"):
        path = tmp_path / name
        path.write_text("\n".join([f"rows={len(values)}"] + list(values)) + "\n", encoding="utf-8")
        return str(path)

    return _write


class TestTriangleCommand:
    def test_six_rows(self, run_cli):
        status, record = run_cli("triangle", "--rows", "6")
        assert status == EXIT_OK
        assert record["command"] == "triangle"
        assert record["version"] == __version__
        assert record["seed"] is None
        assert record["payload"]["rows"][-1] == [1, 57, 302, 302, 57, 1]

    def test_one_row(self, run_cli):
        _, record = run_cli("triangle", "--rows", "1")
        assert record["payload"]["rows"] == [[1]]

    def test_verify(self, run_cli):
        status, record = run_cli("triangle", "--verify", "--rows", "20", "--kappa", "10")
        assert status == EXIT_OK
        assert all(record["payload"]["checks"].values())

    def test_explicit_formula(self, run_cli):
        _, record = run_cli("triangle", "--rows", "5", "--formula", "explicit")
        assert record["payload"]["rows"][-1] == [1, 26, 66, 26, 1]

    def test_csv(self, run_cli):
        _, text = run_cli("--format", "csv", "triangle", "--rows", "3", parse=False)
        assert text.splitlines() == ["n,values", "1,1", "2,1 1", "3,1 4 1"]

    def test_usage_errors(self):
        with pytest.raises(SystemExit) as exc:
            main(["triangle", "--rows", "0"])
        assert exc.value.code == 2
        with pytest.raises(SystemExit) as exc:
            main(["triangle"])
        assert exc.value.code == 2

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert __version__ in capsys.readouterr().out


class TestBoundaryCommands:
    def test_half(self, run_cli):
        status, record = run_cli("boundary", "--theta", "half", "--rows", "4")
        rows = record["payload"]["rows"]["rows"]
        assert status == EXIT_OK
        assert rows[0] == ["1/1"]
        assert rows[3] == ["1/24"] * 4
        assert record["payload"]["theta_value"] == "1/2"

    def test_standard_order(self, run_cli):
        _, record = run_cli("boundary", "--theta", "upper:0", "--rows", "5")
        assert record["payload"]["rows"]["rows"][4] == ["1/1", "0/1", "0/1", "0/1", "0/1"]

    def test_checks(self, run_cli):
        status, record = run_cli("boundary", "--theta", "lower:2", "--rows", "6", "--check", "all", "--tilde")
        assert status == EXIT_OK
        assert set(record["payload"]["checks"]) == {"solution", "symmetry", "support", "unified", "parameter"}
        assert all(record["payload"]["checks"].values())
        assert "tilde" in record["payload"]

    def test_malformed_theta(self):
        with pytest.raises(SystemExit) as exc:
            main(["boundary", "--theta", "middle", "--rows", "3"])
        assert exc.value.code == 2

    def test_kappa_above_cap(self, capsys):
        status = main(["boundary", "--theta", "upper:65", "--rows", "3"])
        assert status == EXIT_ERROR
        assert "error:" in capsys.readouterr().err

    def test_truncated(self, run_cli):
        status, record = run_cli("truncated", "--N", "3", "--kappa", "1")
        assert status == EXIT_OK
        assert record["payload"]["rows"]["rows"][1] == ["1/2", "1/2"]
        assert record["payload"]["check"]["violations"] == []

    def test_martin(self, run_cli):
        status, record = run_cli("martin", "--schedule", "constant:0", "--cap", "10")
        assert status == EXIT_OK
        assert record["payload"]["converged_at"] == 4

    def test_martin_not_converged(self, run_cli):
        status, record = run_cli("martin", "--schedule", "constant:2", "--cap", "6", "--tolerance", "1/1000000")
        assert status == EXIT_FAILED
        assert record["ok"] is False

    def test_concentration(self, run_cli):
        status, record = run_cli("concentration", "--kappa", "2", "--nmax", "60")
        assert status == EXIT_OK
        assert record["payload"]["exceeds_threshold"] is True


class TestDecomposeCommand:
    """Test membership and decomposition of array files"""

    def test_inverse_factorial_column(self, run_cli, column_file):
        status, record = run_cli("decompose", "--input", column_file("1", "1/2", "1/6", "1/24"))
        payload = record["payload"]
        assert status == EXIT_OK
        assert payload["input"] == "left-column"
        assert payload["verdict"]["member"] is True
        weights = {w["theta"]: w["weight"] for w in payload["weights"]["weights"]}
        assert weights["half"] == "1/1"
        assert weights["upper:0"] == weights["lower:0"] == "0/1"

    def test_all_ones_column(self, run_cli, column_file):
        _, record = run_cli("decompose", "--input", column_file("1", "1", "1"))
        weights = {w["theta"]: w["weight"] for w in record["payload"]["weights"]["weights"]}
        assert weights["upper:0"] == "1/1"

    def test_synthesized_roundtrip(self, run_cli, tmp_path):
        target = tmp_path / "mixture.txt"
        status, _ = run_cli(
            "--out", str(target), "synthesize", "--weights", "upper:1=3/4,half=1/4", "--rows", "8", "--left-column",
            parse=False,
        )
        assert status == EXIT_OK
        assert target.read_text().splitlines()[:3] == ["rows=8", "1/1", "11/16"]
        _, record = run_cli("decompose", "--input", str(target))
        weights = {w["theta"]: w["weight"] for w in record["payload"]["weights"]["weights"]}
        assert weights["upper:1"] == "3/4"
        assert weights["half"] == "1/4"
        assert record["payload"]["weights"]["status"] == "exact"

    def test_limit_mode(self, run_cli, tmp_path):
        target = tmp_path / "wide.txt"
        run_cli("--out", str(target), "synthesize", "--weights", "upper:0=1/2,lower:0=1/2", "--rows", "12", parse=False)
        status, record = run_cli("decompose", "--input", str(target), "--mode", "limit", "--cut", "1")
        weights = {w["theta"]: w["weight"] for w in record["payload"]["weights"]["weights"]}
        assert status == EXIT_OK
        assert record["payload"]["input"] == "array"
        assert weights["upper:0"] == weights["lower:0"] == "1/2"

    def test_non_member(self, run_cli, column_file):
        path = column_file("1", "2")
        status, record = run_cli("decompose", "--input", path)
        assert status == EXIT_OK
        assert record["payload"]["verdict"]["member"] is False
        assert record["payload"]["weights"] is None
        status, _ = run_cli("--strict", "decompose", "--input", path)
        assert status == EXIT_FAILED

    def test_bad_file(self, tmp_path, capsys):
        path = tmp_path / "bad.txt"
        path.write_text("rows=3\n1\n1/2\n", encoding="utf-8")
        assert main(["decompose", "--input", str(path)]) == EXIT_ERROR
        assert "header announces 3 rows" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["decompose", "--input", str(tmp_path / "absent.txt")]) == EXIT_ERROR


class TestSampleCommands:
    """Test randomized commands"""

    def test_bucket(self, run_cli):
        status, record = run_cli("sample", "bucket", "--kappa", "1", "--n", "3", "--trials", "20000", "--seed", "7")
        assert status == EXIT_OK
        assert record["command"] == "sample bucket"
        assert record["seed"] == 7
        assert record["rng"]["algorithm"] == "PCG64"
        perms = {row["perm"]: row for row in record["payload"]["permutations"]}
        assert len(perms) == 6
        assert perms["321"]["count"] == 0
        assert perms["123"]["exact"] == "1/2"

    def test_same_seed_same_bytes(self, run_cli):
        argv = ("sample", "exchangeable", "--n", "3", "--trials", "5000", "--seed", "11")
        _, first = run_cli(*argv, parse=False)
        _, second = run_cli(*argv, parse=False)
        assert first == second

    def test_moments(self, run_cli):
        _, record = run_cli("sample", "moments", "--n", "10", "--trials", "20000", "--seed", "3")
        assert abs(float(record["payload"]["mean"]) - 4.5) < 0.05
        assert record["payload"]["exact_variance"] == "11/12"
        assert record["payload"]["stated_variance"] == "3/4"

    def test_lln_and_uniform_sum(self, run_cli):
        status, record = run_cli("sample", "lln", "--kappa", "0", "--nmax", "4", "--trials", "100", "--seed", "1")
        assert status == EXIT_OK
        assert record["payload"]["trajectory"][-1]["fraction"] == "1"
        status, record = run_cli("sample", "uniform-sum", "--n", "1", "--trials", "10", "--seed", "1")
        assert status == EXIT_OK
        assert record["payload"]["bins"][0]["count"] == 10

    def test_seed_generated_when_missing(self, run_cli):
        _, record = run_cli("chain", "run", "--start", "3,1")
        assert isinstance(record["seed"], int)

    def test_strict_requires_seed(self, capsys):
        assert main(["--strict", "sample", "moments", "--n", "5"]) == EXIT_ERROR
        assert "--seed" in capsys.readouterr().err


class TestChainCommands:
    def test_run(self, run_cli):
        status, record = run_cli("chain", "run", "--start", "2,0", "--seed", "1")
        assert status == EXIT_OK
        assert record["payload"]["path"] == ["(2,0)", "(1,0)"]

    def test_propagate(self, run_cli):
        _, record = run_cli("chain", "propagate", "--start", "3,1")
        assert record["payload"]["rows"]["2"] == ["1/2", "1/2"]
        assert record["payload"]["rows"]["1"] == ["1/1"]

    def test_couple(self, run_cli):
        status, record = run_cli("chain", "couple", "--N", "6", "--kappa-a", "1", "--kappa-b", "4", "--runs", "200", "--seed", "5")
        assert status == EXIT_OK
        assert record["payload"]["ordering_violations"] == 0

    def test_path(self, run_cli):
        status, record = run_cli("chain", "path", "--perm", "213")
        assert status == EXIT_OK
        assert record["payload"]["vertices"] == ["(1,0)", "(2,1)", "(3,1)"]
        assert record["payload"]["labels"] == [0, 1]
        _, record = run_cli("chain", "path", "--ks", "0,1,1", "--labels", "0,1")
        assert record["payload"]["perm"] == "213"

    def test_path_needs_one_input(self):
        assert main(["chain", "path"]) == EXIT_ERROR

    def test_monotonicity(self, run_cli):
        status, record = run_cli("chain", "monotonicity", "--N", "8")
        assert status == EXIT_OK
        assert record["payload"]["monotone"] is True


class TestOutputOptions:
    def test_output_dir_from_environment(self, run_cli, monkeypatch, tmp_path):
        monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
        status, text = run_cli("--out", "triangle.json", "triangle", "--rows", "3", parse=False)
        assert status == EXIT_OK
        assert text == ""
        assert json.loads((tmp_path / "triangle.json").read_text())["payload"]["rows"][-1] == [1, 4, 1]

    def test_record_archive(self, run_cli, tmp_path):
        db = str(tmp_path / "records.db")
        run_cli("--record", db, "triangle", "--rows", "3")
        run_cli("--record", db, "chain", "run", "--start", "4,2", "--seed", "9")
        with SQLiteRecordStore(db) as store:
            assert store.list_commands() == ["chain run", "triangle"]
            chain = store.query(command="chain run")
            assert len(chain) == 1
            assert chain[0]["seed"] == 9
            assert store.query(rows=3)[0]["command"] == "triangle"
