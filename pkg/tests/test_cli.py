"""
Tests for the satpart command line.
"""
import json

import pytest

from satpart.cli.commands import EXIT_OK, EXIT_RESOURCE, EXIT_USAGE, EXIT_VERIFICATION, main
from satpart.formula.dimacs import parse_dimacs


def run_json(capsys, argv):
    """Run a command with --json and return (exit code, parsed document)."""
    code = main(argv + ["--json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


@pytest.fixture(scope="module")
def toy_cnf(tmp_path_factory):
    """Bivium instance on disk with six free starting variables."""
    path = tmp_path_factory.mktemp("cli") / "toy.cnf"
    code = main([
        "encode", "--cipher", "bivium", "--len", "40", "--seed", "3",
        "--weaken", "171", "--extend", "--out", str(path),
    ])
    assert code == EXIT_OK
    return path


class TestUsage:
    """Tests for argument handling."""

    def test_no_command(self, capsys):
        """A bare invocation is a usage error."""
        assert main([]) == EXIT_USAGE
        assert "satpart: error:" in capsys.readouterr().err

    def test_unknown_flag(self, capsys):
        """Unknown flags are usage errors, not SystemExit."""
        assert main(["estimate", "--bogus"]) == EXIT_USAGE

    def test_invalid_config_value(self, capsys):
        """Out-of-range flags fail config validation."""
        assert main(["estimate", "--workers", "0"]) == EXIT_USAGE
        assert "workers" in capsys.readouterr().err

    def test_missing_cnf_reported_as_json(self, capsys):
        """Command errors are rendered as a JSON error document."""
        code, document = run_json(capsys, ["estimate"])
        assert code == EXIT_USAGE
        assert document["command"] == "estimate"
        assert document["error"]["type"] == "UsageError"


class TestEncode:
    """Tests for the encode command."""

    def test_encode_to_stdout(self, capsys):
        """Without --out the DIMACS text goes to stdout with its meta comments."""
        assert main(["encode", "--cipher", "grain", "--len", "16", "--seed", "1"]) == EXIT_OK
        cnf = parse_dimacs(capsys.readouterr().out)
        assert any("cipher=grain" in comment for comment in cnf.comments)
        assert not any("unsafe_witness" in comment for comment in cnf.comments)

    def test_json_needs_out(self, capsys):
        """--json cannot share stdout with the DIMACS text."""
        code, document = run_json(capsys, ["encode", "--cipher", "grain", "--len", "16"])
        assert code == EXIT_USAGE
        assert document["error"]["type"] == "UsageError"

    def test_encode_summary(self, capsys, tmp_path):
        """The JSON summary describes the written instance."""
        out = tmp_path / "toy.cnf"
        code, document = run_json(capsys, [
            "encode", "--cipher", "bivium", "--len", "40", "--weaken", "171", "--extend", "--out", str(out),
        ])
        assert code == EXIT_OK
        result = document["result"]
        assert result["free_starting_vars"] == 6
        assert result["weakened_K"] == 171 and result["extended"]
        assert result["starting_vars"] == "1-177"
        assert parse_dimacs(out.read_text()).clause_count == result["clauses"]

    def test_weakening_error(self, capsys, tmp_path):
        """Weakening past the second register without --extend is a usage error."""
        out = tmp_path / "bad.cnf"
        assert main(["encode", "--cipher", "bivium", "--len", "40", "--weaken", "100", "--out", str(out)]) == EXIT_USAGE


@pytest.mark.integration
class TestPipeline:
    """End-to-end runs over a small weakened instance."""

    def test_estimate(self, capsys, toy_cnf):
        """The estimate covers the free starting variables by default."""
        code, document = run_json(capsys, ["estimate", "--cnf", str(toy_cnf), "-n", "8", "--seed", "5"])
        assert code == EXIT_OK
        result = document["result"]
        assert result["d"] == 6
        assert result["vars"] == "1-6"
        assert result["n"] == 8
        assert result["f_value"] >= 0

    def test_estimate_text(self, capsys, toy_cnf):
        """Text output reports F and its interval."""
        assert main(["estimate", "--cnf", str(toy_cnf), "-n", "4", "--vars", "1-3"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith("F = ")
        assert "CI(0.95, one_sided)" in out

    def test_optimize(self, capsys, toy_cnf, tmp_path):
        """A bounded search returns its best set and writes a trace journal."""
        trace = tmp_path / "trace.jsonl"
        code, document = run_json(capsys, [
            "optimize", "--cnf", str(toy_cnf), "--vars", "1-4", "-n", "4",
            "--max-evaluations", "3", "--journal", str(trace),
        ])
        assert code == EXIT_OK
        assert document["result"]["evaluations"] <= 3
        assert trace.exists()

    def test_solve_and_verify(self, capsys, toy_cnf, tmp_path):
        """Solving finds a verified model which verify accepts."""
        models = tmp_path / "models.txt"
        journal = tmp_path / "solve.jsonl"
        code, document = run_json(capsys, [
            "solve", "--cnf", str(toy_cnf), "--models-out", str(models), "--journal", str(journal),
        ])
        assert code == EXIT_OK
        assert document["result"]["verified_models"] >= 1
        assert document["result"]["total"] == 64

        assert main(["verify", "--cnf", str(toy_cnf), "--model", str(models), "--journal", str(journal)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "PASS model" in out
        assert "PASS keystream" in out
        assert "PASS journal" in out

    def test_tampered_journal(self, capsys, toy_cnf, tmp_path):
        """A journal with a broken checksum fails verification."""
        journal = tmp_path / "solve.jsonl"
        assert main(["solve", "--cnf", str(toy_cnf), "--journal", str(journal), "--json"]) == EXIT_OK
        capsys.readouterr()
        lines = journal.read_text().splitlines()
        record = json.loads(lines[0])
        record["checksum"] = "0" * 16
        lines[0] = json.dumps(record)
        journal.write_text("\n".join(lines) + "\n")

        code, document = run_json(capsys, ["verify", "--journal", str(journal)])
        assert code == EXIT_VERIFICATION
        check = document["result"]["checks"][0]
        assert check["name"] == "journal" and not check["ok"]
        assert check["line"] == 1

    def test_wrong_model_fails(self, capsys, toy_cnf, tmp_path):
        """An all-false model falsifies the instance."""
        model = tmp_path / "zero.txt"
        model.write_text("v 0\n")
        code, document = run_json(capsys, ["verify", "--cnf", str(toy_cnf), "--model", str(model)])
        assert code == EXIT_VERIFICATION
        assert not document["result"]["ok"]


class TestVerify:
    """Tests for the standalone verify checks."""

    def test_oracle_trials(self, capsys):
        """The encoder cross-check runs without an instance."""
        code, document = run_json(capsys, ["verify", "--oracle-trials", "5", "--cipher", "grain", "--len", "16"])
        assert code == EXIT_OK
        assert document["result"]["checks"][0]["name"] == "encoder"

    def test_no_checks(self, capsys):
        """verify without a check is a usage error."""
        assert main(["verify"]) == EXIT_USAGE


class TestSolveLimits:
    """Tests for the enumeration cap."""

    def test_cap_exceeded(self, capsys, tmp_path):
        """A family larger than the cap is a resource error."""
        path = tmp_path / "a51.cnf"
        assert main(["encode", "--cipher", "a51", "--len", "64", "--out", str(path)]) == EXIT_OK
        code, document = run_json(capsys, ["solve", "--cnf", str(path), "--enumeration-cap", "10"])
        assert code == EXIT_RESOURCE
        assert document["error"]["type"] == "EnumerationCapExceeded"
