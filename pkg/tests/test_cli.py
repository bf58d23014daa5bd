import dataclasses
import json

import pytest

import ecokit.cli as cli
from ecokit.catalog import get_entry

FIB_TEXT = (
    "system fib { mode eco; axiom 1;\n"
    " rule k <= 1: (2) x 1;\n"
    " rule k >= 2: (1) x 1, (2) x 1; }\n"
)


def run(capsys, *argv):
    code = cli.run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCount:
    def test_csv_bytes(self, capsys):
        code, out, err = run(
            capsys, "count", "--system", "catalan", "-n", "5", "--format", "csv"
        )
        assert code == 0 and err == ""
        assert out == "n,total\n0,1\n1,2\n2,5\n3,14\n4,42\n5,132\n"

    def test_json_has_no_timing(self, capsys):
        code, out, _ = run(
            capsys, "count", "--system", "motzkin", "-n", "6", "--format", "json"
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["totals"] == [1, 1, 2, 4, 9, 21, 51]
        assert "seconds" not in doc["stats"]

    def test_cap_exceeded_is_partial(self, capsys):
        code, out, err = run(
            capsys, "count", "--system", "even_jumps", "-n", "40", "--cap", "500"
        )
        assert code == 1
        assert "label cap 500 exceeded" in err
        assert out.rstrip().endswith("29559718")


class TestSample:
    def test_length_zero_walk(self, capsys):
        code, out, _ = run(
            capsys, "sample", "--system", "motzkin", "-n", "0", "--seed", "7"
        )
        assert (code, out) == (0, "1\n")

    def test_seeded_runs_are_identical(self, capsys):
        argv = (
            "sample", "--system", "catalan", "-n", "9",
            "--count", "5", "--seed", "11", "--format", "json",
        )
        first = run(capsys, *argv)
        second = run(capsys, *argv)
        assert first == second
        assert len(json.loads(first[1])["walks"]) == 5


class TestClassify:
    def test_spec_file(self, capsys, tmp_path):
        path = tmp_path / "fib.eco"
        path.write_text(FIB_TEXT)
        code, out, _ = run(capsys, "classify", "--file", str(path))
        assert code == 0
        assert "finite-labels" in out
        assert "1/(1 - z - z^2)" in out

    def test_csv_not_offered(self, capsys):
        code, _, err = run(
            capsys, "classify", "--system", "catalan", "--format", "csv"
        )
        assert code == 2 and "error:" in err


class TestGF:
    def test_interval_route_required(self, capsys):
        code, _, err = run(capsys, "gf", "--system", "bell")
        assert code == 1
        assert "algebraic route does not apply" in err

    def test_kernel_report(self, capsys):
        code, out, _ = run(
            capsys, "gf", "--system", "schroeder", "--format", "json"
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["F1"][:5] == [1, 3, 11, 45, 197]
        assert doc["closed_form"]["match"] is True


class TestGuess:
    def test_rational_system(self, capsys):
        code, out, _ = run(capsys, "guess", "--system", "fibonacci")
        assert code == 0
        assert "1/(1 - z - z^2)" in out

    def test_algebraic_system(self, capsys):
        code, out, _ = run(capsys, "guess", "--system", "ternary")
        assert code == 0
        assert "F^3" in out


class TestCatalog:
    def test_verify_subset(self, capsys):
        code, out, _ = run(
            capsys, "catalog", "fibonacci", "catalan", "--verify"
        )
        assert code == 0
        assert "2/2 entries pass" in out

    def test_verify_flags_bad_golden(self, capsys, monkeypatch):
        entry = get_entry("fibonacci")
        bad = dataclasses.replace(entry, golden=entry.golden[:-1] + (999,))
        monkeypatch.setattr(cli, "ENTRIES", (bad,))
        code, out, _ = run(capsys, "catalog", "--verify")
        assert code == 1
        assert "FAIL" in out

    def test_listing(self, capsys):
        code, out, _ = run(capsys, "catalog")
        assert code == 0
        assert "catalan" in out and "bessel" in out


class TestErrors:
    def test_unknown_system(self, capsys):
        code, _, err = run(capsys, "count", "--system", "nope", "-n", "3")
        assert code == 2 and "unknown system" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "count", "--file", str(tmp_path / "gone.eco"), "-n", "3"
        )
        assert code == 2 and "error:" in err

    def test_no_subcommand_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            cli.run([])
        assert exc.value.code == 2


class TestBench:
    def test_count_benchmark(self, capsys):
        code, out, _ = run(capsys, "bench", "--task", "count",
                           "--system", "motzkin", "-n", "40")
        assert code == 0
        assert "totals agree" in out
