import io
import json

import pytest

from coverpack.cli import EXIT_INFEASIBLE, EXIT_OK, EXIT_USAGE, main
from coverpack.model import parse_instance, serialize_instance


GAP = '{"A": [["99/100", 1]], "a": [1], "c": [0, 1], "d": [1, null]}'


def run(argv, stdin: str | None = None, monkeypatch=None, capsys=None):
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def write_gap(tmp_path, text=GAP):
    path = tmp_path / "inst.json"
    path.write_text(text)
    return str(path)


class TestSolve:
    def test_strict_on_gap(self, tmp_path, capsys, monkeypatch):
        code, out, _ = run(
            ["solve", "--mode", "strict", "--epsilon", "1",
             write_gap(tmp_path), "--format", "machine"],
            capsys=capsys,
        )
        assert code == EXIT_OK
        rep = json.loads(out)
        assert rep["cost"] == 1
        assert rep["guarantees_ok"] is True

    def test_lp_mode_reports_delta(self, tmp_path, capsys, monkeypatch):
        code, out, _ = run(
            ["solve", "--mode", "lp", write_gap(tmp_path), "--format", "machine"],
            capsys=capsys,
        )
        assert code == EXIT_OK
        assert json.loads(out)["fopt"] == "1/100"

    def test_gen_piped_to_lp_kc(self, capsys, monkeypatch):
        code, doc, _ = run(["gen", "--family", "knapsack-gap", "--delta", "1/10"], capsys=capsys)
        assert code == EXIT_OK
        code, out, _ = run(
            ["solve", "--mode", "lp-kc", "--lambda", "2", "-", "--format", "machine"],
            stdin=doc,
            monkeypatch=monkeypatch,
            capsys=capsys,
        )
        assert code == EXIT_OK
        assert json.loads(out)["fopt_kc"] == 1

    def test_bicriteria_and_oracle_modes(self, tmp_path, capsys, monkeypatch):
        path = write_gap(tmp_path)
        for mode in ("bicriteria", "oracle"):
            code, out, _ = run(
                ["solve", "--mode", mode, path, "--format", "machine"], capsys=capsys
            )
            assert code == EXIT_OK

    def test_infeasible_exits_one(self, tmp_path, capsys, monkeypatch):
        doc = '{"A": [[1]], "a": [2], "c": [1], "d": [1]}'
        code, _, err = run(
            ["solve", "--mode", "lp", write_gap(tmp_path, doc)], capsys=capsys
        )
        assert code == EXIT_INFEASIBLE
        assert "infeasible" in err

    def test_malformed_document_exits_two(self, tmp_path, capsys, monkeypatch):
        code, _, err = run(
            ["solve", write_gap(tmp_path, '{"A": [[1], "a"')], capsys=capsys
        )
        assert code == EXIT_USAGE
        assert "error" in err

    def test_unknown_flag_exits_two(self, capsys, monkeypatch):
        code, _, _ = run(["solve", "--no-such-flag"], capsys=capsys)
        assert code == EXIT_USAGE

    def test_epsilon_validated(self, tmp_path, capsys, monkeypatch):
        code, _, err = run(
            ["solve", "--epsilon", "3", write_gap(tmp_path)], capsys=capsys
        )
        assert code == EXIT_USAGE
        assert "epsilon" in err


class TestGen:
    def test_round_trip(self, capsys, monkeypatch):
        code, doc, _ = run(
            ["gen", "--family", "random-cpip", "--m", "3", "--n", "4", "--seed", "7"],
            capsys=capsys,
        )
        assert code == EXIT_OK
        inst = parse_instance(doc)
        assert parse_instance(serialize_instance(inst)) == inst

    def test_gap_needs_delta(self, capsys, monkeypatch):
        code, _, err = run(["gen", "--family", "knapsack-gap"], capsys=capsys)
        assert code == EXIT_USAGE


class TestRound:
    @pytest.mark.parametrize("op", ["randomized", "derandomized", "granular", "bicriteria"])
    def test_ops_run(self, op, tmp_path, capsys, monkeypatch):
        code, out, _ = run(
            ["round", "--op", op, write_gap(tmp_path), "--format", "machine"],
            capsys=capsys,
        )
        assert code == EXIT_OK
        rep = json.loads(out)
        assert rep["mode"] == f"round-{op}"
        if op == "randomized":
            assert rep["seed"] == 0
            assert rep["rng"] == "python-random-mt19937"


class TestOracleAndCheck:
    def test_oracle_subcommand(self, tmp_path, capsys, monkeypatch):
        code, out, _ = run(
            ["oracle", write_gap(tmp_path), "--format", "machine"], capsys=capsys
        )
        assert code == EXIT_OK
        rep = json.loads(out)
        assert rep["opt"] == 1
        assert rep["x"] == [0, 1]

    def test_check_good_and_bad(self, tmp_path, capsys, monkeypatch):
        inst_path = write_gap(tmp_path)
        good = tmp_path / "good.json"
        good.write_text('{"x": [1, 1]}')
        code, _, _ = run(
            ["check", "--solution", str(good), inst_path], capsys=capsys
        )
        assert code == EXIT_OK
        bad = tmp_path / "bad.json"
        bad.write_text('{"x": [2, 1]}')  # violates d_1 = 1
        code, out, _ = run(
            ["check", "--solution", str(bad), inst_path, "--format", "machine"],
            capsys=capsys,
        )
        assert code == EXIT_INFEASIBLE
        assert json.loads(out)["status"] == "VIOLATED"


class TestBench:
    def test_text_and_machine(self, capsys, monkeypatch):
        code, text, _ = run(
            ["bench", "--families", "knapsack-gap", "--deltas", "1/2,1/10",
             "--no-timing"],
            capsys=capsys,
        )
        assert code == EXIT_OK
        assert "strict/opt" in text
        code, lines, _ = run(
            ["bench", "--families", "knapsack-gap", "--deltas", "1/2",
             "--no-timing", "--format", "machine"],
            capsys=capsys,
        )
        assert code == EXIT_OK
        rows = [json.loads(line) for line in lines.strip().splitlines()]
        assert rows[0]["strict_cost"] == 1
