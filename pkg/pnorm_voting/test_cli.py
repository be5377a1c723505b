import json
import logging

import pytest

from pnorm_voting import cli
from pnorm_voting.config import MAX_COMMITTEES_ENV
from pnorm_voting.conftest import data_path


@pytest.fixture(autouse=True)
def restore_logging():
    """`main` reconfigures the root logger; undo that after each test."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_tally(capsys):
    code, out, _ = run(
        capsys, "tally", "--ballots", data_path("pairs.txt"), "--k", "2",
        "--method", "pnorm", "--p", "2", "--budget", "2",
    )
    assert code == 0
    assert "winner {A1,B1}" in out


def test_tally_json_with_seed_order(capsys):
    code, out, _ = run(
        capsys, "tally", "--ballots", data_path("pairs_ternary.txt"), "--k", "2",
        "--method", "minisum", "--format", "json", "--seed-order",
    )
    assert code == 0
    record = json.loads(out)
    assert record["winners"][0]["committee"] == ["A1", "B2"]
    assert any("A1 < A2 < B1 < B2" in note for note in record["notes"])


def test_sweep(capsys):
    code, out, _ = run(
        capsys, "sweep", "--ballots", data_path("popular_pair.txt"), "--k", "2",
        "--ps", "1,0.5,0.1,0.001", "--power-sum",
    )
    assert code == 0
    assert "1095.81*" in out
    assert "(power sum;" in out


def test_sweep_warns_on_near_tie(capsys):
    code, _, err = run(
        capsys, "sweep", "--ballots", data_path("pairs_ternary.txt"), "--k", "2", "--ps", "100",
    )
    assert code == 0
    assert "near tie" in err


def test_compare(capsys):
    code, out, _ = run(
        capsys, "compare", "--ballots", data_path("pairs.csv"), "--k", "2",
        "--methods", "minisum,pnorm@2,maxcover,greedy",
    )
    assert code == 0
    assert "methods disagree:" in out


def test_bad_input_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("1: A\nx: B\n", encoding="utf8")
    code, out, err = run(
        capsys, "tally", "--ballots", str(bad), "--k", "1", "--method", "minisum"
    )
    assert code == 2
    assert out == ""
    assert "line 2" in err


def test_missing_file_exit_code(capsys, tmp_path):
    code, _, err = run(
        capsys, "tally", "--ballots", str(tmp_path / "nope.txt"), "--k", "1",
        "--method", "minimax",
    )
    assert code == 2
    assert "cannot read ballots" in err


def test_invalid_k_exit_code(capsys):
    code, _, _ = run(
        capsys, "tally", "--ballots", data_path("pairs.txt"), "--k", "9",
        "--method", "minimax",
    )
    assert code == 2


def test_too_large_exit_code(capsys, monkeypatch):
    monkeypatch.setenv(MAX_COMMITTEES_ENV, "5")
    code, _, err = run(
        capsys, "tally", "--ballots", data_path("pairs.txt"), "--k", "2",
        "--method", "minimax",
    )
    assert code == 3
    assert "greedy" in err
    code, _, _ = run(
        capsys, "tally", "--ballots", data_path("pairs.txt"), "--k", "2",
        "--method", "greedy",
    )
    assert code == 0


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as error:
        cli.main(["tally", "--ballots", data_path("pairs.txt"), "--k", "2"])
    assert error.value.code == 2
    with pytest.raises(SystemExit):
        cli.main(["sweep", "--ballots", data_path("pairs.txt"), "--k", "2", "--ps", ""])
    code, _, _ = run(
        capsys, "sweep", "--ballots", data_path("pairs.txt"), "--k", "2", "--ps", "1,two",
    )
    assert code == 2


@pytest.mark.parametrize("fmt", ["json", "csv"])
@pytest.mark.parametrize(
    "argv",
    [
        ["tally", "--ballots", data_path("pairs_ternary.txt"), "--k", "2",
         "--method", "maxcover", "--scores"],
        ["sweep", "--ballots", data_path("pairs_ternary.txt"), "--k", "2",
         "--ps", "1,2,100,500", "--power-sum"],
    ],
)
def test_repeated_runs_are_byte_identical(capsys, argv, fmt):
    first = run(capsys, *argv, "--format", fmt)
    second = run(capsys, *argv, "--format", fmt)
    assert first[0] == 0
    assert first[1] == second[1]
