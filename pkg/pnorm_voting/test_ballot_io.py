import csv
import io
import json
import math

import pytest

from pnorm_voting import ballot_io, solvers
from pnorm_voting.conftest import data_path
from pnorm_voting.core import (
    DuplicateCandidateHeader,
    Mode,
    ModeViolation,
    ParseError,
    UnknownCandidate,
)


def parse_text(text, **kwargs):
    return ballot_io.parse_ballots(io.StringIO(text), "text", **kwargs)


def test_formats_agree(pairs):
    from_csv = ballot_io.parse_ballots(data_path("pairs.csv"), "csv", opinion_budget=2)
    from_jsonl = ballot_io.parse_ballots(data_path("pairs.jsonl"), "jsonl", opinion_budget=2)
    assert from_csv == pairs
    assert from_jsonl == pairs


def test_csv_without_weights(small):
    assert small.roster.names == ("A", "B", "C", "D", "E")
    assert [b.weight for b in small.ballots] == [1, 1, 1, 1]
    assert small.mode is Mode.BINARY


def test_text_directives(pairs_ternary):
    assert pairs_ternary.ballots[0].opinions == (1, 0, -1, 0)
    assert pairs_ternary.ballots[0].weight == 500
    profile = parse_text("# header\n\n3: B +A\n2: -C A\n")
    assert profile.roster.names == ("B", "A", "C")
    assert profile.mode is Mode.TERNARY
    assert [b.opinions for b in profile.ballots] == [(1, 1, 0), (0, 1, -1)]


def test_text_merges_repeated_lines():
    profile = parse_text("2: A B\n1: C\n3: B A\n")
    assert [(b.opinions, b.weight) for b in profile.ballots] == [
        ((1, 1, 0), 5), ((0, 0, 1), 1)
    ]


def test_declared_roster_keeps_unmentioned_candidates():
    profile = parse_text("candidates: A B C D\n1: A\n")
    assert profile.n == 4
    assert profile.ballots[0].opinions == (1, 0, 0, 0)


def test_mode_override():
    with pytest.raises(ModeViolation):
        parse_text("1: A -B\n", mode="binary")
    assert parse_text("1: A B\n", mode="ternary").mode is Mode.TERNARY


@pytest.mark.parametrize(
    "text, line",
    [
        ("1: A\nx: B\n", 2),
        ("1 A\n", 1),
        ("1: A A\n", 1),
        ("1: A\ncandidates: A B\n", 2),
        ("candidates:\n1: A\n", 1),
    ],
)
def test_text_errors(text, line):
    with pytest.raises(ParseError) as error:
        parse_text(text)
    assert error.value.line_number == line
    assert str(error.value).startswith(f"line {line}: ")


def test_unknown_and_duplicate_candidates():
    with pytest.raises(UnknownCandidate):
        parse_text("candidates: A B\n1: A C\n")
    with pytest.raises(DuplicateCandidateHeader):
        parse_text("candidates: A B A\n1: A\n")
    with pytest.raises(DuplicateCandidateHeader):
        ballot_io.parse_ballots(io.StringIO("A,B,A\n1,0,0\n"), "csv")
    with pytest.raises(UnknownCandidate):
        ballot_io.parse_ballots(
            io.StringIO('{"candidates": ["A"]}\n{"opinions": {"B": 1}}\n'), "jsonl"
        )


def test_csv_errors():
    with pytest.raises(ParseError) as error:
        ballot_io.parse_ballots(io.StringIO("A,B\n1,0\n1\n"), "csv")
    assert error.value.line_number == 3
    with pytest.raises(ParseError):
        ballot_io.parse_ballots(io.StringIO("A,B\n1,x\n"), "csv")
    with pytest.raises(ParseError):
        ballot_io.parse_ballots(io.StringIO(""), "csv")


def test_jsonl_errors():
    with pytest.raises(ParseError) as error:
        ballot_io.parse_ballots(io.StringIO('{"opinions": {"A": 1}}\n{oops\n'), "jsonl")
    assert error.value.line_number == 2
    with pytest.raises(ParseError):
        ballot_io.parse_ballots(io.StringIO('{"weight": "2", "opinions": {"A": 1}}\n'), "jsonl")


def test_no_ballots():
    with pytest.raises(ParseError):
        parse_text("# nothing here\n")
    with pytest.raises(ParseError):
        parse_text("candidates: A B\n")


def test_detect_format():
    assert ballot_io.detect_format("x.csv") == "csv"
    assert ballot_io.detect_format("x.JSONL") == "jsonl"
    assert ballot_io.detect_format("x.txt") == "text"


@pytest.mark.parametrize("fmt", ballot_io.BALLOT_FORMATS)
@pytest.mark.parametrize("name", ["small", "pairs", "popular_pair", "pairs_ternary"])
def test_write_profile_reads_back(request, name, fmt):
    profile = request.getfixturevalue(name)
    text = ballot_io.write_profile(profile, fmt)
    parsed = ballot_io.parse_ballots(
        io.StringIO(text), fmt, profile.mode, profile.opinion_budget
    )
    assert parsed == profile


def test_write_profile_text(pairs_ternary):
    lines = ballot_io.write_profile(pairs_ternary, "text").splitlines()
    assert lines[0] == "candidates: A1 A2 B1 B2"
    assert lines[1] == "500: A1 -B1"


def test_format_histogram(pairs):
    result = solvers.elect_exact(pairs, 2, solvers.FinitePNorm(1))
    assert ballot_io.format_histogram(result.histograms[0]) == "d0=500 d2=150 d4=350"


def test_result_table(pairs):
    result = solvers.elect(pairs, 2, "pnorm", 2, scores=True)
    text = ballot_io.write_result(result)
    assert "method: pnorm@2    voters: 1000" in text
    assert "winner {A1,B1}    score 61.97    coverage 980/1000" in text
    assert "{A1,B1}  61.97*" in text
    assert "{A1,A2}  78.74 " in text


def test_tie_table(pairs):
    text = ballot_io.write_result(solvers.elect(pairs, 2, "minimax"))
    assert "TIE between 6 committees" in text


def test_result_json(pairs):
    record = json.loads(ballot_io.write_result(solvers.elect(pairs, 2, "greedy"), "json"))
    assert record["method"] == "greedy"
    assert record["winners"][0]["committee"] == ["A1", "B1"]
    assert record["winners"][0]["histogram"] == {"0": 100, "2": 880, "4": 20}
    assert record["winners"][0]["coverage"] == 980
    assert record["tie_flag"] is False
    assert len(record["notes"]) == 2


def test_matrix_outputs(pairs):
    matrix = solvers.sweep(pairs, 2, [1, 2])
    table = ballot_io.write_result(matrix)
    assert "p=1" in table.splitlines()[0]
    assert "1700.00*" in table
    assert "61.97*" in table
    rows = list(csv.reader(io.StringIO(ballot_io.write_result(matrix, "csv"))))
    assert rows[0] == [
        "record", "committee", "p", "value", "log10_value", "minimizer", "message"
    ]
    cells = [r for r in rows if r[0] == "cell"]
    assert len(cells) == 12
    assert float(cells[0][3]) == pytest.approx(1700)
    record = json.loads(ballot_io.write_result(matrix, "json"))
    assert record["minimizers"] == [[["A1", "A2"]], [["A1", "B1"]]]


def test_comparison_outputs(pairs):
    comparison = solvers.compare_methods(pairs, 2, ["minisum", "maxcover"])
    table = ballot_io.write_result(comparison)
    assert "methods disagree:" in table
    assert "  {A1,A2}: minisum" in table
    record = json.loads(ballot_io.write_result(comparison, "json"))
    assert record["agreement"] is False
    assert [r["method"] for r in record["results"]] == ["minisum", "maxcover"]
    rows = list(csv.reader(io.StringIO(ballot_io.write_result(comparison, "csv"))))
    assert [r[1] for r in rows if r[0] == "winner"] == ["minisum", "maxcover"]


def test_power_sums_past_float_range(pairs_ternary):
    """6^500 overflows a float; outputs fall back to the log10 value."""
    matrix = solvers.sweep(pairs_ternary, 2, [500], power_sum=True)
    text = ballot_io.write_result(matrix, "json")
    assert "Infinity" not in text
    record = json.loads(text)
    first = record["rows"][0]
    assert first["committee"] == ["A1", "A2"]
    assert first["values"] == [None]
    assert first["log10_values"][0] == pytest.approx(391.6197, abs=1e-3)
    rows = list(csv.reader(io.StringIO(ballot_io.write_result(matrix, "csv"))))
    cell = rows[1]
    assert cell[3].startswith("4.16") and cell[3].endswith("e+391")
    assert float(cell[4]) == pytest.approx(391.6197, abs=1e-3)
    assert "e+391" in ballot_io.write_result(matrix)


def test_power_sum_log10_alongside_values(popular_pair):
    matrix = solvers.sweep(popular_pair, 2, [1], power_sum=True)
    record = json.loads(ballot_io.write_result(matrix, "json"))
    assert record["rows"][0]["values"] == [pytest.approx(1800)]
    assert record["rows"][0]["log10_values"] == [pytest.approx(math.log10(1800))]
    assert "log10_values" not in json.loads(
        ballot_io.write_result(solvers.sweep(popular_pair, 2, [1]), "json")
    )["rows"][0]
