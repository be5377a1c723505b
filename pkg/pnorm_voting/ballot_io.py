"""Reading ballot files and writing results.

Three ballot formats are understood, all UTF-8:

- `csv`: a header row of candidate names, optionally led by a `weight`
  column, then one row per ballot with cells in {-1, 0, 1}. Without a weight
  column every row counts once.

      weight,A1,A2,B1,B2
      500,1,0,-1,0

- `text`: one ballot group per line, `<weight>: <token> <token> ...`, where
  `Name` or `+Name` approves and `-Name` rejects. An optional
  `candidates: A B C` line fixes the roster and its order; otherwise names are
  taken in order of first appearance. Blank lines and `#` comments are skipped.

      candidates: A1 A2 B1 B2
      500: +A1 -B1
      100: A1 B1

- `jsonl`: one JSON object per line, `{"weight": 500, "opinions": {"A1": 1,
  "B1": -1}}`. A leading `{"candidates": [...]}` object fixes the roster.

Candidate names may not contain whitespace or ":" and may not start with "+"
or "-".
"""
import csv
import io
import json
import logging
import math
import os
from typing import Any, Dict, Iterable, List, Optional, TextIO, Tuple, Union

from pnorm_voting.core import (
    BallotProfile,
    CandidateRoster,
    Committee,
    DistanceHistogram,
    DuplicateCandidateHeader,
    ElectionError,
    ElectionResult,
    MethodComparison,
    Mode,
    ModeLike,
    ParseError,
    ScoreMatrix,
    UnknownCandidate,
    as_mode,
    build_profile,
)

logger = logging.getLogger(__name__)

BALLOT_FORMATS = ["csv", "text", "jsonl"]
RESULT_FORMATS = ["table", "csv", "json"]

Source = Union[str, os.PathLike, TextIO]
Vote = Tuple[Dict[str, int], int]


def detect_format(path: Union[str, os.PathLike]) -> str:
    """Ballot format from a file extension; anything unknown is `text`."""
    extension = os.path.splitext(os.fspath(path))[1].lower()
    if extension == ".csv":
        return "csv"
    if extension in (".jsonl", ".json"):
        return "jsonl"
    return "text"


def _read(source: Source) -> str:
    if hasattr(source, "read"):
        return source.read()
    with open(source, "r", encoding="utf8") as f:
        return f.read()


def _check_name(name: str, line_number: int) -> str:
    if not name or name[0] in "+-" or ":" in name or any(c.isspace() for c in name):
        raise ParseError(f"invalid candidate name {name!r}", line_number)
    return name


class _RosterBuilder:
    """Collects candidate names, either declared up front or as they appear."""

    def __init__(self):
        self.names: List[str] = []
        self.declared = False

    def declare(self, names: Iterable[str], line_number: int) -> None:
        if self.declared or self.names:
            raise ParseError("the candidate list must come first", line_number)
        for name in names:
            _check_name(name, line_number)
            if name in self.names:
                raise DuplicateCandidateHeader(
                    f"line {line_number}: candidate {name!r} declared twice"
                )
            self.names.append(name)
        if not self.names:
            raise ParseError("empty candidate list", line_number)
        self.declared = True

    def see(self, name: str, line_number: int) -> None:
        _check_name(name, line_number)
        if name in self.names:
            return
        if self.declared:
            raise UnknownCandidate(f"line {line_number}: unknown candidate {name!r}")
        self.names.append(name)


def _parse_text(text: str) -> Tuple[List[str], List[Vote]]:
    roster = _RosterBuilder()
    votes: List[Vote] = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        head, sep, body = line.partition(":")
        if not sep:
            raise ParseError("expected '<weight>: <candidates>'", line_number)
        head = head.strip()
        if head == "candidates":
            if votes:
                raise ParseError("the candidate list must come first", line_number)
            roster.declare(body.split(), line_number)
            continue
        try:
            weight = int(head)
        except ValueError:
            raise ParseError(f"weight {head!r} is not an integer", line_number)
        opinions: Dict[str, int] = {}
        for token in body.split():
            value = -1 if token.startswith("-") else 1
            name = token[1:] if token[0] in "+-" else token
            roster.see(name, line_number)
            if name in opinions:
                raise ParseError(f"candidate {name!r} repeated in one ballot", line_number)
            opinions[name] = value
        votes.append((opinions, weight))
    return roster.names, votes


def _parse_csv(text: str) -> Tuple[List[str], List[Vote]]:
    reader = csv.reader(io.StringIO(text))
    header: Optional[List[str]] = None
    has_weight = False
    votes: List[Vote] = []
    for row in reader:
        line_number = reader.line_num
        if not any(cell.strip() for cell in row):
            continue
        cells = [cell.strip() for cell in row]
        if header is None:
            has_weight = cells[0].lower() == "weight"
            header = cells[1:] if has_weight else cells
            if not header:
                raise ParseError("header names no candidates", line_number)
            seen = set()
            for name in header:
                _check_name(name, line_number)
                if name in seen:
                    raise DuplicateCandidateHeader(
                        f"line {line_number}: candidate {name!r} appears twice "
                        f"in the header"
                    )
                seen.add(name)
            continue
        expected = len(header) + (1 if has_weight else 0)
        if len(cells) != expected:
            raise ParseError(f"expected {expected} cells, got {len(cells)}", line_number)
        try:
            values = [int(cell) for cell in cells]
        except ValueError:
            raise ParseError("cells must be integers", line_number)
        weight = values.pop(0) if has_weight else 1
        votes.append((dict(zip(header, values)), weight))
    if header is None:
        raise ParseError("no header row")
    return header, votes


def _parse_jsonl(text: str) -> Tuple[List[str], List[Vote]]:
    roster = _RosterBuilder()
    votes: List[Vote] = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON ({e.msg})", line_number)
        if not isinstance(record, dict):
            raise ParseError("each line must be a JSON object", line_number)
        if "candidates" in record:
            if votes or not isinstance(record["candidates"], list):
                raise ParseError("the candidate list must come first", line_number)
            roster.declare([str(name) for name in record["candidates"]], line_number)
            continue
        opinions = record.get("opinions")
        weight = record.get("weight", 1)
        if not isinstance(opinions, dict):
            raise ParseError("missing 'opinions' object", line_number)
        if not isinstance(weight, int) or isinstance(weight, bool):
            raise ParseError("'weight' must be an integer", line_number)
        for name, value in opinions.items():
            roster.see(name, line_number)
            if not isinstance(value, int) or isinstance(value, bool):
                raise ParseError(f"opinion on {name!r} must be an integer", line_number)
        votes.append((dict(opinions), weight))
    return roster.names, votes


_PARSERS = {"csv": _parse_csv, "text": _parse_text, "jsonl": _parse_jsonl}


def parse_ballots(
    source: Source,
    format: str = "text",
    mode: Optional[ModeLike] = None,
    opinion_budget: Optional[int] = None,
) -> BallotProfile:
    """Reads a ballot file into a profile.

    Args:
        source: Path or open text stream.
        format (optional): One of `csv`, `text`, `jsonl`. Defaults to `text`.
        mode (optional): Binary or ternary. Defaults to None, which means
            ternary if any ballot rejects a candidate and binary otherwise.
        opinion_budget (optional): Required number of opinions per ballot.
            Defaults to None.

    Returns:
        Profile with identical ballots merged.

    Raises:
        ParseError: Malformed input or no ballots at all.
        UnknownCandidate: A ballot names a candidate outside the declared
            roster.
        DuplicateCandidateHeader: A candidate is declared twice.
    """
    if format not in _PARSERS:
        raise ParseError(f"unknown ballot format {format!r}")
    names, votes = _PARSERS[format](_read(source))
    if not votes:
        raise ParseError("no ballots found")
    roster = CandidateRoster(tuple(names))
    raw = []
    for opinions, weight in votes:
        vector = [0] * roster.n
        for name, value in opinions.items():
            vector[roster.index(name)] = value
        raw.append((vector, weight))
    if mode is None:
        rejects = any(value < 0 for opinions, _ in votes for value in opinions.values())
        mode = Mode.TERNARY if rejects else Mode.BINARY
        logger.debug("Inferred %s mode.", mode.value)
    return build_profile(roster, raw, as_mode(mode), opinion_budget)


def write_profile(profile: BallotProfile, format: str = "text") -> str:
    """Serializes a profile in one of the ballot formats.

    The roster is always written, so candidates nobody mentions survive.
    """
    names = profile.roster.names
    if format == "text":
        lines = ["candidates: " + " ".join(names)]
        for ballot in profile.ballots:
            tokens = [
                names[i] if x > 0 else "-" + names[i]
                for i, x in enumerate(ballot.opinions)
                if x != 0
            ]
            lines.append(f"{ballot.weight}: " + " ".join(tokens))
        return "\n".join(lines) + "\n"
    if format == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["weight", *names])
        for ballot in profile.ballots:
            writer.writerow([ballot.weight, *ballot.opinions])
        return out.getvalue()
    if format == "jsonl":
        lines = [json.dumps({"candidates": list(names)})]
        for ballot in profile.ballots:
            opinions = {names[i]: x for i, x in enumerate(ballot.opinions) if x != 0}
            lines.append(json.dumps({"weight": ballot.weight, "opinions": opinions}))
        return "\n".join(lines) + "\n"
    raise ParseError(f"unknown ballot format {format!r}")


def format_histogram(hist: DistanceHistogram) -> str:
    return " ".join(f"d{d}={nu}" for d, nu in hist.items())


def _names(committee: Committee, roster: CandidateRoster) -> List[str]:
    return list(committee.names(roster))


def _scientific(log10: float, digits: int) -> str:
    """Decimal scientific notation for a positive number given its log10."""
    exponent = math.floor(log10)
    mantissa = round(10 ** (log10 - exponent), digits)
    if mantissa >= 10:
        mantissa, exponent = mantissa / 10, exponent + 1
    return f"{mantissa:.{digits}f}e{exponent:+d}"


def _log10_cell(matrix: ScoreMatrix, row: int, column: int) -> Optional[float]:
    if matrix.log10_values is None:
        return None
    value = float(matrix.log10_values[row, column])
    return value if math.isfinite(value) else None


def _matrix_cell(matrix: ScoreMatrix, row: int, column: int, digits: Optional[int]) -> str:
    """One sweep cell as text; `digits=None` keeps full precision."""
    value = float(matrix.values[row, column])
    log10 = _log10_cell(matrix, row, column)
    if not math.isfinite(value) and log10 is not None:
        return _scientific(log10, 15 if digits is None else digits)
    return repr(value) if digits is None else f"{value:.{digits}f}"


def _matrix_row(matrix: ScoreMatrix, row: int) -> Dict[str, Any]:
    """JSON record of one sweep row. Overflowed power sums are null in
    `values`; `log10_values` then carries them."""
    record: Dict[str, Any] = {
        "committee": _names(matrix.committees[row], matrix.roster),
        "values": [
            v if math.isfinite(v) else None
            for v in (float(x) for x in matrix.values[row])
        ],
    }
    if matrix.log10_values is not None:
        record["log10_values"] = [
            _log10_cell(matrix, row, j) for j in range(len(matrix.ps))
        ]
    return record


def _result_record(result: ElectionResult) -> Dict[str, Any]:
    roster = result.roster
    return {
        "method": result.method,
        "rule": result.rule,
        "p": result.p,
        "m": result.m,
        "tie_flag": result.tie_flag,
        "score": result.score,
        "winners": [
            {
                "committee": _names(c, roster),
                "histogram": {str(d): nu for d, nu in h.items()},
                "coverage": result.coverage[i] if result.coverage else None,
            }
            for i, (c, h) in enumerate(zip(result.winners, result.histograms))
        ],
        "scores": None
        if result.scores is None
        else [{"committee": _names(c, roster), "score": s} for c, s in result.scores],
        "warnings": list(result.warnings),
        "notes": list(result.notes),
    }


def _result_table(result: ElectionResult) -> List[str]:
    roster = result.roster
    lines = [f"method: {result.method}    voters: {result.m}"]
    if result.tie_flag:
        lines.append(f"TIE between {len(result.winners)} committees")
    for i, (c, h) in enumerate(zip(result.winners, result.histograms)):
        covered = f"    coverage {result.coverage[i]}/{result.m}" if result.coverage else ""
        lines.append(
            f"winner {c.label(roster)}    score {result.score:.2f}{covered}"
            f"    [{format_histogram(h)}]"
        )
    if result.scores is not None:
        width = max(len(c.label(roster)) for c, _ in result.scores)
        lines.append("")
        lines.append(f"{'committee':<{width}}  score")
        winners = set(result.winners)
        for c, s in result.scores:
            mark = "*" if c in winners else " "
            lines.append(f"{c.label(roster):<{width}}  {s:.2f}{mark}")
    lines.extend(f"note: {note}" for note in result.notes)
    return lines


def _matrix_table(matrix: ScoreMatrix) -> List[str]:
    roster = matrix.roster
    labels = [c.label(roster) for c in matrix.committees]
    width = max(len("committee"), *(len(label) for label in labels))
    cells = [
        [_matrix_cell(matrix, i, j, 2) for j in range(len(matrix.ps))]
        for i in range(len(matrix.committees))
    ]
    for column, rows in enumerate(matrix.minimizers):
        for row in rows:
            cells[row][column] += "*"
    headers = [f"p={p:g}" for p in matrix.ps]
    widths = [
        max(len(h), *(len(cells[r][j]) for r in range(len(cells))))
        for j, h in enumerate(headers)
    ]
    title = "power sum" if matrix.power_sum else "p-norm"
    lines = [
        f"{'committee':<{width}}  "
        + "  ".join(f"{h:>{w}}" for h, w in zip(headers, widths))
    ]
    for label, row in zip(labels, cells):
        lines.append(
            f"{label:<{width}}  " + "  ".join(f"{c:>{w}}" for c, w in zip(row, widths))
        )
    lines.append(f"({title}; * marks the minimizer of each column)")
    return lines


def _comparison_table(comparison: MethodComparison) -> List[str]:
    roster = comparison.roster
    lines = []
    for result in comparison.results:
        for i, (c, h) in enumerate(zip(result.winners, result.histograms)):
            method = result.method if i == 0 else ""
            covered = result.coverage[i] if result.coverage else "-"
            lines.append(
                f"{method:<14}{c.label(roster):<20}coverage {covered}/{result.m}"
                f"    [{format_histogram(h)}]"
            )
    if comparison.agreement:
        lines.append("all methods agree")
    else:
        lines.append("methods disagree:")
        for winners, methods in comparison.outcomes().items():
            outcome = " | ".join(c.label(roster) for c in winners)
            lines.append(f"  {outcome}: {', '.join(methods)}")
    return lines


def _csv_rows(obj: Union[ElectionResult, ScoreMatrix, MethodComparison]) -> List[List[Any]]:
    if isinstance(obj, ScoreMatrix):
        rows: List[List[Any]] = [
            ["record", "committee", "p", "value", "log10_value", "minimizer", "message"]
        ]
        for j, p in enumerate(obj.ps):
            best = set(obj.minimizers[j])
            for i, c in enumerate(obj.committees):
                log10 = _log10_cell(obj, i, j)
                rows.append(
                    ["cell", c.label(obj.roster), repr(p), _matrix_cell(obj, i, j, None),
                     "" if log10 is None else repr(log10), int(i in best), ""]
                )
        rows.extend(["warning", "", "", "", "", "", w] for w in obj.warnings)
        return rows
    results = obj.results if isinstance(obj, MethodComparison) else [obj]
    rows = [["record", "method", "committee", "score", "coverage", "histogram", "message"]]
    for result in results:
        roster = result.roster
        for i, (c, h) in enumerate(zip(result.winners, result.histograms)):
            rows.append(
                ["winner", result.method, c.label(roster), repr(result.score),
                 result.coverage[i] if result.coverage else "", format_histogram(h), ""]
            )
        for c, s in result.scores or []:
            rows.append(["score", result.method, c.label(roster), repr(s), "", "", ""])
        rows.extend(["warning", result.method, "", "", "", "", w] for w in result.warnings)
        rows.extend(["note", result.method, "", "", "", "", n] for n in result.notes)
    return rows


def write_result(
    obj: Union[ElectionResult, ScoreMatrix, MethodComparison], format: str = "table"
) -> str:
    """Renders a result, a sweep matrix or a method comparison.

    Args:
        obj: What to render.
        format (optional): `table` (rounded to two decimals, minimizers marked
            with `*`), `csv` or `json` (both lossless). Defaults to `table`.

    Returns:
        The rendered text, ending in a newline.
    """
    if format == "table":
        if isinstance(obj, ScoreMatrix):
            lines = _matrix_table(obj)
        elif isinstance(obj, MethodComparison):
            lines = _comparison_table(obj)
        else:
            lines = _result_table(obj)
        return "\n".join(lines) + "\n"
    if format == "csv":
        out = io.StringIO()
        csv.writer(out, lineterminator="\n").writerows(_csv_rows(obj))
        return out.getvalue()
    if format == "json":
        if isinstance(obj, ScoreMatrix):
            record: Dict[str, Any] = {
                "ps": list(obj.ps),
                "power_sum": obj.power_sum,
                "rows": [_matrix_row(obj, i) for i in range(len(obj.committees))],
                "minimizers": [
                    [_names(c, obj.roster) for c in obj.column_winners(j)]
                    for j in range(len(obj.ps))
                ],
                "warnings": list(obj.warnings),
            }
        elif isinstance(obj, MethodComparison):
            record = {
                "k": obj.k,
                "agreement": obj.agreement,
                "results": [_result_record(r) for r in obj.results],
            }
        else:
            record = _result_record(obj)
        return json.dumps(record, indent=2, allow_nan=False) + "\n"
    raise ElectionError(f"Unknown result format {format!r}.")
