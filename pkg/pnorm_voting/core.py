"""Domain types shared by every other module: candidates, ballots, profiles,
committees, distance histograms and election results.

Committees are compared in canonical order, i.e., lexicographically on their
sorted member indices. This order is the tie-break used everywhere.
"""
import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np


class ElectionError(ValueError):
    """Base class for all invalid input detected by the package."""


class WrongLength(ElectionError):
    pass


class NegativeWeight(ElectionError):
    pass


class BudgetViolation(ElectionError):
    pass


class ModeViolation(ElectionError):
    pass


class ModeMismatch(ElectionError):
    pass


class InvalidK(ElectionError):
    pass


class TooLarge(ElectionError):
    pass


class InvalidP(ElectionError):
    pass


class VariantMismatch(ElectionError):
    pass


class UnknownCandidate(ElectionError):
    pass


class DuplicateCandidate(ElectionError):
    pass


class DuplicateCandidateHeader(ElectionError):
    pass


class EmptyRoster(ElectionError):
    pass


class ParseError(ElectionError):
    def __init__(self, message: str, line_number: Optional[int] = None):
        """Malformed ballot source.

        Args:
            message: What is wrong.
            line_number (optional): 1-based line of the offending input.
        """
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class Mode(str, Enum):
    BINARY = "binary"
    TERNARY = "ternary"


ModeLike = Union[Mode, str]


def as_mode(mode: ModeLike) -> Mode:
    try:
        return Mode(mode)
    except ValueError:
        raise ElectionError(f"Unknown ballot mode {mode!r}.")


@dataclass(frozen=True)
class CandidateRoster:
    """Ordered candidate names; the position of a name is its index."""

    names: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if not self.names:
            raise EmptyRoster("A roster needs at least one candidate.")
        seen = set()
        for name in self.names:
            if not isinstance(name, str) or not name:
                raise ElectionError(f"Invalid candidate name {name!r}.")
            if name in seen:
                raise DuplicateCandidate(f"Candidate {name!r} listed twice.")
            seen.add(name)

    @property
    def n(self) -> int:
        return len(self.names)

    @cached_property
    def _positions(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def index(self, name: str) -> int:
        """Index of a candidate.

        Raises:
            UnknownCandidate: The name is not on the roster.
        """
        try:
            return self._positions[name]
        except KeyError:
            raise UnknownCandidate(f"Unknown candidate {name!r}.")

    def __contains__(self, name: object) -> bool:
        return name in self._positions


@dataclass(frozen=True)
class Ballot:
    """A distinct opinion vector together with the number of voters who cast
    it. Entries are +1 (approve), 0 (no opinion) and -1 (reject)."""

    opinions: Tuple[int, ...]
    weight: int = 1

    def __post_init__(self):
        object.__setattr__(self, "opinions", tuple(int(x) for x in self.opinions))
        if isinstance(self.weight, bool) or int(self.weight) != self.weight:
            raise NegativeWeight(f"Ballot weight must be an integer, got {self.weight!r}.")
        object.__setattr__(self, "weight", int(self.weight))
        if self.weight < 1:
            raise NegativeWeight(f"Ballot weight must be at least 1, got {self.weight}.")
        for x in self.opinions:
            if x not in (-1, 0, 1):
                raise ModeViolation(f"Opinion entries must be -1, 0 or 1, got {x}.")

    @property
    def n(self) -> int:
        return len(self.opinions)

    @property
    def opinion_count(self) -> int:
        return sum(1 for x in self.opinions if x != 0)

    @property
    def approved(self) -> Tuple[int, ...]:
        return tuple(i for i, x in enumerate(self.opinions) if x == 1)

    @property
    def rejected(self) -> Tuple[int, ...]:
        return tuple(i for i, x in enumerate(self.opinions) if x == -1)

    @property
    def is_binary(self) -> bool:
        return all(x >= 0 for x in self.opinions)


@dataclass(frozen=True)
class BallotProfile:
    """Roster plus deduplicated, weighted ballots.

    Use `build_profile` to construct one from raw ballots; the constructor
    only validates.
    """

    roster: CandidateRoster
    ballots: Tuple[Ballot, ...]
    mode: Mode = Mode.BINARY
    opinion_budget: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "ballots", tuple(self.ballots))
        object.__setattr__(self, "mode", as_mode(self.mode))
        if not self.ballots:
            raise ElectionError("A profile needs at least one ballot.")
        if self.opinion_budget is not None and (
            isinstance(self.opinion_budget, bool)
            or not 1 <= self.opinion_budget <= self.roster.n
        ):
            raise BudgetViolation(
                f"Opinion budget must be in [1, {self.roster.n}], "
                f"got {self.opinion_budget!r}."
            )
        seen = set()
        for ballot in self.ballots:
            if ballot.n != self.roster.n:
                raise WrongLength(
                    f"Ballot has {ballot.n} entries, roster has {self.roster.n}."
                )
            if ballot.opinions in seen:
                raise ElectionError("Profile ballots must be distinct; use build_profile.")
            seen.add(ballot.opinions)
            if self.mode is Mode.BINARY and not ballot.is_binary:
                raise ModeViolation("Rejections (-1) are not allowed in binary mode.")
            if (
                self.opinion_budget is not None
                and ballot.opinion_count != self.opinion_budget
            ):
                raise BudgetViolation(
                    f"Ballot expresses {ballot.opinion_count} opinions, "
                    f"budget is {self.opinion_budget}."
                )

    @property
    def n(self) -> int:
        return self.roster.n

    @cached_property
    def m(self) -> int:
        """Total number of voters."""
        return sum(ballot.weight for ballot in self.ballots)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Opinion matrix, one row per distinct ballot."""
        return np.array([b.opinions for b in self.ballots], dtype=np.int64)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([b.weight for b in self.ballots], dtype=np.int64)


RawBallot = Tuple[Sequence[int], int]


def build_profile(
    roster: CandidateRoster,
    raw_ballots: Iterable[RawBallot],
    mode: ModeLike = Mode.BINARY,
    opinion_budget: Optional[int] = None,
) -> BallotProfile:
    """Builds a profile, merging identical opinion vectors.

    Args:
        roster: Candidates.
        raw_ballots: Pairs of (opinion vector, weight).
        mode (optional): Binary or ternary. Defaults to binary.
        opinion_budget (optional): Exact number of non-zero entries every
            ballot must have. Defaults to None (unrestricted).

    Returns:
        Profile whose ballots are distinct, in order of first appearance.

    Raises:
        WrongLength: A vector's length differs from the roster size.
        NegativeWeight: A weight is below 1.
        ModeViolation: A -1 entry in binary mode.
        BudgetViolation: A ballot's opinion count differs from the budget.
    """
    merged: Dict[Tuple[int, ...], int] = {}
    for opinions, weight in raw_ballots:
        ballot = Ballot(tuple(opinions), weight)
        if ballot.n != roster.n:
            raise WrongLength(
                f"Ballot has {ballot.n} entries, roster has {roster.n}."
            )
        merged[ballot.opinions] = merged.get(ballot.opinions, 0) + ballot.weight
    return BallotProfile(
        roster=roster,
        ballots=tuple(Ballot(o, w) for o, w in merged.items()),
        mode=as_mode(mode),
        opinion_budget=opinion_budget,
    )


@dataclass(frozen=True, order=True)
class Committee:
    """A set of seated candidates, stored as strictly increasing indices."""

    members: Tuple[int, ...]

    def __post_init__(self):
        members = tuple(sorted(int(i) for i in self.members))
        if len(set(members)) != len(members):
            raise ElectionError(f"Committee members repeat: {self.members}.")
        if members and members[0] < 0:
            raise ElectionError(f"Negative candidate index in {self.members}.")
        object.__setattr__(self, "members", members)

    @property
    def k(self) -> int:
        return len(self.members)

    def binary(self, n: int) -> Tuple[int, ...]:
        """0/1 encoding of length n."""
        self._check(n)
        seated = set(self.members)
        return tuple(1 if i in seated else 0 for i in range(n))

    def ternary(self, n: int) -> Tuple[int, ...]:
        """+1/-1 encoding of length n."""
        self._check(n)
        seated = set(self.members)
        return tuple(1 if i in seated else -1 for i in range(n))

    def names(self, roster: CandidateRoster) -> Tuple[str, ...]:
        self._check(roster.n)
        return tuple(roster.names[i] for i in self.members)

    def label(self, roster: CandidateRoster) -> str:
        return "{" + ",".join(self.names(roster)) + "}"

    def _check(self, n: int) -> None:
        if self.members and self.members[-1] >= n:
            raise ElectionError(
                f"Committee {self.members} does not fit {n} candidates."
            )


def committee_from_names(roster: CandidateRoster, names: Iterable[str]) -> Committee:
    return Committee(tuple(roster.index(name) for name in names))


def count_committees(n: int, k: int) -> int:
    """C(n, k), after checking that 1 <= k <= n."""
    if isinstance(k, bool) or not isinstance(k, int) or not 1 <= k <= n:
        raise InvalidK(f"Committee size must be in [1, {n}], got {k!r}.")
    return math.comb(n, k)


def enumerate_committees(n: int, k: int) -> Iterator[Committee]:
    """Yields all C(n, k) committees in canonical (lexicographic) order.

    Raises:
        InvalidK: k < 1 or k > n.
    """
    count_committees(n, k)
    for members in itertools.combinations(range(n), k):
        yield Committee(members)


def approval_counts(profile: BallotProfile) -> List[int]:
    """Weighted approvals a_i per candidate."""
    return [int(x) for x in profile.weights @ (profile.matrix == 1).astype(np.int64)]


def rejection_counts(profile: BallotProfile) -> List[int]:
    """Weighted rejections r_i per candidate."""
    return [int(x) for x in profile.weights @ (profile.matrix == -1).astype(np.int64)]


def net_approvals(profile: BallotProfile) -> List[int]:
    """a_i - r_i per candidate; equals the approvals on binary profiles."""
    return [int(x) for x in profile.weights @ profile.matrix]


@dataclass(frozen=True)
class DistanceHistogram:
    """Number of voters ν_d at each distance d from one committee.

    `counts[d]` is ν_d; trailing zero cells are dropped so that equal
    histograms compare equal regardless of how they were built.
    """

    counts: Tuple[int, ...]
    m: int

    def __post_init__(self):
        counts = [int(c) for c in self.counts]
        while counts and counts[-1] == 0:
            counts.pop()
        if any(c < 0 for c in counts):
            raise ElectionError(f"Negative histogram cell in {counts}.")
        if sum(counts) != self.m:
            raise ElectionError(
                f"Histogram mass {sum(counts)} does not match m={self.m}."
            )
        object.__setattr__(self, "counts", tuple(counts))

    @classmethod
    def from_mapping(cls, cells: Dict[int, int]) -> "DistanceHistogram":
        size = max(cells) + 1 if cells else 0
        counts = [0] * size
        for d, nu in cells.items():
            if d < 0:
                raise ElectionError(f"Negative distance {d}.")
            counts[d] += nu
        return cls(tuple(counts), sum(cells.values()))

    def count(self, d: int) -> int:
        return self.counts[d] if 0 <= d < len(self.counts) else 0

    def items(self) -> List[Tuple[int, int]]:
        """(d, ν_d) for every occupied distance, ascending."""
        return [(d, nu) for d, nu in enumerate(self.counts) if nu > 0]

    def as_dict(self) -> Dict[int, int]:
        return dict(self.items())

    @property
    def max_distance(self) -> int:
        """Largest occupied distance, or -1 for an empty histogram."""
        return len(self.counts) - 1


@dataclass
class ElectionResult:
    """Outcome of one rule on one profile.

    Attributes:
        rule: Method name (`pnorm`, `minisum`, `minimax`, `maxcover`,
            `greedy`, `p0`).
        p: Norm parameter for `pnorm`, otherwise None.
        roster: Candidates, for rendering names.
        winners: All tied optimal committees in canonical order.
        histograms: Distance histogram of each winner.
        score: Reported score shared by the winners.
        scores: Optional (committee, score) rows for every committee.
        coverage: Covered voters per winner, where computed.
        m: Total number of voters.
        warnings: Near ties and other caveats.
        notes: Informational lines for the reader.
    """

    rule: str
    p: Optional[float]
    roster: CandidateRoster
    winners: List[Committee]
    histograms: List[DistanceHistogram]
    score: float
    m: int
    scores: Optional[List[Tuple[Committee, float]]] = None
    coverage: Optional[List[int]] = None
    warnings: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.winners:
            raise ElectionError("An election result needs at least one winner.")

    @property
    def tie_flag(self) -> bool:
        return len(self.winners) > 1

    @property
    def method(self) -> str:
        if self.p is None:
            return self.rule
        return f"{self.rule}@{self.p:g}"

    def winner_names(self) -> List[Tuple[str, ...]]:
        return [c.names(self.roster) for c in self.winners]


@dataclass
class ScoreMatrix:
    """Scores of every committee for several values of p.

    Attributes:
        roster: Candidates.
        committees: Rows, in canonical order.
        ps: Columns.
        values: Array of shape (len(committees), len(ps)).
        minimizers: Per column, the row indices of the optimal committees.
        power_sum: True when cells hold Σ ν_d d^p rather than the norm.
        log10_values: Base-10 logarithms of the power sums, same shape as
            `values`; set only when `power_sum` is True. Cells past the float
            range read inf in `values` and keep their magnitude here.
        warnings: Near ties met while finding the minimizers.
    """

    roster: CandidateRoster
    committees: List[Committee]
    ps: List[float]
    values: np.ndarray
    minimizers: List[List[int]]
    power_sum: bool = False
    log10_values: Optional[np.ndarray] = None
    warnings: List[str] = field(default_factory=list)

    def column_winners(self, column: int) -> List[Committee]:
        return [self.committees[row] for row in self.minimizers[column]]


@dataclass
class MethodComparison:
    """Outcomes of several rules on the same profile and committee size."""

    roster: CandidateRoster
    k: int
    results: List[ElectionResult]

    @property
    def agreement(self) -> bool:
        """True when every rule elects the same winner set."""
        outcomes = {tuple(r.winners) for r in self.results}
        return len(outcomes) <= 1

    def outcomes(self) -> Dict[Tuple[Committee, ...], List[str]]:
        """Methods grouped by the winner set they produce."""
        groups: Dict[Tuple[Committee, ...], List[str]] = {}
        for result in self.results:
            groups.setdefault(tuple(result.winners), []).append(result.method)
        return groups
