"""Election rules: exact enumeration under any objective, the analytic
minisum shortcut, maximum coverage and its greedy approximation, and p sweeps.

Exact enumeration visits all C(n, k) committees in canonical order and is
refused beyond `Settings.max_committees`; minisum and greedy have no such
limit.
"""
import itertools
import logging
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from pnorm_voting import metrics
from pnorm_voting.config import Settings, load_settings
from pnorm_voting.core import (
    BallotProfile,
    Committee,
    DistanceHistogram,
    ElectionError,
    ElectionResult,
    InvalidP,
    MethodComparison,
    Mode,
    ScoreMatrix,
    TooLarge,
    approval_counts,
    count_committees,
    enumerate_committees,
    net_approvals,
)
from pnorm_voting.objectives import (
    ComparisonKey,
    FinitePNorm,
    MaxDistanceLex,
    MiniMax,
    Objective,
    Ordering,
    PZeroLimit,
    check_p,
    compare_with_note,
    log10_power_rows,
    score_rows,
)

logger = logging.getLogger(__name__)

METHODS = ["pnorm", "minisum", "minimax", "maxcover", "greedy", "p0"]


def _settings(settings: Optional[Settings]) -> Settings:
    return settings if settings is not None else load_settings()


def check_enumerable(profile: BallotProfile, k: int, settings: Settings) -> int:
    """Number of committees, after checking that enumeration is allowed.

    Raises:
        InvalidK: k is not in [1, n].
        TooLarge: C(n, k) exceeds the configured bound.
    """
    total = count_committees(profile.n, k)
    if total > settings.max_committees:
        raise TooLarge(
            f"C({profile.n}, {k}) = {total} committees exceeds the enumeration "
            f"bound {settings.max_committees}; use the greedy method."
        )
    logger.debug("Enumerating %d committees of size %d.", total, k)
    return total


def _batches(n: int, k: int, size: int) -> Iterator[List[Committee]]:
    committees = enumerate_committees(n, k)
    while True:
        batch = list(itertools.islice(committees, size))
        if not batch:
            return
        yield batch


class _Optimum:
    """Running set of optimal committees for one objective.

    Offers may arrive in any order; `winners` is sorted canonically.
    """

    def __init__(self, profile: BallotProfile):
        self.profile = profile
        self.best: List[Tuple[Committee, ComparisonKey]] = []
        self.warnings: List[str] = []

    def offer(self, committee: Committee, key: ComparisonKey) -> None:
        if not self.best:
            self.best = [(committee, key)]
            return
        incumbent, incumbent_key = self.best[0]
        verdict, note = compare_with_note(key, incumbent_key)
        if note is not None:
            self._warn(committee, incumbent, note)
        if verdict is Ordering.LESS:
            self.best = [(committee, key)]
        elif verdict is Ordering.EQUAL:
            self.best.append((committee, key))

    def _warn(self, a: Committee, b: Committee, note: str) -> None:
        roster = self.profile.roster
        first, second = sorted([a, b])
        message = f"{first.label(roster)} vs {second.label(roster)}: {note}"
        if message not in self.warnings:
            logger.debug(message)
            self.warnings.append(message)

    @property
    def winners(self) -> List[Tuple[Committee, ComparisonKey]]:
        return sorted(self.best, key=lambda pair: pair[0])


def _offer_rows(
    optimum: _Optimum,
    objective: Objective,
    batch: Sequence[Committee],
    rows: np.ndarray,
    scale: int,
    m: int,
) -> None:
    for row in objective.screen(rows, scale):
        hist = DistanceHistogram(tuple(int(x) for x in rows[row]), m)
        optimum.offer(batch[row], objective.key(hist, scale))


def _finish(
    profile: BallotProfile,
    rule: str,
    p: Optional[float],
    winners: List[Committee],
    histograms: List[DistanceHistogram],
    score: float,
    warnings: Optional[List[str]] = None,
    scores: Optional[List[Tuple[Committee, float]]] = None,
) -> ElectionResult:
    return ElectionResult(
        rule=rule,
        p=p,
        roster=profile.roster,
        winners=winners,
        histograms=histograms,
        score=score,
        m=profile.m,
        scores=scores,
        coverage=[int(c) for c in metrics.coverage_batch(profile, winners)],
        warnings=list(warnings or []),
    )


def elect_exact(
    profile: BallotProfile,
    k: int,
    variant: Objective,
    scores: bool = False,
    settings: Optional[Settings] = None,
) -> ElectionResult:
    """Evaluates every committee and returns all optimal ones.

    Args:
        profile: Ballot profile.
        k: Committee size.
        variant: Objective to minimize.
        scores (optional): Also return the reported score of every committee.
            Defaults to False.
        settings (optional): Enumeration bound and batch size. Defaults to
            `load_settings()`.

    Returns:
        Result whose winners all share the optimal key, in canonical order.

    Raises:
        InvalidK: k is not in [1, n].
        TooLarge: C(n, k) exceeds the enumeration bound.
    """
    settings = _settings(settings)
    check_enumerable(profile, k, settings)
    scale = metrics.max_distance(profile, k)
    optimum = _Optimum(profile)
    table: List[Tuple[Committee, float]] = []
    for batch in _batches(profile.n, k, settings.chunk_size):
        rows = metrics.histogram_batch(profile, batch, size=scale + 1)
        _offer_rows(optimum, variant, batch, rows, scale, profile.m)
        if scores:
            values = variant.report_rows(rows, scale)
            table.extend(zip(batch, (float(v) for v in values)))

    winners = optimum.winners
    return _finish(
        profile,
        rule=variant.name,
        p=variant.p,
        winners=[c for c, _ in winners],
        histograms=[key.histogram for _, key in winners],
        score=float(variant.report(winners[0][1])),
        warnings=optimum.warnings,
        scores=table if scores else None,
    )


def elect_minisum(
    profile: BallotProfile,
    k: int,
    scores: bool = False,
    settings: Optional[Settings] = None,
) -> ElectionResult:
    """Seats the k candidates with the highest approval counts.

    On ternary profiles the count is the net approval a_i - r_i. Every way of
    filling the last seats from candidates tied at the k-th position is a
    winner. The reported score is the sum of distances, i.e., the 1-norm.

    Raises:
        InvalidK: k is not in [1, n].
        TooLarge: The ties at the k-th position produce more winning
            committees than the enumeration bound.
    """
    settings = _settings(settings)
    count_committees(profile.n, k)
    tally = (
        approval_counts(profile)
        if profile.mode is Mode.BINARY
        else net_approvals(profile)
    )
    threshold = sorted(tally, reverse=True)[k - 1]
    sure = [i for i, a in enumerate(tally) if a > threshold]
    pool = [i for i, a in enumerate(tally) if a == threshold]
    open_seats = k - len(sure)
    if count_committees(len(pool), open_seats) > settings.max_committees:
        raise TooLarge(
            f"{len(pool)} candidates tie for {open_seats} seats; too many "
            f"winning committees to list."
        )
    winners = sorted(
        Committee(tuple(sure) + extra)
        for extra in itertools.combinations(pool, open_seats)
    )
    histograms = [metrics.distance_histogram(profile, c) for c in winners]
    objective = FinitePNorm(1, settings)
    scale = metrics.max_distance(profile, k)
    table = None
    if scores:
        table = elect_exact(profile, k, objective, scores=True, settings=settings).scores
    result = _finish(
        profile,
        rule="minisum",
        p=None,
        winners=winners,
        histograms=histograms,
        score=objective.report(objective.key(histograms[0], scale)),
        scores=table,
    )
    result.notes.append(
        "tally: "
        + ", ".join(f"{name}={a}" for name, a in zip(profile.roster.names, tally))
    )
    return result


def elect_max_cover(
    profile: BallotProfile,
    k: int,
    scores: bool = False,
    settings: Optional[Settings] = None,
) -> ElectionResult:
    """Committee(s) with the fewest voters at the largest distance.

    This is exact enumeration under `MaxDistanceLex`; `coverage` holds the
    number of voters with an approved candidate seated (or, on ternary
    ballots, a rejected candidate left out).
    """
    return elect_exact(profile, k, MaxDistanceLex(), scores=scores, settings=settings)


def elect_approval_set(
    profile: BallotProfile,
    k: int,
    scores: bool = False,
    settings: Optional[Settings] = None,
) -> ElectionResult:
    """The p → 0 rule: the committee matching the most ballots exactly."""
    return elect_exact(profile, k, PZeroLimit(), scores=scores, settings=settings)


def elect_minimax(
    profile: BallotProfile,
    k: int,
    scores: bool = False,
    settings: Optional[Settings] = None,
) -> ElectionResult:
    return elect_exact(profile, k, MiniMax(), scores=scores, settings=settings)


def _guaranteed_cover(
    profile: BallotProfile, seated: List[int], seats_left: int
) -> np.ndarray:
    """Covered voters for every candidate that could be added next.

    A voter is guaranteed covered once an approved candidate is seated, or
    once more of their rejected candidates are unseated than seats remain.

    Returns:
        Weighted covered count per candidate, after seating it.
    """
    approves = profile.matrix == 1
    rejects = (profile.matrix == -1).astype(np.int64)
    in_committee = np.zeros(profile.n, dtype=bool)
    in_committee[seated] = True
    approved_seated = approves[:, in_committee].any(axis=1)
    rejects_unseated = rejects[:, ~in_committee].sum(axis=1)
    covered = (
        approved_seated[:, None]
        | approves
        | ((rejects_unseated[:, None] - rejects) > seats_left)
    )
    return profile.weights @ covered.astype(np.int64)


def elect_greedy_cover(
    profile: BallotProfile, k: int, settings: Optional[Settings] = None
) -> ElectionResult:
    """Greedy maximum coverage.

    Seats, one at a time, the candidate that covers the most voters not yet
    covered. Ties go to the higher approval count, then to the lower index.

    Args:
        profile: Ballot profile.
        k: Committee size. No enumeration bound applies.
        settings (optional): Ignored; greedy has no enumeration bound.

    Returns:
        Result with exactly one committee and its coverage as score.

    Raises:
        InvalidK: k is not in [1, n].
    """
    count_committees(profile.n, k)
    tally = approval_counts(profile)
    seated: List[int] = []
    covered_so_far = 0
    notes = []
    for round_number in range(1, k + 1):
        gains = _guaranteed_cover(profile, seated, k - round_number)
        pick = max(
            (i for i in range(profile.n) if i not in seated),
            key=lambda i: (int(gains[i]), tally[i], -i),
        )
        added = int(gains[pick]) - covered_so_far
        covered_so_far = int(gains[pick])
        seated.append(pick)
        notes.append(
            f"round {round_number}: {profile.roster.names[pick]} "
            f"covers {added} more voters ({covered_so_far}/{profile.m})"
        )
        logger.debug(notes[-1])

    committee = Committee(tuple(seated))
    result = _finish(
        profile,
        rule="greedy",
        p=None,
        winners=[committee],
        histograms=[metrics.distance_histogram(profile, committee)],
        score=float(metrics.coverage(profile, committee)),
    )
    result.notes.extend(notes)
    return result


def sweep(
    profile: BallotProfile,
    k: int,
    ps: Sequence[float],
    power_sum: bool = False,
    settings: Optional[Settings] = None,
) -> ScoreMatrix:
    """Scores every committee for every p and marks the column minimizers.

    Args:
        profile: Ballot profile.
        k: Committee size.
        ps: Norm parameters, one column each.
        power_sum (optional): Report Σ ν_d d^p instead of the norm. Defaults
            to False.
        settings (optional): Defaults to `load_settings()`.

    Returns:
        Matrix with rows in canonical committee order.
    """
    settings = _settings(settings)
    if not ps:
        raise InvalidP("A sweep needs at least one value of p.")
    ps = [check_p(p) for p in ps]
    check_enumerable(profile, k, settings)
    scale = metrics.max_distance(profile, k)
    objectives = [FinitePNorm(p, settings) for p in ps]
    optima = [_Optimum(profile) for _ in ps]
    committees: List[Committee] = []
    columns: List[List[np.ndarray]] = [[] for _ in ps]
    log10_columns: List[List[np.ndarray]] = [[] for _ in ps]
    for batch in _batches(profile.n, k, settings.chunk_size):
        rows = metrics.histogram_batch(profile, batch, size=scale + 1)
        committees.extend(batch)
        for j, objective in enumerate(objectives):
            _offer_rows(optima[j], objective, batch, rows, scale, profile.m)
            columns[j].append(score_rows(rows, objective.p, power=power_sum))
            if power_sum:
                log10_columns[j].append(log10_power_rows(rows, objective.p))

    values = np.column_stack([np.concatenate(parts) for parts in columns])
    log10_values = (
        np.column_stack([np.concatenate(parts) for parts in log10_columns])
        if power_sum
        else None
    )
    position = {c: i for i, c in enumerate(committees)}
    warnings: List[str] = []
    for optimum in optima:
        warnings.extend(w for w in optimum.warnings if w not in warnings)
    return ScoreMatrix(
        roster=profile.roster,
        committees=committees,
        ps=ps,
        values=values,
        minimizers=[[position[c] for c, _ in optimum.winners] for optimum in optima],
        power_sum=power_sum,
        log10_values=log10_values,
        warnings=warnings,
    )


def parse_method(spec: str) -> Tuple[str, Optional[float]]:
    """Splits a method spec such as `pnorm@2` into name and p.

    Raises:
        ElectionError: Unknown method.
        InvalidP: p is malformed, missing for pnorm or given for another rule.
    """
    name, _, raw_p = spec.strip().partition("@")
    if name not in METHODS:
        raise ElectionError(
            f"Unknown method {name!r}; choose from {', '.join(METHODS)}."
        )
    if not raw_p:
        if name == "pnorm":
            raise InvalidP("Method pnorm needs p, e.g. pnorm@2.")
        return name, None
    if name != "pnorm":
        raise InvalidP(f"Method {name} does not take p.")
    try:
        value = float(raw_p)
    except ValueError:
        raise InvalidP(f"Malformed p in {spec!r}.")
    return name, check_p(value)


def elect(
    profile: BallotProfile,
    k: int,
    method: str,
    p: Optional[float] = None,
    scores: bool = False,
    settings: Optional[Settings] = None,
) -> ElectionResult:
    """Runs a rule by name.

    Args:
        profile: Ballot profile.
        k: Committee size.
        method: One of `METHODS`.
        p (optional): Norm parameter, required iff method is `pnorm`.
        scores (optional): Include the full score table. Defaults to False.
        settings (optional): Defaults to `load_settings()`.
    """
    if method not in METHODS:
        raise ElectionError(
            f"Unknown method {method!r}; choose from {', '.join(METHODS)}."
        )
    if method == "pnorm":
        if p is None:
            raise InvalidP("Method pnorm needs a value for p.")
        return elect_exact(
            profile, k, FinitePNorm(p, settings), scores=scores, settings=settings
        )
    if p is not None:
        raise InvalidP(f"Method {method} does not take p.")
    if method == "minisum":
        return elect_minisum(profile, k, scores=scores, settings=settings)
    if method == "minimax":
        return elect_minimax(profile, k, scores=scores, settings=settings)
    if method == "maxcover":
        return elect_max_cover(profile, k, scores=scores, settings=settings)
    if method == "p0":
        return elect_approval_set(profile, k, scores=scores, settings=settings)
    result = elect_greedy_cover(profile, k, settings=settings)
    if scores:
        result.notes.append("greedy builds one committee; no score table")
    return result


def compare_methods(
    profile: BallotProfile,
    k: int,
    methods: Sequence[str],
    settings: Optional[Settings] = None,
) -> MethodComparison:
    """Runs several rules on one profile.

    Args:
        profile: Ballot profile.
        k: Committee size.
        methods: Method specs, e.g. `["minisum", "pnorm@2", "maxcover"]`.
        settings (optional): Defaults to `load_settings()`.
    """
    if not methods:
        raise ElectionError("Name at least one method to compare.")
    settings = _settings(settings)
    results = []
    for spec in methods:
        name, p = parse_method(spec)
        results.append(elect(profile, k, name, p, settings=settings))
    return MethodComparison(roster=profile.roster, k=k, results=results)
