"""Distances between ballots and committees, and the histograms built from
them.

Binary profiles use the Hamming distance against the 0/1 committee vector.
Ternary profiles use the L1 distance against the +1/-1 committee vector, so a
no-opinion entry always costs 1 and a disagreement costs 2.
"""
from typing import Optional, Sequence

import numpy as np

from pnorm_voting.core import (
    Ballot,
    BallotProfile,
    Committee,
    DistanceHistogram,
    ElectionError,
    Mode,
    ModeMismatch,
    WrongLength,
    count_committees,
)


def _check_length(ballot: Ballot, committee: Committee) -> None:
    if committee.members and committee.members[-1] >= ballot.n:
        raise WrongLength(
            f"Committee {committee.members} does not fit a ballot of length "
            f"{ballot.n}."
        )


def hamming_distance(ballot: Ballot, committee: Committee) -> int:
    """Hamming distance between an approval ballot and a committee.

    Args:
        ballot: Binary ballot.
        committee: Committee, encoded 0/1.

    Returns:
        Approvals outside the committee plus members not approved.

    Raises:
        ModeMismatch: The ballot contains a rejection.
    """
    if not ballot.is_binary:
        raise ModeMismatch("Hamming distance is defined for binary ballots only.")
    _check_length(ballot, committee)
    c = committee.binary(ballot.n)
    return sum(abs(ci - bi) for ci, bi in zip(c, ballot.opinions))


def ternary_distance(ballot: Ballot, committee: Committee) -> int:
    """L1 distance between a ballot and the +1/-1 committee vector.

    Args:
        ballot: Ballot with entries in {-1, 0, 1}.
        committee: Committee.

    Returns:
        Sum of |c_i - b_i|.
    """
    _check_length(ballot, committee)
    c = committee.ternary(ballot.n)
    return sum(abs(ci - bi) for ci, bi in zip(c, ballot.opinions))


def max_distance(profile: BallotProfile, k: int) -> int:
    """Largest distance any ballot can have from any committee of size k.

    The bound depends on the profile and on k only, never on the committee,
    so dividing by it preserves the order between committees.
    """
    n = profile.n
    budget = profile.opinion_budget
    if profile.mode is Mode.BINARY:
        return n if budget is None else min(n, budget + k)
    return 2 * n if budget is None else n + budget


def _indicator(committees: Sequence[Committee], n: int) -> np.ndarray:
    members = np.zeros((len(committees), n), dtype=np.int64)
    for row, committee in enumerate(committees):
        if committee.members and committee.members[-1] >= n:
            raise WrongLength(
                f"Committee {committee.members} does not fit {n} candidates."
            )
        members[row, list(committee.members)] = 1
    return members


def distance_matrix(
    profile: BallotProfile, committees: Sequence[Committee]
) -> np.ndarray:
    """Distances of every distinct ballot (rows) to every committee (columns)."""
    seats = _indicator(committees, profile.n)
    ballots = profile.matrix
    if profile.mode is Mode.BINARY:
        sizes = seats.sum(axis=1)
        return (
            ballots.sum(axis=1)[:, None] + sizes[None, :] - 2 * (ballots @ seats.T)
        )
    # |c - b| summed is n - b.c for c in {-1, 1}^n and b in {-1, 0, 1}^n
    return profile.n - ballots @ (2 * seats - 1).T


def histogram_batch(
    profile: BallotProfile,
    committees: Sequence[Committee],
    size: Optional[int] = None,
) -> np.ndarray:
    """Weighted distance histograms for a batch of committees.

    Args:
        profile: Ballot profile.
        committees: Committees to evaluate.
        size (optional): Number of distance cells per row. Defaults to one more
            than the largest distance seen.

    Returns:
        Integer array with one row per committee; cell d holds ν_d.
    """
    distances = distance_matrix(profile, committees)
    if size is None:
        size = int(distances.max()) + 1 if distances.size else 1
    hist = np.zeros((len(committees), size), dtype=np.int64)
    weights = profile.weights
    for d in range(size):
        hist[:, d] = weights @ (distances == d).astype(np.int64)
    return hist


def distance_histogram(
    profile: BallotProfile, committee: Committee
) -> DistanceHistogram:
    """Counts how many voters sit at each distance from a committee.

    Args:
        profile: Ballot profile; its mode selects the distance.
        committee: Committee of valid size for the roster.

    Returns:
        Histogram whose cells sum to m.
    """
    count_committees(profile.n, committee.k)
    row = histogram_batch(profile, [committee])[0]
    return DistanceHistogram(tuple(int(x) for x in row), profile.m)


def coverage_batch(
    profile: BallotProfile, committees: Sequence[Committee]
) -> np.ndarray:
    """Covered voters per committee.

    A voter is covered when an approved candidate is seated, or, for ternary
    ballots, when a rejected candidate is left out.
    """
    seats = _indicator(committees, profile.n)
    approves = (profile.matrix == 1).astype(np.int64)
    rejects = (profile.matrix == -1).astype(np.int64)
    covered = (approves @ seats.T > 0) | (rejects @ (1 - seats).T > 0)
    return profile.weights @ covered.astype(np.int64)


def coverage(profile: BallotProfile, committee: Committee) -> int:
    if committee.k < 1:
        raise ElectionError("Coverage needs a non-empty committee.")
    return int(coverage_batch(profile, [committee])[0])
