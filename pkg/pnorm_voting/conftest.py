import os
from typing import Iterable, List

import pytest

from pnorm_voting import ballot_io
from pnorm_voting.core import BallotProfile, Committee

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


def data_path(filename: str) -> str:
    return os.path.join(DATA_DIR, filename)


def labels(profile: BallotProfile, committees: Iterable[Committee]) -> List[str]:
    return [c.label(profile.roster) for c in committees]


@pytest.fixture(scope="session")
def small() -> BallotProfile:
    """Four voters, five candidates, free approval counts."""
    return ballot_io.parse_ballots(data_path("small.csv"), "csv")


@pytest.fixture(scope="session")
def pairs() -> BallotProfile:
    return ballot_io.parse_ballots(data_path("pairs.txt"), "text", opinion_budget=2)


@pytest.fixture(scope="session")
def popular_pair() -> BallotProfile:
    return ballot_io.parse_ballots(data_path("popular_pair.txt"), "text", opinion_budget=2)


@pytest.fixture(scope="session")
def pairs_ternary() -> BallotProfile:
    return ballot_io.parse_ballots(data_path("pairs_ternary.txt"), "text", opinion_budget=2)


@pytest.fixture(scope="session")
def swing() -> BallotProfile:
    return ballot_io.parse_ballots(data_path("swing.txt"), "text", opinion_budget=2)
