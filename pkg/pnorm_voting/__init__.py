"""Committee elections that minimize the p-norm of ballot distances."""
from pnorm_voting.core import (
    Ballot,
    BallotProfile,
    CandidateRoster,
    Committee,
    DistanceHistogram,
    ElectionError,
    ElectionResult,
    Mode,
    build_profile,
    enumerate_committees,
)
from pnorm_voting.solvers import (
    elect,
    elect_exact,
    elect_greedy_cover,
    elect_max_cover,
    elect_minisum,
    sweep,
)

__all__ = [
    "Ballot",
    "BallotProfile",
    "CandidateRoster",
    "Committee",
    "DistanceHistogram",
    "ElectionError",
    "ElectionResult",
    "Mode",
    "build_profile",
    "elect",
    "elect_exact",
    "elect_greedy_cover",
    "elect_max_cover",
    "elect_minisum",
    "enumerate_committees",
    "sweep",
]
