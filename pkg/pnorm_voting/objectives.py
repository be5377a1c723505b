"""Scores and comparison keys for the p-norm family of rules.

Every rule ranks committees by the distance histogram ν of the electorate:

- `FinitePNorm(p)`: (Σ ν_d d^p)^(1/p) for a positive real p. Internally the
  order is decided on Σ ν_d (d/D)^p, where D is the largest distance the
  profile allows, which keeps large p finite without changing the order.
- `PZeroLimit`: the limit p → 0, i.e., fewest voters at a non-zero distance.
- `MaxDistanceLex`: the limit of large but finite p. Histograms are read from
  D downwards and compared lexicographically, smaller first. The top cell
  alone is the maximum coverage criterion; the lower cells settle what the
  top cell leaves tied, as the power sums themselves would.
- `MiniMax`: the largest occupied distance, regardless of how many voters
  sit there.
"""
import abc
import logging
import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Any, List, Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from pnorm_voting.config import Settings
from pnorm_voting.core import DistanceHistogram, ElectionError, InvalidP, VariantMismatch

logger = logging.getLogger(__name__)


class Ordering(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def _sign(x: Any) -> Ordering:
    return Ordering((x > 0) - (x < 0))


def check_p(p: float) -> float:
    """Validates a finite norm parameter.

    Raises:
        InvalidP: p is not a positive, finite real number.
    """
    if isinstance(p, bool) or not isinstance(p, (int, float, np.integer, np.floating)):
        raise InvalidP(f"p must be a real number, got {p!r}.")
    if math.isnan(p) or math.isinf(p) or p <= 0:
        raise InvalidP(f"p must be positive and finite, got {p!r}.")
    return float(p)


def _log_power_sums(rows: np.ndarray, p: float) -> np.ndarray:
    """log Σ_d ν_d d^p per row, -inf for rows with all mass at d = 0."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    if rows.shape[1] < 2:
        return np.full(rows.shape[0], -np.inf)
    exponents = p * np.log(np.arange(1, rows.shape[1], dtype=np.float64))
    exponents = np.tile(exponents, (rows.shape[0], 1))
    with np.errstate(divide="ignore"):
        return logsumexp(exponents, b=rows[:, 1:], axis=1)


def power_sum(hist: DistanceHistogram, p: float) -> float:
    """Σ_d ν_d d^p, i.e., the p-norm raised to the power p.

    This is the reporting convention for p < 1, where the norm itself grows
    without bound as p shrinks.
    """
    p = check_p(p)
    return float(np.exp(_log_power_sums(np.array([hist.counts or (0,)]), p)[0]))


def pnorm_score(hist: DistanceHistogram, p: float) -> float:
    """(Σ_d ν_d d^p)^(1/p), evaluated in the log domain.

    Args:
        hist: Distance histogram.
        p: Positive, finite norm parameter.

    Returns:
        The p-norm of the distance vector; 0 when every voter is at d = 0.

    Raises:
        InvalidP: p is not positive and finite.
    """
    p = check_p(p)
    return float(np.exp(_log_power_sums(np.array([hist.counts or (0,)]), p)[0] / p))


def score_rows(rows: np.ndarray, p: float, power: bool = False) -> np.ndarray:
    """Vectorized `pnorm_score` (or `power_sum`) over histogram rows.

    Power sums beyond the float range come back as inf; `log10_power_rows`
    keeps their magnitude.
    """
    p = check_p(p)
    logs = _log_power_sums(rows, p)
    with np.errstate(over="ignore"):
        return np.exp(logs if power else logs / p)


def log10_power_rows(rows: np.ndarray, p: float) -> np.ndarray:
    """log10 Σ_d ν_d d^p per row; -inf for rows with all mass at d = 0."""
    return _log_power_sums(rows, check_p(p)) / math.log(10)


@dataclass(frozen=True)
class ComparisonKey:
    """What a rule compares for one committee.

    Attributes:
        variant: The objective that produced the key.
        histogram: Distance histogram of the committee.
        payload: Scaled power sum (float), voters off distance zero (int),
            cells read from the top distance down (tuple) or the largest
            occupied distance (int), depending on the variant.
        scale: Largest distance D the profile allows.
    """

    variant: "Objective"
    histogram: DistanceHistogram
    payload: Any
    scale: int


class Objective(abc.ABC):
    """Interface shared by all rule objectives."""

    name: str = ""

    @property
    def p(self) -> Optional[float]:
        return None

    def key(self, hist: DistanceHistogram, scale: int) -> ComparisonKey:
        """Builds the comparison key of one histogram.

        Args:
            hist: Distance histogram.
            scale: Largest distance the profile allows.
        """
        if hist.max_distance > scale:
            raise ElectionError(
                f"Histogram reaches distance {hist.max_distance} above the "
                f"profile maximum {scale}."
            )
        return ComparisonKey(self, hist, self._payload(hist, scale), scale)

    @abc.abstractmethod
    def _payload(self, hist: DistanceHistogram, scale: int) -> Any:
        raise NotImplementedError

    def compare_with_note(
        self, a: ComparisonKey, b: ComparisonKey
    ) -> Tuple[Ordering, Optional[str]]:
        """Orders two keys; smaller is better.

        Returns:
            The ordering and, when the verdict needed a fallback, a note that
            explains it.
        """
        return _sign((a.payload > b.payload) - (a.payload < b.payload)), None

    @abc.abstractmethod
    def report(self, key: ComparisonKey) -> float:
        """Human-facing score for a key."""
        raise NotImplementedError

    def screen(self, rows: np.ndarray, scale: int) -> np.ndarray:
        """Indices of the rows that may hold an optimum.

        Used to avoid building keys for every committee in a batch. Rows are
        dense histograms with at least `scale + 1` columns.
        """
        values = self._payload_rows(rows, scale)
        return np.flatnonzero(values == values.min())

    @abc.abstractmethod
    def _payload_rows(self, rows: np.ndarray, scale: int) -> np.ndarray:
        raise NotImplementedError

    def report_rows(self, rows: np.ndarray, scale: int) -> np.ndarray:
        """Vectorized `report` over dense histogram rows."""
        return self._payload_rows(rows, scale)

    def describe(self) -> str:
        return self.name

    def __eq__(self, other: object) -> bool:
        return type(self) is type(other) and self.p == other.p

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.p))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.describe()})"


class FinitePNorm(Objective):
    name = "pnorm"

    def __init__(self, p: float, settings: Optional[Settings] = None):
        """p-norm of the distance vector.

        Args:
            p: Positive, finite norm parameter.
            settings (optional): Tolerance and exact-arithmetic limit.
                Defaults to `Settings()`.
        """
        self._p = check_p(p)
        settings = settings or Settings()
        self.tolerance = settings.tolerance
        self.exact_power_limit = settings.exact_power_limit

    @property
    def p(self) -> float:
        return self._p

    def describe(self) -> str:
        return f"pnorm@{self._p:g}"

    def _weights(self, size: int, scale: int) -> np.ndarray:
        return (np.arange(size, dtype=np.float64) / scale) ** self._p

    def _payload(self, hist: DistanceHistogram, scale: int) -> float:
        counts = np.array(hist.counts or (0,), dtype=np.float64)
        return float(counts @ self._weights(len(counts), scale))

    def _payload_rows(self, rows: np.ndarray, scale: int) -> np.ndarray:
        return rows @ self._weights(rows.shape[1], scale)

    def screen(self, rows: np.ndarray, scale: int) -> np.ndarray:
        values = self._payload_rows(rows, scale)
        best = values.min()
        return np.flatnonzero(values <= best + 2 * self.tolerance * abs(best))

    def _is_exact(self) -> bool:
        return self._p.is_integer() and self._p <= self.exact_power_limit

    def compare_with_note(
        self, a: ComparisonKey, b: ComparisonKey
    ) -> Tuple[Ordering, Optional[str]]:
        sa, sb = a.payload, b.payload
        if not math.isclose(sa, sb, rel_tol=self.tolerance, abs_tol=0.0):
            return _sign(sa - sb), None
        if a.histogram == b.histogram:
            return Ordering.EQUAL, None
        logger.debug(
            "scaled scores %r and %r within tolerance at p=%g, re-checking",
            sa, sb, self._p,
        )
        size = max(len(a.histogram.counts), len(b.histogram.counts))
        if self._is_exact():
            p = int(self._p)
            exact = sum(
                (a.histogram.count(d) - b.histogram.count(d)) * d ** p
                for d in range(size)
            )
            verdict = _sign(exact)
            if verdict is Ordering.EQUAL:
                return verdict, (
                    f"different histograms with equal power sums at p={self._p:g}"
                )
            return verdict, None
        # Summing the cell differences lets equal cells cancel exactly.
        delta = math.fsum(
            (a.histogram.count(d) - b.histogram.count(d)) * (d / a.scale) ** self._p
            for d in range(size)
        )
        verdict = _sign(delta)
        if verdict is Ordering.EQUAL:
            return verdict, f"scores indistinguishable at p={self._p:g}"
        return verdict, f"near tie at p={self._p:g} settled on histogram differences"

    def report(self, key: ComparisonKey) -> float:
        return pnorm_score(key.histogram, self._p)

    def report_rows(self, rows: np.ndarray, scale: int) -> np.ndarray:
        return score_rows(rows, self._p)


class PZeroLimit(Objective):
    """p → 0: the fewest voters at a non-zero distance wins."""

    name = "p0"

    def _payload(self, hist: DistanceHistogram, scale: int) -> int:
        return hist.m - hist.count(0)

    def _payload_rows(self, rows: np.ndarray, scale: int) -> np.ndarray:
        return rows.sum(axis=1) - rows[:, 0]

    def report(self, key: ComparisonKey) -> float:
        return key.payload


class MaxDistanceLex(Objective):
    name = "maxcover"

    def _payload(self, hist: DistanceHistogram, scale: int) -> Tuple[int, ...]:
        return tuple(hist.count(d) for d in range(scale, -1, -1))

    def _payload_rows(self, rows: np.ndarray, scale: int) -> np.ndarray:
        return rows[:, scale]

    def screen(self, rows: np.ndarray, scale: int) -> np.ndarray:
        survivors = np.arange(rows.shape[0])
        for d in range(scale, -1, -1):
            column = rows[survivors, d]
            survivors = survivors[column == column.min()]
            if len(survivors) == 1:
                break
        return survivors

    def report(self, key: ComparisonKey) -> float:
        """Voters at the top distance D.

        Under an opinion budget b this is the number of uncovered voters (for
        binary profiles when b + k <= n). Without a budget D is n or 2n, so
        it only counts voters who disagree on every candidate; the uncovered
        count is m minus `ElectionResult.coverage`.
        """
        return key.payload[0]


class MiniMax(Objective):
    name = "minimax"

    def _payload(self, hist: DistanceHistogram, scale: int) -> int:
        return hist.max_distance

    def _payload_rows(self, rows: np.ndarray, scale: int) -> np.ndarray:
        occupied = rows[:, ::-1] > 0
        return rows.shape[1] - 1 - np.argmax(occupied, axis=1)

    def report(self, key: ComparisonKey) -> float:
        return key.payload


def compare(a: ComparisonKey, b: ComparisonKey) -> Ordering:
    """Orders two keys of the same variant; LESS means `a` is better.

    Raises:
        VariantMismatch: The keys come from different variants or profiles.
    """
    return compare_with_note(a, b)[0]


def compare_with_note(
    a: ComparisonKey, b: ComparisonKey
) -> Tuple[Ordering, Optional[str]]:
    if a.variant != b.variant:
        raise VariantMismatch(
            f"Cannot compare {a.variant.describe()} with {b.variant.describe()}."
        )
    if a.scale != b.scale or a.histogram.m != b.histogram.m:
        raise VariantMismatch("Keys derive from different profiles.")
    return a.variant.compare_with_note(a, b)


METHOD_NAMES: List[str] = ["pnorm", "p0", "maxcover", "minimax"]


def objective_for(
    name: str, p: Optional[float] = None, settings: Optional[Settings] = None
) -> Objective:
    """Objective behind a method name.

    Args:
        name: One of `pnorm`, `p0`, `maxcover`, `minimax`.
        p (optional): Required for `pnorm`, rejected otherwise.
        settings (optional): Passed to `FinitePNorm`.
    """
    if name == "pnorm":
        if p is None:
            raise InvalidP("Method pnorm needs a value for p.")
        return FinitePNorm(p, settings)
    if p is not None:
        raise InvalidP(f"Method {name} does not take p.")
    if name == "p0":
        return PZeroLimit()
    if name == "maxcover":
        return MaxDistanceLex()
    if name == "minimax":
        return MiniMax()
    raise ElectionError(f"Unknown objective {name!r}.")
