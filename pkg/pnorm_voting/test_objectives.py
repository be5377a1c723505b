import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pnorm_voting import objectives
from pnorm_voting.config import Settings
from pnorm_voting.core import DistanceHistogram, InvalidP, VariantMismatch
from pnorm_voting.objectives import (
    FinitePNorm,
    MaxDistanceLex,
    MiniMax,
    Ordering,
    PZeroLimit,
)


def hist(cells):
    return DistanceHistogram.from_mapping(cells)


A1A2 = hist({0: 500, 2: 150, 4: 350})
A1B1 = hist({0: 100, 2: 880, 4: 20})
A2B1 = hist({0: 20, 2: 970, 4: 10})


def test_pnorm_score():
    assert objectives.pnorm_score(A1A2, 1) == pytest.approx(1700)
    assert objectives.pnorm_score(A1A2, 2) == pytest.approx(78.74, abs=5e-3)
    assert objectives.pnorm_score(A1B1, 3) == pytest.approx(20.26, abs=5e-3)
    assert objectives.pnorm_score(A2B1, 100) == pytest.approx(4.09, abs=5e-3)
    assert objectives.pnorm_score(hist({0: 7}), 2.5) == 0.0


def test_power_sum():
    popular_pair_a1a2 = hist({0: 300, 2: 500, 4: 200})
    assert objectives.power_sum(popular_pair_a1a2, 0.5) == pytest.approx(1107.11, abs=5e-3)
    assert objectives.power_sum(popular_pair_a1a2, 1) == pytest.approx(1800)


def test_large_p_stays_finite():
    score = objectives.pnorm_score(hist({0: 1, 40: 3}), 500)
    assert math.isfinite(score)
    assert score == pytest.approx(40 * 3 ** (1 / 500))


def test_score_rows():
    rows = np.array([A1A2.counts, A1B1.counts])
    assert objectives.score_rows(rows, 2).tolist() == pytest.approx([78.74, 61.97], abs=5e-3)
    assert objectives.score_rows(rows, 1, power=True).tolist() == pytest.approx([1700, 1840])


def test_power_rows_beyond_float_range():
    rows = np.array([[0, 0, 0, 0, 0, 0, 350], [7, 0, 0, 0, 0, 0, 0]])
    assert objectives.score_rows(rows, 500, power=True).tolist() == [math.inf, 0.0]
    logs = objectives.log10_power_rows(rows, 500)
    assert logs[0] == pytest.approx(math.log10(350) + 500 * math.log10(6))
    assert logs[1] == -math.inf


@pytest.mark.parametrize("p", [0, -1, float("nan"), float("inf"), "2", True])
def test_invalid_p(p):
    with pytest.raises(InvalidP):
        FinitePNorm(p)


def test_compare_finite():
    objective = FinitePNorm(2)
    a, b = objective.key(A1A2, 4), objective.key(A1B1, 4)
    assert objectives.compare(a, b) is Ordering.GREATER
    assert objectives.compare(b, a) is Ordering.LESS
    assert objectives.compare(a, objective.key(A1A2, 4)) is Ordering.EQUAL


def test_compare_limits():
    popular_pair_a1a2 = hist({0: 300, 2: 500, 4: 200})
    popular_pair_a1b1 = hist({0: 250, 2: 690, 4: 60})
    p0 = PZeroLimit()
    assert objectives.compare(p0.key(popular_pair_a1a2, 4), p0.key(popular_pair_a1b1, 4)) is Ordering.LESS
    lex = MaxDistanceLex()
    a1b2 = hist({0: 10, 2: 970, 4: 20})
    assert objectives.compare(lex.key(A2B1, 4), lex.key(a1b2, 4)) is Ordering.LESS
    minimax = MiniMax()
    assert objectives.compare(minimax.key(A2B1, 4), minimax.key(a1b2, 4)) is Ordering.EQUAL


def test_lex_reads_lower_cells_on_top_tie():
    lex = MaxDistanceLex()
    a = lex.key(hist({0: 5, 2: 3, 4: 2}), 4)
    b = lex.key(hist({0: 4, 2: 4, 4: 2}), 4)
    assert objectives.compare(a, b) is Ordering.LESS
    assert lex.report(a) == 2


@pytest.mark.parametrize(
    "objective", [FinitePNorm(2.5), PZeroLimit(), MaxDistanceLex(), MiniMax()]
)
def test_equal_histograms_tie(objective):
    assert objectives.compare(objective.key(A1B1, 4), objective.key(A1B1, 4)) is Ordering.EQUAL


def test_variant_mismatch():
    with pytest.raises(VariantMismatch):
        objectives.compare(FinitePNorm(2).key(A1A2, 4), FinitePNorm(3).key(A1A2, 4))
    with pytest.raises(VariantMismatch):
        objectives.compare(FinitePNorm(2).key(A1A2, 4), MiniMax().key(A1A2, 4))
    with pytest.raises(VariantMismatch):
        objectives.compare(MiniMax().key(A1A2, 4), MiniMax().key(A1A2, 6))
    assert FinitePNorm(2) == FinitePNorm(2.0)


def test_exact_tie_between_different_histograms():
    objective = FinitePNorm(1)
    a = objective.key(hist({0: 1, 2: 1}), 4)
    b = objective.key(hist({1: 2}), 4)
    verdict, note = objectives.compare_with_note(a, b)
    assert verdict is Ordering.EQUAL
    assert "equal power sums" in note


def test_near_tie_fallback(caplog):
    """At p=100 the two scores agree to about 1e-17 relative; the cell
    differences still decide."""
    objective = FinitePNorm(100)
    a1b2 = objective.key(hist({2: 510, 4: 470, 6: 20}), 6)
    a1b1 = objective.key(hist({2: 100, 4: 880, 6: 20}), 6)
    with caplog.at_level(logging.DEBUG, logger="pnorm_voting.objectives"):
        verdict, note = objectives.compare_with_note(a1b2, a1b1)
    assert verdict is Ordering.LESS
    assert "near tie" in note
    assert "re-checking" in caplog.text
    assert objectives.compare(a1b1, a1b2) is Ordering.GREATER


def test_exact_limit_setting():
    objective = FinitePNorm(100, Settings(exact_power_limit=128))
    a = objective.key(hist({2: 510, 4: 470, 6: 20}), 6)
    b = objective.key(hist({2: 100, 4: 880, 6: 20}), 6)
    verdict, note = objectives.compare_with_note(a, b)
    assert verdict is Ordering.LESS
    assert note is None


def test_key_rejects_out_of_range_histogram():
    with pytest.raises(objectives.ElectionError):
        FinitePNorm(2).key(hist({5: 1}), 4)


def test_objective_for():
    assert objectives.objective_for("pnorm", 3) == FinitePNorm(3)
    assert isinstance(objectives.objective_for("p0"), PZeroLimit)
    assert isinstance(objectives.objective_for("maxcover"), MaxDistanceLex)
    assert objectives.objective_for("minimax").describe() == "minimax"
    with pytest.raises(InvalidP):
        objectives.objective_for("pnorm")
    with pytest.raises(InvalidP):
        objectives.objective_for("minimax", 2)
    with pytest.raises(objectives.ElectionError):
        objectives.objective_for("median")


@st.composite
def dominated_pairs(draw):
    """A histogram and a copy with some voters moved to larger distances."""
    cells = draw(st.lists(st.integers(0, 20), min_size=2, max_size=9))
    if sum(cells) == 0:
        cells[0] = 1
    worse = list(cells)
    for _ in range(draw(st.integers(0, 5))):
        occupied = [d for d, nu in enumerate(worse[:-1]) if nu > 0]
        if not occupied:
            break
        d = draw(st.sampled_from(occupied))
        step = draw(st.integers(1, len(worse) - 1 - d))
        worse[d] -= 1
        worse[d + step] += 1
    m = sum(cells)
    return DistanceHistogram(tuple(cells), m), DistanceHistogram(tuple(worse), m)


@settings(max_examples=500, deadline=None)
@given(dominated_pairs(), st.sampled_from([0.001, 0.5, 1, 2, 3.5, 10, 100]))
def test_moving_voters_away_never_helps(pair, p):
    better, worse = pair
    scale = len(worse.counts) + 1
    objective = FinitePNorm(p)
    verdict = objectives.compare(objective.key(better, scale), objective.key(worse, scale))
    assert verdict is not Ordering.GREATER
    for limit in (PZeroLimit(), MaxDistanceLex(), MiniMax()):
        assert objectives.compare(limit.key(better, scale), limit.key(worse, scale)) is not Ordering.GREATER
