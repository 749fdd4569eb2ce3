"""Tests for the height-ordered curve census and density ratios.

Pinned fixtures and where they come from:

    X = 1, raw        8 pairs    brute force: 3x3 box minus singular (0,0)
    X = 9             34 pairs   brute force: 5x7 box minus (0,0); the
                                 other singular models (-3, +-2) sit at
                                 height 27, outside
    X = 100 census    total 186, exact counts {(1,1): 154, (1,2): 24,
                      (1,3): 2, (1,4): 3, (1,6): 1, (2,2): 2}, first
                      tabulated by this suite and cross-checked below
                      against an independent per-curve tally
    X = 4096          minimality bites first: (0, +-64), (+-16, 0),
                      (+-16, +-64) are rescalings of smaller models,
                      8 pairs in all
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsionlab.census import (
    SHAPES,
    CensusRow,
    DensityPoint,
    ExponentFit,
    _icbrt,
    density_ratio,
    enumerate_curves,
    fit_exponent,
    height,
    run_census,
)
from torsionlab.errors import InsufficientData
from torsionlab.torsion import torsion_subgroup

# ---------------------------------------------------------------------------
# enumeration


def test_integer_cube_root_is_exact():
    assert [_icbrt(x) for x in (1, 7, 8, 9, 26, 27, 28)] == [1, 1, 2, 2, 2, 3, 3]
    for k in (1, 2, 3, 10, 99, 1000):
        assert _icbrt(k**3) == k
        assert _icbrt(k**3 - 1) == k - 1
        assert _icbrt(k**3 + 1) == k


def test_height_weights():
    assert height(0, 1) == 1
    assert height(0, 0) == 1
    assert height(2, 3) == 9
    assert height(-2, 3) == 9
    assert height(5, -11) == 125
    assert height(-1, 0) == 1


def _brute_force(X: int) -> list:
    amax = _icbrt(X)
    bmax = math.isqrt(X)
    return [
        (A, B)
        for A in range(-amax, amax + 1)
        for B in range(-bmax, bmax + 1)
        if 4 * A**3 + 27 * B**2 != 0
    ]


def test_enumerate_matches_brute_force_and_is_lexicographic():
    for X in (1, 9, 50, 100):
        got = list(enumerate_curves(X, minimal_only=False))
        assert got == sorted(_brute_force(X))
    assert len(list(enumerate_curves(1, minimal_only=False))) == 8
    assert len(list(enumerate_curves(9, minimal_only=False))) == 34
    assert len(list(enumerate_curves(9))) == 34


def test_enumerate_never_yields_singular_models():
    # the singular locus 4A^3 + 27B^2 = 0 is exactly (A, B) = (-3t^2, 2t^3)
    pairs = set(enumerate_curves(4096, minimal_only=False))
    for t in (0, 1, 2):
        assert (-3 * t * t, 2 * t**3) not in pairs
        assert (-3 * t * t, -2 * t**3) not in pairs
    assert (-12, 17) in pairs


def test_minimality_filter_drops_rescaled_models():
    raw = set(enumerate_curves(4096, minimal_only=False))
    minimal = set(enumerate_curves(4096))
    dropped = raw - minimal
    # rescalings of smaller models by 2: (2^4 a, 2^6 b)
    assert dropped == {
        (0, 64),
        (0, -64),
        (16, 0),
        (-16, 0),
        (16, 64),
        (16, -64),
        (-16, 64),
        (-16, -64),
    }


def test_enumerate_rejects_bad_cutoff():
    with pytest.raises(ValueError, match=">= 1"):
        list(enumerate_curves(0))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 60))
def test_enumerate_properties_hold_for_any_cutoff(X):
    seen = set()
    for A, B in enumerate_curves(X, minimal_only=False):
        assert height(A, B) <= X
        assert 4 * A**3 + 27 * B**2 != 0
        seen.add((A, B))
    assert seen == set(_brute_force(X))


# ---------------------------------------------------------------------------
# census rows


def test_census_at_height_100_matches_per_curve_tally():
    (row,) = run_census([100])
    tally = Counter(
        torsion_subgroup(A, B, fast=True).pair() for A, B in enumerate_curves(100)
    )
    assert row.X == 100
    assert row.total == 186
    assert {k: v for k, v in row.counts.items() if v} == dict(tally)
    assert row.counts == {shape: tally.get(shape, 0) for shape in SHAPES}


def test_census_pinned_height_100_table():
    (row,) = run_census([100])
    assert {k: v for k, v in row.counts.items() if v} == {
        (1, 1): 154,
        (1, 2): 24,
        (1, 3): 2,
        (1, 4): 3,
        (1, 6): 1,
        (2, 2): 2,
    }
    assert row.contains_counts[(1, 1)] == 186
    assert row.contains_counts[(1, 2)] == 30
    assert row.contains_counts[(1, 3)] == 3
    assert row.contains_counts[(2, 8)] == 0


def test_census_contains_counts_are_monotone_and_conserved():
    rows = run_census([100, 484])
    assert [row.X for row in rows] == [100, 484]
    for row in rows:
        assert sum(row.counts.values()) == row.total
        assert row.contains_counts[(1, 1)] == row.total
        for sub in SHAPES:
            for sup in SHAPES:
                if sup[0] % sub[0] == 0 and sup[1] % sub[1] == 0:
                    assert row.contains_counts[sup] <= row.contains_counts[sub]
    # cumulative: later cutoffs only add curves
    assert rows[0].total <= rows[1].total
    for shape in SHAPES:
        assert rows[0].counts[shape] <= rows[1].counts[shape]


def test_census_is_thread_count_invariant():
    reference = run_census([100, 484], threads=1)
    for threads in (2, 4, 8):
        assert run_census([100, 484], threads=threads) == reference


def test_census_validates_arguments():
    with pytest.raises(ValueError, match="at least one"):
        run_census([])
    with pytest.raises(ValueError, match="ascending"):
        run_census([100, 100])
    with pytest.raises(ValueError, match="ascending"):
        run_census([484, 100])
    with pytest.raises(ValueError, match="threads"):
        run_census([100], threads=0)


def test_census_row_rejects_inconsistent_tables():
    with pytest.raises(ValueError, match="sum"):
        CensusRow(10, {(1, 1): 3}, 4, {(1, 1): 4})
    with pytest.raises(ValueError, match="trivial group"):
        CensusRow(10, {(1, 1): 4}, 4, {(1, 1): 3})
    with pytest.raises(ValueError, match="monotone"):
        CensusRow(10, {(1, 1): 4}, 4, {(1, 1): 4, (1, 2): 5})


# ---------------------------------------------------------------------------
# density ratios


def test_density_ratio_is_exact_and_marks_undefined():
    rows = run_census([100])
    (pt,) = density_ratio(rows, 1, 1)
    assert isinstance(pt, DensityPoint)
    assert pt == DensityPoint(100, 154, 186, Fraction(77, 93))
    (pt2,) = density_ratio(rows, 1, 2)
    assert pt2.ratio == Fraction(24, 30)
    (undef,) = density_ratio(rows, 2, 8)
    assert undef.contains_count == 0 and undef.ratio is None


def test_density_ratio_rejects_unknown_shape():
    rows = run_census([100])
    with pytest.raises(ValueError, match="admissible"):
        density_ratio(rows, 5, 5)
    with pytest.raises(ValueError, match="admissible"):
        density_ratio(rows, 2, 3)


# ---------------------------------------------------------------------------
# exponent fit


def _trivial_row(X: int, count: int) -> CensusRow:
    counts = {shape: 0 for shape in SHAPES}
    counts[(1, 1)] = count
    contains = {shape: 0 for shape in SHAPES}
    contains[(1, 1)] = count
    return CensusRow(X, counts, count, contains)


def test_fit_exponent_linear_growth_has_slope_one():
    rows = [_trivial_row(X, X) for X in (10, 100, 1000)]
    fit = fit_exponent(rows, 1, 1)
    assert isinstance(fit, ExponentFit)
    assert abs(fit.slope - 1) < 1e-12
    assert fit.residual < 1e-20
    assert fit.points == 3
    assert fit.label == "exploratory"


def test_fit_exponent_square_root_growth_has_slope_half():
    rows = [_trivial_row(X, math.isqrt(X)) for X in (100, 10_000, 1_000_000)]
    fit = fit_exponent(rows, 1, 1)
    assert abs(fit.slope - Fraction(1, 2)) < 1e-12
    assert fit.residual < 1e-20


def test_fit_exponent_requires_two_usable_rows():
    with pytest.raises(InsufficientData):
        fit_exponent([_trivial_row(10, 10)], 1, 1)
    rows = [_trivial_row(X, X) for X in (10, 100)]
    with pytest.raises(InsufficientData):
        fit_exponent(rows, 2, 8)  # contains count is zero at every cutoff
    with pytest.raises(ValueError, match="admissible"):
        fit_exponent(rows, 3, 3)
