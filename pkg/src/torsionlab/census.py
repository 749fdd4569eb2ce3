"""Height-ordered census of integral curve models and torsion densities.

The height of an integral model y^2 = x^3 + Ax + B is max(|A|^3, B^2, 1).
A census enumerates every nonsingular integral pair up to a height cutoff
(optionally dropping non-minimal models, where some p^4 | A and p^6 | B),
computes each curve's torsion shape, and tabulates

* exact counts  -- curves whose torsion is isomorphic to Z/m x Z/n, and
* contains counts -- curves whose torsion has a subgroup Z/m x Z/n,

for every admissible rational shape.  The ratio exact/contains is the
quantity expected to tend to 1 for each shape as the cutoff grows; the
census reports it as an exact fraction at each cutoff so the trend can be
inspected without any floating-point noise.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .errors import InsufficientData
from .polylab import primes_from
from .torsion import RATIONAL_SHAPES, torsion_subgroup

#: Every admissible torsion shape over Q, in lexicographic order.
SHAPES = RATIONAL_SHAPES


def _icbrt(x: int) -> int:
    """Largest integer r with r^3 <= x (x >= 0), exact."""
    r = round(x ** (1 / 3))
    while r**3 > x:
        r -= 1
    while (r + 1) ** 3 <= x:
        r += 1
    return r


def height(A: int, B: int) -> int:
    """max(|A|^3, B^2, 1) -- the ordering weight of the integral model."""
    return max(abs(A) ** 3, B * B, 1)


def _minimality_primes(amax: int, bmax: int) -> tuple:
    """Primes small enough that p^4 | A, p^6 | B is possible in the box."""
    out = []
    for p in primes_from(2):
        if p**4 > amax and p**6 > bmax:
            break
        out.append(p)
    return tuple(out)


def enumerate_curves(X: int, minimal_only: bool = True):
    """Integer pairs (A, B) with height <= X, nonsingular, in lex order.

    With minimal_only, pairs where some prime p has p^4 | A and p^6 | B are
    skipped (they are rescalings of a smaller model).
    """
    if X < 1:
        raise ValueError("height cutoff must be >= 1, got %s" % X)
    amax = _icbrt(X)
    bmax = math.isqrt(X)
    small = _minimality_primes(amax, bmax) if minimal_only else ()
    for A in range(-amax, amax + 1):
        for B in range(-bmax, bmax + 1):
            if 4 * A**3 + 27 * B**2 == 0:
                continue
            if any(A % p**4 == 0 and B % p**6 == 0 for p in small):
                continue
            yield (A, B)


# ---------------------------------------------------------------------------
# census rows


def _contains(shape: tuple, sub: tuple) -> bool:
    # Z/m x Z/n embeds into Z/m' x Z/n' (divisor-normalized shapes)
    # exactly when m | m' and n | n'
    return shape[0] % sub[0] == 0 and shape[1] % sub[1] == 0


@dataclass(frozen=True)
class CensusRow:
    """Torsion tabulation of all curves up to one height cutoff.

    counts maps each shape (m, n) to the number of curves whose torsion is
    exactly Z/m x Z/n; contains_counts maps each shape to the number whose
    torsion contains a copy of it.
    """

    X: int
    counts: dict
    total: int
    contains_counts: dict

    def __post_init__(self):
        if sum(self.counts.values()) != self.total:
            raise ValueError("exact counts do not sum to the total")
        if self.contains_counts.get((1, 1)) != self.total:
            raise ValueError("every torsion group contains the trivial group")
        for sub, c_sub in self.contains_counts.items():
            for sup, c_sup in self.contains_counts.items():
                if _contains(sup, sub) and c_sup > c_sub:
                    raise ValueError(
                        "containment counts not monotone: %s vs %s" % (sub, sup)
                    )


def _tally_block(pairs, lo: int, hi: int, cutoffs) -> dict:
    """Per-shape curve counts within each cutoff for one contiguous block."""
    table = {shape: [0] * len(cutoffs) for shape in SHAPES}
    for A, B in pairs[lo:hi]:
        shape = torsion_subgroup(A, B, fast=True).pair()
        h = height(A, B)
        row = table[shape]
        for i, X in enumerate(cutoffs):
            if h <= X:
                row[i] += 1
    return table


def run_census(
    x_list, minimal_only: bool = True, threads: int = 1
) -> tuple:
    """One CensusRow per cutoff, tabulated over the largest cutoff's curves.

    The curve grid is split into contiguous blocks, one tally per block,
    merged in block order; block tallies are integer tables, so the result
    is identical for every thread count.
    """
    cutoffs = tuple(int(X) for X in x_list)
    if not cutoffs:
        raise ValueError("need at least one height cutoff")
    if any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise ValueError("height cutoffs must be strictly ascending")
    if threads < 1:
        raise ValueError("threads must be >= 1")
    pairs = list(enumerate_curves(cutoffs[-1], minimal_only))
    blocks = []
    step = max(1, -(-len(pairs) // threads))
    for lo in range(0, len(pairs), step):
        blocks.append((lo, min(lo + step, len(pairs))))
    if threads == 1:
        tables = [_tally_block(pairs, lo, hi, cutoffs) for lo, hi in blocks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_tally_block, pairs, lo, hi, cutoffs)
                for lo, hi in blocks
            ]
            tables = [f.result() for f in futures]
    merged = {shape: [0] * len(cutoffs) for shape in SHAPES}
    for table in tables:
        for shape, row in table.items():
            for i, c in enumerate(row):
                merged[shape][i] += c
    rows = []
    for i, X in enumerate(cutoffs):
        counts = {shape: merged[shape][i] for shape in SHAPES}
        total = sum(counts.values())
        contains = {
            sub: sum(c for shape, c in counts.items() if _contains(shape, sub))
            for sub in SHAPES
        }
        rows.append(CensusRow(X, counts, total, contains))
    return tuple(rows)


# ---------------------------------------------------------------------------
# density ratios


@dataclass(frozen=True)
class DensityPoint:
    """exact/contains ratio for one shape at one cutoff.

    ratio is an exact Fraction, or None when no curve contains the shape
    (the 0/0 case is reported as undefined rather than raising).
    """

    X: int
    exact_count: int
    contains_count: int
    ratio: Fraction | None


def density_ratio(rows, m: int, n: int) -> tuple:
    """The (X, exact, contains, exact/contains) trajectory of one shape."""
    if (m, n) not in SHAPES:
        raise ValueError("(%d, %d) is not an admissible rational shape" % (m, n))
    out = []
    for row in rows:
        exact = row.counts.get((m, n), 0)
        contains = row.contains_counts.get((m, n), 0)
        ratio = Fraction(exact, contains) if contains else None
        out.append(DensityPoint(row.X, exact, contains, ratio))
    return tuple(out)


# ---------------------------------------------------------------------------
# growth-exponent estimate


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares slope of log(contains count) against log(cutoff).

    An exploratory diagnostic only: the slope estimates the growth exponent
    of the containment count, and residual is the sum of squared residuals
    of the fit.  No exact value is claimed.
    """

    slope: float
    residual: float
    points: int
    label: str = "exploratory"


def fit_exponent(rows, m: int, n: int) -> ExponentFit:
    """Fit contains_count ~ C * X^slope through the rows with nonzero counts."""
    if (m, n) not in SHAPES:
        raise ValueError("(%d, %d) is not an admissible rational shape" % (m, n))
    pts = [
        (math.log(row.X), math.log(row.contains_counts[(m, n)]))
        for row in rows
        if row.contains_counts.get((m, n), 0) > 0
    ]
    if len(pts) < 2 or len({x for x, _ in pts}) < 2:
        raise InsufficientData(
            "exponent fit needs >= 2 cutoffs with nonzero counts, have %d"
            % len(pts)
        )
    xbar = sum(x for x, _ in pts) / len(pts)
    ybar = sum(y for _, y in pts) / len(pts)
    var = sum((x - xbar) ** 2 for x, _ in pts)
    cov = sum((x - xbar) * (y - ybar) for x, y in pts)
    slope = cov / var
    intercept = ybar - slope * xbar
    rss = sum((y - (slope * x + intercept)) ** 2 for x, y in pts)
    return ExponentFit(slope, rss, len(pts))
