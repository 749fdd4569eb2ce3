"""Congruence matrix groups mod N, root-class actions, Frobenius statistics.

The lattice (Z/N)^2 stands in for the N-torsion of a curve with a chosen
basis {P, Q}: a Galois element sending P -> aP + bQ and Q -> cP + dQ is the
matrix [[a, b], [c, d]] acting on ROW vectors from the right, so the
level-(m, n) congruence conditions (a = 1, b = 0 mod m; c = 0, d = 1 mod n)
say exactly that [N/m]P and [N/n]Q are fixed pointwise.

Zeros of the N-division polynomial are x-coordinates of order-N points,
which identifies them with the classes {v, -v} of order-N vectors; the
cycle types of a group's action on those classes are compared against the
degree patterns of the specialized division polynomial factored mod good
primes.  That comparison is the usual Frobenius heuristic for the splitting
field: a statistic, not a certificate of the Galois group.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .divpoly import primitive_division_poly_at
from .errors import BoundExceeded, SingularCurve
from .exactnum import is_rational
from .polylab import factor_mod_p, primes_from

#: Recognized group variants: the congruence group inside GL2, its
#: determinant-one part, and the two {+-I}-quotients.
VARIANTS = ("H", "H1", "Hbar", "Hbar1")

_QUOTIENT_CAP = 12  # spec'd enumeration bound for the quotient variants
_PLAIN_CAP = 24  # matches the index-enumeration bound used by families
_CONTAINMENT_CAP = 8  # exhaustive-conjugation bound


# ---------------------------------------------------------------------------
# matrix helpers: 2x2 over Z/N as 4-tuples (a, b, c, d) = [[a, b], [c, d]]


def _mat_mul(x, y, N: int):
    return (
        (x[0] * y[0] + x[1] * y[2]) % N,
        (x[0] * y[1] + x[1] * y[3]) % N,
        (x[2] * y[0] + x[3] * y[2]) % N,
        (x[2] * y[1] + x[3] * y[3]) % N,
    )


def _mat_inv(m, N: int):
    det = (m[0] * m[3] - m[1] * m[2]) % N
    di = pow(det, -1, N)
    return ((m[3] * di) % N, (-m[1] * di) % N, (-m[2] * di) % N, (m[0] * di) % N)


def _pm_rep(t, N: int):
    """Canonical representative of {t, -t} (entrywise negation mod N)."""
    return min(t, tuple((-x) % N for x in t))


def _act(v, m, N: int):
    """Right action of the matrix on a row vector: v -> v M."""
    return ((v[0] * m[0] + v[1] * m[2]) % N, (v[0] * m[1] + v[1] * m[3]) % N)


# ---------------------------------------------------------------------------
# explicit congruence groups


@dataclass(frozen=True)
class MatrixGroup:
    """Explicit element set of a level-(m, n) congruence group mod N.

    Elements are 4-tuples (a, b, c, d); for the quotient variants each
    element is the canonical representative of its {M, -M} class.
    """

    N: int
    elements: frozenset
    label: tuple  # (m, n, variant)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, mat) -> bool:
        return mat in self.elements


_GROUP_MEMO: dict = {}


def enumerate_group(N: int, m: int, n: int, variant: str = "H") -> MatrixGroup:
    """All matrices with the level-(m, n) congruences, by direct filtering.

    variant "H" is the full congruence group inside GL2(Z/N), "H1" its
    determinant-one part, "Hbar"/"Hbar1" the respective quotients by +-I
    (the adjoined -I makes {M, -M} classes, stored as canonical reps).
    """
    if not (1 <= m and n % m == 0 and N % n == 0):
        raise ValueError("need m | n | N, got (%d, %d, %d)" % (N, m, n))
    if variant not in VARIANTS:
        raise ValueError("variant must be one of %s" % (VARIANTS,))
    cap = _QUOTIENT_CAP if variant in ("Hbar", "Hbar1") else _PLAIN_CAP
    if N > cap:
        raise BoundExceeded(
            "variant %s is enumerated only for N <= %d" % (variant, cap)
        )
    key = (N, m, n, variant)
    if key in _GROUP_MEMO:
        return _GROUP_MEMO[key]
    det_one = variant in ("H1", "Hbar1")
    one = 1 % N
    base = []
    for a in range(1 % m, N, m):
        for b in range(0, N, m):
            for c in range(0, N, n):
                for d in range(1 % n, N, n):
                    det = (a * d - b * c) % N
                    ok = det == one if det_one else math.gcd(det, N) == 1
                    if ok:
                        base.append((a, b, c, d))
    if variant in ("Hbar", "Hbar1"):
        elements = frozenset(_pm_rep(mat, N) for mat in base)
    else:
        elements = frozenset(base)
    group = MatrixGroup(N, elements, (m, n, variant))
    _GROUP_MEMO[key] = group
    return group


# ---------------------------------------------------------------------------
# cycle types of the action on division-polynomial root classes


@dataclass(frozen=True)
class CycleTypeDistribution:
    """Exact frequencies of cycle types over some group or sample.

    items maps partitions (cycle lengths, descending tuples) to Fraction
    frequencies; stored as a sorted tuple of pairs so the value is hashable
    and canonical.
    """

    items: tuple

    def __post_init__(self):
        total = sum((f for _, f in self.items), Fraction(0))
        if total != 1:
            raise ValueError("frequencies sum to %s, expected 1" % total)

    @property
    def freq(self) -> dict:
        return dict(self.items)

    def support(self) -> tuple:
        return tuple(part for part, _ in self.items)


def _distribution(counts: dict, total: int) -> CycleTypeDistribution:
    items = tuple(
        (part, Fraction(c, total)) for part, c in sorted(counts.items())
    )
    return CycleTypeDistribution(items)


def root_classes(N: int) -> list:
    """Canonical {v, -v} representatives of the order-N vectors in (Z/N)^2.

    A vector has additive order N exactly when gcd of its entries with N
    is 1; the class count equals the degree of the primitive N-division
    polynomial (for N > 2 negation is fixed-point free on these vectors).
    """
    classes = {
        _pm_rep((x, y), N)
        for x in range(N)
        for y in range(N)
        if math.gcd(math.gcd(x, y), N) == 1
    }
    return sorted(classes)


def cycle_types(group: MatrixGroup, N: int) -> CycleTypeDistribution:
    """Distribution of cycle types of the group acting on root classes.

    Each element permutes the {v, -v} classes (the action commutes with
    negation, so it is well defined on classes and unchanged by the choice
    of representative in the quotient variants).
    """
    if group.N != N:
        raise ValueError("group has modulus %d, not %d" % (group.N, N))
    classes = root_classes(N)
    index = {cls: i for i, cls in enumerate(classes)}
    counts: dict = {}
    for mat in group.elements:
        perm = [index[_pm_rep(_act(v, mat, N), N)] for v in classes]
        seen = [False] * len(perm)
        lengths = []
        for start in range(len(perm)):
            if seen[start]:
                continue
            size = 0
            j = start
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                size += 1
            lengths.append(size)
        part = tuple(sorted(lengths, reverse=True))
        counts[part] = counts.get(part, 0) + 1
    return _distribution(counts, group.order)


# ---------------------------------------------------------------------------
# Frobenius factorization sampling


@dataclass(frozen=True)
class FrobeniusSample:
    """Degree patterns of the specialized N-division polynomial mod p.

    records holds (prime, degree pattern) for the first primeCount primes of
    good reduction in increasing order; excluded holds the primes > 3 that
    were skipped (dividing 6 * disc or the integer-cleared leading
    coefficient).  Patterns are descending tuples summing to the degree.
    """

    A: Fraction
    B: Fraction
    N: int
    records: tuple
    excluded: tuple

    @property
    def distribution(self) -> CycleTypeDistribution:
        counts: dict = {}
        for _, part in self.records:
            counts[part] = counts.get(part, 0) + 1
        return _distribution(counts, len(self.records))


def frobenius_sample(
    A, B, N: int, prime_count: int, seed: int = 0
) -> FrobeniusSample:
    """Factor the N-division polynomial of (A, B) mod the first primes of
    good reduction and record the degree patterns.

    Deterministic for a fixed curve: primes run in increasing order from the
    smallest good prime > 3, and the seed only steers the equal-degree
    splitting inside the factorizations (degree patterns do not depend on
    it).
    """
    if not (is_rational(A) and is_rational(B)):
        raise ValueError("Frobenius sampling works over Q; pass rational A, B")
    A, B = Fraction(A), Fraction(B)
    if A.denominator != 1 or B.denominator != 1:
        raise ValueError("clear denominators first: need integer A, B")
    if not 2 <= N <= 10:
        raise ValueError("N must be between 2 and 10, got %d" % N)
    if prime_count < 1:
        raise ValueError("prime_count must be >= 1")
    disc = 4 * A**3 + 27 * B**2
    if disc == 0:
        raise SingularCurve("4A^3 + 27B^2 = 0 for (A, B) = (%s, %s)" % (A, B))
    psi = primitive_division_poly_at(N, A, B)
    scale = math.lcm(*(Fraction(c).denominator for c in psi.coeffs))
    ipoly = psi * scale
    bad = 6 * abs(disc.numerator) * int(Fraction(ipoly.coeffs[-1]))
    records = []
    excluded = []
    for p in primes_from(5):
        if len(records) == prime_count:
            break
        if bad % p == 0:
            excluded.append(p)
            continue
        degs = factor_mod_p(ipoly, p, seed).degrees()
        records.append((p, tuple(sorted(degs, reverse=True))))
    return FrobeniusSample(A, B, N, tuple(records), tuple(excluded))


# ---------------------------------------------------------------------------
# exact total-variation distance


def distribution_distance(
    empirical: CycleTypeDistribution, theoretical: CycleTypeDistribution
) -> Fraction:
    """Total-variation distance (1/2) sum |p - q|, exact over rationals."""
    pa, pb = empirical.freq, theoretical.freq
    zero = Fraction(0)
    keys = set(pa) | set(pb)
    return sum((abs(pa.get(k, zero) - pb.get(k, zero)) for k in keys), zero) / 2


# ---------------------------------------------------------------------------
# containment up to conjugacy


def conjugate_containment(N: int, m: int, n: int, m2: int, n2: int) -> bool:
    """Is Hbar1(m, n) inside some GL2-conjugate of Hbar(m2, n2) at level N?

    Decided by exhaustive search over conjugators with early exit; the
    answer is a coset-geometry fact equivalent to m2 | m and n2 | n, and the
    brute-force form exists precisely so that equivalence can be *checked*
    rather than assumed.
    """
    if not (1 <= m and n % m == 0 and N % n == 0):
        raise ValueError("need m | n | N, got (%d, %d, %d)" % (N, m, n))
    if not (1 <= m2 and n2 % m2 == 0 and N % n2 == 0):
        raise ValueError("need m2 | n2 | N, got (%d, %d, %d)" % (N, m2, n2))
    if N > _CONTAINMENT_CAP:
        raise BoundExceeded(
            "conjugacy search is enumerated only for N <= %d" % _CONTAINMENT_CAP
        )
    small = enumerate_group(N, m, n, "Hbar1").elements
    target = enumerate_group(N, m2, n2, "Hbar").elements
    for gamma in enumerate_group(N, 1, 1, "H").elements:
        inv = _mat_inv(gamma, N)
        if all(
            _pm_rep(_mat_mul(_mat_mul(inv, s, N), gamma, N), N) in target
            for s in small
        ):
            return True
    return False
