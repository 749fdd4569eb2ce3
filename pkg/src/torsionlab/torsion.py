"""Torsion structure of elliptic curves over Q and quadratic fields.

Three entry points:

* ``condition_P(A, B, m, n)`` — does the degree-m primitive division
  polynomial split completely over the coefficient field while the degree-n
  one has at least one root there?
* ``torsion_subgroup(A, B)`` — the full torsion subgroup as a pair
  (m, n) with m | n, certified by generator points.
* ``twist_classes(A, B, m, n)`` — the square classes D for which the
  quadratic twist by D realizes Z/m x Z/n inside its torsion.

The candidate-order lists are the classical classification results: over Q
torsion is cyclic of order 1..10 or 12, or Z/2 x Z/2N with N <= 4 (Mazur);
over a quadratic field cyclic orders reach 16 and 18, with the extra shapes
Z/2 x Z/2N (N <= 6), Z/3 x Z/3N (N <= 2, only inside Q(sqrt(-3))), and
Z/4 x Z/4 (only inside Q(i)) (Kenku-Momose, Kamienny).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .divpoly import primitive_division_poly_at
from .errors import BoundExceeded, ConditionPNotSatisfied
from .exactnum import (
    QuadScalar,
    common_field,
    in_field,
    same_square_class,
    sqrt_in_field,
)
from .polylab import divisors, factor_int, rational_roots, roots_in_quad_field
from .weierstrass import (
    Curve,
    Point,
    infinity,
    new_curve,
    point,
    point_order,
    quadratic_twist,
    scalar_mul,
)

# Admissible exact orders of torsion points by field (classical bounds).
RATIONAL_ORDERS = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12)
QUADRATIC_ORDERS = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 18)

# Every admissible (m, n) shape over Q, in lexicographic order.
RATIONAL_SHAPES = tuple(
    sorted([(1, n) for n in RATIONAL_ORDERS] + [(2, 2), (2, 4), (2, 6), (2, 8)])
)


# ---------------------------------------------------------------------------
# shared helpers


def _field_roots(p, d):
    """K-roots of p where K = Q (d None) or Q(sqrt(d)), coerced into K."""
    roots = rational_roots(p) if d is None else roots_in_quad_field(p, d)
    return [in_field(r, d) for r in roots]


def _sqrt_ambient(v, d):
    """A square root of v inside the ambient field, or None."""
    return sqrt_in_field(in_field(v, d))


def _mobius(n: int) -> int:
    mu = 1
    for _, e in factor_int(n).items():
        if e > 1:
            return 0
        mu = -mu
    return mu


def _scalar_key(v):
    """Deterministic sort key putting small, nonnegative scalars first."""
    if isinstance(v, QuadScalar):
        return (abs(v.a), v.a < 0, abs(v.b), v.b < 0)
    v = Fraction(v)
    return (abs(v), v < 0, Fraction(0), False)


def _point_key(P: Point):
    return (_scalar_key(P.x), _scalar_key(P.y))


def _expected_order_count(N: int, m: int, n: int) -> int:
    # Number of elements of exact order N in Z/m x Z/n; the count of
    # elements of order dividing e is gcd(e, m) * gcd(e, n).
    total = 0
    for e in divisors(N):
        total += _mobius(N // e) * math.gcd(e, m) * math.gcd(e, n)
    return total


# ---------------------------------------------------------------------------
# condition P


def _integral_model(A, B):
    """(lam^4 A, lam^6 B, lam) with integral components, lam minimal positive.

    The substitution (x, y) -> (lam^2 x, lam^3 y) is an isomorphism over any
    field containing the coefficients, so torsion structure and division-
    polynomial root counts are unchanged; integral coefficients keep the
    division polynomials monic with integer coefficients, which the root
    finders handle far more cheaply.
    """
    lam = 1
    for v in (A, B):
        if isinstance(v, QuadScalar):
            dens = (v.a.denominator, v.b.denominator)
        else:
            dens = (Fraction(v).denominator,)
        for q in dens:
            lam = lam * q // math.gcd(lam, q)
    if lam == 1:
        return A, B, 1
    return lam**4 * A, lam**6 * B, lam


def condition_P(A, B, m: int, n: int, d: int | None = None) -> bool:
    """True iff the order-m primitive division polynomial splits completely
    over the coefficient field and the order-n one has at least one root.

    The m = 1 case is vacuous (the polynomial is 1); m = 2 asks for three
    field roots of x^3 + Ax + B; n = 1 likewise imposes nothing.
    """
    if m < 1 or n < 1 or n % m:
        raise ValueError("need m | n with m, n >= 1, got (%s, %s)" % (m, n))
    if d is None:
        d = common_field(A, B)
    # No integral rescaling here: only root COUNTS matter, and rescaling by
    # lam^2 inflates every division-polynomial root, which the root finders
    # pay for; they clear denominators internally at no such cost.
    curve = new_curve(A, B, d)
    if m >= 2:
        pm = primitive_division_poly_at(m, curve.A, curve.B)
        if len(_field_roots(pm, d)) != pm.degree:
            return False
    if n >= 2:
        pn = primitive_division_poly_at(n, curve.A, curve.B)
        if not _field_roots(pn, d):
            return False
    return True


# ---------------------------------------------------------------------------
# torsion subgroup


@dataclass(frozen=True)
class TorsionShape:
    """Torsion group Z/m x Z/n (m | n) with witness generators.

    generators is () for the trivial group, (P,) with P of order n when the
    group is cyclic, and (Q, P) with Q of order m, P of order n, and
    <Q> ∩ <P> = {O} otherwise.
    """

    m: int
    n: int
    generators: tuple

    def __post_init__(self):
        if self.m < 1 or self.n < 1 or self.n % self.m:
            raise ValueError("invalid shape (%s, %s)" % (self.m, self.n))

    @property
    def order(self) -> int:
        return self.m * self.n

    def pair(self) -> tuple[int, int]:
        return (self.m, self.n)


def _torsion_point_pools(curve: Curve, enum_orders) -> dict[int, list[Point]]:
    """All points of each exact order N in enum_orders, sorted by key.

    Roots of the order-N primitive division polynomial are exactly the
    x-coordinates of points of exact order N; a root contributes points
    iff x^3 + Ax + B is a square in the field.
    """
    pools: dict[int, list[Point]] = {}
    cache: dict = {}
    for N in sorted(set(enum_orders)):
        if N == 1:
            continue
        poly = primitive_division_poly_at(N, curve.A, curve.B, cache=cache)
        pts = []
        for x0 in _field_roots(poly, curve.d):
            y0 = _sqrt_ambient(curve.rhs(x0), curve.d)
            if y0 is None:
                continue
            P = point(curve, x0, y0)
            pts.append(P)
            if y0 != 0:
                pts.append(-P)
        if pts:
            pools[N] = sorted(pts, key=_point_key)
    return pools


def _full_torsion_level(pools: dict[int, list[Point]], m: int) -> bool:
    """Whether all m^2 points of E[m] are in the pools (m in {2, 3, 4})."""
    counts = {2: 3, 3: 8, 4: 12}  # exact-order counts inside (Z/m)^2
    if m == 2:
        return len(pools.get(2, ())) == 3
    if m == 3:
        return len(pools.get(3, ())) == 8
    return len(pools.get(2, ())) == 3 and len(pools.get(4, ())) == counts[4]


def _assemble_shape(curve: Curve, pools: dict[int, list[Point]], orders) -> TorsionShape:
    """Build the certified (m, n) shape from complete exact-order pools."""
    realized = [N for N in pools if N in set(orders)] or [1]
    n = max(realized)
    # m-part: largest m' | n with E[m'] fully rational; roots of unity gate
    # (the Weil pairing forces zeta_m into the field: sqrt(-3) for m = 3,
    # sqrt(-1) for m = 4).
    m = 1
    for mp in (2, 3, 4):
        if n % mp:
            continue
        if mp == 3 and curve.d != -3:
            continue
        if mp == 4 and curve.d != -1:
            continue
        if _full_torsion_level(pools, mp):
            m = mp
    # Consistency: inside Z/m x Z/n the number of points of each exact order
    # is forced; any surplus means torsion extends beyond the candidate
    # orders (a misconfigured bound), any deficit a structural error.
    for N in sorted(set(orders)):
        if N == 1:
            continue
        found = len(pools.get(N, ()))
        expected = _expected_order_count(N, m, n)
        if found != expected:
            raise BoundExceeded(
                "order-%d point count %d does not match shape Z/%d x Z/%d "
                "(expected %d); torsion exceeds the configured orders"
                % (N, found, m, n, expected)
            )
    if n == 1:
        return TorsionShape(1, 1, ())
    if m == 1:
        return TorsionShape(1, n, (pools[n][0],))
    # Generators: the first (order-m witness, order-n witness) pair in sort
    # order whose cyclic groups intersect trivially.  The m-witness loop is
    # needed: every order-n point may double into one particular 2-torsion
    # point, which then cannot serve as the m-witness.
    def _cyclic(P: Point) -> set:
        multiples = set()
        acc = P
        while not acc.is_infinity:
            multiples.add(acc)
            acc = acc + P
        return multiples

    for Q in pools[m]:
        q_cyclic = _cyclic(Q)
        for P in pools[n]:
            if not (_cyclic(P) & q_cyclic):
                return TorsionShape(m, n, (Q, P))
    raise BoundExceeded(
        "no independent generator pair for shape Z/%d x Z/%d" % (m, n)
    )


def torsion_subgroup(
    A,
    B,
    d: int | None = None,
    orders=None,
    fast: bool = False,
) -> TorsionShape:
    """The torsion subgroup of y^2 = x^3 + Ax + B over Q or Q(sqrt(d)).

    Candidate exact orders come from the field's classification list (or the
    ``orders`` override); for each, roots of the primitive division
    polynomial are tested for a field-rational y and confirmed with
    point_order.  ``fast=True`` switches to integral-model torsion-point
    enumeration (integrality plus y^2 | 4A^3 + 27B^2), available over Q
    only; both routes return identical shapes and witnesses.
    """
    if d is None:
        d = common_field(A, B)
    else:
        A, B = in_field(A, d), in_field(B, d)
    curve = new_curve(A, B, d)
    if orders is None:
        orders = RATIONAL_ORDERS if d is None else QUADRATIC_ORDERS
    orders = tuple(orders)
    if any(N < 1 for N in orders):
        raise ValueError("orders must be >= 1")
    if fast:
        if d is not None:
            raise ValueError("fast enumeration works over Q only")
        pools = _integral_point_pools(curve, max(orders))
    else:
        # enumerate on an integral model (monic integer division polynomials
        # keep root-finding cheap) and map the points back; dividing every
        # coordinate by the same positive constant preserves the sort order,
        # so witness selection matches direct enumeration
        sA, sB, lam = _integral_model(curve.A, curve.B)
        work = curve if lam == 1 else new_curve(sA, sB, d)
        pools = _torsion_point_pools(work, set(orders) | {2, 3, 4})
        bound = max(orders)
        for N, pts in pools.items():
            for P in pts:
                k = point_order(P, max(bound, N))
                if k is None or k != N:
                    raise BoundExceeded(
                        "division-polynomial root of claimed order %d has "
                        "order %s" % (N, k)
                    )
        if lam != 1:
            lam2, lam3 = lam * lam, lam * lam * lam
            pools = {
                N: [point(curve, P.x / lam2, P.y / lam3) for P in pts]
                for N, pts in pools.items()
            }
    return _assemble_shape(curve, pools, orders)


# ---------------------------------------------------------------------------
# fast integral enumeration (over Q)


def _integer_cubic_roots(a: int, b: int) -> list[int]:
    """Integer roots of x^3 + a x + b via exact bisection.

    The cubic is monotone outside [-r, r] with r just above sqrt(-a/3) (and
    everywhere when a >= 0), so each monotone integer interval holds at most
    one root, found by sign-change bisection in exact arithmetic.
    """

    def f(x: int) -> int:
        return x * x * x + a * x + b

    bound = 1 + max(abs(a), abs(b))
    if a >= 0:
        pieces = [(-bound, bound)]
    else:
        # decreasing exactly on [-sqrt(-a/3), sqrt(-a/3)] ⊇ [-t0, t0];
        # increasing outside [-t1, t1] since t1 >= sqrt(-a/3)
        t0 = math.isqrt(-a // 3)
        t1 = min(t0 + 1, bound)
        pieces = [(-bound, -t1), (-t0, t0), (t1, bound)]
    roots = set()
    for lo, hi in pieces:
        if lo > hi:
            continue
        flo, fhi = f(lo), f(hi)
        if flo == 0:
            roots.add(lo)
        if fhi == 0:
            roots.add(hi)
        if flo * fhi >= 0:
            continue
        while hi - lo > 1:
            mid = (lo + hi) // 2
            fmid = f(mid)
            if fmid == 0:
                roots.add(mid)
                break
            if (fmid > 0) == (fhi > 0):
                hi, fhi = mid, fmid
            else:
                lo, flo = mid, fmid
    return sorted(r for r in roots if f(r) == 0)


def _square_divisor_roots(n: int):
    """All y >= 0 with y^2 dividing n (n != 0)."""
    ys = [1]
    for p, e in factor_int(abs(n)).items():
        ys = [y * p**k for y in ys for k in range(e // 2 + 1)]
    return sorted(ys)


def _integral_point_pools(curve: Curve, bound: int) -> dict[int, list[Point]]:
    """Exact-order pools over Q via integrality of torsion points.

    On an integral model every torsion point has integer coordinates with
    y = 0 or y^2 | 4A^3 + 27B^2; a non-integral (A, B) is first scaled to
    the integral model (u^4 A, u^6 B) and the points mapped back through
    (x, y) -> (x / u^2, y / u^3).
    """
    A, B = Fraction(curve.A), Fraction(curve.B)
    u = A.denominator * B.denominator  # coarse but exact common scaling
    Ai = A * u**4
    Bi = B * u**6
    assert Ai.denominator == 1 and Bi.denominator == 1
    Ai, Bi = int(Ai), int(Bi)
    disc = 4 * Ai**3 + 27 * Bi**2
    candidates = []
    for y in [0] + _square_divisor_roots(disc):
        for x in _integer_cubic_roots(Ai, Bi - y * y):
            candidates.append((x, y))
            if y:
                candidates.append((x, -y))
    scaled = new_curve(Fraction(Ai), Fraction(Bi))
    pools: dict[int, list[Point]] = {}
    for x, y in set(candidates):
        P = point(scaled, Fraction(x), Fraction(y))
        k = point_order(P, bound)
        if k is None or k == 1:
            continue
        if k not in RATIONAL_ORDERS:
            raise BoundExceeded("integral point of order %d over Q" % k)
        back = point(curve, Fraction(x, u**2), Fraction(y, u**3))
        pools.setdefault(k, []).append(back)
    return {N: sorted(pts, key=_point_key) for N, pts in pools.items()}


# ---------------------------------------------------------------------------
# twist classes


@dataclass(frozen=True)
class TwistClassReport:
    """Square classes of twists realizing Z/m x Z/n, with check results.

    pairs holds (D, verified) for one representative D per square class;
    every_class marks the n <= 2 case where all of K^x / (K^x)^2 works;
    degenerate lists any division-polynomial roots whose twist parameter
    collapsed to zero (impossible for n >= 3 on a nonsingular curve, so a
    nonempty list flags corrupted input data).
    """

    pairs: tuple
    every_class: bool = False
    degenerate: tuple = ()

    def classes(self) -> tuple:
        return tuple(D for D, ok in self.pairs if ok)


def _full_level_on(curve: Curve, m: int) -> bool:
    """E[m] subset of E(K) for m in {1, 2, 3, 4} by direct root checks."""
    if m == 1:
        return True
    if m == 4 and not _full_level_on(curve, 2):
        return False
    pm = primitive_division_poly_at(m, curve.A, curve.B)
    roots = _field_roots(pm, curve.d)
    if len(roots) != pm.degree:
        return False
    if m == 2:
        return True  # order-2 points have y = 0
    return all(_sqrt_ambient(curve.rhs(x0), curve.d) is not None for x0 in roots)


def twist_classes(A, B, m: int, n: int, d: int | None = None) -> TwistClassReport:
    """Quadratic twists of y^2 = x^3 + Ax + B containing Z/m x Z/n.

    For each field root alpha of the order-n primitive division polynomial,
    D = alpha^3 + A*alpha + B twists the curve so that (D*alpha, D^2) is a
    point of order n; candidates are deduplicated modulo squares and each
    one's m-part is verified on the twist.  For n <= 2 every square class
    works, reported as the single class {1}.
    """
    if d is None:
        d = common_field(A, B)
    else:
        A, B = in_field(A, d), in_field(B, d)
    if not condition_P(A, B, m, n, d):
        raise ConditionPNotSatisfied(
            "curve (%s, %s) does not satisfy the (m, n) = (%d, %d) "
            "split-and-root condition" % (A, B, m, n)
        )
    curve = new_curve(A, B, d)
    one = in_field(1, d)
    if n <= 2:
        return TwistClassReport(pairs=((one, True),), every_class=True)
    pn = primitive_division_poly_at(n, curve.A, curve.B)
    reps = []
    degenerate = []
    for alpha in _field_roots(pn, d):
        D = curve.rhs(alpha)
        if D == 0:
            # A zero twist parameter would make alpha a 2-torsion
            # x-coordinate, contradicting exact order n >= 3.
            degenerate.append(alpha)
            continue
        if any(same_square_class(D, seen) for seen, _ in reps):
            continue
        twisted = quadratic_twist(curve, D)
        P = point(twisted, D * alpha, D * D)
        ok = point_order(P, n) == n and _full_level_on(twisted, m)
        reps.append((D, ok))
    report = TwistClassReport(pairs=tuple(reps), degenerate=tuple(degenerate))
    verified = report.classes()
    assert len(verified) <= 3, "more than three admissible twist classes"
    if m >= 3:
        assert len(verified) == 1, "twist class not unique despite m >= 3"
    return report
