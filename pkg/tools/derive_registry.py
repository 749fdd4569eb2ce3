"""Derivation script for the registry families (run manually, not shipped).

Builds polynomial (f, g, h) data for the Tate-normal-form families (1, N)
and the 2-torsion/composition-derived pairs, certifying everything with
verify_family before it is written into data/families.json.
"""

import math
import os
from fractions import Fraction

from torsionlab.families import FamilySpec, verify_family, registry_dumps
from torsionlab.polylab import (
    Poly,
    exact_divide,
    poly_gcd,
    rational_roots,
    squarefree_part,
)
from torsionlab.weierstrass import new_curve, Point, point_order
from torsionlab.errors import SingularCurve, PointNotOnCurve

R = Poly([0, 1])
ONE = Poly([1])


class RatFunc:
    """num/den over Q[r], always reduced, denominator monic."""

    def __init__(self, num, den=ONE):
        if isinstance(num, (int, Fraction)):
            num = Poly([num])
        if isinstance(den, (int, Fraction)):
            den = Poly([den])
        if den.is_zero:
            raise ZeroDivisionError("zero denominator")
        if not num.is_zero:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num = num // g
                den = den // g
        scale = 1 / Fraction(den.lc)
        self.num, self.den = num * scale, den * scale

    def __add__(self, o):
        o = o if isinstance(o, RatFunc) else RatFunc(o)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, o):
        return self + (-(o if isinstance(o, RatFunc) else RatFunc(o)))

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = o if isinstance(o, RatFunc) else RatFunc(o)
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __pow__(self, k):
        return RatFunc(self.num**k, self.den**k)

    def as_poly(self):
        if self.den != ONE:
            raise ValueError("not a polynomial: den = %s" % self.den)
        return self.num

    def __repr__(self):
        return "(%s)/(%s)" % (self.num, self.den)


def monic_fix(rf):
    return rf


def tate_fgh(pb, qb, pc, qc):
    """(f, g, h) for the Tate family b = pb/qb, c = pc/qc.

    b2 = (1-c)^2 - 4b has some denominator w; then w^2 c4 and w^3 c6 are
    polynomials and (f, g, h) = (-27 w^2 c4, -54 w^3 c6, 3 w b2).
    """
    b = RatFunc(pb, qb)
    c = RatFunc(pc, qc)
    one_c = RatFunc(ONE) - c
    b2 = one_c * one_c - 4 * b
    b4 = one_c * (-b)          # a1*a3 with a1 = 1-c, a3 = -b
    b6 = b * b                 # a3^2
    c4 = b2 * b2 - 24 * b4
    c6 = -(b2**3) + 36 * b2 * b4 - 216 * b6
    w = RatFunc(b2.den)
    f = (c4 * w * w * (-27)).as_poly()
    g = (c6 * w**3 * (-54)).as_poly()
    h = (b2 * w * 3).as_poly()
    return f, g, h


def check_family(tag, spec, samples=12):
    rep = verify_family(spec, samples)
    degs = (spec.f.degree, spec.g.degree, spec.h.degree)
    print(
        "%-7s degs f,g,h = %-12s %s %s"
        % (tag, degs, "PASS" if rep.passed else "FAIL", rep.failures[:2])
    )
    return rep.passed


def poly_of(fractions):
    return Poly([Fraction(x) for x in fractions])


# ---------------------------------------------------------------------------
# helpers for the 2-torsion compositions


def lagrange(points):
    """Interpolating polynomial through [(x, y)] with Fraction coords."""
    total = Poly([0])
    for i, (xi, yi) in enumerate(points):
        term = Poly([yi])
        for j, (xj, _) in enumerate(points):
            if i == j:
                continue
            term = term * Poly([-xj, 1]) * Fraction(1, xi - xj)
        total = total + term
    return total


def square_decompose(p):
    """(S, p0) with p = S^2 * p0 and p0 squarefree."""
    if p.degree <= 0:
        return ONE, p
    rad = squarefree_part(p)
    if rad.degree == p.degree:
        return ONE, p
    q = exact_divide(p, rad)
    s1, p1 = square_decompose(q)
    return s1 * p1, exact_divide(rad, p1)


def is_square_fraction(x):
    x = Fraction(x)
    if x < 0:
        return None
    a = math.isqrt(x.numerator)
    b = math.isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Fraction(a, b)
    return None


def conic_point(D):
    """A rational (r0, s0) with s0^2 = D(r0), by brute search."""
    for qden in range(1, 25):
        for pnum in range(-80 * qden, 80 * qden + 1):
            r0 = Fraction(pnum, qden)
            s0 = is_square_fraction(D(r0))
            if s0 is not None:
                return r0, s0
    raise RuntimeError("no rational point found on the conic")


def conic_parameterize(D, r0, s0):
    """All points of s^2 = D(r) (deg D <= 2) as r = p(tau)/q(tau).

    Lines through (r0, s0) with slope tau: the second intersection is
    r = -(r0 tau^2 - 2 s0 tau + d1 + d2 r0) / (d2 - tau^2).
    """
    d0, d1, d2 = (Fraction(D.coeff(i)) for i in range(3))
    p = Poly([-(d1 + d2 * r0), 2 * s0, -r0])
    q = Poly([d2, 0, -1])
    return p, q


def homog_subst(poly, p, q, bound):
    """q(tau)^bound * poly(p(tau)/q(tau)) — requires deg poly <= bound."""
    assert poly.degree <= bound
    acc = Poly([0])
    pp = ONE
    qq = [ONE]
    for _ in range(bound):
        qq.append(qq[-1] * q)
    for i in range(poly.degree + 1):
        acc = acc + poly.coeff(i) * pp * qq[bound - i]
        pp = pp * p
    return acc


def compose_family(m, n, f, g, h, p, q, field=None):
    """Family at r = p(tau)/q(tau), twisted by q^k to clear denominators.

    k is the weight scale max(deg f / 2, deg g / 3, deg h): substitution
    multiplies every root by q(tau)^k, so (f, g, h) pick up q^{2k}, q^{3k},
    q^k respectively.
    """
    k = max(
        Fraction(f.degree, 2), Fraction(g.degree, 3), Fraction(h.degree)
    )
    assert k.denominator == 1
    k = int(k)
    f2 = homog_subst(f, p, q, 2 * k)
    g2 = homog_subst(g, p, q, 3 * k)
    h2 = homog_subst(h, p, q, k)
    # strip any common square content the composition introduced
    for name, poly in (("f", f2), ("g", g2), ("h", h2)):
        if poly.is_zero:
            raise RuntimeError("%s vanished under composition" % name)
    return FamilySpec(m, n, f2, g2, h2, required_field=field)


def two_torsion_root(f, g, samples=14):
    """The rational 2-torsion x-coordinate of (f(r), g(r)) as a polynomial.

    Interpolated from the unique rational root of x^3 + f(r0) x + g(r0) at
    integer samples, then certified by exact substitution.
    """
    bound = max(f.degree // 2, (g.degree + 2) // 3) * 2
    pts = []
    r0 = 0
    while len(pts) < bound + 3:
        r0 += 1
        cubic = Poly([g(Fraction(r0)), f(Fraction(r0)), 0, 1])
        roots = rational_roots(cubic)
        if len(roots) == 1:
            pts.append((Fraction(r0), roots[0]))
    x0 = lagrange(pts[: bound + 1])
    for xi, yi in pts:
        assert x0(xi) == yi, "interpolation missed a sample"
    # exact certificate: x0^3 + f*x0 + g = 0 in Q[r]
    residue = x0 * x0 * x0 + f * x0 + g
    assert residue.is_zero, "interpolated root is not exact"
    return x0


def main():
    specs = []

    # ---- (1, N) from Tate normal form ------------------------------------
    tate = {
        4: (R, ONE, Poly([0]), ONE),
        5: (R, ONE, R, ONE),
        6: (R * R + R, ONE, R, ONE),
        7: (R**3 - R**2, ONE, R**2 - R, ONE),
        8: ((2 * R - ONE) * (R - ONE), ONE, (2 * R - ONE) * (R - ONE), R),
        9: (
            R**2 * (R - ONE) * (R * (R - ONE) + ONE),
            ONE,
            R**2 * (R - ONE),
            ONE,
        ),
        10: (
            R**3 * (R - ONE) * (2 * R - ONE),
            (R**2 - 3 * R + ONE) ** 2,
            -(R * (R - ONE) * (2 * R - ONE)),
            R**2 - 3 * R + ONE,
        ),
        12: (
            R * (2 * R - ONE) * (3 * R**2 - 3 * R + ONE) * (2 * R**2 - 2 * R + ONE),
            (R - ONE) ** 4,
            -(R * (2 * R - ONE) * (3 * R**2 - 3 * R + ONE)),
            (R - ONE) ** 3,
        ),
    }
    tate_polys = {}
    for N, (pb, qb, pc, qc) in tate.items():
        f, g, h = tate_fgh(pb, qb, pc, qc)
        tate_polys[N] = (f, g, h)
        try:
            spec = FamilySpec(1, N, f, g, h)
        except ValueError as exc:
            print("(1,%d) spec invalid: %s" % (N, exc))
            continue
        if check_family("(1,%d)" % N, spec):
            specs.append(spec)

    # ---- (2, 4): split cubic with root differences r^2 and 1 --------------
    # roots (r^2+1, 1-2r^2, r^2-2) sum to zero; differences from the first
    # root are 3r^2 * 3 = (3r)^2 times squares, so an order-4 point sits
    # above it with x = r^2 + 3r + 1.
    E1, E2, E3 = Poly([1, 0, 1]), Poly([1, 0, -2]), Poly([-2, 0, 1])
    f24 = E1 * E2 + E1 * E3 + E2 * E3
    g24 = -1 * (E1 * E2 * E3)
    h24 = Poly([1, 3, 1])
    spec24 = FamilySpec(2, 4, f24, g24, h24)
    if check_family("(2,4)", spec24):
        specs.append(spec24)

    # ---- (2, 2N) from (1, 2N) by splitting the 2-division cubic ----------
    for N2 in (6, 8):
        f1, g1, h1 = tate_polys[N2]
        x0 = two_torsion_root(f1, g1)
        delta = -3 * (x0 * x0) - 4 * f1
        S, d0 = square_decompose(delta)
        print(
            "(2,%d) quadratic cofactor disc: deg %d = sq^2 * (deg %d)"
            % (N2, delta.degree, d0.degree)
        )
        if d0.degree > 2:
            print("(2,%d) BLOCKED: discriminant not conic" % N2)
            continue
        r0, s0 = conic_point(d0)
        p, q = conic_parameterize(d0, r0, s0)
        spec = compose_family(2, N2, f1, g1, h1, p, q)
        if check_family("(2,%d)" % N2, spec):
            specs.append(spec)

    # ---- (4, 4): (2,4) at r = (tau^2+1)/(2 tau), where r^2 - 1 is square --
    spec44 = compose_family(
        4, 4, f24, g24, h24, Poly([1, 0, 1]), Poly([0, 2]), field=-1
    )
    if check_family("(4,4)", spec44):
        specs.append(spec44)

    print()
    print("%d registry families derived" % len(specs))
    if len(specs) == 12:
        out = os.path.join(
            os.path.dirname(__file__), "..", "src", "torsionlab", "data", "families.json"
        )
        with open(out, "w") as fh:
            fh.write(registry_dumps(specs) + "\n")
        print("wrote %s" % os.path.normpath(out))
    return specs


if __name__ == "__main__":
    main()
