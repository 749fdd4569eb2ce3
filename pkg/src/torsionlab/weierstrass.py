"""Elliptic curves y^2 = x^3 + Ax + B over exact fields, with group law,
point orders, quadratic twists, and the Weil pairing for m in {2, 3, 4}.

Coordinates are Fractions over Q or QuadScalars over Q(sqrt(d)); every
operation is exact.  Points are affine-or-infinity; at torsion scale
(orders <= 18) there is nothing to gain from projective caching.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    FieldTooSmall,
    OrderMismatch,
    PointNotOnCurve,
    SingularCurve,
    ZeroTwist,
)
from .exactnum import QuadScalar, common_field, in_field, sqrt_in_field

# ---------------------------------------------------------------------------
# curves


class Curve:
    """Nonsingular short Weierstrass curve with exact coefficients."""

    __slots__ = ("A", "B", "d")

    def __init__(self, A, B, d: int | None = None):
        if d is None:
            d = common_field(A, B)
        A = in_field(A, d)
        B = in_field(B, d)
        if 4 * A**3 + 27 * B**2 == 0:
            raise SingularCurve("4A^3 + 27B^2 = 0 for (A, B) = (%s, %s)" % (A, B))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("Curve is immutable")

    def rhs(self, x):
        """x^3 + Ax + B in the curve's field."""
        x = in_field(x, self.d)
        return x * x * x + self.A * x + self.B

    def discriminant(self):
        return -16 * (4 * self.A**3 + 27 * self.B**2)

    def __eq__(self, other):
        if not isinstance(other, Curve):
            return NotImplemented
        return self.A == other.A and self.B == other.B and self.d == other.d

    def __hash__(self):
        return hash((self.A, self.B, self.d))

    def __repr__(self):
        return "Curve(%s, %s%s)" % (
            self.A,
            self.B,
            ", d=%d" % self.d if self.d is not None else "",
        )


def new_curve(A, B, d: int | None = None) -> Curve:
    """Curve constructor; SingularCurve if 4A^3 + 27B^2 = 0."""
    return Curve(A, B, d)


# ---------------------------------------------------------------------------
# points


class Point:
    """Affine point or the point at infinity on a fixed curve."""

    __slots__ = ("curve", "x", "y", "is_infinity")

    def __init__(self, curve: Curve, x=None, y=None, *, infinity: bool = False):
        object.__setattr__(self, "curve", curve)
        object.__setattr__(self, "is_infinity", infinity)
        if infinity:
            object.__setattr__(self, "x", None)
            object.__setattr__(self, "y", None)
            return
        x = in_field(x, curve.d)
        y = in_field(y, curve.d)
        if y * y != curve.rhs(x):
            raise PointNotOnCurve("(%s, %s) is not on %r" % (x, y, curve))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("Point is immutable")

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        if self.curve != other.curve:
            return False
        if self.is_infinity or other.is_infinity:
            return self.is_infinity and other.is_infinity
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.curve, self.x, self.y, self.is_infinity))

    def __repr__(self):
        if self.is_infinity:
            return "Point(inf on %r)" % (self.curve,)
        return "Point(%s, %s)" % (self.x, self.y)

    def __neg__(self):
        return neg(self)

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, neg(other))

    def __rmul__(self, k: int):
        return scalar_mul(k, self)


def infinity(curve: Curve) -> Point:
    return Point(curve, infinity=True)


def point(curve: Curve, x, y) -> Point:
    return Point(curve, x, y)


# ---------------------------------------------------------------------------
# group law


def neg(P: Point) -> Point:
    if P.is_infinity:
        return P
    return Point(P.curve, P.x, -P.y)


def add(P: Point, Q: Point) -> Point:
    """Chord-tangent addition with the point at infinity as identity."""
    if P.curve != Q.curve:
        raise PointNotOnCurve("points on different curves")
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    if P.x == Q.x:
        if P.y == -Q.y:
            return infinity(P.curve)
        # doubling (P == Q with y != 0)
        lam = (3 * P.x * P.x + P.curve.A) / (2 * P.y)
    else:
        lam = (Q.y - P.y) / (Q.x - P.x)
    x3 = lam * lam - P.x - Q.x
    y3 = lam * (P.x - x3) - P.y
    return Point(P.curve, x3, y3)


def scalar_mul(k: int, P: Point) -> Point:
    """[k]P by double-and-add; [0]P = infinity, [-k]P = -[k]P."""
    if k < 0:
        return neg(scalar_mul(-k, P))
    result = infinity(P.curve)
    base = P
    while k:
        if k & 1:
            result = add(result, base)
        base = add(base, base)
        k >>= 1
    return result


def point_order(P: Point, bound: int) -> int | None:
    """Least k >= 1 with [k]P = infinity, or None if it exceeds bound."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    acc = P
    for k in range(1, bound + 1):
        if acc.is_infinity:
            return k
        acc = add(acc, P)
    return None


# ---------------------------------------------------------------------------
# twists


def quadratic_twist(c: Curve, D) -> Curve:
    """The twist (D^2 A, D^3 B); twisting by D1 then D2 = twisting by D1*D2."""
    D = in_field(D, c.d) if c.d is not None else D
    if not D:
        raise ZeroTwist("twist parameter must be nonzero")
    return Curve(D * D * c.A, D * D * D * c.B, c.d)


# ---------------------------------------------------------------------------
# Weil pairing (Miller's algorithm)


class _Degenerate(Exception):
    """Internal: a Miller line or vertical vanished at the evaluation point."""


def _line_value(T: Point, U: Point, X: Point):
    """Value at X of the line through T and U (tangent when T == U).

    When T + U = infinity the 'line' is the vertical x - x_T.  Returns a
    field scalar; raises _Degenerate on a zero that would later divide.
    """
    c = T.curve
    if T.is_infinity or U.is_infinity:  # pragma: no cover - callers avoid this
        raise _Degenerate("line through infinity")
    if T.x == U.x and T.y == -U.y:
        return X.x - T.x
    if T == U:
        lam = (3 * T.x * T.x + c.A) / (2 * T.y)
    else:
        lam = (U.y - T.y) / (U.x - T.x)
    return (X.y - T.y) - lam * (X.x - T.x)


def _miller(P: Point, m: int, X: Point):
    """f_{m,P}(X) for the normalized Miller function with divisor
    m(P) - m(infinity); requires [m]P = infinity.  Raises _Degenerate when X
    collides with a zero or pole."""
    if X.is_infinity:
        raise _Degenerate("evaluation at infinity")
    one = in_field(1, P.curve.d)
    f = one
    T = P
    for bit in bin(m)[3:]:
        l = _line_value(T, T, X)
        T2 = add(T, T)
        f = f * f * l
        if not T2.is_infinity:
            v = X.x - T2.x
            if not v:
                raise _Degenerate("vertical vanished")
            f = f / v
        if not f:
            raise _Degenerate("line vanished")
        T = T2
        if bit == "1":
            l = _line_value(T, P, X)
            TP = add(T, P)
            f = f * l
            if not TP.is_infinity:
                v = X.x - TP.x
                if not v:
                    raise _Degenerate("vertical vanished")
                f = f / v
            if not f:
                raise _Degenerate("line vanished")
            T = TP
    return f


def _aux_candidates(curve: Curve):
    """Deterministic stream of points on the curve with small coordinates."""
    tried = 0
    k = 0
    while tried < 512:
        for x in ([k, -k] if k else [0]):
            xs = [in_field(x, curve.d)]
            if curve.d is not None:
                w = QuadScalar(0, 1, curve.d)
                xs += [x + w, x - w, x + 2 * w]
            for xf in xs:
                tried += 1
                y = sqrt_in_field(curve.rhs(xf))
                if y is not None:
                    yield Point(curve, xf, y)
        k += 1


def weil_pairing(P: Point, Q: Point, m: int):
    """The Weil pairing e_m(P, Q) for m in {2, 3, 4}.

    Primary path: e_m = (-1)^m f_P(Q) / f_Q(P) when the supports are
    disjoint and no Miller line degenerates.  Fallback: shift Q's divisor by
    an auxiliary point S, e_m = f_P(Q+S) f_Q(-S) / (f_P(S) f_Q(P-S)); up to
    32 auxiliary points are tried before giving up.
    """
    if m not in (2, 3, 4):
        raise ValueError("m must be one of 2, 3, 4")
    if P.curve != Q.curve:
        raise PointNotOnCurve("pairing of points on different curves")
    one = in_field(1, P.curve.d)
    if not scalar_mul(m, P).is_infinity:
        raise OrderMismatch("[%d]P is not the identity" % m)
    if not scalar_mul(m, Q).is_infinity:
        raise OrderMismatch("[%d]Q is not the identity" % m)
    if P.is_infinity or Q.is_infinity:
        return one
    # e_m(P, [k]P) = e_m(P, P)^k = 1: dependent points pair trivially
    acc = infinity(P.curve)
    for _ in range(m):
        if Q == acc:
            return one
        acc = add(acc, P)
    try:
        e = _miller(P, m, Q) / _miller(Q, m, P)
        if m % 2:
            e = -e
    except (_Degenerate, ZeroDivisionError):
        e = None
        attempts = 0
        for S in _aux_candidates(P.curve):
            if attempts >= 32:
                break
            attempts += 1
            try:
                num = _miller(P, m, add(Q, S)) * _miller(Q, m, neg(S))
                den = _miller(P, m, S) * _miller(Q, m, add(P, neg(S)))
                if not den:
                    raise _Degenerate("zero denominator")
                e = num / den
                break
            except (_Degenerate, ZeroDivisionError):
                continue
        if e is None:
            raise FieldTooSmall(
                "no usable auxiliary point found for the Weil pairing"
            ) from None
    assert e**m == one, "Weil pairing value is not an m-th root of unity"
    return e
