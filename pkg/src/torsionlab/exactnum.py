"""Exact scalar arithmetic over Q and quadratic fields Q(sqrt(d)).

Rationals are stdlib ``fractions.Fraction`` (already reduced, exact).
Quadratic-field elements are ``QuadScalar`` values a + b*sqrt(d) with a, b
rational and d a fixed squarefree integer not in {0, 1}; the field context is
carried by each element.  Both kinds support +, -, *, /, ** and exact
equality, so polynomial and curve code upstream is field-agnostic.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

from .errors import ParseError

Rational = Fraction

# A FieldScalar is a Fraction (over Q) or a QuadScalar (over Q(sqrt d)).
FieldScalar = object


def _sqfree_check(d: int) -> None:
    if d in (0, 1):
        raise ValueError("d must be a squarefree integer outside {0, 1}")
    n = abs(d)
    f = 2
    while f * f <= n:
        if n % (f * f) == 0:
            raise ValueError("d=%d is not squarefree" % d)
        f += 1


class QuadScalar:
    """Element a + b*sqrt(d) of Q(sqrt(d)), immutable and hashable."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int, _checked: bool = False):
        if not _checked:
            _sqfree_check(d)
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("QuadScalar is immutable")

    # -- coercion ---------------------------------------------------------
    def _coerce(self, other) -> "QuadScalar | None":
        if isinstance(other, QuadScalar):
            if other.d != self.d:
                raise ValueError("mixed quadratic fields: sqrt(%d) vs sqrt(%d)" % (self.d, other.d))
            return other
        if isinstance(other, (int, Fraction)):
            return QuadScalar(other, 0, self.d, _checked=True)
        return None

    # -- ring operations ---------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadScalar(self.a + o.a, self.b + o.b, self.d, _checked=True)

    __radd__ = __add__

    def __neg__(self):
        return QuadScalar(-self.a, -self.b, self.d, _checked=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadScalar(self.a - o.a, self.b - o.b, self.d, _checked=True)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        # (a1 + b1 w)(a2 + b2 w) with w^2 = d
        return QuadScalar(
            self.a * o.a + self.b * o.b * self.d,
            self.a * o.b + self.b * o.a,
            self.d,
            _checked=True,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadScalar":
        return QuadScalar(self.a, -self.b, self.d, _checked=True)

    def norm(self) -> Fraction:
        """Field norm a^2 - d*b^2 (product with the conjugate)."""
        return self.a * self.a - self.b * self.b * self.d

    def inverse(self) -> "QuadScalar":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt(%d))" % self.d)
        return QuadScalar(self.a / n, -self.b / n, self.d, _checked=True)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = QuadScalar(1, 0, self.d, _checked=True)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparisons / hashing ---------------------------------------------
    def __eq__(self, other):
        if isinstance(other, QuadScalar):
            return self.d == other.d and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)  # agree with Fraction/int for rational values
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __repr__(self):
        return "QuadScalar(%s, %s, d=%d)" % (self.a, self.b, self.d)

    def __str__(self):
        return format_scalar(self)


# ---------------------------------------------------------------------------
# field helpers


def is_rational(x) -> bool:
    return isinstance(x, (int, Fraction))


def field_d(x) -> int | None:
    """The d of x's field, or None for Q."""
    return x.d if isinstance(x, QuadScalar) else None


def in_field(x, d: int | None):
    """Coerce x into Q (d=None) or Q(sqrt(d)). Raises on genuine mismatch."""
    if d is None:
        if isinstance(x, QuadScalar):
            if x.b != 0:
                raise ValueError("%r is not rational" % (x,))
            return x.a
        return Fraction(x)
    if isinstance(x, QuadScalar):
        if x.d != d:
            raise ValueError("element of Q(sqrt(%d)) used in Q(sqrt(%d))" % (x.d, d))
        return x
    return QuadScalar(x, 0, d)


def rational_part(x) -> Fraction:
    """x as a Fraction; requires the sqrt-part to vanish."""
    if isinstance(x, QuadScalar):
        if x.b != 0:
            raise ValueError("%r has a nonzero sqrt component" % (x,))
        return x.a
    return Fraction(x)


def common_field(*xs) -> int | None:
    """The d shared by all QuadScalar arguments (None if all rational)."""
    d = None
    for x in xs:
        if isinstance(x, QuadScalar):
            if d is None:
                d = x.d
            elif d != x.d:
                raise ValueError("mixed quadratic fields sqrt(%d), sqrt(%d)" % (d, x.d))
    return d


# ---------------------------------------------------------------------------
# square testing


def _rational_sqrt(x: Fraction) -> Fraction | None:
    """Exact square root of a rational, or None."""
    if x < 0:
        return None
    if x == 0:
        return Fraction(0)
    pn, pd = x.numerator, x.denominator
    rn = math.isqrt(pn)
    if rn * rn != pn:
        return None
    rd = math.isqrt(pd)
    if rd * rd != pd:
        return None
    return Fraction(rn, rd)


def sqrt_in_field(x):
    """Some y in x's field with y*y == x, else None.

    Over Q: integer square tests on numerator and denominator.  Over
    Q(sqrt(d)): solve (p + q*sqrt(d))^2 = a + b*sqrt(d), i.e. the rational
    system p^2 + q^2 d = a, 2pq = b.
    """
    if is_rational(x):
        return _rational_sqrt(Fraction(x))
    if not isinstance(x, QuadScalar):
        raise TypeError("sqrt_in_field expects a field scalar, got %r" % (x,))
    a, b, d = x.a, x.b, x.d
    if b == 0:
        r = _rational_sqrt(a)
        if r is not None:
            return QuadScalar(r, 0, d, _checked=True)
        # a = (q*sqrt(d))^2 = q^2 d
        q = _rational_sqrt(a / d)
        if q is not None:
            return QuadScalar(0, q, d, _checked=True)
        return None
    # b != 0: the norm a^2 - b^2 d must be a rational square c^2, and then
    # p^2 = (a +- c)/2 for one of the signs, q = b/(2p).
    c = _rational_sqrt(a * a - b * b * d)
    if c is None:
        return None
    for sign in (1, -1):
        p2 = (a + sign * c) / 2
        p = _rational_sqrt(p2)
        if p is not None and p != 0:
            q = b / (2 * p)
            cand = QuadScalar(p, q, d, _checked=True)
            if cand * cand == x:
                return cand
    return None


def same_square_class(x, y) -> bool:
    """True iff x/y is a square in the ambient field. Nonzero inputs required."""
    if not x or not y:
        raise ValueError("same_square_class requires nonzero inputs")
    d = common_field(x, y)
    if d is None:
        return _rational_sqrt(Fraction(x) / Fraction(y)) is not None
    return sqrt_in_field(in_field(x, d) / in_field(y, d)) is not None


# ---------------------------------------------------------------------------
# naive height


def naive_height(A, B) -> int:
    """Projective height of (A^3 : B^2 : 1) on primitive integer coordinates.

    For integer A, B this is max(|A|^3, B^2, 1).  Singular pairs are allowed;
    the height does not see the discriminant.
    """
    a3 = Fraction(A) ** 3
    b2 = Fraction(B) ** 2
    lcm = a3.denominator * b2.denominator // math.gcd(a3.denominator, b2.denominator)
    t = (a3.numerator * (lcm // a3.denominator), b2.numerator * (lcm // b2.denominator), lcm)
    g = math.gcd(math.gcd(abs(t[0]), t[1]), t[2])
    return max(abs(t[0]), t[1], t[2]) // g


# ---------------------------------------------------------------------------
# parsing / formatting ("p/q" and "p/q+r/s*sqrt(d)")

_RAT_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")
_SQRT_RE = re.compile(r"^(?P<sign>[+-])?(?:(?P<b>\d+(?:/\d+)?)\*)?sqrt\((?P<d>-?\d+)\)$")


def parse_scalar(text: str, d: int | None = None):
    """Parse "p/q" or "p/q+r/s*sqrt(d)" (spaces allowed) into a field scalar.

    If d is given, plain rationals are returned as Fractions but sqrt-terms
    must match d.  Examples: "3", "-1/2", "1/2+3/4*sqrt(-3)", "sqrt(5)",
    "-sqrt(-1)", "2-sqrt(2)".

    The string is first split on top-level +/- (signs inside sqrt(...) stay
    put), so a fraction multiplying a sqrt, e.g. "1/10*sqrt(-1)", can never
    be misread as a rational part plus a different sqrt coefficient.
    """
    s = text.replace(" ", "")
    if not s:
        raise ParseError("empty scalar")
    terms: list[str] = []
    depth = 0
    cur = ""
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and i > 0:
            terms.append(cur)
            cur = ch
        else:
            cur += ch
    terms.append(cur)
    mq = _SQRT_RE.match(terms[-1])
    if mq is None:
        if len(terms) != 1 or not _RAT_RE.match(terms[0]):
            raise ParseError("cannot parse scalar %r" % text)
        return Fraction(terms[0])
    if len(terms) > 2:
        raise ParseError("cannot parse scalar %r" % text)
    if len(terms) == 2:
        if not _RAT_RE.match(terms[0]):
            raise ParseError("cannot parse scalar %r" % text)
        a = Fraction(terms[0])
    else:
        a = Fraction(0)
    dd = int(mq.group("d"))
    if d is not None and dd != d:
        raise ParseError("scalar %r lives in Q(sqrt(%d)), expected Q(sqrt(%s))" % (text, dd, d))
    b = Fraction(mq.group("b")) if mq.group("b") is not None else Fraction(1)
    if mq.group("sign") == "-":
        b = -b
    try:
        return QuadScalar(a, b, dd)
    except ValueError as e:
        raise ParseError(str(e)) from None


def format_scalar(x) -> str:
    """Inverse of parse_scalar, canonical form."""
    if is_rational(x):
        return str(Fraction(x))
    if x.b == 0:
        return str(x.a)
    if x.b > 0:
        bpart = "+%s*sqrt(%d)" % (x.b, x.d) if x.b != 1 else "+sqrt(%d)" % x.d
    else:
        bpart = "-%s*sqrt(%d)" % (-x.b, x.d) if x.b != -1 else "-sqrt(%d)" % x.d
    if x.a == 0:
        return bpart.lstrip("+")
    return "%s%s" % (x.a, bpart)


def scalar_to_json(x):
    """JSON form: string via format_scalar (keeps exactness)."""
    return format_scalar(x)
