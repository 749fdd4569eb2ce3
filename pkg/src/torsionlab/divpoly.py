"""Division polynomials over y^2 = x^3 + s*x + t, symbolically and specialized.

The symbolic ring is Q[s,t][x] extended by a single residual factor of y:
``BiPoly`` stores terms (s-exp, t-exp, x-exp) -> Fraction plus a parity bit,
and every y^2 is reduced to x^3 + s*x + t on the spot.  A parity-1 BiPoly
with term polynomial T means y*T.

Provided here: the psi_n recursion, the multiplication formulas (phi_n,
omega_n), the primitive division polynomials Psi_N assembled by Mobius
product with exact division, symbolic specialization at (A, B), and a fast
univariate specialization path that runs the same recursion directly in
K[x] (used for N beyond symbolic comfort and throughout the census).
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import InexactAssembly, SingularCurve
from .exactnum import common_field, in_field
from .polylab import Poly, divisors, exact_divide

# ---------------------------------------------------------------------------
# BiPoly


class BiPoly:
    """Element of Q[s,t][x] + y*Q[s,t][x], with y^2 always reduced."""

    __slots__ = ("terms", "parity")

    def __init__(self, terms: dict, parity: int = 0):
        clean = {k: Fraction(v) for k, v in terms.items() if v}
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "parity", parity & 1)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("BiPoly is immutable")

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def x_degree(self) -> int | None:
        if not self.terms:
            return None
        return max(k for (_, _, k) in self.terms)

    def __add__(self, other: "BiPoly") -> "BiPoly":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.parity != other.parity:
            raise ValueError("cannot add BiPolys of different y-parity")
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0) + c
        return BiPoly(out, self.parity)

    def __neg__(self) -> "BiPoly":
        return BiPoly({k: -c for k, c in self.terms.items()}, self.parity)

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        return self + (-other)

    def __mul__(self, other) -> "BiPoly":
        if not isinstance(other, BiPoly):
            return BiPoly(
                {k: c * other for k, c in self.terms.items()}, self.parity
            )
        if self.is_zero or other.is_zero:
            return BiPoly({}, 0)
        terms = _mul_terms(self.terms, other.terms)
        if self.parity and other.parity:
            terms = _mul_by_curve(terms)
        return BiPoly(terms, self.parity ^ other.parity)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "BiPoly":
        out = BiPoly({(0, 0, 0): 1}, 0)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            return NotImplemented
        if self.is_zero and other.is_zero:
            return True
        return self.parity == other.parity and self.terms == other.terms

    def __repr__(self):
        return "BiPoly(%s%s)" % (format_bipoly(self), "" if not self.parity else " [*y]")

    def evaluate(self, A, B, x, y=None):
        """Value at s=A, t=B, the given x, and (for parity 1) the given y."""
        acc = 0
        for (i, j, k), c in self.terms.items():
            acc = acc + c * A**i * B**j * x**k
        if self.parity:
            if y is None:
                raise ValueError("parity-1 BiPoly needs a y value")
            acc = acc * y
        return acc

    def weights(self) -> set[int]:
        """Distinct total weights wt = k + 2i + 3j (+3 if parity) of terms."""
        base = 3 if self.parity else 0
        return {k + 2 * i + 3 * j + base for (i, j, k) in self.terms}


def _mul_terms(t1: dict, t2: dict) -> dict:
    out: dict = {}
    for (i1, j1, k1), c1 in t1.items():
        for (i2, j2, k2), c2 in t2.items():
            key = (i1 + i2, j1 + j2, k1 + k2)
            out[key] = out.get(key, 0) + c1 * c2
    return out


def _mul_by_curve(terms: dict) -> dict:
    """Multiply a term dict by y^2 = x^3 + s*x + t."""
    out: dict = {}
    for (i, j, k), c in terms.items():
        for key in ((i, j, k + 3), (i + 1, j, k + 1), (i, j + 1, k)):
            out[key] = out.get(key, 0) + c
    return out


def _exact_div_terms(num: dict, den: dict) -> dict:
    """Exact division in Q[s,t][x]; the divisor's leading x-coefficient must
    be a rational constant (true for every divisor we ever build)."""
    if not den:
        raise ZeroDivisionError("BiPoly division by zero")
    d_deg = max(k for (_, _, k) in den)
    lead_terms = [(key, c) for key, c in den.items() if key[2] == d_deg]
    if len(lead_terms) != 1 or lead_terms[0][0][:2] != (0, 0):
        raise InexactAssembly("divisor is not x-monic up to a rational constant")
    lead = lead_terms[0][1]
    rem = dict(num)
    quo: dict = {}
    while rem:
        k_max = max(k for (_, _, k) in rem)
        if k_max < d_deg:
            raise InexactAssembly("nonzero remainder in symbolic division")
        tops = [(key, c) for key, c in rem.items() if key[2] == k_max]
        for (i, j, _), c in tops:
            qkey = (i, j, k_max - d_deg)
            qc = c / lead
            quo[qkey] = quo.get(qkey, 0) + qc
            for (di, dj, dk), dc in den.items():
                rkey = (i + di, j + dj, k_max - d_deg + dk)
                nv = rem.get(rkey, 0) - qc * dc
                if nv:
                    rem[rkey] = nv
                elif rkey in rem:
                    del rem[rkey]
    return quo


def _div_2y(p: BiPoly) -> BiPoly:
    """Exact division by 2y: parity-0 input (a multiple of 2y^2), parity-1 output."""
    if p.parity != 0:
        raise InexactAssembly("division by 2y expects an even-parity operand")
    curve2 = {(0, 0, 3): Fraction(2), (1, 0, 1): Fraction(2), (0, 1, 0): Fraction(2)}
    return BiPoly(_exact_div_terms(p.terms, curve2), 1)


ZERO = BiPoly({}, 0)
ONE = BiPoly({(0, 0, 0): 1}, 0)


# ---------------------------------------------------------------------------
# psi_n

_PSI_MEMO: dict[int, BiPoly] = {
    # psi_{-1} = -1 is the standard convention that makes the n = 1
    # multiplication formulas collapse to [1]P = P
    -1: BiPoly({(0, 0, 0): -1}, 0),
    0: ZERO,
    1: ONE,
    2: BiPoly({(0, 0, 0): 2}, 1),  # 2y
    3: BiPoly({(0, 0, 4): 3, (1, 0, 2): 6, (0, 1, 1): 12, (2, 0, 0): -1}, 0),
    4: BiPoly(
        {
            (0, 0, 6): 4,
            (1, 0, 4): 20,
            (0, 1, 3): 80,
            (2, 0, 2): -20,
            (1, 1, 1): -16,
            (0, 2, 0): -32,
            (3, 0, 0): -4,
        },
        1,
    ),  # 4y * (x^6 + 5sx^4 + 20tx^3 - 5s^2x^2 - 4stx - (8t^2 + s^3))
}


def division_poly(n: int) -> BiPoly:
    """psi_n via the doubling recursions, memoized; n >= 0."""
    if n < -1:
        raise ValueError("psi_n not defined for n < -1")
    if n in _PSI_MEMO:
        return _PSI_MEMO[n]
    if n % 2:
        k = (n + 1) // 2  # n = 2k - 1, k >= 3
        val = division_poly(k + 1) * division_poly(k - 1) ** 3 - division_poly(
            k - 2
        ) * division_poly(k) ** 3
    else:
        k = n // 2  # n = 2k, k >= 3
        inner = division_poly(k + 2) * division_poly(k - 1) ** 2 - division_poly(
            k - 2
        ) * division_poly(k + 1) ** 2
        val = _div_2y(division_poly(k) * inner)
    _PSI_MEMO[n] = val
    return val


def mult_formulas(n: int) -> tuple[BiPoly, BiPoly]:
    """(phi_n, omega_n) with [n]P = (phi_n/psi_n^2, omega_n/psi_n^3)."""
    if n < 1:
        raise ValueError("multiplication formulas need n >= 1")
    x = BiPoly({(0, 0, 1): 1}, 0)
    phi = x * division_poly(n) ** 2 - division_poly(n + 1) * division_poly(n - 1)
    omega_num = (
        division_poly(n + 2) * division_poly(n - 1) ** 2
        - division_poly(n - 2) * division_poly(n + 1) ** 2
    )
    if omega_num.parity:
        # numerator = y * T: dividing by 4y leaves T/4 with parity 0
        omega = BiPoly({k: c / 4 for k, c in omega_num.terms.items()}, 0)
    else:
        # numerator even: 4y-division via y*(T / (4*(x^3+sx+t)))
        curve4 = {
            (0, 0, 3): Fraction(4),
            (1, 0, 1): Fraction(4),
            (0, 1, 0): Fraction(4),
        }
        omega = BiPoly(_exact_div_terms(omega_num.terms, curve4), 1)
    return phi, omega


# ---------------------------------------------------------------------------
# primitive division polynomials


def _mobius(n: int) -> int:
    if n == 1:
        return 1
    mu = 1
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            mu = -mu
        p += 1
    if m > 1:
        mu = -mu
    return mu


def psi_degree(N: int) -> int:
    """deg_x Psi_N: 0, 3, then (N^2/2) * prod_{p | N} (1 - p^-2)."""
    if N == 1:
        return 0
    if N == 2:
        return 3
    deg = Fraction(N * N, 2)
    m = N
    p = 2
    while p * p <= m:
        if m % p == 0:
            deg *= 1 - Fraction(1, p * p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        deg *= 1 - Fraction(1, m * m)
    assert deg.denominator == 1
    return int(deg)


class PrimitiveDivPoly:
    """Psi_N: monic in x, parity 0, degree per the torsion-count law."""

    __slots__ = ("N", "poly", "degree")

    def __init__(self, N: int, poly: BiPoly, degree: int):
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "poly", poly)
        object.__setattr__(self, "degree", degree)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("PrimitiveDivPoly is immutable")

    def __repr__(self):
        return "PrimitiveDivPoly(N=%d, deg=%d)" % (self.N, self.degree)


_PRIM_MEMO: dict[int, PrimitiveDivPoly] = {}


def primitive_division_poly(N: int) -> PrimitiveDivPoly:
    """Psi_N as the Mobius product of the (psi_d/d), exactly divided.

    Psi_1 = 1, Psi_2 = x^3 + s*x + t; for N >= 3 the positive-exponent
    factors are multiplied out and the negative-exponent product is divided
    off exactly; y-parities must cancel to 0, the result must be monic of
    the predicted degree, and every term must have the same (x,s,t)-weight —
    any violation raises InexactAssembly.
    """
    if N < 1:
        raise ValueError("Psi_N needs N >= 1")
    if N in _PRIM_MEMO:
        return _PRIM_MEMO[N]
    if N == 1:
        out = PrimitiveDivPoly(1, ONE, 0)
    elif N == 2:
        out = PrimitiveDivPoly(
            2, BiPoly({(0, 0, 3): 1, (1, 0, 1): 1, (0, 1, 0): 1}, 0), 3
        )
    else:
        num, den = ONE, ONE
        for d in divisors(N):
            mu = _mobius(N // d)
            if mu == 0:
                continue
            factor = division_poly(d) * Fraction(1, d)
            if mu == 1:
                num = num * factor
            else:
                den = den * factor
        if num.parity != den.parity:
            raise InexactAssembly("y-parity failed to cancel in Psi_%d" % N)
        quo = BiPoly(_exact_div_terms(num.terms, den.terms), 0)
        deg = psi_degree(N)
        if quo.x_degree() != deg or quo.terms.get((0, 0, deg)) != 1 or any(
            key[2] == deg and key[:2] != (0, 0) for key in quo.terms
        ):
            raise InexactAssembly("Psi_%d is not monic of degree %d" % (N, deg))
        if len(quo.weights()) != 1:
            raise InexactAssembly("Psi_%d is not weight-homogeneous" % N)
        out = PrimitiveDivPoly(N, quo, deg)
    _PRIM_MEMO[N] = out
    return out


def specialize(prim: PrimitiveDivPoly, A, B) -> Poly:
    """Psi_{N,A,B}: substitute s = A, t = B (singular pairs allowed)."""
    d = common_field(A, B)
    A = in_field(A, d)
    B = in_field(B, d)
    coeffs = [in_field(0, d) for _ in range(prim.degree + 1)]
    for (i, j, k), c in prim.poly.terms.items():
        coeffs[k] = coeffs[k] + c * A**i * B**j
    return Poly(coeffs)


# ---------------------------------------------------------------------------
# fast univariate path: the same recursion run directly in K[x]

_PairCache = dict


def _psi_at(n: int, curve: Poly, cache: _PairCache) -> tuple[Poly, int]:
    """(poly, y-parity) for psi_n specialized on y^2 = curve(x)."""
    if n in cache:
        return cache[n]
    one = Poly([1])
    if n == -1:
        val = (Poly([-1]), 0)
    elif n == 0:
        val = (Poly(()), 0)
    elif n == 1:
        val = (one, 0)
    elif n == 2:
        val = (Poly([2]), 1)
    elif n == 3:
        A, B = curve.coeff(1), curve.coeff(0)
        val = (Poly([-A * A, 12 * B, 6 * A, 0, 3]), 0)
    elif n == 4:
        A, B = curve.coeff(1), curve.coeff(0)
        val = (
            Poly(
                [
                    -4 * (8 * B * B + A**3),
                    -16 * A * B,
                    -20 * A * A,
                    80 * B,
                    20 * A,
                    0,
                    4,
                ]
            ),
            1,
        )
    elif n % 2:
        k = (n + 1) // 2
        a = _pair_mul(
            _psi_at(k + 1, curve, cache), _pair_pow(_psi_at(k - 1, curve, cache), 3, curve), curve
        )
        b = _pair_mul(
            _psi_at(k - 2, curve, cache), _pair_pow(_psi_at(k, curve, cache), 3, curve), curve
        )
        val = _pair_sub(a, b)
    else:
        k = n // 2
        a = _pair_mul(
            _psi_at(k + 2, curve, cache), _pair_pow(_psi_at(k - 1, curve, cache), 2, curve), curve
        )
        b = _pair_mul(
            _psi_at(k - 2, curve, cache), _pair_pow(_psi_at(k + 1, curve, cache), 2, curve), curve
        )
        inner = _pair_sub(a, b)
        prod = _pair_mul(_psi_at(k, curve, cache), inner, curve)
        if prod[1] != 0:
            raise InexactAssembly("even psi recursion lost parity")
        val = (exact_divide(prod[0], curve * 2), 1)
    cache[n] = val
    return val


def _pair_mul(a, b, curve: Poly):
    poly = a[0] * b[0]
    if a[1] and b[1]:
        poly = poly * curve
    return (poly, a[1] ^ b[1])


def _pair_pow(a, e: int, curve: Poly):
    out = (Poly([1]), 0)
    for _ in range(e):
        out = _pair_mul(out, a, curve)
    return out


def _pair_sub(a, b):
    if a[0].is_zero:
        return (-b[0], b[1])
    if b[0].is_zero:
        return a
    if a[1] != b[1]:
        raise InexactAssembly("parity mismatch in psi recursion")
    return (a[0] - b[0], a[1])


def primitive_division_poly_at(N: int, A, B, cache: dict | None = None) -> Poly:
    """Psi_{N,A,B} computed univariately — fast for N up to 18 and beyond.

    Runs the psi recursion directly over K[x] and assembles the Mobius
    quotient with exact division.  Requires a nonsingular (A, B); pass a
    per-curve ``cache`` dict to share psi_d work across several N.
    """
    if N < 1:
        raise ValueError("Psi_N needs N >= 1")
    d = common_field(A, B)
    A = in_field(A, d)
    B = in_field(B, d)
    if 4 * A**3 + 27 * B**2 == 0:
        raise SingularCurve("(%s, %s) is singular" % (A, B))
    curve = Poly([B, A, 0, in_field(1, d)])
    if N == 1:
        return Poly([in_field(1, d)])
    if N == 2:
        return curve
    if cache is None:
        cache = {}
    num, den = (Poly([1]), 0), (Poly([1]), 0)
    for dv in divisors(N):
        mu = _mobius(N // dv)
        if mu == 0:
            continue
        pair = _psi_at(dv, curve, cache)
        pair = (pair[0] * Fraction(1, dv), pair[1])
        if mu == 1:
            num = _pair_mul(num, pair, curve)
        else:
            den = _pair_mul(den, pair, curve)
    if num[1] != den[1]:
        raise InexactAssembly("y-parity failed to cancel in Psi_%d" % N)
    quo = exact_divide(num[0], den[0])
    if quo.lc != 1 or quo.degree != psi_degree(N):
        raise InexactAssembly(
            "specialized Psi_%d is not monic of degree %d" % (N, psi_degree(N))
        )
    return quo


# ---------------------------------------------------------------------------
# formatting


def format_bipoly(p: BiPoly) -> str:
    """Human form, descending x-degree: e.g. "x^3 + s*x + t"."""
    if p.is_zero:
        return "0"
    keys = sorted(p.terms, key=lambda ijk: (-ijk[2], ijk[0], ijk[1]))
    parts = []
    for i, j, k in keys:
        c = p.terms[(i, j, k)]
        mono = "*".join(
            ([] if i == 0 else ["s" if i == 1 else "s^%d" % i])
            + ([] if j == 0 else ["t" if j == 1 else "t^%d" % j])
            + ([] if k == 0 else ["x" if k == 1 else "x^%d" % k])
        )
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = "%s*%s" % (mag, mono)
        parts.append(("- " if c < 0 else "+ ") + body)
    out = " ".join(parts)
    out = out[2:] if out.startswith("+ ") else "-" + out[2:]
    if p.parity:
        if len(p.terms) > 1:
            out = "y*(%s)" % out
        elif out == "1":
            out = "y"
        elif out == "-1":
            out = "-y"
        else:
            out = "%s*y" % out
    return out
