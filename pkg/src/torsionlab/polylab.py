"""Dense univariate polynomials over exact coefficient domains.

One ``Poly`` type covers Q, Q(sqrt(d)), Z, and F_p (the last via an explicit
``modulus``).  On top of it: exact division, monic gcd, rational and
quadratic-field root finding, complete factorization mod p (squarefree /
distinct-degree / equal-degree), and factorization over Z by Hensel lifting
with naive subset recombination (ample for the degrees <= 64 we need).

Everything is exact; no floating point anywhere.
"""

from __future__ import annotations

import itertools
import math
import random
import re
from fractions import Fraction

from .errors import NonzeroRemainder, NotPrime, ParseError
from .exactnum import QuadScalar, format_scalar, is_rational, parse_scalar

# ---------------------------------------------------------------------------
# Poly


class Poly:
    """Dense univariate polynomial; coeffs[i] is the x^i coefficient.

    ``modulus=None`` means characteristic zero (int / Fraction / QuadScalar
    coefficients); ``modulus=p`` means F_p with int coefficients in [0, p).
    The zero polynomial has an empty coefficient tuple and degree None —
    a deliberate sentinel so nothing ever does arithmetic on "-1".
    """

    __slots__ = ("coeffs", "modulus")

    def __init__(self, coeffs=(), modulus: int | None = None):
        if modulus is not None:
            coeffs = [c % modulus for c in coeffs]
        else:
            coeffs = list(coeffs)
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))
        object.__setattr__(self, "modulus", modulus)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("Poly is immutable")

    # -- structure ----------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int | None:
        """Degree, or None for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else None

    @property
    def lc(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, i: int):
        c = self.coeffs[i] if 0 <= i < len(self.coeffs) else 0
        return c

    def _same_ring(self, other: "Poly") -> None:
        if self.modulus != other.modulus:
            raise ValueError("polynomials over different rings (modulus mismatch)")

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other], self.modulus)
        self._same_ring(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(
            [self.coeff(i) + other.coeff(i) for i in range(n)], self.modulus
        )

    def __neg__(self):
        return Poly([-c for c in self.coeffs], self.modulus)

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other], self.modulus)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly([c * other for c in self.coeffs], self.modulus)
        self._same_ring(other)
        if self.is_zero or other.is_zero:
            return Poly((), self.modulus)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out, self.modulus)

    __rmul__ = __mul__
    __radd__ = __add__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative polynomial power")
        result = Poly([1], self.modulus)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __call__(self, x):
        """Evaluate at x by Horner's rule (x may live in a larger field)."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        if self.modulus is not None:
            acc %= self.modulus
        return acc

    def derivative(self) -> "Poly":
        return Poly(
            [i * c for i, c in enumerate(self.coeffs)][1:], self.modulus
        )

    def _inv_scalar(self, c):
        if self.modulus is not None:
            return pow(c, -1, self.modulus)
        if isinstance(c, QuadScalar):
            return c.inverse()
        if isinstance(c, int):
            return c if abs(c) == 1 else Fraction(1, c)
        return 1 / c

    def monic(self) -> "Poly":
        if self.is_zero:
            return self
        inv = self._inv_scalar(self.lc)
        return self * inv

    def __divmod__(self, den: "Poly"):
        """Quotient and remainder; den's leading coefficient must be a unit."""
        if not isinstance(den, Poly):
            den = Poly([den], self.modulus)
        self._same_ring(den)
        if den.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        inv = self._inv_scalar(den.lc)
        rem = list(self.coeffs)
        dn = len(den.coeffs)
        if len(rem) < dn:
            return Poly((), self.modulus), self
        q = [0] * (len(rem) - dn + 1)
        for i in range(len(rem) - dn, -1, -1):
            c = rem[i + dn - 1] * inv
            if self.modulus is not None:
                c %= self.modulus
            if not c:
                continue
            q[i] = c
            for j, d in enumerate(den.coeffs):
                rem[i + j] -= c * d
        return Poly(q, self.modulus), Poly(rem, self.modulus)

    def __floordiv__(self, den):
        return divmod(self, den)[0]

    def __mod__(self, den):
        return divmod(self, den)[1]

    # -- comparisons ----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.modulus == other.modulus and self.coeffs == other.coeffs
        if self.is_zero:
            return other == 0
        if len(self.coeffs) == 1:
            return self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        return hash((self.coeffs, self.modulus))

    def __repr__(self):
        return "Poly(%r%s)" % (
            list(self.coeffs),
            ", mod %d" % self.modulus if self.modulus is not None else "",
        )

    def __str__(self):
        return format_poly(self)


X = Poly((0, 1))  # the identity polynomial over characteristic zero


def x_mod(p: int) -> Poly:
    return Poly((0, 1), p)


# ---------------------------------------------------------------------------
# exact division and gcd


def exact_divide(num: Poly, den: Poly) -> Poly:
    """num / den when the division is exact; NonzeroRemainder otherwise."""
    q, r = divmod(num, den)
    if not r.is_zero:
        raise NonzeroRemainder(
            "inexact polynomial division (remainder of degree %s)" % r.degree
        )
    return q


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Monic gcd over a field domain (Q, Q(sqrt d), or F_p)."""
    if p.modulus != q.modulus:
        raise ValueError("gcd of polynomials over different rings")
    a, b = p, q
    while not b.is_zero:
        a, b = b, a % b
    return a.monic() if not a.is_zero else a


def squarefree_part(p: Poly) -> Poly:
    """p / gcd(p, p'), monic — characteristic-zero domains only."""
    if p.modulus is not None:
        raise ValueError("use the mod-p factorization for finite fields")
    g = poly_gcd(p, p.derivative())
    if g.is_zero or g.degree == 0:
        return p.monic()
    return exact_divide(p.monic(), g)


# ---------------------------------------------------------------------------
# integer utilities (primality, factorization, divisors)

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin; the fixed witness set is deterministic below 3.3e24."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """A nontrivial factor of composite odd n (Brent's cycle variant)."""
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        c = rng.randrange(1, n)
        f = lambda v: (v * v + c) % n
        x = y = rng.randrange(2, n)
        d = 1
        while d == 1:
            x = f(x)
            y = f(f(y))
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d


def factor_int(n: int) -> dict[int, int]:
    """Prime factorization of |n| as {prime: exponent}; n must be nonzero."""
    if n == 0:
        raise ValueError("cannot factor 0")
    n = abs(n)
    out: dict[int, int] = {}
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.extend([d, m // d])
    return out


def divisors(n: int) -> list[int]:
    """Sorted positive divisors of |n| (n nonzero)."""
    facs = factor_int(n)
    out = [1]
    for p, e in facs.items():
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


def squarefree_kernel(n: int) -> int:
    """The squarefree part of nonzero n (same sign, square factors removed)."""
    sign = -1 if n < 0 else 1
    out = 1
    for p, e in factor_int(n).items():
        if e % 2:
            out *= p
    return sign * out


def primes_from(start: int = 2):
    """Unbounded prime generator (trial division against a growing list)."""
    found: list[int] = []
    n = 2
    while True:
        is_p = True
        for p in found:
            if p * p > n:
                break
            if n % p == 0:
                is_p = False
                break
        if is_p:
            found.append(n)
            if n >= start:
                yield n
        n += 1 if n == 2 else 2


# ---------------------------------------------------------------------------
# rational roots


def _clear_denominators(p: Poly) -> list[int]:
    """Integer coefficient list proportional to p (content removed)."""
    dens = [Fraction(c).denominator for c in p.coeffs]
    lcm = 1
    for d in dens:
        lcm = lcm * d // math.gcd(lcm, d)
    ints = [int(Fraction(c) * lcm) for c in p.coeffs]
    g = 0
    for c in ints:
        g = math.gcd(g, abs(c))
    return [c // g for c in ints]


def _divisors_bounded(n: int) -> list[int] | None:
    """Sorted positive divisors of |n|, or None when factoring looks costly.

    Trial division up to 10^4 first; the remaining cofactor is accepted when
    rho can finish it quickly (< 10^13) or when it is a proven prime (the
    Miller-Rabin witness set is deterministic below ~3.3e24).  Anything else
    — and any divisor list larger than 50000 — returns None so the caller
    can switch to the factoring-free isolation path.
    """
    n = abs(n)
    facs: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            facs[p] = facs.get(p, 0) + 1
            n //= p
    p = 7
    while p * p <= n and p < 10_000:
        while n % p == 0:
            facs[p] = facs.get(p, 0) + 1
            n //= p
        p += 2
    if n > 1:
        if n < 10**13:
            for q, e in factor_int(n).items():
                facs[q] = facs.get(q, 0) + e
        elif n < 10**24 and is_probable_prime(n):
            facs[n] = 1
        else:
            return None
    count = 1
    for e in facs.values():
        count *= e + 1
        if count > 50_000:
            return None
    out = [1]
    for q, e in facs.items():
        out = [dv * q**k for dv in out for k in range(e + 1)]
    return sorted(out)


def _sign(v: int) -> int:
    return (v > 0) - (v < 0)


def _eval_int(ints: list[int], x: int) -> int:
    acc = 0
    for c in reversed(ints):
        acc = acc * x + c
    return acc


def _real_root_cells(ints: list[int]) -> list[int]:
    """Integers a whose intervals [a, a+1) jointly cover every real root.

    The covering is conservative (it may list cells holding no root) and is
    computed without factoring any coefficient.  Recursion: cells covering
    the derivative's roots cut the line into pieces; every piece wider than
    one unit contains no critical point, so the polynomial is strictly
    monotone there and an integer binary search per endpoint sign change is
    exact.  Roots interior to a width-one derivative cell are covered by
    carrying that cell upward, and (a, a+1) contains no integers, so no
    integer root can hide in one.
    """
    while ints and ints[-1] == 0:
        ints = ints[:-1]
    n = len(ints) - 1
    if n <= 0:
        return []
    if n == 1:
        return [math.floor(Fraction(-ints[0], ints[1]))]
    # Cauchy bound: every real root has |x| < 1 + max|c_i| / |c_n|
    bound = 2 + max(abs(c) for c in ints[:-1]) // abs(ints[-1])
    deriv = [i * c for i, c in enumerate(ints)][1:]
    crit = [a for a in _real_root_cells(deriv) if -bound <= a < bound]
    cells = set(crit)
    points = sorted({-bound, bound, *crit, *(a + 1 for a in crit)})
    vals = [_eval_int(ints, x) for x in points]
    for x, v in zip(points, vals):
        if v == 0:
            cells.add(x)
    for i in range(len(points) - 1):
        lo, hi = points[i], points[i + 1]
        vlo, vhi = vals[i], vals[i + 1]
        if _sign(vlo) * _sign(vhi) >= 0:
            continue
        slo = _sign(vlo)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            v = _eval_int(ints, mid)
            if v == 0:
                lo = mid
                break
            if _sign(v) == slo:
                lo = mid
            else:
                hi = mid
        cells.add(lo)
    return sorted(cells)


def _root_candidates_by_isolation(ints: list[int]) -> list[Fraction]:
    """All rational roots of the integer polynomial, without factoring.

    Substituting x = y / lc turns the polynomial into a monic integer one
    whose integer roots are exactly lc times the rational roots (the
    rational root theorem caps denominators at lc), so the cell covering
    plus an exact endpoint check finds every root.
    """
    lc = ints[-1]
    n = len(ints) - 1
    monic = [c * lc ** (n - 1 - i) for i, c in enumerate(ints[:-1])] + [1]
    return sorted(
        Fraction(a, lc) for a in _real_root_cells(monic) if _eval_int(monic, a) == 0
    )


def _rational_reconstruct(a: int, m: int, num_bound: int, den_bound: int):
    """The unique n/d with n/d ≡ a (mod m), |n| <= num_bound, 0 < d <= den_bound.

    Half-extended Euclid; uniqueness needs 2 * num_bound * den_bound < m.
    Returns None when no candidate lands in the box (callers verify exactly
    anyway, so a None or a wrong candidate can never produce a wrong root).
    """
    r0, s0 = m, 0
    r1, s1 = a % m, 1
    while r1 > num_bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > den_bound:
        return None
    n, d = r1, s1
    if d < 0:
        n, d = -n, -d
    return Fraction(n, d)


def _eval_int_mod(ints: list[int], x: int, m: int) -> int:
    acc = 0
    for c in reversed(ints):
        acc = (acc * x + c) % m
    return acc


def _is_rational_root_exact(ints: list[int], num: int, den: int) -> bool:
    """Does sum c_i (num/den)^i vanish?  Horner on the den-cleared form."""
    acc = ints[-1]
    dpow = 1
    for c in reversed(ints[:-1]):
        dpow *= den
        acc = acc * num + c * dpow
    return acc == 0


def _rational_roots_hensel(ints: list[int]):
    """Candidate rational roots via mod-p roots + Hensel lift + reconstruction.

    Scales to huge coefficients where divisor scans (factoring) and real-root
    isolation (bisection on numbers the size of the coefficients) do not.
    Needs a prime with squarefree reduction — one exists exactly when the
    polynomial is squarefree over Q — so None signals "fall back".
    Completeness: a rational root n/d has d | lc, the chosen prime divides
    neither, so the root reduces to a simple root mod p, lifts uniquely, and
    the reconstruction box (|n| <= |c0|, d <= |lc|, modulus > twice their
    product) pins it exactly.
    """
    lc, c0 = ints[-1], ints[0]
    fp = None
    prime = 1_048_573  # largest prime below 2^20; sweep upward from here
    for _ in range(25):
        while True:
            prime += 2
            if is_probable_prime(prime):
                break
        if lc % prime == 0:
            continue
        cand = Poly([c % prime for c in ints], prime)
        if poly_gcd(cand, cand.derivative()).degree == 0:
            fp = cand
            break
    if fp is None:
        return None
    p = fp.modulus
    # product of the linear factors: gcd(x^p - x, f)
    xp = _pow_mod(x_mod(p), p, fp)
    lin = poly_gcd(xp - x_mod(p), fp)
    if lin.degree == 0:
        return []
    roots_p = sorted((p - f1.coeff(0)) % p for f1 in _edf(lin.monic(), 1, random.Random(1)))
    target = 2 * abs(c0) * abs(lc) + 1
    deriv = [i * c for i, c in enumerate(ints)][1:]
    # One modulus ladder p, p^2, p^4, ... serves every root: the coefficient
    # arrays are reduced once per level, not once per root per level.
    ladder = [p]
    while ladder[-1] < target:
        ladder.append(ladder[-1] ** 2)
    red_f = [[c % m for c in ints] for m in ladder]
    red_d = [[c % m for c in deriv] for m in ladder]
    filt = (1 << 61) - 1
    screen = [c % filt for c in ints]
    out = set()
    for r in roots_p:
        settled = None
        for lev in range(1, len(ladder)):
            m = ladder[lev]
            fr = _eval_int_mod(red_f[lev], r, m)
            dr = _eval_int_mod(red_d[lev], r, m)
            r = (r - fr * pow(dr, -1, m)) % m
            # Roots are usually far smaller than the worst-case box, so try
            # a balanced-box reconstruction at the cheap (small-modulus)
            # levels; a candidate that survives the mod-filt screen and the
            # exact check is the unique Hensel lift of this residue, and the
            # remaining (much larger) levels can be skipped.  Residues that
            # lift no rational root fail the reconstruction or the screen,
            # never the costly exact Horner.
            if m.bit_length() > 2048:
                continue
            b = math.isqrt((m - 1) // 2)
            cand = _rational_reconstruct(r, m, b, b)
            if (
                cand is not None
                and _screen_rational_point(screen, cand, filt) == 0
                and _is_rational_root_exact(ints, cand.numerator, cand.denominator)
            ):
                settled = cand
                break
        if settled is None:
            cand = _rational_reconstruct(r, ladder[-1], abs(c0), abs(lc))
            if cand is not None:  # exact check happens downstream
                settled = cand
        if settled is not None:
            out.add(settled)
    return sorted(out)


def _screen_rational_point(screen: list[int], cand: Fraction, filt: int) -> int:
    """Horner value of the reduced coefficients at cand, mod filt (0 = pass)."""
    den = cand.denominator % filt
    if den == 0:
        return 0  # cannot screen across this denominator; let the exact check run
    pt = cand.numerator % filt * pow(den, -1, filt) % filt
    acc = 0
    for c in reversed(screen):
        acc = (acc * pt + c) % filt
    return acc


def _screen_divisor_pairs(ints, dnum, dden) -> list:
    """Fractions +-num/den killing the polynomial mod 2^61 - 1.

    Integer-only Horner per sign, so no Fraction is built for the crushing
    majority of divisor pairs that are not roots; the exact check downstream
    catches the cosmically unlikely false screen pass.
    """
    filt = (1 << 61) - 1
    screen = [c % filt for c in ints]
    out = set()
    for den in dden:
        dm = den % filt
        if dm == 0:  # cannot screen: pass the pair through unevaluated
            for num in dnum:
                out.add(Fraction(num, den))
                out.add(Fraction(-num, den))
            continue
        inv = pow(dm, -1, filt)
        for num in dnum:
            pt = num % filt * inv % filt
            for sign in (1, -1):
                acc = 0
                for c in reversed(screen):
                    acc = (acc * pt + c) % filt
                if acc == 0:
                    out.add(Fraction(sign * num, den))
                pt = filt - pt if pt else 0
    return sorted(out)


def rational_roots(p: Poly, with_multiplicity: bool = False):
    """All rational roots of p (over Q), sorted; optionally (root, mult) pairs.

    Small endpoint coefficients get the rational-root-theorem divisor scan;
    large ones get the factoring-free isolation path, since factoring a
    large integer can dwarf every other cost here.
    """
    if p.is_zero:
        raise ValueError("the zero polynomial has every root")
    if p.modulus is not None or any(isinstance(c, QuadScalar) for c in p.coeffs):
        raise ValueError("rational_roots expects a polynomial over Q")
    ints = _clear_denominators(p)
    found: list[tuple[Fraction, int]] = []
    # strip the x^k factor first: root 0 with multiplicity k
    k = 0
    while ints[k] == 0:
        k += 1
    if k:
        found.append((Fraction(0), k))
        ints = ints[k:]
    if len(ints) > 1:
        dnum = _divisors_bounded(ints[0])
        dden = _divisors_bounded(ints[-1]) if dnum is not None else None
        if dnum is not None and dden is not None and len(dnum) * len(dden) <= 50_000:
            cands = _screen_divisor_pairs(ints, dnum, dden)
        else:
            cands = _rational_roots_hensel(ints)
            if cands is None:  # repeated roots (or no squarefree reduction)
                cands = _root_candidates_by_isolation(ints)
        cur = Poly(ints)
        # candidates are screened mod a large prime (machine-word Horner)
        # before the exact check; a false screen pass is caught exactly
        filt = (1 << 61) - 1
        screen = [c % filt for c in ints]
        for r in cands:
            if cur.degree == 0:
                break
            num, den = r.numerator, r.denominator
            if den % filt:
                pt = num * pow(den, -1, filt) % filt
                acc = 0
                for c in reversed(screen):
                    acc = (acc * pt + c) % filt
                if acc:
                    continue
            mult = 0
            while not cur.is_zero and cur.degree >= 1 and cur(r) == 0:
                cur = exact_divide(cur, Poly([-r, 1]))
                mult += 1
            if mult:
                found.append((r, mult))
    found.sort()
    if with_multiplicity:
        return found
    return [r for r, _ in found]


# ---------------------------------------------------------------------------
# roots in a quadratic field


def _split_quad_poly(p: Poly, d: int) -> tuple[Poly, Poly]:
    """Write p = p1 + p2*sqrt(d) with p1, p2 over Q."""
    c1, c2 = [], []
    for c in p.coeffs:
        if isinstance(c, QuadScalar):
            if c.d != d:
                raise ValueError("coefficient in Q(sqrt(%d)), expected sqrt(%d)" % (c.d, d))
            c1.append(c.a)
            c2.append(c.b)
        else:
            c1.append(Fraction(c))
            c2.append(Fraction(0))
    return Poly(c1), Poly(c2)


def _scalar_sort_key(x):
    if isinstance(x, QuadScalar):
        return (x.a, x.b)
    return (Fraction(x), Fraction(0))


def roots_in_quad_field(p: Poly, d: int) -> list:
    """All roots of p lying in Q(sqrt(d)), sorted by (rational, sqrt) parts.

    Method: form the norm polynomial g = p * conj(p) over Q, factor g over Z,
    and read roots off the linear factors and the quadratic factors whose
    discriminant is a square or d times a square; every candidate is then
    confirmed by substitution into p itself.
    """
    if p.is_zero:
        raise ValueError("the zero polynomial has every root")
    p1, p2 = _split_quad_poly(p, d)
    g = p1 * p1 - Fraction(d) * p2 * p2  # p * conj(p)
    if g.is_zero:
        # p is sqrt(d) * (rational polynomial); roots are those of p2
        g = p2 * p2
    roots: list = []
    seen = set()
    for factor, _mult in factor_over_Z(squarefree_part(g)).factors:
        if factor.degree == 1:
            b, a = factor.coeffs[0], factor.coeffs[1]
            cands = [QuadScalar(Fraction(-b, a), 0, d)]
        elif factor.degree == 2:
            c0, c1, c2 = factor.coeffs
            disc = Fraction(c1 * c1 - 4 * c2 * c0)
            cands = []
            sq = _rational_sqrt_frac(disc)
            if sq is not None:
                for sgn in (1, -1):
                    cands.append(QuadScalar((-c1 + sgn * sq) / (2 * c2), 0, d))
            else:
                sq = _rational_sqrt_frac(disc / d)
                if sq is not None:
                    for sgn in (1, -1):
                        cands.append(
                            QuadScalar(Fraction(-c1, 2 * c2), sgn * sq / (2 * c2), d)
                        )
        else:
            continue
        for r in cands:
            key = (r.a, r.b)
            if key not in seen and p(r) == 0:
                seen.add(key)
                roots.append(r)
    roots.sort(key=_scalar_sort_key)
    return roots


def _rational_sqrt_frac(x: Fraction):
    if x < 0:
        return None
    rn = math.isqrt(x.numerator)
    rd = math.isqrt(x.denominator)
    if rn * rn == x.numerator and rd * rd == x.denominator:
        return Fraction(rn, rd)
    return None


# ---------------------------------------------------------------------------
# factorization data type


class Factorization:
    """unit * prod(factor_i ^ mult_i) == the input, exactly."""

    __slots__ = ("unit", "factors", "modulus")

    def __init__(self, unit, factors, modulus: int | None = None):
        object.__setattr__(self, "unit", unit)
        object.__setattr__(self, "factors", tuple(factors))
        if modulus is None and self.factors:
            modulus = self.factors[0][0].modulus
        object.__setattr__(self, "modulus", modulus)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("Factorization is immutable")

    def expand(self) -> Poly:
        out = Poly([self.unit], self.modulus)
        for f, m in self.factors:
            out = out * f**m
        return out

    def __eq__(self, other):
        if not isinstance(other, Factorization):
            return NotImplemented
        return (
            self.unit == other.unit
            and self.factors == other.factors
            and self.modulus == other.modulus
        )

    def __repr__(self):
        return "Factorization(unit=%r, factors=%r)" % (self.unit, list(self.factors))

    def degrees(self) -> list[int]:
        """Factor degrees with multiplicity, sorted."""
        out: list[int] = []
        for f, m in self.factors:
            out.extend([f.degree] * m)
        return sorted(out)


def _sorted_factors(factors):
    def key(fm):
        f, m = fm
        return (f.degree, tuple(Fraction(c) if not isinstance(c, QuadScalar) else (c.a, c.b) for c in f.coeffs), m)

    return sorted(factors, key=key)


# ---------------------------------------------------------------------------
# factorization mod p


def _check_prime(p: int) -> None:
    if not is_probable_prime(p):
        raise NotPrime("%d has a compositeness witness" % p)


def _to_mod_poly(p: Poly, prime: int) -> Poly:
    if p.modulus == prime:
        return p
    if p.modulus is not None:
        raise ValueError("polynomial already lives mod %d" % p.modulus)
    out = []
    for c in p.coeffs:
        f = Fraction(c)
        if f.denominator % prime == 0:
            raise ValueError("coefficient denominator divisible by %d" % prime)
        out.append(f.numerator * pow(f.denominator, -1, prime) % prime)
    return Poly(out, prime)


def _pow_mod(base: Poly, e: int, mod: Poly) -> Poly:
    result = Poly([1], base.modulus)
    base = base % mod
    while e:
        if e & 1:
            result = result * base % mod
        base = base * base % mod
        e >>= 1
    return result


def _sqf_decompose_mod_p(f: Poly) -> list[tuple[Poly, int]]:
    """Squarefree decomposition of monic f over F_p (characteristic-p aware)."""
    p = f.modulus
    out: list[tuple[Poly, int]] = []
    e = 1
    while not f.is_zero and f.degree > 0:
        fp = f.derivative()
        if fp.is_zero:
            # f = g(x^p); over the prime field the p-th root just reads
            # every p-th coefficient (a^p = a for a in F_p)
            f = Poly([f.coeff(i * p) for i in range(f.degree // p + 1)], p)
            e *= p
            continue
        g = poly_gcd(f, fp)
        w = exact_divide(f, g)
        i = 1
        while not w.is_zero and w.degree > 0:
            y = poly_gcd(w, g)
            z = exact_divide(w, y)
            if z.degree > 0:
                out.append((z, i * e))
            w = y
            g = exact_divide(g, y)
            i += 1
        f = g
    return out


def _ddf(f: Poly) -> list[tuple[Poly, int]]:
    """Distinct-degree split of monic squarefree f: (product, degree) pairs."""
    p = f.modulus
    out = []
    h = x_mod(p) % f
    v = f
    i = 1
    while not v.is_zero and v.degree >= 2 * i:
        h = _pow_mod(h, p, v)
        g = poly_gcd(h - x_mod(p), v)
        if g.degree and g.degree > 0:
            out.append((g, i))
            v = exact_divide(v, g)
            h = h % v
        i += 1
    if not v.is_zero and v.degree > 0:
        out.append((v, v.degree))
    return out


def _edf(f: Poly, d: int, rng: random.Random) -> list[Poly]:
    """Equal-degree split: f monic squarefree, all irreducible factors deg d."""
    p = f.modulus
    n = f.degree
    if n == d:
        return [f]
    while True:
        r = Poly([rng.randrange(p) for _ in range(n)], p)
        if r.is_zero or r.degree == 0:
            continue
        if p == 2:
            # trace map T(r) = r + r^2 + ... + r^(2^(d-1))
            t = Poly((), 2)
            acc = r % f
            for _ in range(d):
                t = (t + acc) % f
                acc = acc * acc % f
            w = poly_gcd(t, f)
        else:
            g = poly_gcd(r, f)
            if g.degree and 0 < g.degree < n:
                w = g
            else:
                h = _pow_mod(r, (p**d - 1) // 2, f) - Poly([1], p)
                w = poly_gcd(h, f)
        if not w.is_zero and w.degree and 0 < w.degree < n:
            return _edf(w, d, rng) + _edf(exact_divide(f, w), d, rng)


def factor_mod_p(p: Poly, prime: int, seed: int = 0) -> Factorization:
    """Complete factorization over F_p into monic irreducibles.

    Squarefree decomposition, then distinct-degree, then seeded
    Cantor-Zassenhaus equal-degree splitting.  Deterministic for a fixed
    seed; the factor list is sorted regardless.
    """
    _check_prime(prime)
    f = _to_mod_poly(p, prime)
    if f.is_zero:
        raise ValueError("cannot factor the zero polynomial")
    rng = random.Random(seed)
    unit = f.lc
    f = f.monic()
    factors: list[tuple[Poly, int]] = []
    for part, mult in _sqf_decompose_mod_p(f):
        for prod, deg in _ddf(part):
            for irr in _edf(prod, deg, rng):
                factors.append((irr, mult))
    return Factorization(unit, _sorted_factors(factors), modulus=prime)


# ---------------------------------------------------------------------------
# factorization over Z


def _int_coeffs(p: Poly) -> tuple[list[int], Fraction]:
    """(primitive integer coefficients with positive lc, unit) for p over Q."""
    dens = [Fraction(c).denominator for c in p.coeffs]
    lcm = 1
    for d in dens:
        lcm = lcm * d // math.gcd(lcm, d)
    ints = [int(Fraction(c) * lcm) for c in p.coeffs]
    g = 0
    for c in ints:
        g = math.gcd(g, abs(c))
    sign = -1 if ints[-1] < 0 else 1
    ints = [c // (g * sign) for c in ints]
    return ints, Fraction(g * sign, lcm)


def _symmetric(c: int, m: int) -> int:
    c %= m
    return c - m if c > m // 2 else c


def _hensel_step(f: Poly, g: Poly, h: Poly, s: Poly, t: Poly, m: int):
    """One quadratic Hensel step: from mod m to mod m^2.

    Given f = g*h (mod m) and s*g + t*h = 1 (mod m) with h monic (here both
    g and h are monic), returns (g*, h*, s*, t*) satisfying the same
    relations mod m^2, h* still monic.  f may carry integer (or larger-
    modulus) coefficients; it is reduced mod m^2 here.
    """
    m2 = m * m
    fm = Poly(f.coeffs, m2)
    g, h, s, t = (Poly(q.coeffs, m2) for q in (g, h, s, t))
    e = fm - g * h
    q, r = divmod(s * e, h)
    g_star = g + t * e + q * g
    h_star = h + r
    b = s * g_star + t * h_star - Poly([1], m2)
    c, d = divmod(s * b, h_star)
    s_star = s - d
    t_star = t - t * b - c * g_star
    return g_star, h_star, s_star, t_star


def _poly_xgcd_mod(a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """(g, s, t) with s*a + t*b = g = monic gcd, over F_p."""
    p = a.modulus
    r0, r1 = a, b
    s0, s1 = Poly([1], p), Poly((), p)
    t0, t1 = Poly((), p), Poly([1], p)
    while not r1.is_zero:
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero:
        return r0, s0, t0
    inv = pow(r0.lc, -1, p)
    return r0 * inv, s0 * inv, t0 * inv


def _hensel_lift_list(f: Poly, mod_factors: list[Poly], p: int, target: int) -> list[Poly]:
    """Lift monic factors of monic f from mod p to mod p^(2^k) >= target.

    Binary-tree strategy: split the list, lift the two halves' products as a
    pair, recurse into each half with the lifted product as the new f.
    """
    if len(mod_factors) == 1:
        m = p
        while m < target:
            m *= m
        return [Poly(f.coeffs, m)]
    half = len(mod_factors) // 2
    left, right = mod_factors[:half], mod_factors[half:]
    g = Poly([1], p)
    for q in left:
        g = g * q
    h = Poly([1], p)
    for q in right:
        h = h * q
    _, s, t = _poly_xgcd_mod(g, h)
    m = p
    while m < target:
        g, h, s, t = _hensel_step(f, g, h, s, t, m)
        m *= m
    return _hensel_lift_list(g, left, p, target) + _hensel_lift_list(h, right, p, target)


def _int_poly_divides(cand: list[int], f: list[int]) -> list[int] | None:
    """f // cand over Z if cand (monic) divides f exactly, else None."""
    rem = list(f)
    dn = len(cand)
    if len(rem) < dn:
        return None
    q = [0] * (len(rem) - dn + 1)
    for i in range(len(rem) - dn, -1, -1):
        c = rem[i + dn - 1]
        q[i] = c
        if c:
            for j, d in enumerate(cand):
                rem[i + j] -= c * d
    if any(rem[: dn - 1]):
        return None
    return q


def _zassenhaus_irreducible_factors(ints: list[int], seed: int = 0) -> list[list[int]]:
    """Irreducible (primitive, positive-lc) factors of a squarefree primitive
    integer polynomial, via factorization mod p + Hensel + subset search."""
    n = len(ints) - 1
    if n == 1:
        return [ints]
    lc = ints[-1]
    # monic normalization F(x) = lc^(n-1) * f(x/lc); coefficient of x^i is
    # c_i * lc^(n-1-i), and the lead becomes exactly 1
    big_f = [c * lc ** (n - 1 - i) for i, c in enumerate(ints[:-1])] + [1]
    fpoly = Poly(big_f)
    # choose a prime keeping F squarefree, preferring few modular factors
    best = None
    usable = 0
    for prime in primes_from(5):
        if big_f[-1] % prime == 0:
            continue
        fp = Poly(big_f, prime)
        if fp.degree != n:
            continue
        if poly_gcd(fp, fp.derivative()).degree != 0:
            continue
        fac = factor_mod_p(fpoly, prime, seed=seed)
        usable += 1
        if best is None or len(fac.factors) < len(best[1].factors):
            best = (prime, fac)
        if len(best[1].factors) == 1 or usable >= 4:
            break
    prime, fac = best
    mod_factors = [f for f, _ in fac.factors]
    if len(mod_factors) == 1:
        return [ints]
    # Mignotte-style bound for coefficients of any monic factor of F
    l2 = math.isqrt(sum(c * c for c in big_f)) + 1
    bound = (1 << (n + 1)) * l2
    target = 2 * bound + 1
    lifted = _hensel_lift_list(Poly(big_f), mod_factors, prime, target)
    big_m = lifted[0].modulus
    remaining = list(range(len(lifted)))
    f_cur = list(big_f)
    found_monic: list[list[int]] = []
    s = 1
    while 2 * s <= len(remaining):
        hit = False
        for combo in itertools.combinations(remaining, s):
            prod = Poly([1], big_m)
            for i in combo:
                prod = prod * lifted[i]
            cand = [_symmetric(c, big_m) for c in prod.coeffs]
            # cheap filter: the constant term must divide F(0)
            if f_cur[0] != 0 and (cand[0] == 0 or f_cur[0] % cand[0] != 0):
                continue
            quo = _int_poly_divides(cand, f_cur)
            if quo is not None:
                found_monic.append(cand)
                f_cur = quo
                remaining = [i for i in remaining if i not in combo]
                hit = True
                break
        if not hit:
            s += 1
    if len(f_cur) > 1:
        found_monic.append(f_cur)
    # map factors of F back to factors of f: primitive part of Fi(lc * x)
    out = []
    for fm in found_monic:
        mapped = [c * lc**i for i, c in enumerate(fm)]
        g = 0
        for c in mapped:
            g = math.gcd(g, abs(c))
        sign = -1 if mapped[-1] < 0 else 1
        out.append([c // (g * sign) for c in mapped])
    return out


def factor_over_Z(p: Poly, seed: int = 0) -> Factorization:
    """Complete factorization into irreducible primitive integer polynomials.

    Content and sign go into the unit; multiplicities come from Yun's
    squarefree decomposition; each squarefree part goes through the
    mod-p / Hensel / recombination pipeline.  Factors have positive leading
    coefficients and are sorted.
    """
    if p.is_zero:
        raise ValueError("cannot factor the zero polynomial")
    if p.modulus is not None or any(isinstance(c, QuadScalar) for c in p.coeffs):
        raise ValueError("factor_over_Z expects a polynomial over Q")
    ints, unit = _int_coeffs(p)
    if len(ints) == 1:
        return Factorization(unit * ints[0], ())
    work = Poly(ints)
    factors: list[tuple[Poly, int]] = []
    # x^k factor
    k = 0
    while work.coeff(0) == 0:
        work = exact_divide(work, X)
        k += 1
    if k:
        factors.append((X, k))
    # Yun's squarefree decomposition over Q
    parts: list[tuple[Poly, int]] = []
    if work.degree > 0:
        f = work.monic()
        g = poly_gcd(f, f.derivative())
        if g.degree == 0:
            parts.append((work, 1))
        else:
            c = exact_divide(f, g)
            d = exact_divide(f.derivative(), g) - c.derivative()
            i = 1
            while not c.is_zero and c.degree > 0:
                a = poly_gcd(c, d)
                if a.degree > 0:
                    parts.append((a, i))
                c = exact_divide(c, a)
                d = exact_divide(d, a) - c.derivative()
                i += 1
    for part, mult in parts:
        pints, _ = _int_coeffs(part)
        for fac in _zassenhaus_irreducible_factors(pints, seed=seed):
            factors.append((Poly(fac), mult))
    result = Factorization(Fraction(1), _sorted_factors(factors))
    # recover the exact unit so unit * prod(factors) == p
    prod = result.expand()
    lead_ratio = Fraction(p.lc) / Fraction(prod.lc)
    return Factorization(lead_ratio, result.factors)


# ---------------------------------------------------------------------------
# parsing and formatting ("c0 + c1*x + c2*x^2 + ...")

_POW_RE = re.compile(r"^x(?:\^(\d+))?$")


def _split_terms(s: str) -> list[str]:
    """Split on top-level + and - (keeping signs), ignoring signs in parens."""
    terms = []
    depth = 0
    cur = ""
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and i > 0 and s[i - 1] not in "+-(*^":
            terms.append(cur)
            cur = ch
        else:
            cur += ch
    terms.append(cur)
    return [t for t in terms if t]


def parse_poly(text: str, d: int | None = None) -> Poly:
    """Parse "c0 + c1*x + c2*x^2" style text (any term order) into a Poly.

    Coefficients use the scalar grammar; a coefficient with a sqrt-part must
    be parenthesized, e.g. "(1+sqrt(2))*x".
    """
    s = text.replace(" ", "")
    if not s:
        raise ParseError("empty polynomial")
    coeffs: dict[int, object] = {}
    for term in _split_terms(s):
        sign = 1
        while term and term[0] in "+-":
            if term[0] == "-":
                sign = -sign
            term = term[1:]
        if not term:
            raise ParseError("dangling sign in %r" % text)
        if "x" in term:
            # split into coefficient part and power part at the final 'x'
            idx = term.rindex("x")
            coef_part, pow_part = term[:idx], term[idx:]
            m = _POW_RE.match(pow_part)
            if not m:
                raise ParseError("bad power in term %r" % term)
            power = int(m.group(1)) if m.group(1) else 1
            coef_part = coef_part.rstrip("*")
            if coef_part.startswith("(") and coef_part.endswith(")"):
                coef_part = coef_part[1:-1]
            coef = parse_scalar(coef_part, d) if coef_part else Fraction(1)
        else:
            power = 0
            cp = term
            if cp.startswith("(") and cp.endswith(")"):
                cp = cp[1:-1]
            coef = parse_scalar(cp, d)
        coeffs[power] = coeffs.get(power, 0) + sign * coef
    n = max(coeffs) + 1
    return Poly([coeffs.get(i, 0) for i in range(n)])


def format_poly(p: Poly, var: str = "x") -> str:
    """Ascending-degree text form, inverse of parse_poly."""
    if p.is_zero:
        return "0"
    parts = []
    for i, c in enumerate(p.coeffs):
        if not c:
            continue
        cs = format_scalar(c) if p.modulus is None else str(c)
        neg = cs.startswith("-")
        if neg:
            cs = cs[1:]
        needs_parens = ("+" in cs) or ("-" in cs and not cs.startswith("sqrt"))
        if needs_parens:
            cs = "(%s)" % cs
        if i == 0:
            term = cs
        else:
            xpow = var if i == 1 else "%s^%d" % (var, i)
            term = xpow if cs == "1" else "%s*%s" % (cs, xpow)
        parts.append(("- " if neg else "+ ") + term)
    out = " ".join(parts)
    if out.startswith("+ "):
        out = out[2:]
    elif out.startswith("- "):
        out = "-" + out[2:]
    return out


def poly_to_json(p: Poly) -> list[str]:
    """Compact JSON form: coefficient strings, index = degree."""
    return [format_scalar(c) if p.modulus is None else str(c) for c in p.coeffs]


def poly_from_json(coeffs: list[str], d: int | None = None) -> Poly:
    return Poly([parse_scalar(c, d) for c in coeffs])
