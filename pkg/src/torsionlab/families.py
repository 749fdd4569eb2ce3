"""Genus-zero torsion families, their certification, and the family registry.

A family is a triple of pairwise coprime polynomials (f, g, h) over K in one
parameter r together with a pair (m, n), m | n: specializing at (r, u) gives
the curve y^2 = x^3 + u^2 f(r) x + u^3 g(r), on which u*h(r) is an
x-coordinate of a point of exact order n and the m-division polynomial
splits completely.  Only the (m, n) for which such a one-parameter rational
family can exist are admitted (the genus-zero list below).

Four families ship as code (`builtin_family`); everything else arrives as
data through `registry_load`, and no family is admitted without passing the
three-part certification in `verify_family`:

  (i)   sampled specializations satisfy the split condition for Psi_m,
  (ii)  Psi_{n, f(r), g(r)}(h(r)) = 0 as a polynomial identity in r,
  (iii) the degree equation max{3 deg f, 2 deg g} = [index] holds, where
        [index] is the mod-+-1 congruence-subgroup index computed by
        explicit matrix enumeration in `group_index`.

Condition (ii) is decided by an exact certificate: the composite polynomial
has degree at most D = deg_x(Psi_n) * max(deg f / 2, deg g / 3, deg h)
because every monomial s^i t^j x^k of Psi_n satisfies 2i + 3j + k =
deg_x(Psi_n) (weight homogeneity), so vanishing at D + 1 distinct rational
points proves the identity.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .divpoly import primitive_division_poly
from .errors import (
    BoundExceeded,
    ParseError,
    SingularSpecialization,
    UnsupportedPair,
    ZeroU,
)
from .exactnum import common_field, format_scalar, in_field, is_rational
from .polylab import Poly, poly_gcd
from .torsion import condition_P
from .weierstrass import Curve, new_curve

# ---------------------------------------------------------------------------
# the genus-zero pair list

#: Pairs (m, n) whose moduli problem is a rational curve: (1, n) for
#: n <= 10 or n = 12, (2, n) for even n <= 8, and the diagonal-ish pairs
#: (3,3), (3,6), (4,4), (5,5) which force roots of unity into the field.
T_GENUS_ZERO: frozenset = frozenset(
    [(1, n) for n in (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12)]
    + [(2, 2), (2, 4), (2, 6), (2, 8)]
    + [(3, 3), (3, 6), (4, 4), (5, 5)]
)

#: Field requirement (None, -3 or -1) forced by the m-part: full m-torsion
#: needs the m-th roots of unity in the field.
_FORCED_FIELD = {3: -3, 4: -1}


# ---------------------------------------------------------------------------
# family specifications


@dataclass(frozen=True)
class FamilySpec:
    """One-parameter family of curves with level-(m, n) structure.

    f, g, h are univariate polynomials in the parameter r (rational or
    quadratic-field coefficients); required_field is None for families over
    Q and the squarefree d of the quadratic field the torsion needs.
    """

    m: int
    n: int
    f: Poly
    g: Poly
    h: Poly
    required_field: int | None = None

    def __post_init__(self):
        if self.m < 1 or self.n < 1 or self.n % self.m != 0:
            raise ValueError("need 1 <= m | n, got (%d, %d)" % (self.m, self.n))
        if (self.m, self.n) not in T_GENUS_ZERO:
            raise ValueError(
                "(%d, %d) is not a genus-zero pair" % (self.m, self.n)
            )
        if self.required_field not in (None, -3, -1):
            raise ValueError("required_field must be None, -3 or -1")
        forced = _FORCED_FIELD.get(self.m)
        if forced is not None and self.required_field != forced:
            raise ValueError(
                "m = %d forces required_field = %d" % (self.m, forced)
            )
        for name, p in (("f", self.f), ("g", self.g), ("h", self.h)):
            if not isinstance(p, Poly) or p.modulus is not None:
                raise ValueError("%s must be a characteristic-zero Poly" % name)
            if p.is_zero:
                raise ValueError("%s must be nonzero" % name)
        for a, b, pa, pb in (
            ("f", "g", self.f, self.g),
            ("f", "h", self.f, self.h),
            ("g", "h", self.g, self.h),
        ):
            if poly_gcd(pa, pb).degree != 0:
                raise ValueError("%s and %s share a factor" % (a, b))

    @property
    def pair(self) -> tuple[int, int]:
        return (self.m, self.n)


# ---------------------------------------------------------------------------
# built-in families


def builtin_family(m: int, n: int) -> FamilySpec:
    """The four families shipped as code.

    (1,2): f = r - 1, g = -r, h = 1  (x = u is a 2-torsion root by
           construction: u^3 + u^3(r-1) - u^3 r = 0).
    (2,2): f = -(r^2+r+1), g = r(r+1), h = 1; the 2-division cubic factors
           as (x - u)(x - ru)(x + (r+1)u).
    (1,3): f = r, g = (r^2 - 6r - 3)/12, h = 1.
    (3,3): f = 3r(3r^2+3r+1), g = (3r^2-1)(9r^4+18r^3+18r^2+6r+1)/4, h = 1,
           over Q(sqrt(-3)).  Of the two candidate coefficient formulas in
           circulation this is the one that passes certification; the other
           (3r(3r^2-3r+1) with the same g) fails condition (i) and is kept
           in the test suite as a negative control.
    """
    if (m, n) == (1, 2):
        return FamilySpec(1, 2, Poly([-1, 1]), Poly([0, -1]), Poly([1]))
    if (m, n) == (2, 2):
        return FamilySpec(
            2, 2, Poly([-1, -1, -1]), Poly([0, 1, 1]), Poly([1])
        )
    if (m, n) == (1, 3):
        g = Poly([-3, -6, 1]) * Fraction(1, 12)  # (r^2 - 6r - 3) / 12
        return FamilySpec(1, 3, Poly([0, 1]), g, Poly([1]))
    if (m, n) == (3, 3):
        f = Poly([0, 3]) * Poly([1, 3, 3])  # 3r * (3r^2 + 3r + 1)
        g = Poly([-1, 0, 3]) * Poly([1, 6, 18, 18, 9]) * Fraction(1, 4)
        return FamilySpec(3, 3, f, g, Poly([1]), required_field=-3)
    raise UnsupportedPair(
        "no built-in family for (%d, %d); use the registry" % (m, n)
    )


# ---------------------------------------------------------------------------
# specialization


def specialize_family(spec: FamilySpec, r, u, d: int | None = None) -> Curve:
    """The curve (u^2 f(r), u^3 g(r)) over the ambient field.

    The ambient field is Q(sqrt(d)) (or Q when d is None); it defaults to
    the field the scalars r, u live in.  A family with a field requirement
    refuses any other ambient field — the roots of unity its m-torsion
    needs exist nowhere else.
    """
    if d is None:
        d = common_field(r, u)
    r = in_field(r, d)
    u = in_field(u, d)
    if u == 0:
        raise ZeroU("family specialization needs u != 0")
    if spec.required_field is not None and d != spec.required_field:
        raise ValueError(
            "(%d, %d) family requires the field Q(sqrt(%d)), got %s"
            % (
                spec.m,
                spec.n,
                spec.required_field,
                "Q" if d is None else "Q(sqrt(%d))" % d,
            )
        )
    A = u * u * spec.f(r)
    B = u * u * u * spec.g(r)
    if 4 * A**3 + 27 * B**2 == 0:
        raise SingularSpecialization(
            "r = %s lands on the discriminant locus" % (r,)
        )
    return new_curve(A, B, d)


# ---------------------------------------------------------------------------
# congruence-subgroup indices by matrix enumeration


@dataclass(frozen=True)
class IndexPair:
    """Indices of the level-(m, n) congruence subgroup at level N.

    plain  — index of the determinant-one subgroup in SL2(Z/N);
    mod_pm — the same index after adjoining -I to both groups and passing
             to the quotient by {+-I}.
    """

    plain: int
    mod_pm: int


_INDEX_MEMO: dict[tuple[int, int, int], IndexPair] = {}
_SL2_MEMO: dict[int, tuple[int, int]] = {}  # N -> (order, mod_pm class count)


def _pm_class_count(mats, N: int) -> int:
    """Number of {M, -M} classes represented in ``mats``."""
    seen = set()
    for mat in mats:
        neg = tuple((-x) % N for x in mat)
        seen.add(min(mat, neg))
    return len(seen)


def _subgroup_matrices(N: int, m: int, n: int) -> list[tuple[int, int, int, int]]:
    """All [[a,b],[c,d]] over Z/N with det 1, a=1,b=0 mod m and c=0,d=1 mod n."""
    out = []
    a_range = range(1 % m, N, m)
    b_range = range(0, N, m)
    c_range = range(0, N, n)
    d_range = range(1 % n, N, n)
    for a in a_range:
        for d_ in d_range:
            ad = a * d_
            for b in b_range:
                for c in c_range:
                    if (ad - b * c) % N == 1:
                        out.append((a, b, c, d_))
    return out


def group_index(N: int, m: int, n: int) -> IndexPair:
    """Enumerated indices of the level-(m, n) subgroup at level N.

    Exhaustive: builds the determinant-one congruence subgroup element by
    element, counts it against all of SL2(Z/N), and repeats the count on
    {+-I}-classes.  Both divisions are checked to be exact.
    """
    if not (1 <= m and n % m == 0 and N % n == 0):
        raise ValueError("need m | n | N, got (%d, %d, %d)" % (N, m, n))
    if N > 24:
        raise BoundExceeded("matrix enumeration capped at level 24")
    key = (N, m, n)
    if key in _INDEX_MEMO:
        return _INDEX_MEMO[key]
    if N not in _SL2_MEMO:
        sl2 = _subgroup_matrices(N, 1, 1)
        _SL2_MEMO[N] = (len(sl2), _pm_class_count(sl2, N))
    sl2_order, sl2_pm = _SL2_MEMO[N]
    sub = _subgroup_matrices(N, m, n)
    sub_pm = _pm_class_count(sub, N)
    if sl2_order % len(sub) or sl2_pm % sub_pm:
        raise ArithmeticError(
            "subgroup order fails Lagrange at (%d, %d, %d)" % key
        )
    out = IndexPair(sl2_order // len(sub), sl2_pm // sub_pm)
    _INDEX_MEMO[key] = out
    return out


# ---------------------------------------------------------------------------
# certification


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of the three-part family certification."""

    m: int
    n: int
    samples: int
    split_ok: bool  # (i)  sampled specializations satisfy the split condition
    root_identity_ok: bool  # (ii)  h is a root of the n-division polynomial
    degree_ok: bool  # (iii) degree/index equation
    failures: tuple = ()

    @property
    def passed(self) -> bool:
        return self.split_ok and self.root_identity_ok and self.degree_ok


def _psi_composite_is_zero(spec: FamilySpec) -> tuple[bool, str]:
    """Exact zero test for Psi_{n, f(r), g(r)}(h(r)) in K[r].

    Every monomial s^i t^j x^k of Psi_n has 2i + 3j + k = W := deg_x Psi_n,
    so the composite has degree at most D = floor(W * M) with
    M = max(deg f / 2, deg g / 3, deg h); vanishing at the D + 1 points
    r = 0..D proves it is the zero polynomial.
    """
    prim = primitive_division_poly(spec.n)
    if prim.degree == 0:
        return False, "the 1-division polynomial is constant and has no roots"
    terms = prim.poly.terms
    df, dg, dh = spec.f.degree, spec.g.degree, spec.h.degree
    M = max(Fraction(df, 2), Fraction(dg, 3), Fraction(dh))
    D = math.floor(prim.degree * M)
    max_i = max(k[0] for k in terms)
    max_j = max(k[1] for k in terms)
    max_k = max(k[2] for k in terms)
    rational = all(
        is_rational(c) for p in (spec.f, spec.g, spec.h) for c in p.coeffs
    )
    for r0 in range(D + 1):
        r0 = Fraction(r0)
        A, B, X = spec.f(r0), spec.g(r0), spec.h(r0)
        if rational:
            zero = _psi_value_is_zero_rational(terms, max_i, max_j, max_k, A, B, X)
        else:
            pa = _powers(A, max_i)
            pb = _powers(B, max_j)
            px = _powers(X, max_k)
            acc = 0
            for (i, j, k), c in terms.items():
                acc = acc + c * pa[i] * pb[j] * px[k]
            zero = acc == 0
        if not zero:
            return False, "composite polynomial is nonzero at r = %s" % r0
    return True, ""


def _powers(x, top: int) -> list:
    out = [in_field(1, common_field(x))]
    for _ in range(top):
        out.append(out[-1] * x)
    return out


def _psi_value_is_zero_rational(
    terms, max_i: int, max_j: int, max_k: int, A: Fraction, B: Fraction, X: Fraction
) -> bool:
    """Integer-only zero test of sum c * A^i B^j X^k over the term dict.

    Clears every denominator by the fixed factor lcm(c.den) * da^max_i *
    db^max_j * dx^max_k, so the accumulation runs in plain ints.
    """
    na, da = A.numerator, A.denominator
    nb, db = B.numerator, B.denominator
    nx, dx = X.numerator, X.denominator
    lcm_c = math.lcm(*(c.denominator for c in terms.values()))
    pna, pda = _int_powers(na, max_i), _int_powers(da, max_i)
    pnb, pdb = _int_powers(nb, max_j), _int_powers(db, max_j)
    pnx, pdx = _int_powers(nx, max_k), _int_powers(dx, max_k)
    acc = 0
    for (i, j, k), c in terms.items():
        cnum = c.numerator * (lcm_c // c.denominator)
        acc += (
            cnum
            * pna[i]
            * pda[max_i - i]
            * pnb[j]
            * pdb[max_j - j]
            * pnx[k]
            * pdx[max_k - k]
        )
    return acc == 0


def _int_powers(x: int, top: int) -> list[int]:
    out = [1]
    for _ in range(top):
        out.append(out[-1] * x)
    return out


def verify_family(spec: FamilySpec, samples: int = 20) -> VerificationReport:
    """Three-part certification; failures are reported, never raised.

    (i) draws deterministic pseudo-random rational (r, u), skips the finitely
    many singular parameters, and requires the m-division split condition on
    every surviving specialization; (ii) is the exact composite-polynomial
    certificate; (iii) compares the degree pattern of (f, g, h) with the
    enumerated mod-+-1 subgroup index at level n.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    failures = []

    rng = random.Random(0xFA0 + (spec.m << 10) + spec.n)
    d = spec.required_field
    done = attempts = 0
    split_ok = True
    while done < samples and attempts < 80 * samples:
        attempts += 1
        r = Fraction(rng.randint(-60, 60), rng.randint(1, 9))
        u = Fraction(rng.randint(1, 40), rng.randint(1, 9))
        if rng.random() < 0.5:
            u = -u
        try:
            curve = specialize_family(spec, in_field(r, d), in_field(u, d), d)
        except (SingularSpecialization, ZeroU):
            continue
        done += 1
        if not condition_P(curve.A, curve.B, spec.m, spec.m, d):
            split_ok = False
            failures.append(
                "(i) split condition fails at r = %s, u = %s" % (r, u)
            )
            if len(failures) >= 4:
                break
    if done < samples and split_ok:
        split_ok = False
        failures.append(
            "(i) could not draw %d nonsingular specializations" % samples
        )

    root_ok, why = _psi_composite_is_zero(spec)
    if not root_ok:
        failures.append("(ii) " + why)

    df, dg, dh = spec.f.degree, spec.g.degree, spec.h.degree
    degree_ok = df >= 2 * dh and dg >= 3 * dh
    if not degree_ok:
        failures.append(
            "(iii) degree floor fails: deg f = %d, deg g = %d, deg h = %d"
            % (df, dg, dh)
        )
    else:
        want = group_index(spec.n, spec.m, spec.n).mod_pm
        got = max(3 * df, 2 * dg)
        degree_ok = got == want
        if not degree_ok:
            failures.append(
                "(iii) max{3 deg f, 2 deg g} = %d but the subgroup index is %d"
                % (got, want)
            )

    return VerificationReport(
        m=spec.m,
        n=spec.n,
        samples=samples,
        split_ok=split_ok,
        root_identity_ok=root_ok,
        degree_ok=degree_ok,
        failures=tuple(failures),
    )


# ---------------------------------------------------------------------------
# registry: externally supplied families as data


@dataclass(frozen=True)
class RegistryRejection:
    """A registry entry that failed admission, with the reason."""

    label: str
    reason: str


@dataclass(frozen=True)
class RegistryLoad:
    """Sequence of admitted FamilySpecs plus the rejection reports."""

    admitted: tuple = ()
    rejected: tuple = ()

    def __iter__(self):
        return iter(self.admitted)

    def __len__(self) -> int:
        return len(self.admitted)

    def __getitem__(self, i):
        return self.admitted[i]


def _parse_coeff(entry, d: int | None, where: str):
    if isinstance(entry, str):
        try:
            return Fraction(entry)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError("%s: bad fraction %r (%s)" % (where, entry, exc))
    if isinstance(entry, int):
        return Fraction(entry)
    if isinstance(entry, list) and len(entry) == 2:
        if d is None:
            raise ValueError(
                "%s: quadratic coefficient in a rational family" % where
            )
        a = _parse_coeff(entry[0], None, where)
        b = _parse_coeff(entry[1], None, where)
        return in_field(a, d) + in_field(b, d) * _sqrt_gen(d)
    raise ValueError("%s: coefficient must be 'p/q' or [a, b]" % where)


def _sqrt_gen(d: int):
    from .exactnum import QuadScalar

    return QuadScalar(0, 1, d)


def _parse_poly(entry, d: int | None, where: str) -> Poly:
    if not isinstance(entry, list) or not entry:
        raise ValueError("%s: expected a nonempty coefficient list" % where)
    return Poly([_parse_coeff(c, d, where) for c in entry])


def _format_coeff(c) -> object:
    if is_rational(c):
        return str(Fraction(c))
    return [str(Fraction(c.a)), str(Fraction(c.b))]


def registry_dumps(specs) -> str:
    """Encode FamilySpecs as the registry document format."""
    doc = {
        "families": [
            {
                "m": s.m,
                "n": s.n,
                "field": s.required_field,
                "f": [_format_coeff(c) for c in s.f.coeffs],
                "g": [_format_coeff(c) for c in s.g.coeffs],
                "h": [_format_coeff(c) for c in s.h.coeffs],
            }
            for s in specs
        ]
    }
    return json.dumps(doc, indent=1)


def registry_load(text: str, samples: int = 12) -> RegistryLoad:
    """Parse a registry document and admit only certified families.

    The document is JSON: {"families": [{"m":, "n":, "field":, "f":, "g":,
    "h":}, ...]} with coefficients in ascending order, each "p/q" (or an
    [a, b] pair meaning a + b*sqrt(field)).  Document-level malformation
    raises ParseError; per-entry problems (bad fields, invariant violations,
    failed certification) reject that entry with a reason and admit the
    rest.  Admission order follows document order and is deterministic.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("registry is not valid JSON: %s" % exc)
    if not isinstance(doc, dict) or not isinstance(doc.get("families"), list):
        raise ParseError('registry must be {"families": [...]}')
    admitted = []
    rejected = []
    for pos, entry in enumerate(doc["families"]):
        label = "entry %d" % pos
        try:
            if not isinstance(entry, dict):
                raise ValueError("entry must be an object")
            m, n = entry.get("m"), entry.get("n")
            if not isinstance(m, int) or not isinstance(n, int):
                raise ValueError("m and n must be integers")
            label = "(%d, %d) at entry %d" % (m, n, pos)
            d = entry.get("field")
            if d is not None and not isinstance(d, int):
                raise ValueError("field must be null or an integer")
            spec = FamilySpec(
                m,
                n,
                _parse_poly(entry.get("f"), d, "f"),
                _parse_poly(entry.get("g"), d, "g"),
                _parse_poly(entry.get("h"), d, "h"),
                required_field=d,
            )
        except ValueError as exc:
            rejected.append(RegistryRejection(label, str(exc)))
            continue
        report = verify_family(spec, samples)
        if report.passed:
            admitted.append(spec)
        else:
            rejected.append(
                RegistryRejection(label, "; ".join(report.failures))
            )
    return RegistryLoad(tuple(admitted), tuple(rejected))


def load_builtin_registry(samples: int = 12) -> RegistryLoad:
    """Load and certify the registry document shipped with the package."""
    from importlib import resources

    text = (
        resources.files("torsionlab").joinpath("data/families.json").read_text()
    )
    return registry_load(text, samples)


def family_for_pair(m: int, n: int, samples: int = 12) -> FamilySpec:
    """Built-in family if one exists, else the shipped registry's entry."""
    try:
        return builtin_family(m, n)
    except UnsupportedPair:
        pass
    for spec in load_builtin_registry(samples):
        if spec.pair == (m, n):
            return spec
    raise UnsupportedPair("no family available for (%d, %d)" % (m, n))
