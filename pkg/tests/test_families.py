"""Tests for genus-zero family specs, certification, and the registry.

Pinned data below:
  builtin formulas   (1,2): f = r-1, g = -r, h = 1
                     (2,2): f = -(r^2+r+1), g = r(r+1), h = 1
                     (1,3): f = r, g = (r^2-6r-3)/12, h = 1
                     (3,3): f = 3r(3r^2+3r+1),
                            g = (3r^2-1)(9r^4+18r^3+18r^2+6r+1)/4, h = 1
  specializations    (1,2) @ r=2, u=1  -> (1, -2), 2-division root x = 1
                     (2,2) @ r=1, u=1  -> singular (roots u, ru collide)
                     (1,3) @ r=3, u=1  -> (3, -1), 3-division root x = 1
  subgroup indices   (3,1,3) -> 8 plain / 4 classes
                     (4,1,4) -> 12 / 6
                     (2,1,2) -> 3 / 3 (at level 2, -I = I)
"""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsionlab.divpoly import primitive_division_poly, primitive_division_poly_at
from torsionlab.errors import (
    BoundExceeded,
    ParseError,
    SingularSpecialization,
    UnsupportedPair,
    ZeroU,
)
from torsionlab.exactnum import QuadScalar
from torsionlab.families import (
    T_GENUS_ZERO,
    FamilySpec,
    IndexPair,
    builtin_family,
    family_for_pair,
    group_index,
    load_builtin_registry,
    registry_dumps,
    registry_load,
    specialize_family,
    verify_family,
)
from torsionlab.polylab import Poly, rational_roots
from torsionlab.torsion import condition_P

BUILTIN_PAIRS = ((1, 2), (2, 2), (1, 3), (3, 3))

#: The registry document shipped with the package covers exactly these.
REGISTRY_PAIRS = frozenset(
    [(1, n) for n in (4, 5, 6, 7, 8, 9, 10, 12)] + [(2, 4), (2, 6), (2, 8), (4, 4)]
)


def small_fraction(rng: random.Random, lo: int = -9, hi: int = 9) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, 4))


# ---------------------------------------------------------------------------
# the genus-zero pair list and FamilySpec validation


def test_genus_zero_pair_list():
    assert (1, 1) in T_GENUS_ZERO
    assert (1, 12) in T_GENUS_ZERO
    assert (2, 8) in T_GENUS_ZERO
    assert (5, 5) in T_GENUS_ZERO
    assert (1, 11) not in T_GENUS_ZERO
    assert (2, 10) not in T_GENUS_ZERO
    assert all(n % m == 0 for m, n in T_GENUS_ZERO)
    assert len(T_GENUS_ZERO) == 19


def test_spec_rejects_non_divisible_pair():
    with pytest.raises(ValueError, match="m | n"):
        FamilySpec(2, 3, Poly([0, 1]), Poly([1, 1]), Poly([1]))


def test_spec_rejects_non_genus_zero_pair():
    with pytest.raises(ValueError, match="genus-zero"):
        FamilySpec(2, 10, Poly([0, 1]), Poly([1, 1]), Poly([1]))


def test_spec_rejects_zero_polynomial():
    with pytest.raises(ValueError, match="nonzero"):
        FamilySpec(1, 2, Poly([0, 1]), Poly([]), Poly([1]))


def test_spec_rejects_shared_factor():
    # f = g = r - 1 share the factor r - 1.
    with pytest.raises(ValueError, match="share a factor"):
        FamilySpec(1, 2, Poly([-1, 1]), Poly([-1, 1]), Poly([1]))


def test_spec_rejects_modular_polynomial():
    with pytest.raises(ValueError, match="characteristic-zero"):
        FamilySpec(1, 2, Poly([0, 1], modulus=5), Poly([1, 1]), Poly([1]))


def test_spec_field_requirement_forced_by_m():
    # Full 3-torsion (resp. 4-torsion) needs the cube (resp. fourth) roots
    # of unity, so m = 3 forces field -3 and m = 4 forces field -1.
    with pytest.raises(ValueError, match="forces required_field"):
        FamilySpec(3, 3, Poly([0, 1]), Poly([1, 1]), Poly([1]))
    with pytest.raises(ValueError, match="forces required_field"):
        FamilySpec(4, 4, Poly([0, 1]), Poly([1, 1]), Poly([1]), required_field=-3)
    with pytest.raises(ValueError, match="None, -3 or -1"):
        FamilySpec(1, 2, Poly([0, 1]), Poly([1, 1]), Poly([1]), required_field=5)


# ---------------------------------------------------------------------------
# built-in families


def test_builtin_12_formula():
    spec = builtin_family(1, 2)
    assert spec.pair == (1, 2)
    assert spec.f == Poly([-1, 1])  # r - 1
    assert spec.g == Poly([0, -1])  # -r
    assert spec.h == Poly([1])
    assert spec.required_field is None


def test_builtin_22_formula():
    spec = builtin_family(2, 2)
    assert spec.f == Poly([-1, -1, -1])  # -(r^2 + r + 1)
    assert spec.g == Poly([0, 1, 1])  # r(r + 1)
    assert spec.h == Poly([1])
    assert spec.required_field is None


def test_builtin_13_formula():
    spec = builtin_family(1, 3)
    assert spec.f == Poly([0, 1])  # r
    assert spec.g == Poly([Fraction(-1, 4), Fraction(-1, 2), Fraction(1, 12)])
    assert spec.h == Poly([1])
    assert spec.required_field is None


def test_builtin_33_formula():
    spec = builtin_family(3, 3)
    assert spec.f == Poly([0, 3]) * Poly([1, 3, 3])
    assert spec.g == Poly([-1, 0, 3]) * Poly([1, 6, 18, 18, 9]) * Fraction(1, 4)
    assert spec.h == Poly([1])
    assert spec.required_field == -3


def test_builtin_other_pairs_unsupported():
    for pair in ((1, 4), (2, 4), (1, 12), (5, 5)):
        with pytest.raises(UnsupportedPair):
            builtin_family(*pair)


@settings(max_examples=30, deadline=None)
@given(
    r=st.fractions(min_value=-8, max_value=8, max_denominator=5),
    u=st.fractions(min_value=-6, max_value=6, max_denominator=4),
)
def test_builtin_12_two_torsion_root_identity(r, u):
    # x = u is a 2-division root by construction:
    # u^3 + u^3 (r - 1) - u^3 r = 0.
    spec = builtin_family(1, 2)
    try:
        curve = specialize_family(spec, r, u)
    except (SingularSpecialization, ZeroU):
        return
    psi2 = primitive_division_poly_at(2, curve.A, curve.B)
    assert psi2(u) == 0


@settings(max_examples=30, deadline=None)
@given(
    r=st.fractions(min_value=-8, max_value=8, max_denominator=5),
    u=st.fractions(min_value=-6, max_value=6, max_denominator=4),
)
def test_builtin_22_two_division_factorization(r, u):
    # The 2-division cubic of the (2,2) family splits completely:
    # x^3 + u^2 f(r) x + u^3 g(r) = (x - u)(x - ru)(x + (r+1)u).
    spec = builtin_family(2, 2)
    try:
        curve = specialize_family(spec, r, u)
    except (SingularSpecialization, ZeroU):
        return
    psi2 = primitive_division_poly_at(2, curve.A, curve.B)
    product = Poly([-u, 1]) * Poly([-r * u, 1]) * Poly([(r + 1) * u, 1])
    assert psi2 == product


@settings(max_examples=30, deadline=None)
@given(
    r=st.fractions(min_value=-8, max_value=8, max_denominator=5),
    u=st.fractions(min_value=-6, max_value=6, max_denominator=4),
)
def test_builtin_13_three_torsion_root_identity(r, u):
    # x = u kills the 3-division polynomial:
    # u^4 (3 + 6r + (r^2 - 6r - 3) - r^2) / 3 = 0 identically.
    spec = builtin_family(1, 3)
    try:
        curve = specialize_family(spec, r, u)
    except (SingularSpecialization, ZeroU):
        return
    psi3 = primitive_division_poly_at(3, curve.A, curve.B)
    assert psi3(u) == 0


# ---------------------------------------------------------------------------
# specialization


def test_specialize_12_pinned():
    curve = specialize_family(builtin_family(1, 2), Fraction(2), Fraction(1))
    assert (curve.A, curve.B) == (1, -2)
    psi2 = primitive_division_poly_at(2, curve.A, curve.B)
    assert psi2.coeffs == (-2, 1, 0, 1)  # x^3 + x - 2
    assert Fraction(1) in rational_roots(psi2)


def test_specialize_22_singular_pinned():
    # At r = 1 the roots u and ru of the 2-division cubic collide:
    # (A, B) = (-3, 2) has 4(-27) + 27(4) = 0.
    with pytest.raises(SingularSpecialization):
        specialize_family(builtin_family(2, 2), Fraction(1), Fraction(1))


def test_specialize_13_pinned():
    curve = specialize_family(builtin_family(1, 3), Fraction(3), Fraction(1))
    assert (curve.A, curve.B) == (3, -1)
    psi3 = primitive_division_poly_at(3, curve.A, curve.B)
    assert psi3.coeffs == (-3, -4, 6, 0, 1)  # x^4 + 6x^2 - 4x - 3, monic
    assert Fraction(1) in rational_roots(psi3)  # = u * h(r)


def test_specialize_zero_u():
    with pytest.raises(ZeroU):
        specialize_family(builtin_family(1, 2), Fraction(5), Fraction(0))


def test_specialize_33_field_gate():
    # The (3,3) family carries full 3-torsion, which forces the cube roots
    # of unity into the field: over plain Q the specialization is refused.
    spec = builtin_family(3, 3)
    with pytest.raises(ValueError, match="requires the field"):
        specialize_family(spec, Fraction(2), Fraction(1))
    with pytest.raises(ValueError, match="requires the field"):
        specialize_family(spec, QuadScalar(2, 0, 5), QuadScalar(1, 0, 5))
    curve = specialize_family(spec, Fraction(2), Fraction(1), -3)
    assert curve.d == -3
    assert condition_P(curve.A, curve.B, 3, 3, -3)


# ---------------------------------------------------------------------------
# congruence-subgroup indices


def test_group_index_pinned():
    assert group_index(3, 1, 3) == IndexPair(plain=8, mod_pm=4)
    assert group_index(4, 1, 4) == IndexPair(plain=12, mod_pm=6)
    # At level 2, -I = I, so both counts coincide.
    assert group_index(2, 1, 2) == IndexPair(plain=3, mod_pm=3)


def test_group_index_degree_identity():
    # Orbit count of (0,1): the level-(1,n) subgroup has plain index
    # 2 deg(Psi_n) and {+-I}-class index deg(Psi_n) for n in 3..6.
    for n in (3, 4, 5, 6):
        deg = primitive_division_poly(n).degree
        pair = group_index(n, 1, n)
        assert pair.mod_pm == deg
        assert pair.plain == 2 * deg


def test_group_index_full_level_is_group_order():
    # (m, n) = (1, 1) puts no congruence condition at all: index 1.
    assert group_index(8, 1, 1) == IndexPair(plain=1, mod_pm=1)
    assert group_index(24, 1, 24).plain > 0  # enumeration bound is inclusive


def test_group_index_divisibility_errors():
    with pytest.raises(ValueError, match="m | n | N"):
        group_index(6, 4, 6)  # m does not divide n
    with pytest.raises(ValueError, match="m | n | N"):
        group_index(8, 1, 6)  # n does not divide N
    with pytest.raises(BoundExceeded):
        group_index(25, 1, 25)


# ---------------------------------------------------------------------------
# certification


def test_verify_builtin_families_pass():
    for m, n in BUILTIN_PAIRS:
        report = verify_family(builtin_family(m, n), samples=20)
        assert report.passed, (m, n, report.failures)
        assert report.failures == ()
        assert (report.m, report.n, report.samples) == (m, n, 20)


def test_verify_degree_index_equation():
    # max{3 deg f, 2 deg g} equals the class index of the level-(m, n)
    # subgroup at level n; for the two rational-point families that index
    # is the degree of the primitive division polynomial itself.
    for m, n in BUILTIN_PAIRS:
        spec = builtin_family(m, n)
        got = max(3 * spec.f.degree, 2 * spec.g.degree)
        assert got == group_index(n, m, n).mod_pm
    assert max(3 * 1, 2 * 1) == 3 == primitive_division_poly(2).degree
    assert max(3 * 1, 2 * 2) == 4 == primitive_division_poly(3).degree


def test_verify_33_rival_formula_negative_control():
    # Two (3,3) coefficient formulas circulate; they differ in the middle
    # sign of the cubic factor of f.  Exactly one passes certification,
    # and the loser already fails the sampled split condition (i).
    winner = builtin_family(3, 3)
    loser = FamilySpec(
        3,
        3,
        Poly([0, 3]) * Poly([1, -3, 3]),  # 3r(3r^2 - 3r + 1)
        winner.g,
        Poly([1]),
        required_field=-3,
    )
    reports = [verify_family(s, samples=8) for s in (winner, loser)]
    assert [r.passed for r in reports] == [True, False]
    assert not reports[1].split_ok
    assert any(f.startswith("(i)") for f in reports[1].failures)


def test_verify_corrupted_g_fails_root_identity():
    # g' = 2 - r stays coprime to f and h but breaks the division-poly
    # root identity (ii); sampling (i) and degrees (iii) still pass.
    bad = FamilySpec(1, 2, Poly([-1, 1]), Poly([2, -1]), Poly([1]))
    report = verify_family(bad, samples=6)
    assert not report.passed
    assert report.split_ok
    assert not report.root_identity_ok
    assert report.degree_ok
    assert any(f.startswith("(ii)") for f in report.failures)


def test_verify_rejects_nonpositive_samples():
    with pytest.raises(ValueError, match="samples"):
        verify_family(builtin_family(1, 2), samples=0)


# ---------------------------------------------------------------------------
# registry


def test_registry_roundtrip_builtin():
    spec = builtin_family(1, 2)
    load = registry_load(registry_dumps([spec]), samples=6)
    assert len(load.admitted) == 1
    assert load.rejected == ()
    assert load.admitted[0] == spec


def test_registry_rejects_corrupted_g():
    # Same corruption as above, arriving as data: the entry is rejected
    # with the failing condition named, and nothing is admitted.
    doc = registry_dumps(
        [FamilySpec(1, 2, Poly([-1, 1]), Poly([2, -1]), Poly([1]))]
    )
    load = registry_load(doc, samples=6)
    assert load.admitted == ()
    assert len(load.rejected) == 1
    assert load.rejected[0].label == "(1, 2) at entry 0"
    assert "(ii)" in load.rejected[0].reason


def test_registry_document_level_parse_errors():
    with pytest.raises(ParseError, match="not valid JSON"):
        registry_load("{oops", samples=1)
    with pytest.raises(ParseError, match="families"):
        registry_load('{"families": 5}', samples=1)
    with pytest.raises(ParseError, match="families"):
        registry_load("[1, 2, 3]", samples=1)


def test_registry_entry_level_rejections():
    # Malformed entries reject individually; well-formed neighbors load.
    good = registry_dumps([builtin_family(1, 2)])
    entry = good[good.index("[") + 1 : good.rindex("]")]
    doc = '{"families": [42, {"m": "x", "n": 2}, %s, {"m": 1, "n": 2}]}' % entry
    load = registry_load(doc, samples=4)
    assert len(load.admitted) == 1
    assert load.admitted[0] == builtin_family(1, 2)
    reasons = {r.label: r.reason for r in load.rejected}
    assert "entry must be an object" in reasons["entry 0"]
    assert "m and n must be integers" in reasons["entry 1"]
    assert "f" in reasons["(1, 2) at entry 3"]


def test_registry_quadratic_coefficient_rules():
    # [a, b] coefficients mean a + b*sqrt(field); they are rejected in a
    # family with no field requirement.
    doc = '{"families": [{"m": 1, "n": 2, "field": null, "f": [["1", "1"], "1"], "g": ["0", "-1"], "h": ["1"]}]}'
    load = registry_load(doc, samples=2)
    assert load.admitted == ()
    assert "quadratic coefficient" in load.rejected[0].reason


def test_shipped_registry_loads_in_full():
    load = load_builtin_registry(samples=2)
    assert load.rejected == ()
    assert {s.pair for s in load.admitted} == REGISTRY_PAIRS
    assert len(load.admitted) == 12
    for spec in load.admitted:
        assert spec.required_field == (-1 if spec.pair == (4, 4) else None)


def test_family_for_pair_prefers_builtin():
    assert family_for_pair(1, 2) == builtin_family(1, 2)
    spec = family_for_pair(1, 6, samples=2)
    assert spec.pair == (1, 6)
    for pair in ((3, 6), (5, 5), (7, 7)):
        with pytest.raises(UnsupportedPair):
            family_for_pair(*pair, samples=1)


# ---------------------------------------------------------------------------
# the containment invariant over every admitted family


def test_admitted_families_give_level_structure():
    # For every family the package can produce, 100 random nonsingular
    # specializations all contain Z/m x Z/n over the family's field.
    specs = [builtin_family(m, n) for m, n in BUILTIN_PAIRS]
    specs += list(load_builtin_registry(samples=2).admitted)
    assert len(specs) == 16
    for spec in specs:
        rng = random.Random(0xC0FFEE + 37 * spec.m + spec.n)
        done = 0
        while done < 100:
            r = small_fraction(rng)
            u = small_fraction(rng, lo=1, hi=6)
            if rng.random() < 0.5:
                u = -u
            try:
                curve = specialize_family(spec, r, u, spec.required_field)
            except (SingularSpecialization, ZeroU):
                continue
            done += 1
            assert condition_P(
                curve.A, curve.B, spec.m, spec.n, spec.required_field
            ), (spec.pair, r, u)
