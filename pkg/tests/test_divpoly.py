"""Tests for division polynomials: recursion, multiplication formulas,
primitive division polynomials, and the specialized univariate path."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsionlab.divpoly import (
    BiPoly,
    division_poly,
    format_bipoly,
    mult_formulas,
    primitive_division_poly,
    primitive_division_poly_at,
    psi_degree,
    specialize,
)
from torsionlab.errors import SingularCurve
from torsionlab.exactnum import QuadScalar
from torsionlab.polylab import Poly, poly_gcd, rational_roots
from torsionlab.weierstrass import infinity, new_curve, point, point_order, scalar_mul

# -- BiPoly basics --------------------------------------------------------------


def test_bipoly_y_square_reduction():
    y = BiPoly({(0, 0, 0): 1}, 1)
    y2 = y * y
    assert y2.parity == 0
    assert y2.terms == {(0, 0, 3): 1, (1, 0, 1): 1, (0, 1, 0): 1}


def test_bipoly_parity_mismatch_add():
    y = BiPoly({(0, 0, 0): 1}, 1)
    one = BiPoly({(0, 0, 0): 1}, 0)
    with pytest.raises(ValueError):
        y + one
    assert (y + BiPoly({}, 0)) == y  # zero is parity-agnostic


def test_bipoly_evaluate():
    p = BiPoly({(1, 0, 1): 2, (0, 1, 0): -1}, 0)  # 2sx - t
    assert p.evaluate(3, 5, 7) == 2 * 3 * 7 - 5
    y = BiPoly({(0, 0, 0): 1}, 1)
    assert y.evaluate(0, 0, 0, 9) == 9
    with pytest.raises(ValueError):
        y.evaluate(0, 0, 0)


# -- psi_n ------------------------------------------------------------------------


def test_psi_small_pinned():
    assert division_poly(0).is_zero
    assert division_poly(1).terms == {(0, 0, 0): 1}
    assert division_poly(2).terms == {(0, 0, 0): 2}
    assert division_poly(2).parity == 1
    assert division_poly(3).terms == {
        (0, 0, 4): 3,
        (1, 0, 2): 6,
        (0, 1, 1): 12,
        (2, 0, 0): -1,
    }
    assert division_poly(3).parity == 0
    # psi_4 = 4y(x^6+5sx^4+20tx^3-5s^2x^2-4stx-(8t^2+s^3))
    assert division_poly(4).parity == 1
    assert division_poly(4).terms[(0, 0, 6)] == 4
    assert division_poly(4).terms[(0, 2, 0)] == -32


def test_psi_parity_alternates():
    for n in range(1, 15):
        assert division_poly(n).parity == (n + 1) % 2


def test_psi_weight_homogeneous():
    # wt(x)=1, wt(s)=2, wt(t)=3, wt(y)=3: psi_n has pure weight (n^2-1)/2 for
    # odd n; even n carries a y factor, shifting the weight to (n^2+2)/2
    for n in range(1, 13):
        w = division_poly(n).weights()
        assert len(w) == 1
        expected = (n * n - 1) // 2 if n % 2 else (n * n + 2) // 2
        assert w.pop() == expected


def test_psi_leading_coefficient_is_n():
    # x-leading coefficient of psi_n is exactly n (for parity-1 entries the
    # stored part carries it too)
    for n in range(2, 13):
        p = division_poly(n)
        deg = p.x_degree()
        assert p.terms[(0, 0, deg)] == n


SAMPLE_POINTS = [
    (0, -2, 3, 5),  # rank-1 curve, non-torsion generator
    (0, 1, 2, 3),  # order 6
    (-43, 166, 3, 8),  # order 7
    (4, 0, 2, 4),  # order 4
    (-2, 0, 0, 0),  # order 2 (y = 0)
    (Fraction(1, 4), 1, 0, 1),  # fractional coefficients
]


def test_mult_formulas_pinned():
    phi1, om1 = mult_formulas(1)
    assert phi1.terms == {(0, 0, 1): 1} and phi1.parity == 0
    assert om1.terms == {(0, 0, 0): 1} and om1.parity == 1
    phi2, _ = mult_formulas(2)
    assert phi2.terms == {(0, 0, 4): 1, (1, 0, 2): -2, (0, 1, 1): -8, (2, 0, 0): 1}


def test_mult_formulas_match_group_law():
    # (phi_n/psi_n^2, omega_n/psi_n^3) = [n]P wherever psi_n(P) != 0
    for A, B, x0, y0 in SAMPLE_POINTS:
        c = new_curve(A, B)
        P = point(c, x0, y0)
        for n in range(1, 10):
            psin = division_poly(n)
            pv = psin.evaluate(c.A, c.B, P.x, P.y)
            phin, omn = mult_formulas(n)
            Q = scalar_mul(n, P)
            if pv == 0:
                assert Q.is_infinity  # psi_n vanishes exactly on n-torsion x
                continue
            assert phin.evaluate(c.A, c.B, P.x, P.y) / pv**2 == Q.x
            assert omn.evaluate(c.A, c.B, P.x, P.y) / pv**3 == Q.y


def test_psi6_against_scalar_mul_many_points():
    # 20 points: multiples of generators on two curves
    pts = []
    c1 = new_curve(0, -2)
    acc = point(c1, 3, 5)
    for _ in range(10):
        pts.append(acc)
        acc = acc + point(c1, 3, 5)
    c2 = new_curve(Fraction(-7), Fraction(10))
    acc = point(c2, 1, 2)
    for _ in range(10):
        pts.append(acc)
        acc = acc + point(c2, 1, 2)
    phi6, _ = mult_formulas(6)
    psi6 = division_poly(6)
    for P in pts:
        c = P.curve
        pv = psi6.evaluate(c.A, c.B, P.x, P.y)
        if pv == 0:
            continue
        assert phi6.evaluate(c.A, c.B, P.x, P.y) / pv**2 == scalar_mul(6, P).x


# -- primitive division polynomials ----------------------------------------------


def test_prim_pinned_forms():
    assert format_bipoly(primitive_division_poly(2).poly) == "x^3 + s*x + t"
    p3 = primitive_division_poly(3).poly
    assert p3.terms == {
        (0, 0, 4): 1,
        (1, 0, 2): 2,
        (0, 1, 1): 4,
        (2, 0, 0): Fraction(-1, 3),
    }
    p4 = primitive_division_poly(4).poly
    assert p4.terms == {
        (0, 0, 6): 1,
        (1, 0, 4): 5,
        (0, 1, 3): 20,
        (2, 0, 2): -5,
        (1, 1, 1): -4,
        (0, 2, 0): -8,
        (3, 0, 0): -1,
    }


def test_prim_degree_law_symbolic():
    expected = {3: 4, 4: 6, 5: 12, 6: 12, 7: 24, 8: 24, 9: 36, 10: 36, 12: 48}
    for N, deg in expected.items():
        assert psi_degree(N) == deg
        assert primitive_division_poly(N).degree == deg
    assert primitive_division_poly(1).degree == 0
    assert primitive_division_poly(2).degree == 3


def test_prim_degree_law_specialized_to_18():
    # monic in x, so specialization preserves the degree law up to N = 18
    cache = {}
    for N in range(3, 19):
        p = primitive_division_poly_at(N, 1, 1, cache=cache)
        assert p.degree == psi_degree(N)
        assert p.lc == 1


def test_prim_weight_homogeneity_symbolic():
    for N in range(1, 11):
        prim = primitive_division_poly(N)
        if prim.poly.is_zero:
            continue
        w = prim.poly.weights()
        assert w == {prim.degree} or prim.degree == 0 and w == {0}


def test_specialize_pinned():
    assert specialize(primitive_division_poly(3), 0, 1) == Poly([0, 4, 0, 0, 1])
    assert specialize(primitive_division_poly(2), 1, 0) == Poly([0, 1, 0, 1])
    assert specialize(primitive_division_poly(4), 1, 0) == Poly(
        [-1, 0, -5, 0, 5, 0, 1]
    )


def test_specialize_singular_allowed():
    p = specialize(primitive_division_poly(3), 0, 0)
    assert p == Poly([0, 0, 1]) * Poly([0, 0, 1])  # x^4


def test_specialize_quad_field():
    w = QuadScalar(0, 1, -3)
    p = specialize(primitive_division_poly(2), w, 1)
    assert p.coeffs == (QuadScalar(1, 0, -3), w, QuadScalar(0, 0, -3), QuadScalar(1, 0, -3))


def test_fast_path_requires_nonsingular():
    with pytest.raises(SingularCurve):
        primitive_division_poly_at(3, 0, 0)


def test_dual_paths_agree():
    rng = random.Random(5)
    for N in range(1, 11):
        for _ in range(4):
            A = Fraction(rng.randint(-8, 8), rng.randint(1, 3))
            B = Fraction(rng.randint(-8, 8), rng.randint(1, 3))
            if 4 * A**3 + 27 * B**2 == 0:
                continue
            assert specialize(primitive_division_poly(N), A, B) == (
                primitive_division_poly_at(N, A, B)
            )


def test_fast_path_quad_field():
    A = QuadScalar(1, 1, 5)
    B = QuadScalar(0, 1, 5)
    for N in (3, 4, 6):
        assert specialize(primitive_division_poly(N), A, B) == (
            primitive_division_poly_at(N, A, B)
        )


@given(
    st.integers(min_value=2, max_value=10),
    st.fractions(min_value=-20, max_value=20, max_denominator=4),
    st.fractions(min_value=-20, max_value=20, max_denominator=4),
    st.fractions(min_value=-4, max_value=4, max_denominator=3).filter(lambda D: D != 0),
)
@settings(max_examples=50, deadline=None)
def test_weighted_homogeneity_specialized(N, A, B, D):
    # Psi_{N, D^2 A, D^3 B}(D x) = D^deg * Psi_{N, A, B}(x)
    prim = primitive_division_poly(N)
    base = specialize(prim, A, B)
    tw = specialize(prim, D * D * A, D**3 * B)
    deg = prim.degree
    lhs = [tw.coeff(k) * D**k for k in range(deg + 1)]
    rhs = [D**deg * base.coeff(k) for k in range(deg + 1)]
    assert lhs == rhs


@given(
    st.integers(min_value=2, max_value=10),
    st.integers(min_value=-25, max_value=25),
    st.integers(min_value=-25, max_value=25),
)
@settings(max_examples=50, deadline=None)
def test_separability_specialized(N, A, B):
    if 4 * A**3 + 27 * B**2 == 0:
        return
    p = primitive_division_poly_at(N, Fraction(A), Fraction(B))
    assert poly_gcd(p, p.derivative()).degree == 0


def test_root_semantics_known_torsion():
    # rational roots of Psi_N with a rational y correspond exactly to the
    # rational points of exact order N
    cases = [
        (0, 1, {1: [], 2: [Fraction(-1)], 3: [Fraction(0)], 6: [Fraction(2)]}),
        (-1, 0, {2: [Fraction(-1), Fraction(0), Fraction(1)]}),
        # x = -2 is also a root of Psi_4 here, but (-2)^3 + 4*(-2) = -16 is
        # not a rational square, so no rational point sits above it
        (4, 0, {2: [Fraction(0)], 4: [Fraction(2)]}),
        (-43, 166, {7: [Fraction(3), Fraction(-5), Fraction(11)]}),
    ]
    for A, B, by_order in cases:
        c = new_curve(A, B)
        for N, expected_x in by_order.items():
            roots = rational_roots(primitive_division_poly_at(N, Fraction(A), Fraction(B)))
            realized = []
            for x0 in roots:
                rhs = c.rhs(x0)
                from torsionlab.exactnum import sqrt_in_field

                y0 = sqrt_in_field(rhs)
                if y0 is None:
                    continue
                P = point(c, x0, y0)
                assert point_order(P, 2 * N) == N
                realized.append(x0)
            assert sorted(realized) == sorted(expected_x), (A, B, N)


def test_structural_specializations():
    # Psi_{N,0,t}: x-powers congruent to deg mod 3; Psi_{N,s,0}: fixed parity
    for N in range(4, 11):
        prim = primitive_division_poly(N)
        deg = prim.degree
        t_only = [(i, j, k) for (i, j, k) in prim.poly.terms if i == 0]
        assert t_only and all(k % 3 == deg % 3 for (_, _, k) in t_only)
        s_only = [(i, j, k) for (i, j, k) in prim.poly.terms if j == 0]
        assert s_only and all(k % 2 == deg % 2 for (_, _, k) in s_only)
        # x and t do not divide Psi_{N,0,t}: some term with k=0 and some with j=0
        assert any(k == 0 for (_, _, k) in t_only)
        assert any(j == 0 for (_, j, _) in t_only)
        # s and t do not divide Psi_{N,s,0}
        assert any(i == 0 for (i, _, _) in s_only)


def test_format_bipoly():
    assert format_bipoly(division_poly(2)) == "2*y"
    assert format_bipoly(division_poly(3)) == "3*x^4 + 6*s*x^2 + 12*t*x - s^2"
    assert format_bipoly(mult_formulas(1)[1]) == "y"
    assert format_bipoly(BiPoly({}, 0)) == "0"
