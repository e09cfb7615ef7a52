import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from meshcert.predicates import (
    CONSTANTS,
    NEGATIVE,
    POSITIVE,
    ZERO,
    DegenerateSegment,
    NonFiniteInput,
    collect_stats,
    current_stats,
    exact_determinant_sign_ict,
    exact_determinant_sign_ot,
    incircle,
    on_segment,
    orientation,
    segments_intersect,
)
from oracles import incircle_sign, orient_sign

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)
small = st.floats(-1e3, 1e3, allow_nan=False)
point = st.tuples(finite, finite)
small_point = st.tuples(small, small)
lattice = st.tuples(st.integers(-20, 20), st.integers(-20, 20)).map(lambda p: (float(p[0]), float(p[1])))


def test_constants_are_exact():
    for v in (CONSTANTS.u, CONSTANTS.u_normal, CONSTANTS.u_subnormal):
        assert Fraction(v).denominator & (Fraction(v).denominator - 1) == 0
        assert float.fromhex(v.hex()) == v
    assert CONSTANTS.u == 2.0**-53
    assert CONSTANTS.u_normal == 2.0**-1022
    assert CONSTANTS.u_subnormal == 2.0**-1074 == math.ulp(0.0)
    assert CONSTANTS.theta_ot == 3 * CONSTANTS.u
    assert Fraction(CONSTANTS.ict_linear_coeff) == 10 * Fraction(2) ** -53 + 176 * Fraction(2) ** -106
    assert CONSTANTS.ict_underflow_coeff == 5 * 2.0**-1074


def test_orientation_examples():
    assert orientation((0, 0), (1, 0), (0, 1)) is POSITIVE
    assert orientation((0, 0), (1, 1), (2, 2)) is ZERO
    assert orientation((0, 0), (0, 1), (1, 0)) is NEGATIVE


def test_tiny_collinear_literal_is_exactly_zero():
    # 2e-300 + 5e-324 rounds back to 2e-300, so the three points are collinear
    y = 2e-300 + 5e-324
    assert y == 2e-300
    assert orient_sign((0, 0), (1e-300, 1e-300), (2e-300, y)) == 0
    assert orientation((0, 0), (1e-300, 1e-300), (2e-300, y)) is ZERO


def test_tiny_left_turn_needs_the_exact_path():
    y = math.nextafter(2e-300, math.inf)
    with collect_stats() as st_:
        s = orientation((0, 0), (1e-300, 1e-300), (2e-300, y))
    assert orient_sign((0, 0), (1e-300, 1e-300), (2e-300, y)) == 1
    assert s is POSITIVE
    assert st_.ot_fallbacks == 1


def test_incircle_examples():
    a, b, c = (1, 0), (0, 1), (-1, 0)
    assert incircle(a, b, c, (0, 0)) is NEGATIVE
    assert incircle(a, b, c, (0, -1)) is ZERO
    assert incircle(a, b, c, (0, -2)) is POSITIVE


def test_near_cocircular_incircle_uses_exact_path():
    d = (0.0, -1.0 - 2.0**-52)
    assert incircle_sign((1, 0), (0, 1), (-1, 0), d) == 1
    with collect_stats() as st_:
        s = incircle((1, 0), (0, 1), (-1, 0), d)
    assert s is POSITIVE
    assert st_.ict_fallbacks == 1


def test_exact_huge_collinear():
    p = [(2.0**500, 2.0**500), (2.0**501, 2.0**501), (2.0**502, 2.0**502)]
    assert exact_determinant_sign_ot(*p) is ZERO
    assert orientation(*p) is ZERO
    assert exact_determinant_sign_ot((0, 0), (1, 0), (0, 1)) is POSITIVE


@pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
def test_non_finite_input(bad):
    with pytest.raises(NonFiniteInput):
        orientation((0, 0), (1, 0), (bad, 1))
    with pytest.raises(NonFiniteInput):
        incircle((1, 0), (0, 1), (-1, 0), (0, bad))


def test_near_overflow_incircle():
    s = 2.0**511
    a, b, c = (s, 0.0), (0.0, s), (-s, 0.0)
    for d in [(0.0, 0.0), (0.0, -s), (0.0, -2 * s), (s * 0.5, s * 0.5), (2.0**1023, 2.0**1023)]:
        assert incircle(a, b, c, d) == incircle_sign(a, b, c, d)


def test_on_segment_examples():
    assert on_segment((0, 0), (2, 2), (1, 1))
    assert not on_segment((0, 0), (2, 2), (0, 0))
    assert on_segment((0, 0), (0, 2), (0, 1))
    assert on_segment((0, 0), (2, 0), (1, 0))
    assert not on_segment((0, 0), (2, 2), (3, 3))
    assert not on_segment((0, 0), (2, 2), (1, 1.0000000000000002))
    with pytest.raises(DegenerateSegment):
        on_segment((1, 1), (1, 1), (0, 0))


@pytest.mark.parametrize(
    "a, b, c, d, expected",
    [
        ((0, 0), (2, 2), (0, 2), (2, 0), True),
        ((0, 0), (1, 0), (1, 0), (2, 1), False),
        ((0, 0), (2, 0), (1, 0), (1, 1), True),
        ((0, 0), (1, 0), (2, 0), (3, 0), False),
        ((0, 0), (2, 0), (1, 0), (3, 0), True),
        ((0, 0), (2, 0), (0, 0), (1, 0), True),
        ((0, 0), (2, 0), (0, 0), (-1, 0), False),
        ((0, 0), (2, 0), (0, 0), (0, 1), False),
        ((0, 0), (2, 0), (2, 0), (0, 0), True),
        ((0, 0), (1, 1), (0, 1), (0.4, 0.6), False),
    ],
)
def test_segments_intersect_examples(a, b, c, d, expected):
    assert segments_intersect(a, b, c, d) is expected


def test_segments_intersect_degenerate():
    with pytest.raises(DegenerateSegment):
        segments_intersect((0, 0), (0, 0), (1, 1), (2, 2))


def _naive_intersect(a, b, c, d):
    # closed-segment overlap minus "only a shared endpoint", via rational algebra
    F = [tuple(map(Fraction, p)) for p in (a, b, c, d)]
    a, b, c, d = F

    def on_closed(p, q, r):
        return orient_sign(p, q, r) == 0 and min(p[0], q[0]) <= r[0] <= max(p[0], q[0]) and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])

    o1, o2 = orient_sign(a, b, c), orient_sign(a, b, d)
    o3, o4 = orient_sign(c, d, a), orient_sign(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    touching = []
    for p, q, r in ((a, b, c), (a, b, d), (c, d, a), (c, d, b)):
        if on_closed(p, q, r):
            touching.append(r)
    shared = {a, b} & {c, d}
    return any(r not in shared for r in touching) or ({a, b} == {c, d})


@given(lattice, lattice, lattice, lattice)
def test_segments_intersect_matches_rational_reference(a, b, c, d):
    assume(a != b and c != d)
    assert segments_intersect(a, b, c, d) == _naive_intersect(a, b, c, d)


@given(point, point, point)
def test_orientation_matches_oracle(a, b, c):
    assert orientation(a, b, c) == orient_sign(a, b, c)


@given(small_point, small_point, small_point, small_point)
def test_incircle_matches_oracle(a, b, c, d):
    o = orient_sign(a, b, c)
    assume(o != 0)
    if o < 0:
        a, b = b, a
    assert incircle(a, b, c, d) == incircle_sign(a, b, c, d)
    assert exact_determinant_sign_ict(a, b, c, d) == incircle_sign(a, b, c, d)


@settings(max_examples=200)
@given(point, point, point, point)
def test_incircle_matches_oracle_wide_range(a, b, c, d):
    o = orient_sign(a, b, c)
    assume(o != 0)
    if o < 0:
        a, b = b, a
    assert incircle(a, b, c, d) == incircle_sign(a, b, c, d)


@given(point, point, point)
def test_orientation_antisymmetry(a, b, c):
    assert orientation(a, b, c) == -orientation(b, a, c)


@given(small_point, small_point, small_point, small_point)
def test_incircle_cyclic_symmetry(a, b, c, d):
    assume(orient_sign(a, b, c) > 0)
    s = incircle(a, b, c, d)
    assert incircle(b, c, a, d) == s == incircle(c, a, b, d)


@given(lattice, lattice, lattice, lattice, st.integers(-(2**20), 2**20), st.integers(-(2**20), 2**20))
def test_translation_invariance(a, b, c, d, dx, dy):
    def sh(p):
        return (p[0] + dx, p[1] + dy)

    assert orientation(a, b, c) == orientation(sh(a), sh(b), sh(c))
    assume(orient_sign(a, b, c) > 0)
    assert incircle(a, b, c, d) == incircle(sh(a), sh(b), sh(c), sh(d))


@given(lattice, lattice, lattice, lattice)
def test_segments_intersect_symmetry(a, b, c, d):
    assume(a != b and c != d)
    r = segments_intersect(a, b, c, d)
    assert r == segments_intersect(b, a, c, d) == segments_intersect(a, b, d, c)
    assert r == segments_intersect(c, d, a, b) == segments_intersect(d, c, b, a)


def test_stats_nest_and_merge():
    outer_before = current_stats().ot_calls
    with collect_stats() as outer:
        orientation((0, 0), (1, 0), (0, 1))
        with collect_stats() as inner:
            orientation((0, 0), (1, 0), (0, 1))
            incircle((1, 0), (0, 1), (-1, 0), (0, -1))
        assert inner.ot_calls == 1 and inner.ict_calls == 1 and inner.ict_fallbacks == 1
    assert outer.ot_calls == 2 and outer.ict_calls == 1
    assert current_stats().ot_calls == outer_before + 2
    assert outer.ot_fallbacks <= outer.ot_calls and outer.ict_fallbacks <= outer.ict_calls
