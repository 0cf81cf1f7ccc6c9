from __future__ import annotations

import math
from functools import cmp_to_key
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ammann import numerics as nm

coef = st.integers(min_value=-50, max_value=50)
golden = st.builds(nm.GoldenInt, coef, coef, coef, coef)


def _cmp(a, b):
    return (a - b).sign()


def _sorted_unique(vals):
    out = []
    for v in sorted(vals, key=cmp_to_key(_cmp)):
        if not out or out[-1] != v:
            out.append(v)
    return out


def _inside(poly, x, y) -> bool:
    """Ray cast in doubled coordinates for an axis-parallel polygon; (x, y)
    is a cell centre, so it never lies on an edge."""
    hit = False
    for p, q in zip(poly, poly[1:] + poly[:1]):
        if p.x != q.x:
            continue
        lo, hi = sorted([p.y + p.y, q.y + q.y], key=cmp_to_key(_cmp))
        if (p.x + p.x - x).sign() > 0 and (y - lo).sign() > 0 and (hi - y).sign() > 0:
            hit = not hit
    return hit


def test_tau_minimal_polynomial():
    t = nm.TAU_G
    assert t * t * t * t == t * t + nm.ONE
    assert math.isclose(nm.TAU ** 4, nm.TAU ** 2 + 1.0)


def test_s_is_inverse_of_tau():
    assert nm.S * nm.TAU_G == nm.ONE
    assert math.isclose(nm.to_float(nm.S), 1.0 / nm.TAU)


def test_scale_identity_exact():
    s = nm.S
    assert s * s + s * s * s * s == nm.ONE


@given(golden, golden, golden)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == nm.ZERO
    assert a * nm.ONE == a


@given(golden, golden)
def test_float_image_is_a_homomorphism(a, b):
    scale = 1.0 + abs(nm.to_float(a)) * abs(nm.to_float(b)) + abs(nm.to_float(a)) + abs(nm.to_float(b))
    assert math.isclose(nm.to_float(a * b), nm.to_float(a) * nm.to_float(b), abs_tol=1e-9 * scale)
    assert math.isclose(nm.to_float(a + b), nm.to_float(a) + nm.to_float(b), abs_tol=1e-9 * scale)


@given(golden)
def test_sign_agrees_with_float(a):
    x = nm.to_float(a)
    if abs(x) > 1e-6:
        assert a.sign() == (1 if x > 0 else -1)
    if a == nm.ZERO:
        assert a.sign() == 0


@pytest.mark.parametrize("n", range(0, 9))
def test_minus_word_inverts_reversed_word(n):
    for sigma in product("12", repeat=n):
        w = "".join(sigma)
        assert nm.compose(nm.f_minus_word(w), nm.f_word(w[::-1])) == nm.IDENTITY


def test_bee_is_union_of_two_copies():
    G = list(nm.golden_bee())
    A = [nm.apply(nm.F1, p) for p in G]
    B = [nm.apply(nm.F2, p) for p in G]
    # F2 reverses orientation, so its signed area is negative
    assert nm.polygon_area(A) - nm.polygon_area(B) == nm.polygon_area(G)
    xs = _sorted_unique(p.x for p in G + A + B)
    ys = _sorted_unique(p.y for p in G + A + B)
    cells = 0
    for (x0, x1), (y0, y1) in product(zip(xs, xs[1:]), zip(ys, ys[1:])):
        x, y = x0 + x1, y0 + y1
        a, b, g = _inside(A, x, y), _inside(B, x, y), _inside(G, x, y)
        assert not (a and b)
        assert g == (a or b)
        cells += 1
    assert cells == 9


def test_bee_area_ratios():
    G = nm.golden_bee()
    area = nm.polygon_area(G)
    s2 = nm.S * nm.S
    assert nm.polygon_area([nm.apply(nm.F1, p) for p in G]) == s2 * area
    assert -nm.polygon_area([nm.apply(nm.F2, p) for p in G]) == s2 * s2 * area


def test_golden_point_key_round_trip():
    for p in nm.golden_bee():
        assert nm.GoldenPoint.from_key(p.key()) == p


def test_coefficients_must_be_integers():
    with pytest.raises(TypeError):
        nm.GoldenInt(1.5)


@settings(max_examples=50)
@given(st.text(alphabet="12", max_size=6), st.text(alphabet="12", max_size=6))
def test_word_composition(u, v):
    assert nm.f_word(u + v) == nm.compose(nm.f_word(u), nm.f_word(v))
