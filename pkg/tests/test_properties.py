import math
from fractions import Fraction

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from halftrans.affine import Mat2, apply_gl2, poincare_distance
from halftrans.cylinders import cylinder_decomposition, js_normal_form, shear_cylinders, verify_twist_identity
from halftrans.flowlab import GeometricMean, Linear, poincare_distance_array
from halftrans.pillowcase import make_l_pillowcase
from halftrans.scmap import normalize_points
from halftrans.surface import area, stratum

from oracles import hyperbolic_distance, stratum_oracle

SLOW = settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])

pos = st.fractions(min_value=Fraction(1, 8), max_value=8, max_denominator=12)
qs = pos.filter(lambda q: q != 1)
real = st.fractions(min_value=-4, max_value=4, max_denominator=9)
shear = st.tuples(real, pos)


def oracle(s):
    polys = [p.vertices for p in s.polygons]
    gl = [(g.side_a, g.side_b, g.kind.value) for g in s.gluings]
    return stratum_oracle(polys, gl, s.marked)


@SLOW
@given(pos, pos, qs)
def test_l_stratum_matches_oracle_and_gauss_bonnet(h1, h2, q):
    s = make_l_pillowcase(h1, h2, q)
    st_ = stratum(s)
    assert sum(st_.orders) == 4 * st_.genus - 4
    assert oracle(s) == (st_.orders, st_.genus)


@SLOW
@given(pos, pos, qs, shear, shear)
def test_sheared_l_keeps_stratum_and_area(h1, h2, q, l1, l2):
    s = make_l_pillowcase(h1, h2, q)
    t = shear_cylinders(s, [l1, l2])
    assert stratum(t) == stratum(s)
    assert oracle(t) == (stratum(t).orders, stratum(t).genus)
    dec = cylinder_decomposition(t)
    # heights scale by Im lambda_j, circumferences are unchanged
    assert area(t) == sum(c.height * c.circumference for c in dec.cylinders)


@SLOW
@given(pos, pos, qs, shear, shear, st.integers(0, 1))
def test_twist_identity(h1, h2, q, l1, l2, j):
    s = make_l_pillowcase(h1, h2, q)
    assert verify_twist_identity(s, j, [l1, l2])


@SLOW
@given(pos, pos, qs, st.integers(-3, 3))
def test_normal_form_ignores_sign_and_unipotent_twists(h1, h2, q, n):
    s = make_l_pillowcase(h1, h2, q)
    assert js_normal_form(apply_gl2(s, Mat2(-1, 0, 0, -1))) == js_normal_form(s)
    # a full twist in both cylinders is a change of presentation
    dec = cylinder_decomposition(s)
    lam = [None, None]
    for k, c in enumerate(dec.cylinders):
        lam[k] = (n * c.circumference / c.height, Fraction(1))
    assert js_normal_form(shear_cylinders(s, lam)) == js_normal_form(s)


finite = st.floats(min_value=-5, max_value=5, allow_nan=False)
upper = st.floats(min_value=0.05, max_value=5)


@settings(max_examples=60, deadline=None)
@given(st.lists(finite, min_size=5, max_size=5, unique=True), st.tuples(finite, finite, finite, finite))
def test_cross_ratio_invariance(xs, m):
    a, b, c, d = m
    det = a * d - b * c
    if abs(det) < 0.1:
        return
    ys = [(a * x + b) / (c * x + d) if abs(c * x + d) > 1e-3 else None for x in xs]
    if any(y is None or abs(y) > 1e6 for y in ys) or min(abs(p - r) for i, p in enumerate(ys) for r in ys[i + 1 :]) < 1e-3:
        return
    base = normalize_points(xs)
    moved = normalize_points(ys)
    assert np.allclose(base, moved, rtol=1e-7, atol=1e-7)


@settings(max_examples=60, deadline=None)
@given(finite, upper, finite, upper)
def test_distance_agrees_with_oracle(x1, y1, x2, y2):
    z, w = complex(x1, y1), complex(x2, y2)
    d = poincare_distance(z, w)
    assert math.isclose(d, hyperbolic_distance(z, w), rel_tol=1e-9, abs_tol=1e-12)
    assert math.isclose(d, float(poincare_distance_array(np.array([z]), np.array([w]))[0]), rel_tol=1e-9, abs_tol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.05, max_value=0.95), finite, upper, finite, upper, finite, upper, finite, upper)
def test_schwarz_pick(a, x1, y1, x2, y2, u1, v1, u2, v2):
    p = np.array([complex(x1, y1), complex(x2, y2)])
    r = np.array([complex(u1, v1), complex(u2, v2)])
    bound = float(np.max(poincare_distance_array(p, r)))
    for f in (Linear((a, 1 - a)), GeometricMean((a, 1 - a))):
        lhs = float(poincare_distance_array(f(p), f(r)))
        assert lhs <= bound + 1e-12


@SLOW
@given(pos, pos, qs)
def test_area_weights_identity(h1, h2, q):
    s = make_l_pillowcase(h1, h2, q)
    dec = cylinder_decomposition(s)
    assert sum(c.height * c.circumference for c in dec.cylinders) == area(s) == 2 * (q * h1 + h2)
