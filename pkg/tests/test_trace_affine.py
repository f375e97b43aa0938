import math
from fractions import Fraction

import pytest

from halftrans import library
from halftrans.affine import (
    HalfPlanePoint,
    Mat2,
    apply_gl2,
    beltrami_coefficient,
    geodesic_flow,
    horocycle_flow,
    poincare_distance,
    teich_disk_matrix,
    teich_disk_point,
)
from halftrans.cylinders import cylinder_decomposition
from halftrans.errors import NonPositiveDeterminant, NotUpperHalfPlane
from halftrans.surface import area, stratum
from halftrans.trace import Direction, Undetermined, trace_separatrices

from oracles import hyperbolic_distance


def test_direction_normalization():
    assert Direction(2, 4) == Direction(1, 2)
    assert Direction(-1, -2) == Direction(1, 2)
    assert Direction(-3, 0) == Direction.vertical()
    assert Direction.parse("vertical").is_vertical
    assert Direction.parse("-2/6") == Direction(-1, 3)
    with pytest.raises(ValueError):
        Direction(0, 0)


def test_unmarked_torus_has_no_separatrices():
    assert trace_separatrices(library.flat_torus()) == []


def test_marked_torus_slope_one():
    (sc,) = trace_separatrices(library.flat_torus(marked=True), Direction(1, 1))
    assert sc.holonomy == (1, 1)


def test_marked_torus_slope_two_fifths():
    (sc,) = trace_separatrices(library.flat_torus(marked=True), Direction(2, 5))
    assert sc.holonomy == (5, 2)
    # interior lines x = 1..4 and y = 1
    assert len(sc.crossings) == (5 - 1) + (2 - 1)


def test_pillowcase_saddle_connections():
    scs = trace_separatrices(library.square_pillowcase())
    # four poles, one horizontal prong each, two horizontal saddle connections
    assert len(scs) == 2
    assert sorted(abs(sc.holonomy[0]) for sc in scs) == [1, 1]


def test_crossing_budget_reports_undetermined():
    s = library.flat_torus(marked=True)
    out = trace_separatrices(s, Direction(13, 21), max_crossings=5)
    assert all(isinstance(x, Undetermined) for x in out)


def test_mat2():
    m = Mat2.parse("2,1,1,1")
    assert m.det == 1
    assert (m @ Mat2.identity()) == m
    with pytest.raises(NonPositiveDeterminant):
        Mat2(1, 2, 2, 1)
    with pytest.raises(NonPositiveDeterminant):
        Mat2(0, 1, 1, 0)


def test_upper_half_plane():
    with pytest.raises(NotUpperHalfPlane):
        HalfPlanePoint(0, 0)
    with pytest.raises(NotUpperHalfPlane):
        teich_disk_matrix(complex(1, -1))


def test_teich_disk_at_i_is_identity():
    s = library.three_square_l()
    t = teich_disk_point(s, 1j)
    assert [p.vertices for p in t.polygons] == [p.vertices for p in s.polygons]


def test_teich_disk_scales_area_by_imaginary_part():
    s = library.staircase_genus2()
    t = teich_disk_point(s, (Fraction(1, 3), Fraction(5, 2)))
    assert area(t) == Fraction(5, 2) * area(s)
    assert stratum(t) == stratum(s)


def test_beltrami_coefficient():
    assert beltrami_coefficient(1j) == 0
    k = beltrami_coefficient(2j)
    assert abs(k - (-1 / 3)) < 1e-15
    assert abs(beltrami_coefficient(complex(0.3, 0.7))) < 1


def test_horocycle_preserves_horizontal_cylinders():
    s = library.staircase_genus2()
    dec0 = cylinder_decomposition(s)
    dec1 = cylinder_decomposition(horocycle_flow(s, Fraction(1, 2)))
    assert [(c.circumference, c.height) for c in dec0.cylinders] == [(c.circumference, c.height) for c in dec1.cylinders]


def test_horocycle_full_period_is_a_twist():
    # cylinders of moduli 1, 1/2, 1/3: t = 6 is a multiple of every inverse modulus
    from halftrans.cylinders import js_normal_form

    s = library.staircase_genus2()
    assert js_normal_form(horocycle_flow(s, 6)) == js_normal_form(s)
    assert js_normal_form(horocycle_flow(s, 1)) != js_normal_form(s)


def test_geodesic_flow_area_and_zero():
    s = library.three_square_l()
    assert geodesic_flow(s, 0) is s
    t = geodesic_flow(s, 0.3)
    assert abs(float(area(t)) - 3) < 1e-12


def test_apply_gl2_composition():
    s = library.three_square_l()
    a, b = Mat2(1, 1, 0, 1), Mat2(2, 0, 1, 1)
    lhs = apply_gl2(apply_gl2(s, b), a)
    rhs = apply_gl2(s, a @ b)
    assert [p.vertices for p in lhs.polygons] == [p.vertices for p in rhs.polygons]


@pytest.mark.parametrize("z, w", [(1j, 2j), (complex(0.3, 0.2), complex(-1, 4)), (complex(5, 1e-3), complex(5.1, 2e-3))])
def test_poincare_distance_matches_oracle(z, w):
    assert math.isclose(poincare_distance(z, w), hyperbolic_distance(z, w), rel_tol=1e-12)


def test_poincare_distance_value():
    # curvature -4: d(i, e^{2} i) = 1
    assert math.isclose(poincare_distance(1j, math.exp(2) * 1j), 1.0, rel_tol=1e-14)
