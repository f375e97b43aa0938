import math
from fractions import Fraction

import numpy as np
import pytest

from halftrans.errors import OutOfRange
from halftrans.pillowcase import LPillowParams, collapse_top
from halftrans.scmap import (
    SCPolygon,
    asymptotic_fit,
    boundary_path,
    default_t_samples,
    five_points,
    invariants_of_hexagon,
    invariants_of_slit_pillow,
    match_moduli,
    normalize_points,
    rectangle_ratio_oracle,
    solve_hexagon,
    solve_polygon,
    solve_slit_pillow,
    symmetry_residual,
)

from oracles import rectangle_ratio, sc_side_integral

ASPECTS = (1.5, 2.0, 5.0, 30.0, 300.0)


def rectangle(x3):
    return SCPolygon(np.array([1.0, x3 - 1]), (0.5, 0.5, 0.5, 0.5), 1.0)


@pytest.mark.parametrize("x3", ASPECTS)
def test_rectangle_ratio_matches_oracle(x3):
    p = rectangle(x3)
    z0, z1, z3 = p.sc_map(0), p.sc_map(1), p.sc_map(x3)
    ratio = abs(z3 - z1) / abs(z1 - z0)
    assert ratio == pytest.approx(rectangle_ratio(x3), rel=1e-10)
    closed, quadded = rectangle_ratio_oracle(x3)
    assert closed == pytest.approx(quadded, rel=1e-10)


def test_square_has_symmetric_prevertices():
    assert rectangle(2.0).side_lengths()[0] == pytest.approx(rectangle(2.0).side_lengths()[1], rel=1e-13)


def test_side_integrals_match_quadpack():
    h = solve_hexagon(1, 1, 0.5)
    x, al = list(h.prevertices), list(h.alphas[:-1])
    for k in range(h.m - 1):
        assert h.side_integral(k) == pytest.approx(sc_side_integral(x, al, k), rel=1e-10)


@pytest.mark.parametrize("h1, h2, q", [(1, 1, 0.5), (0.3, 2.0, 0.25), (2.0, 0.5, 3.0), (1, 1, 1), (0.01, 0.99, 1)])
def test_hexagon_solves_exactly(h1, h2, q):
    h = solve_hexagon(h1, h2, q)
    assert h.closure_residual() < 1e-9
    assert h.refinement_error() < 1e-11
    v = h.vertices()
    if q == 1:
        expect = [0, 1, 1 + 1j * h2, 1 + 1j * (h1 + h2), 1j * (h1 + h2)]
    elif q < 1:
        expect = [0, 1, 1 + 1j * h2, q + 1j * h2, q + 1j * (h1 + h2), 1j * (h1 + h2)]
    else:
        expect = [0, q, q + 1j * h1, 1 + 1j * h1, 1 + 1j * (h1 + h2), 1j * (h1 + h2)]
    assert np.max(np.abs(v - np.array(expect))) < 1e-9


def test_degenerate_rectangle_vertices():
    h = solve_hexagon(0.25, 0.75, 1)
    v = h.vertices()
    assert h.names == ("P1", "P2", "M", "P4", "P5")
    assert np.max(np.abs(v - np.array([0, 1, 1 + 0.75j, 1 + 1j, 1j]))) < 1e-9


def test_prevertices_map_to_vertices():
    h = solve_hexagon(1, 1, 0.5)
    v, x = h.vertices(), h.prevertices
    for j in range(h.m):
        assert abs(h.sc_map(x[j]) - v[j]) < 1e-10
        # approaching from above: |f - v_j| scales like eps^alpha_j
        d1 = abs(h.sc_map(complex(x[j], 1e-6)) - v[j])
        d2 = abs(h.sc_map(complex(x[j], 1e-8)) - v[j])
        assert math.log(d1 / d2) / math.log(100) == pytest.approx(h.alphas[j], abs=1e-3)


def test_path_independence():
    h = solve_hexagon(0.7, 1.3, 0.4)
    for z in (1 + 1j, complex(0.3, 0.05), complex(5, 2)):
        vals = [h.sc_map(z), h.sc_map(z, via=3j), h.sc_map(z, start=0), h.sc_map(z, start=h.m - 1, via=complex(-2, 4))]
        assert max(abs(a - vals[0]) for a in vals) < 1e-10


def test_interior_maps_inside():
    h = solve_hexagon(1, 1, 0.5)
    w = h.sc_map(1 + 1j)
    assert 0 < w.real < 1 and 0 < w.imag < 2


def test_solve_polygon_records_solver():
    p = solve_polygon((0.5, 0.5, 0.5, 0.5), [1.0, 3.0])
    assert p.side_lengths() == pytest.approx([1.0, 3.0], rel=1e-11)
    assert "solver" in p.meta


def test_slit_pillow():
    s = solve_slit_pillow(2.0, 0.3)
    assert np.max(np.abs(s.vertices() - np.array([0, 1, 1 + 2j, 0.3 + 2j, 2j]))) < 1e-9
    with pytest.raises(OutOfRange):
        solve_slit_pillow(1.0, 1.0)
    with pytest.raises(OutOfRange):
        solve_slit_pillow(-1.0, 0.5)


# -- conformal invariants -----------------------------------------------------------------


def test_square_l_symmetries():
    # (1,1,1) is a 1 x 2 rectangle: the horizontal midline reflection reverses the labels
    pts = five_points(invariants_of_hexagon(solve_hexagon(1, 1, 1)))
    assert symmetry_residual(pts, [4, 3, 2, 1, 0]) < 1e-10
    # the L with h1 = h2 = q = 1/2 is symmetric about its diagonal
    pts = five_points(invariants_of_hexagon(solve_hexagon(0.5, 0.5, 0.5)))
    assert symmetry_residual(pts, [0, 4, 3, 2, 1]) < 1e-10
    # a generic L is not
    pts = five_points(invariants_of_hexagon(solve_hexagon(0.3, 1, 0.5)))
    assert symmetry_residual(pts, [0, 4, 3, 2, 1]) > 1e-3


def test_mobius_invariance():
    h = solve_hexagon(0.6, 1.2, 0.3)
    x = list(h.prevertices)
    pts = [x[0], x[1], x[2], x[4], math.inf]
    base = normalize_points(pts, (0, 3, 4))
    a, b, c, d = 2.0, -1.0, 0.5, 3.0

    def mob(z):
        return a / c if math.isinf(z) else (a * z + b) / (c * z + d)

    moved = [mob(z) for z in pts]
    assert np.max(np.abs(normalize_points(moved, (0, 3, 4)) - base)) < 1e-12
    inv = invariants_of_hexagon(h)
    assert base == pytest.approx([inv.x4, inv.x5], rel=1e-12)


def test_rectangle_degeneration_matches_slit_pillow():
    # L(h1, h2, 1) is a 1 x H rectangle with a mark at height h2; rotated a quarter turn
    # and scaled it is the 1 x 1/H rectangle with a mark at h1/H on the top side
    h1, h2 = 0.3, 0.9
    H = h1 + h2
    lp = five_points(invariants_of_hexagon(solve_hexagon(h1, h2, 1)))
    sp = five_points(invariants_of_slit_pillow(1 / H, h1 / H))
    # slit pillow labels BL, BR, TR, M, TL shifted cyclically onto P1, P2, M, P4, P5
    shifted = [sp[1], sp[2], sp[3], sp[4], sp[0]]
    assert np.max(np.abs(normalize_points(lp) - normalize_points(shifted))) < 1e-10


def test_collapsed_target_matches_exact_collapse():
    c = collapse_top(LPillowParams(1, 1, Fraction(1, 2)), Fraction(1, 8))
    assert float(c.slit_position) == 0.375
    s = solve_slit_pillow(1.0, float(c.slit_position))
    assert abs(s.vertices()[3] - complex(0.375, 1)) < 1e-10


# -- the boundary path --------------------------------------------------------------------


@pytest.mark.parametrize("q, t", [(0.5, 0.1), (0.5, 1e-3), (0.25, 0.01), (1.0, 0.01), (1.0, 1e-4)])
def test_match_moduli_consistency(q, t):
    h1, h2 = match_moduli(q, t)
    a = invariants_of_hexagon(solve_hexagon(h1, h2, q)).as_log_gaps()
    b = invariants_of_slit_pillow(1.0, q - t).as_log_gaps()
    assert np.max(np.abs(a - b)) <= 1e-8


def test_match_moduli_unique_across_guesses():
    ref = match_moduli(0.5, 0.1)
    for guess in ([0.2, 0.5], [0.01, 2.0]):
        got = match_moduli(0.5, 0.1, method="newton2d", guess=guess)
        assert np.max(np.abs(np.array(got) - ref)) < 1e-7


def test_match_moduli_errors():
    with pytest.raises(OutOfRange):
        match_moduli(2.0, 0.1)
    with pytest.raises(OutOfRange):
        match_moduli(0.5, 0.5)
    with pytest.raises(OutOfRange):
        match_moduli(0.5, 0.0)


def test_frozen_path_values():
    h1, h2 = match_moduli(0.5, 1e-3)
    assert h1 == pytest.approx(2.98942082e-04, rel=1e-7)
    assert h2 == pytest.approx(9.99850814e-01, rel=1e-8)
    h1, h2 = match_moduli(1.0, 1e-2)
    assert h1 == pytest.approx(0.010000392726814047, rel=1e-9)
    assert h2 == pytest.approx(0.9900781501740142, rel=1e-12)


def test_path_continuity():
    ts = np.geomspace(1e-4, 1e-2, 9)
    rows = boundary_path(1.0, ts)
    assert np.all(rows[:, 1] > 0) and np.all(np.diff(rows[:, 1]) > 0)
    assert np.all(np.abs(np.diff(rows[:, 2])) < 0.01)
    assert rows[0, 1] < 2e-4 and rows[0, 2] > 0.999


def test_default_samples():
    ts = default_t_samples()
    assert len(ts) == 61 and ts[0] == pytest.approx(1e-5) and ts[-1] == pytest.approx(1e-2)


def test_fit_requires_two_decades():
    with pytest.raises(ValueError):
        asymptotic_fit(1.0, np.geomspace(1e-3, 1e-2, 5))
    with pytest.raises(ValueError):
        asymptotic_fit(0.5, np.geomspace(1e-4, 0.06, 5))
