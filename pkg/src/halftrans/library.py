"""Named example surfaces used by the tests, the CLI and the docs."""

from __future__ import annotations

from fractions import Fraction

from .cylinders import JSData, surface_from_cylinders
from .surface import HalfTranslationSurface, build_surface

UNIT_SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]


def flat_torus(marked: bool = False) -> HalfTranslationSurface:
    """Unit square with opposite sides glued; optionally mark the corner point."""
    return build_surface(
        [UNIT_SQUARE],
        [((0, 0), (0, 2), "T"), ((0, 1), (0, 3), "T")],
        [(0, 0)] if marked else (),
    )


def square_pillowcase() -> HalfTranslationSurface:
    """Two unit squares glued along their boundaries: four cone points of angle pi."""
    mirror = [(0, -1), (1, -1), (1, 0), (0, 0)]
    gluings = [
        ((0, 0), (1, 2), "T"),
        ((0, 1), (1, 1), "R"),
        ((0, 2), (1, 0), "T"),
        ((0, 3), (1, 3), "R"),
    ]
    return build_surface([UNIT_SQUARE, mirror], gluings)


def folded_square() -> HalfTranslationSurface:
    """One unit square, each side folded onto itself about its midpoint."""
    h = Fraction(1, 2)
    verts = [(0, 0), (h, 0), (1, 0), (1, h), (1, 1), (h, 1), (0, 1), (0, h)]
    gluings = [((0, 2 * k), (0, 2 * k + 1), "R") for k in range(4)]
    return build_surface([verts], gluings)


def three_square_l() -> HalfTranslationSurface:
    """Genus-2 L of three unit squares in two pieces: a 2 x 1 strip and a square on top.

    All corners meet in a single cone point of angle 6pi.
    """
    strip = [(0, 0), (1, 0), (2, 0), (2, 1), (1, 1), (0, 1)]
    gluings = [
        ((1, 0), (0, 4), "T"),
        ((1, 2), (0, 0), "T"),
        ((1, 3), (1, 1), "T"),
        ((0, 1), (0, 3), "T"),
        ((0, 2), (0, 5), "T"),
    ]
    return build_surface([strip, UNIT_SQUARE], gluings)


def origami(r, u) -> HalfTranslationSurface:
    """Square-tiled surface: square i has square r[i] on its right and u[i] above it."""
    n = len(r)
    polys = [[(x + 2 * i, y) for x, y in UNIT_SQUARE] for i in range(n)]
    gluings = [((i, 1), (r[i], 3), "T") for i in range(n)]
    gluings += [((i, 2), (u[i], 0), "T") for i in range(n)]
    return build_surface(polys, gluings)


def staircase_genus2() -> HalfTranslationSurface:
    """Six-square origami with two cone points of angle 4pi and horizontal cylinders
    of lengths 1, 2 and 3."""
    return origami((1, 2, 0, 4, 3, 5), (3, 4, 5, 0, 1, 2))


def one_cylinder_s05(twist=Fraction(0), height=Fraction(1)) -> HalfTranslationSurface:
    """One-cylinder differential with five simple poles and a simple zero.

    One boundary is a star: three unit segments from the zero to poles; the other is a
    segment of length 3 between the remaining two poles. ``twist`` is the offset of the
    far pole-pole segment relative to the star.
    """
    one, three = Fraction(1), Fraction(3)
    data = JSData(
        length=[one] * 6 + [three, three],
        vertex=[0, 1, 0, 2, 0, 3, 4, 5],
        rev=[1, 0, 3, 2, 5, 4, 7, 6],
        faces=[[0, 1, 2, 3, 4, 5], [6, 7]],
        cylinders=[(0, 1, Fraction(height), Fraction(twist))],
        vertex_order=[1, -1, -1, -1, -1, -1],
        vertex_marked=[False, True, True, True, True, True],
        vertex_label=[None] * 6,
    )
    data.validate()
    return surface_from_cylinders(data)
