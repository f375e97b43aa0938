"""Exact half-translation surfaces: polygons with rational vertices glued along edges.

Edge ``i`` of a polygon runs from vertex ``i`` to vertex ``i+1``.  Corner ``(p, i)``
is the interior sector at vertex ``i`` of polygon ``p``; it opens counterclockwise
from the direction of edge ``i`` to the reversed direction of edge ``i-1``.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    BadConeAngle,
    Disconnected,
    EdgeMismatch,
    InvalidPolygon,
    NonManifold,
)

Vec = tuple  # (Fraction, Fraction)
Corner = tuple  # (polygon index, vertex index)

ANGLE_TOL = 1e-9


def rational(x) -> Fraction:
    """Coerce ints, Fractions, "p/q" / decimal strings and floats to a Fraction.

    Floats convert exactly (binary rationals); use strings for decimal input.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, str)):
        return Fraction(x.strip() if isinstance(x, str) else x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite coordinate {x}")
        return Fraction(x)
    return Fraction(x)


def vec(x, y) -> Vec:
    return (rational(x), rational(y))


def add(u: Vec, v: Vec) -> Vec:
    return (u[0] + v[0], u[1] + v[1])


def sub(u: Vec, v: Vec) -> Vec:
    return (u[0] - v[0], u[1] - v[1])


def neg(u: Vec) -> Vec:
    return (-u[0], -u[1])


def scale(c, u: Vec) -> Vec:
    return (c * u[0], c * u[1])


def cross(u: Vec, v: Vec):
    return u[0] * v[1] - u[1] * v[0]


def dot(u: Vec, v: Vec):
    return u[0] * v[0] + u[1] * v[1]


def angle_key(ref: Vec, v: Vec):
    """Exact sort key for the counterclockwise angle from ``ref`` to ``v`` in [0, 2pi)."""
    c = cross(ref, v)
    d = dot(ref, v)
    if c == 0:
        return (0, Fraction(0)) if d > 0 else (2, Fraction(0))
    # cot(theta) = d / c decreases on both (0, pi) and (pi, 2pi)
    return (1 if c > 0 else 3, Fraction(-d) / c)


def corner_angle(out: Vec, back: Vec) -> float:
    """Float angle of the sector from ``out`` counterclockwise to ``back``."""
    a = math.atan2(float(cross(out, back)), float(dot(out, back)))
    return a if a > 0 else a + 2 * math.pi


class GlueKind(enum.Enum):
    TRANSLATION = "T"
    REFLECTION = "R"

    @property
    def sign(self) -> int:
        """Linear part of the gluing map (+I or -I) as a scalar."""
        return 1 if self is GlueKind.TRANSLATION else -1


@dataclass(frozen=True)
class FlatPolygon:
    vertices: tuple

    def __post_init__(self):
        verts = tuple(vec(*v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        self._validate()

    def __len__(self):
        return len(self.vertices)

    def vertex(self, i: int) -> Vec:
        return self.vertices[i % len(self.vertices)]

    def edge(self, i: int) -> Vec:
        return sub(self.vertex(i + 1), self.vertex(i))

    def out_dir(self, i: int) -> Vec:
        return self.edge(i)

    def back_dir(self, i: int) -> Vec:
        return neg(self.edge(i - 1))

    def corner_angle(self, i: int) -> float:
        return corner_angle(self.out_dir(i), self.back_dir(i))

    @property
    def area(self) -> Fraction:
        n = len(self.vertices)
        twice = sum(cross(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n))
        return Fraction(twice, 2)

    def _validate(self):
        n = len(self.vertices)
        if n < 3:
            raise InvalidPolygon("a polygon needs at least 3 vertices")
        for i in range(n):
            if self.edge(i) == (0, 0):
                raise InvalidPolygon(f"zero-length edge {i}")
            e0, e1 = self.edge(i - 1), self.edge(i)
            if cross(e0, e1) == 0 and dot(e0, e1) < 0:
                raise InvalidPolygon(f"spike at vertex {i}")
        if self.area <= 0:
            raise InvalidPolygon("vertices must be counterclockwise with positive area")
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if _segments_touch(self.vertex(i), self.vertex(i + 1), self.vertex(j), self.vertex(j + 1)):
                    raise InvalidPolygon(f"edges {i} and {j} intersect")


def _on_segment(a, b, p) -> bool:
    return (
        cross(sub(b, a), sub(p, a)) == 0
        and min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def _segments_touch(a, b, c, d) -> bool:
    d1 = cross(sub(b, a), sub(c, a))
    d2 = cross(sub(b, a), sub(d, a))
    d3 = cross(sub(d, c), sub(a, c))
    d4 = cross(sub(d, c), sub(b, c))
    if ((d1 > 0 > d2) or (d1 < 0 < d2)) and ((d3 > 0 > d4) or (d3 < 0 < d4)):
        return True
    return _on_segment(a, b, c) or _on_segment(a, b, d) or _on_segment(c, d, a) or _on_segment(c, d, b)


@dataclass(frozen=True)
class EdgeGluing:
    side_a: tuple
    side_b: tuple
    kind: GlueKind

    def __post_init__(self):
        object.__setattr__(self, "side_a", tuple(int(x) for x in self.side_a))
        object.__setattr__(self, "side_b", tuple(int(x) for x in self.side_b))
        if not isinstance(self.kind, GlueKind):
            object.__setattr__(self, "kind", GlueKind(self.kind))


@dataclass(frozen=True)
class Singularity:
    vertex_class: frozenset
    cone_angle: int  # in units of pi
    is_puncture: bool
    label: object = None

    @property
    def order(self) -> int:
        return self.cone_angle - 2


@dataclass(frozen=True)
class StratumSignature:
    orders: tuple
    genus: int
    num_punctures: int

    def __str__(self):
        return "{" + ", ".join(str(k) for k in self.orders) + f"}} genus {self.genus}, {self.num_punctures} punctures"


@dataclass(frozen=True, eq=False)
class HalfTranslationSurface:
    """A validated half-translation surface. Build through :func:`build_surface`."""

    polygons: tuple
    gluings: tuple
    marked: frozenset
    labels: dict | None
    partner: dict = field(repr=False)  # (p, e) -> ((p', e'), GlueKind)
    classes: tuple = field(repr=False)  # tuple of tuples of corners, each in CCW order
    class_of: dict = field(repr=False)
    cone_angles: tuple = field(repr=False)  # per vertex class, multiples of pi
    class_marked: tuple = field(repr=False)

    # -- topology -------------------------------------------------------
    @property
    def euler_characteristic(self) -> int:
        return len(self.classes) - len(self.gluings) + len(self.polygons)

    @property
    def genus(self) -> int:
        return (2 - self.euler_characteristic) // 2

    def class_order(self, c: int) -> int:
        return self.cone_angles[c] - 2

    def is_stop(self, c: int) -> bool:
        """Vertex classes that terminate separatrices: singular or marked."""
        return self.class_marked[c] or self.cone_angles[c] != 2

    def class_label(self, c: int):
        if self.labels is None:
            return None
        for corner in self.classes[c]:
            if corner in self.labels:
                return self.labels[corner]
        return None

    def next_corner(self, corner: Corner) -> tuple:
        """Counterclockwise neighbour of a corner and the sign of the frame change."""
        p, i = corner
        n = len(self.polygons[p])
        (q, j), kind = self.partner[(p, (i - 1) % n)]
        return (q, j), kind.sign

    def vertex_point(self, corner: Corner) -> Vec:
        p, i = corner
        return self.polygons[p].vertex(i)

    def map_point(self, edge: tuple, x: Vec) -> Vec:
        """Image of a point of edge ``edge`` in the glued polygon's coordinates."""
        (p, e) = edge
        (q, f), kind = self.partner[edge]
        a0 = self.polygons[p].vertex(e)
        b1 = self.polygons[q].vertex(f + 1)
        if kind is GlueKind.TRANSLATION:
            return add(sub(x, a0), b1)
        return sub(add(b1, a0), x)

    def with_labels(self, labels: dict | None) -> "HalfTranslationSurface":
        return build_surface(self.polygons, self.gluings, self.marked, labels=labels)

    def default_labels(self) -> dict:
        """Label every vertex class by its index (used for marked-surface comparisons)."""
        return {corner: f"v{c}" for c, cls in enumerate(self.classes) for corner in cls}


def build_surface(
    polygons: Sequence,
    gluings: Iterable,
    marked: Iterable = (),
    labels: dict | None = None,
) -> HalfTranslationSurface:
    """Validate polygons and gluings and compute vertex classes and cone angles.

    Simple poles are punctures by definition and get marked automatically.
    """
    polys = tuple(p if isinstance(p, FlatPolygon) else FlatPolygon(tuple(p)) for p in polygons)
    glues = tuple(g if isinstance(g, EdgeGluing) else EdgeGluing(*g) for g in gluings)
    partner = {}
    for g in glues:
        for side in (g.side_a, g.side_b):
            p, e = side
            if not (0 <= p < len(polys) and 0 <= e < len(polys[p])):
                raise NonManifold(f"edge {side} does not exist")
        if g.side_a == g.side_b:
            raise NonManifold(f"edge {g.side_a} glued to itself")
        va = polys[g.side_a[0]].edge(g.side_a[1])
        vb = polys[g.side_b[0]].edge(g.side_b[1])
        expected = neg(va) if g.kind is GlueKind.TRANSLATION else va
        if vb != expected:
            raise EdgeMismatch(
                f"edges {g.side_a} and {g.side_b} have vectors {_fmt(va)} and {_fmt(vb)}, "
                f"incompatible with gluing kind {g.kind.value}"
            )
        for s, t in ((g.side_a, g.side_b), (g.side_b, g.side_a)):
            if s in partner:
                raise NonManifold(f"edge {s} is glued more than once")
            partner[s] = (t, g.kind)
    for p, poly in enumerate(polys):
        for e in range(len(poly)):
            if (p, e) not in partner:
                raise NonManifold(f"edge {(p, e)} is not glued")

    _check_connected(len(polys), glues)

    def next_corner(corner):
        p, i = corner
        return partner[(p, (i - 1) % len(polys[p]))][0]

    class_of = {}
    classes = []
    for p, poly in enumerate(polys):
        for i in range(len(poly)):
            if (p, i) in class_of:
                continue
            cls = []
            c = (p, i)
            while c not in class_of:
                class_of[c] = len(classes)
                cls.append(c)
                c = next_corner(c)
            classes.append(tuple(cls))

    cone = []
    for cls in classes:
        total = sum(polys[p].corner_angle(i) for p, i in cls)
        k = round(total / math.pi)
        if k < 1 or abs(total - k * math.pi) > ANGLE_TOL:
            raise BadConeAngle(f"cone angle {total} at {cls} is not a positive multiple of pi")
        cone.append(k)

    marked = frozenset(tuple(int(x) for x in m) for m in marked)
    for m in marked:
        if m not in class_of:
            raise NonManifold(f"marked corner {m} does not exist")
    marked_classes = {class_of[m] for m in marked}
    class_marked = tuple(c in marked_classes or cone[c] == 1 for c in range(len(classes)))
    full_marks = frozenset(cls[0] for c, cls in enumerate(classes) if class_marked[c] and not (set(cls) & marked)) | marked

    surf = HalfTranslationSurface(
        polygons=polys,
        gluings=glues,
        marked=full_marks,
        labels=dict(labels) if labels is not None else None,
        partner=partner,
        classes=tuple(classes),
        class_of=class_of,
        cone_angles=tuple(cone),
        class_marked=class_marked,
    )
    chi = surf.euler_characteristic
    if chi % 2:
        raise NonManifold(f"odd Euler characteristic {chi}")
    if sum(k - 2 for k in cone) != 4 * surf.genus - 4:
        raise BadConeAngle("cone angles violate Gauss-Bonnet")
    return surf


def _fmt(v):
    return f"({v[0]}, {v[1]})"


def _check_connected(n: int, glues) -> None:
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for g in glues:
        parent[find(g.side_a[0])] = find(g.side_b[0])
    if len({find(i) for i in range(n)}) > 1:
        raise Disconnected("the glued surface is not connected")


def singularities(s: HalfTranslationSurface) -> list:
    """Cone points of angle other than 2pi, plus marked regular points."""
    out = []
    for c, cls in enumerate(s.classes):
        if s.is_stop(c):
            out.append(Singularity(frozenset(cls), s.cone_angles[c], s.class_marked[c], s.class_label(c)))
    return out


def stratum(s: HalfTranslationSurface) -> StratumSignature:
    orders = tuple(sorted(sing.order for sing in singularities(s)))
    return StratumSignature(orders, s.genus, sum(s.class_marked))


def area(s: HalfTranslationSurface) -> Fraction:
    return sum((p.area for p in s.polygons), Fraction(0))


def order_counts(s: HalfTranslationSurface) -> Counter:
    return Counter(stratum(s).orders)


def linear_image(s: HalfTranslationSurface, a, b, c, d) -> HalfTranslationSurface:
    """Image of ``s`` under the linear map [[a, b], [c, d]] (determinant must be positive).

    Gluing kinds, marks and labels carry over unchanged.
    """
    polys = [
        FlatPolygon(tuple((a * x + b * y, c * x + d * y) for x, y in p.vertices)) for p in s.polygons
    ]
    return build_surface(polys, s.gluings, s.marked, labels=s.labels)
