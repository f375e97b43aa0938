"""Exact straight-line tracing of separatrices in a rational direction.

Everything is done in a *horizontal frame*: the surface is first mapped by a rational
conformal matrix taking the requested direction to the positive x-axis, so every local
trajectory direction is (1, 0) or (-1, 0) and all lengths stay rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .surface import (
    HalfTranslationSurface,
    add,
    angle_key,
    cross,
    dot,
    linear_image,
    neg,
    scale,
    sub,
)

EAST = (Fraction(1), Fraction(0))
WEST = (Fraction(-1), Fraction(0))

DEFAULT_MAX_CROSSINGS = 100_000


@dataclass(frozen=True)
class Direction:
    """Slope ``p/q`` in lowest terms with ``q >= 0``; ``q == 0`` is the vertical."""

    p: int
    q: int

    def __post_init__(self):
        p, q = int(self.p), int(self.q)
        if p == 0 and q == 0:
            raise ValueError("direction (0, 0) is undefined")
        g = math.gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def horizontal(cls) -> "Direction":
        return cls(0, 1)

    @classmethod
    def vertical(cls) -> "Direction":
        return cls(1, 0)

    @classmethod
    def parse(cls, text: str) -> "Direction":
        text = text.strip().lower()
        if text in ("h", "horizontal", "0"):
            return cls.horizontal()
        if text in ("v", "vertical", "inf", "1/0"):
            return cls.vertical()
        f = Fraction(text)
        return cls(f.numerator, f.denominator)

    @property
    def is_horizontal(self) -> bool:
        return self.p == 0

    @property
    def is_vertical(self) -> bool:
        return self.q == 0

    @property
    def vector(self) -> tuple:
        return (Fraction(self.q), Fraction(self.p))

    def frame_matrix(self) -> tuple:
        """Rational conformal matrix (a, b, c, d) sending this direction to the x-axis."""
        return (self.q, self.p, -self.p, self.q)

    def __str__(self):
        return "vertical" if self.is_vertical else f"{self.p}/{self.q}"


def horizontal_frame(s: HalfTranslationSurface, d: Direction) -> HalfTranslationSurface:
    if d.is_horizontal:
        return s
    return linear_image(s, *d.frame_matrix())


@dataclass(frozen=True)
class Prong:
    """An outgoing horizontal direction at a vertex class."""

    id: int
    vclass: int
    corner: tuple
    direction: tuple


@dataclass
class Piece:
    """A straight segment of a trajectory inside one polygon."""

    polygon: int
    start: tuple
    end: tuple
    direction: tuple
    offset: Fraction  # distance from the dart's start to ``start``
    on_edge: int | None = None

    @property
    def length(self) -> Fraction:
        return dot(sub(self.end, self.start), self.direction)


@dataclass
class Dart:
    """A separatrix traced from ``prong`` that ended at ``end_prong``."""

    id: int
    prong: Prong
    end_prong: Prong
    length: Fraction
    pieces: list
    crossings: list = field(default_factory=list)


@dataclass(frozen=True)
class SaddleConnection:
    start: int  # vertex class
    end: int
    holonomy: tuple
    crossings: tuple
    length: Fraction


@dataclass(frozen=True)
class Undetermined:
    """A separatrix that did not reach a singularity within the crossing budget."""

    start: int
    prong: int
    crossings: int


def sector_contains(out, inrev, d) -> bool:
    """Is direction ``d`` in the half-open corner sector [out, inrev)?"""
    return angle_key(out, d) < angle_key(out, inrev)


def prongs(s: HalfTranslationSurface) -> dict:
    """Horizontal prongs of every vertex class, in counterclockwise order."""
    out = {}
    pid = 0
    for c, cls in enumerate(s.classes):
        lst = []
        for p, i in cls:
            poly = s.polygons[p]
            o, b = poly.out_dir(i), poly.back_dir(i)
            here = [d for d in (EAST, WEST) if sector_contains(o, b, d)]
            here.sort(key=lambda d: angle_key(o, d))
            for d in here:
                lst.append(Prong(pid, c, (p, i), d))
                pid += 1
        out[c] = lst
    return out


def first_hit(poly, start, u):
    """Nearest boundary point of ``poly`` along the ray start + t*u, t > 0.

    Returns (t, kind, index) with kind ``"vertex"`` or ``"edge"`` (edge interior).
    """
    best = None
    n = len(poly)
    uu = dot(u, u)
    for j in range(n):
        a = poly.vertex(j)
        e = poly.edge(j)
        w = sub(a, start)
        den = cross(u, e)
        if den == 0:
            if cross(w, u) != 0:
                continue
            for k in (j, j + 1):
                t = dot(sub(poly.vertex(k), start), u) / uu
                if t > 0 and (best is None or t < best[0]):
                    best = (t, "vertex", k % n)
            continue
        t = cross(w, e) / den
        if t <= 0 or (best is not None and t > best[0]):
            continue
        r = cross(w, u) / den
        if r < 0 or r > 1:
            continue
        if r == 0:
            cand = (t, "vertex", j)
        elif r == 1:
            cand = (t, "vertex", (j + 1) % n)
        else:
            cand = (t, "edge", j)
        if best is None or t < best[0] or (t == best[0] and cand[1] == "vertex"):
            best = cand
    if best is None:
        raise RuntimeError("ray does not leave the polygon")
    return best


def edge_containing(poly, a, b) -> int | None:
    """Index of the polygon edge containing the whole segment [a, b], if any."""
    m = scale(Fraction(1, 2), add(a, b))
    for j in range(len(poly)):
        p0, e = poly.vertex(j), poly.edge(j)
        w = sub(m, p0)
        if cross(e, w) == 0 and 0 < dot(w, e) < dot(e, e):
            return j
    return None


class Tracer:
    """Traces every horizontal separatrix of a surface given in its horizontal frame."""

    def __init__(self, s: HalfTranslationSurface, stops=None):
        self.s = s
        self.stops = set(stops) if stops is not None else {c for c in range(len(s.classes)) if s.is_stop(c)}
        self.prongs = prongs(s)
        self.by_corner = {}
        for lst in self.prongs.values():
            for pr in lst:
                self.by_corner[(pr.corner, pr.direction)] = pr
        self.all_prongs = sorted((pr for lst in self.prongs.values() for pr in lst), key=lambda pr: pr.id)

    def arrival(self, poly_index: int, vertex: int, u) -> Prong:
        """The prong along which a trajectory moving with direction ``u`` arrives at a vertex."""
        s = self.s
        poly = s.polygons[poly_index]
        b = neg(u)
        corner = (poly_index, vertex)
        back = poly.back_dir(vertex)
        if cross(b, back) == 0 and dot(b, back) > 0:
            corner, sign = s.next_corner(corner)
            b = scale(sign, b)
        return self.by_corner[(corner, b)]

    def trace(self, pr: Prong, max_crossings: int = DEFAULT_MAX_CROSSINGS):
        s = self.s
        p, i = pr.corner
        pt = s.polygons[p].vertex(i)
        u = pr.direction
        pieces, crossings = [], []
        length = Fraction(0)
        while True:
            poly = s.polygons[p]
            t, kind, idx = first_hit(poly, pt, u)
            end = add(pt, scale(t, u))
            pieces.append(Piece(p, pt, end, u, length, edge_containing(poly, pt, end)))
            length += t
            if kind == "edge":
                crossings.append((p, idx))
                (q, _), gk = s.partner[(p, idx)]
                pt = s.map_point((p, idx), end)
                u = scale(gk.sign, u)
                p = q
            else:
                arr = self.arrival(p, idx, u)
                if arr.vclass in self.stops:
                    return pieces, crossings, length, arr
                # a regular point: leave along the other prong
                others = [x for x in self.prongs[arr.vclass] if x.id != arr.id]
                assert len(others) == 1, "regular vertex should carry two prongs"
                nxt = others[0]
                crossings.append((p, ("vertex", idx)))
                p, i = nxt.corner
                pt = s.polygons[p].vertex(i)
                u = nxt.direction
            if len(crossings) > max_crossings:
                return None

    def trace_all(self, max_crossings: int = DEFAULT_MAX_CROSSINGS):
        """Darts from every stop prong, and the prongs whose trace was undetermined."""
        darts, undetermined = [], []
        for pr in self.all_prongs:
            if pr.vclass not in self.stops:
                continue
            res = self.trace(pr, max_crossings)
            if res is None:
                undetermined.append(Undetermined(pr.vclass, pr.id, max_crossings))
                continue
            pieces, crossings, length, arr = res
            darts.append(Dart(len(darts), pr, arr, length, pieces, crossings))
        return darts, undetermined


def default_stops(s: HalfTranslationSurface) -> set:
    """Stop classes; on a surface without any, class 0 is marked virtually."""
    stops = {c for c in range(len(s.classes)) if s.is_stop(c)}
    return stops or {0}


def trace_separatrices(
    s: HalfTranslationSurface,
    d: Direction = Direction.horizontal(),
    max_crossings: int = DEFAULT_MAX_CROSSINGS,
) -> list:
    """Trace every outgoing singular prong in direction ``d``.

    Each saddle connection is reported once; holonomy is in the original coordinates
    of its starting polygon. A surface with no singular or marked point gives [].
    """
    stops = {c for c in range(len(s.classes)) if s.is_stop(c)}
    if not stops:
        return []
    frame = horizontal_frame(s, d)
    darts, undetermined = Tracer(frame, stops).trace_all(max_crossings)
    a, b, c, dd = d.frame_matrix()
    det = Fraction(a * dd - b * c)
    seen = set()
    out = []
    by_prong = {dt.prong.id: dt for dt in darts}
    for dt in darts:
        if dt.prong.id in seen:
            continue
        seen.add(dt.prong.id)
        seen.add(dt.end_prong.id)
        hx, hy = scale(dt.length, dt.prong.direction)
        hol = ((dd * hx - b * hy) / det, (-c * hx + a * hy) / det)
        out.append(SaddleConnection(dt.prong.vclass, dt.end_prong.vclass, hol, tuple(dt.crossings), dt.length))
        assert dt.end_prong.id in by_prong or dt.end_prong.vclass not in stops
    return out + undetermined
