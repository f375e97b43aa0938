"""Cylinder decompositions, critical graphs, JS normal forms and the polyplane shear.

Conventions. The critical graph is stored as *darts*: one per outgoing prong, so each
saddle connection gives two darts that are each other's ``rev``. ``next(e)`` continues
the boundary with the face on the left of ``e``; every face is one boundary circle of
exactly one cylinder. Positions along a face are measured from the start of its first
dart. Each cylinder carries a constant ``a``: the point at position ``x`` on one of its
faces lies straight across from position ``(a - x) mod c`` on the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .affine import HalfPlanePoint, poincare_distance
from .errors import NotJenkinsStrebel
from .surface import (
    HalfTranslationSurface,
    add,
    area,
    build_surface,
    cross,
    dot,
    rational,
    scale,
    sub,
)
from .trace import (
    DEFAULT_MAX_CROSSINGS,
    Direction,
    Tracer,
    Undetermined,
    default_stops,
    first_hit,
    horizontal_frame,
)


def rot90(v):
    return (-v[1], v[0])


@dataclass
class JSData:
    """Abstract Jenkins-Strebel data: a ribbon graph plus one cylinder per face pair."""

    length: list
    vertex: list  # start vertex of each dart
    rev: list
    faces: list  # dart ids in boundary order
    cylinders: list  # (bottom face, top face, height, a)
    vertex_order: list
    vertex_marked: list
    vertex_label: list

    def __post_init__(self):
        self.face_of = {}
        self.pos = {}
        for f, darts in enumerate(self.faces):
            x = Fraction(0)
            for e in darts:
                self.face_of[e] = f
                self.pos[e] = x
                x += self.length[e]
        self.next = [0] * len(self.length)
        for darts in self.faces:
            for k, e in enumerate(darts):
                self.next[e] = darts[(k + 1) % len(darts)]
        self.cyl_of_face = {}
        for j, (fb, ft, _, _) in enumerate(self.cylinders):
            self.cyl_of_face[fb] = j
            self.cyl_of_face[ft] = j

    def face_length(self, f: int) -> Fraction:
        return sum((self.length[e] for e in self.faces[f]), Fraction(0))

    def other_face(self, f: int) -> int:
        fb, ft, _, _ = self.cylinders[self.cyl_of_face[f]]
        return ft if f == fb else fb

    def across(self, e: int, x=Fraction(0)) -> tuple:
        """Dart and offset straight across the cylinder from position ``x`` on dart ``e``."""
        f = self.face_of[e]
        j = self.cyl_of_face[f]
        _, _, _, a = self.cylinders[j]
        g_face = self.other_face(f)
        c = self.face_length(f)
        y = (a - self.pos[e] - x) % c
        for g in self.faces[g_face]:
            if self.pos[g] <= y < self.pos[g] + self.length[g]:
                return g, y - self.pos[g]
        raise AssertionError("position outside the face")

    def validate(self) -> None:
        n = len(self.length)
        for e in range(n):
            if self.rev[self.rev[e]] != e or self.rev[e] == e:
                raise ValueError("rev must be a fixed-point-free involution")
            if self.length[self.rev[e]] != self.length[e] or self.length[e] <= 0:
                raise ValueError("paired darts must have equal positive length")
        seen = sorted(e for darts in self.faces for e in darts)
        if seen != list(range(n)):
            raise ValueError("faces must partition the darts")
        for fb, ft, h, _ in self.cylinders:
            if self.face_length(fb) != self.face_length(ft):
                raise ValueError("the two boundaries of a cylinder differ in length")
            if h <= 0:
                raise ValueError("cylinder heights must be positive")
        if len(self.cyl_of_face) != len(self.faces):
            raise ValueError("every face must bound exactly one cylinder")


@dataclass(frozen=True)
class Cylinder:
    index: int
    circumference: Fraction
    height: Fraction
    twist: Fraction
    faces: tuple  # (bottom face, top face), canonical bottom first
    boundary_words: tuple
    core_curve_id: int

    @property
    def modulus(self) -> Fraction:
        return self.height / self.circumference

    @property
    def area(self) -> Fraction:
        return self.height * self.circumference

    @property
    def half_circumference(self) -> Fraction:
        """Side length of a cylinder that doubles a polygon strip."""
        return self.circumference / 2


@dataclass(frozen=True)
class CriticalGraph:
    vertices: tuple  # (vertex class, order, marked)
    edges: tuple  # (dart, reverse dart, start class, end class, length)
    rotation: dict  # vertex class -> darts in counterclockwise order
    components: tuple

    def valence(self, v: int) -> int:
        return len(self.rotation[v])


@dataclass
class CylinderDecomposition:
    surface: HalfTranslationSurface
    direction: Direction
    frame: HalfTranslationSurface
    data: JSData
    cylinders: list
    critical_graph: CriticalGraph
    darts: list = field(repr=False)
    virtual_mark: bool = False

    @property
    def k(self) -> int:
        return len(self.cylinders)

    @property
    def total_area(self) -> Fraction:
        return sum((c.area for c in self.cylinders), Fraction(0))

    def to_json(self) -> dict:
        d = self.data
        return {
            "direction": str(self.direction),
            "cylinders": [
                {
                    "h": str(c.height),
                    "c": str(c.circumference),
                    "twist": str(c.twist),
                    "area": str(c.area),
                    "modulus": str(c.modulus),
                }
                for c in self.cylinders
            ],
            "weights": [str(w) for w in area_weights(self)],
            "graph": {
                "vertices": [
                    {"id": v, "order": o, "marked": m} for v, o, m in self.critical_graph.vertices
                ],
                "edges": [
                    {"from": a, "to": b, "length": str(L)} for _, _, a, b, L in self.critical_graph.edges
                ],
            },
            "faces": [[int(e) for e in f] for f in d.faces],
        }


@dataclass(frozen=True)
class UndeterminedDecomposition:
    separatrices: tuple


def _offsets():
    yield Fraction(1, 2)
    m = 3
    while True:
        for k in range(1, m):
            if math.gcd(k, m) == 1:
                yield Fraction(k, m)
        m += 1


class _HeightShooter:
    """Vertical rays from the critical graph across the cylinders."""

    def __init__(self, s: HalfTranslationSurface, darts, rev, max_steps: int):
        self.s = s
        self.darts = darts
        self.rev = rev
        self.max_steps = max_steps
        self.registry = {p: [] for p in range(len(s.polygons))}
        for dt in darts:
            if dt.id > rev[dt.id]:
                continue
            for pc in dt.pieces:
                self.registry[pc.polygon].append((pc.start, pc.end, pc.direction, pc.offset, dt.id))
                if pc.on_edge is not None:
                    edge = (pc.polygon, pc.on_edge)
                    (q, _), gk = s.partner[edge]
                    self.registry[q].append(
                        (s.map_point(edge, pc.start), s.map_point(edge, pc.end), scale(gk.sign, pc.direction), pc.offset, dt.id)
                    )

    def shoot(self, e: int, pos: Fraction):
        """(dart, position, height) hit by the left-perpendicular ray from ``pos`` on ``e``.

        None when the ray meets a vertex or a segment endpoint (the caller retries).
        """
        s = self.s
        dt = self.darts[e]
        piece = None
        for pc in dt.pieces:
            if pc.offset < pos < pc.offset + pc.length:
                piece = pc
                break
        if piece is None:
            return None
        x = add(piece.start, scale(pos - piece.offset, piece.direction))
        w = rot90(piece.direction)
        p = piece.polygon
        if piece.on_edge is not None:
            poly = s.polygons[p]
            if cross(poly.edge(piece.on_edge), w) < 0:
                edge = (p, piece.on_edge)
                (q, _), gk = s.partner[edge]
                x = s.map_point(edge, x)
                w = scale(gk.sign, w)
                p = q
        dist = Fraction(0)
        for _ in range(self.max_steps):
            poly = s.polygons[p]
            t_edge, kind, idx = first_hit(poly, x, w)
            best = None
            for start, end, d, off, did in self.registry[p]:
                t = dot(sub(start, x), w)
                if t <= 0 or t > t_edge:
                    continue
                lo, hi = sorted((start[0], end[0])) if w[0] == 0 else sorted((start[1], end[1]))
                coord = x[0] if w[0] == 0 else x[1]
                if coord < lo or coord > hi:
                    continue
                bad = coord == lo or coord == hi
                if best is None or t < best[0]:
                    best = (t, bad, start, d, off, did)
            if best is not None:
                t, bad, start, d, off, did = best
                if bad:
                    return None
                hit = add(x, scale(t, w))
                at = off + dot(sub(hit, start), d)
                if rot90(d) == scale(-1, w):
                    return did, at, dist + t
                r = self.rev[did]
                return r, self.darts[did].length - at, dist + t
            if kind == "vertex":
                return None
            edge = (p, idx)
            hit = add(x, scale(t_edge, w))
            (q, _), gk = s.partner[edge]
            x = s.map_point(edge, hit)
            w = scale(gk.sign, w)
            p = q
            dist += t_edge
        raise NotJenkinsStrebel("a vertical ray failed to cross its cylinder")

    def across_face(self, first_dart: int):
        tries = 0
        length = self.darts[first_dart].length
        for frac in _offsets():
            res = self.shoot(first_dart, frac * length)
            if res is not None:
                return frac * length, res
            tries += 1
            if tries > 500:
                raise NotJenkinsStrebel("could not find a generic vertical ray")


def _min_rotation(word: list) -> tuple:
    n = len(word)
    best, at = None, 0
    for k in range(n):
        rot = tuple(word[k:] + word[:k])
        if best is None or rot < best:
            best, at = rot, k
    return best, at


def _label_key(label) -> str:
    return "" if label is None else str(label)


def _face_word(data: JSData, f: int, labeled: bool) -> list:
    out = []
    for e in data.faces[f]:
        v = data.vertex[e]
        item = (data.length[e], data.vertex_order[v], data.vertex_marked[v])
        if labeled:
            item += (_label_key(data.vertex_label[v]),)
        out.append(item)
    return out


def _canonical_cylinders(data: JSData) -> list:
    labeled = any(lbl is not None for lbl in data.vertex_label)
    cyls = []
    for j, (fb, ft, h, a) in enumerate(data.cylinders):
        c = data.face_length(fb)
        wb, kb = _min_rotation(_face_word(data, fb, labeled))
        wt, kt = _min_rotation(_face_word(data, ft, labeled))
        if wt < wb:
            fb, ft, wb, wt, kb, kt = ft, fb, wt, wb, kt, kb
        # twist convention: offset between the first darts of the two minimal
        # boundary words, reduced mod c
        xb = data.pos[data.faces[fb][kb]]
        yt = data.pos[data.faces[ft][kt]]
        twist = (a - xb - yt) % c
        cyls.append(((c, (wb, wt), h, j), Cylinder(j, c, h, twist, (fb, ft), (wb, wt), j)))
    cyls.sort(key=lambda r: r[0])
    return [cyl for _, cyl in cyls]


def cylinder_decomposition(
    s: HalfTranslationSurface,
    d: Direction = Direction.horizontal(),
    max_crossings: int = DEFAULT_MAX_CROSSINGS,
):
    """Decompose ``s`` into cylinders in direction ``d``.

    Returns a :class:`CylinderDecomposition`, or an :class:`UndeterminedDecomposition`
    when some separatrix exceeds ``max_crossings``. Lengths are those of the horizontal
    frame (for a slope p/q they are scaled by sqrt(p^2 + q^2); moduli and weights are not).
    """
    frame = horizontal_frame(s, d)
    stops = default_stops(frame)
    virtual = not any(frame.is_stop(c) for c in range(len(frame.classes)))
    tracer = Tracer(frame, stops)
    darts, und = tracer.trace_all(max_crossings)
    if und:
        return UndeterminedDecomposition(tuple(und))
    dart_of_prong = {dt.prong.id: dt.id for dt in darts}
    rev = [dart_of_prong[dt.end_prong.id] for dt in darts]
    nxt = []
    for dt in darts:
        ring = tracer.prongs[dt.end_prong.vclass]
        k = next(i for i, pr in enumerate(ring) if pr.id == dt.end_prong.id)
        nxt.append(dart_of_prong[ring[k - 1].id])
    faces, seen = [], set()
    for e in range(len(darts)):
        if e in seen:
            continue
        cyc = []
        while e not in seen:
            seen.add(e)
            cyc.append(e)
            e = nxt[e]
        faces.append(cyc)
    face_of = {e: f for f, cyc in enumerate(faces) for e in cyc}
    pos = {}
    for cyc in faces:
        x = Fraction(0)
        for e in cyc:
            pos[e] = x
            x += darts[e].length
    face_len = [sum((darts[e].length for e in cyc), Fraction(0)) for cyc in faces]

    shooter = _HeightShooter(frame, darts, rev, max_steps=max(1000, max_crossings))
    partner_face = {}
    cylinders = []
    for f, cyc in enumerate(faces):
        x, (g_dart, y_off, h) = shooter.across_face(cyc[0])
        g = face_of[g_dart]
        a = (x + pos[g_dart] + y_off) % face_len[f]
        if g == f or face_len[g] != face_len[f]:
            raise NotJenkinsStrebel("inconsistent cylinder boundaries")
        if f in partner_face:
            j = partner_face[f]
            fb, ft, hh, aa = cylinders[j]
            if ft != f or fb != g or hh != h or aa != a:
                raise NotJenkinsStrebel("vertical rays disagree across a cylinder")
            continue
        if g in partner_face:
            raise NotJenkinsStrebel("a boundary circle bounds two cylinders")
        partner_face[f] = partner_face[g] = len(cylinders)
        cylinders.append((f, g, h, a))
    if sum((face_len[f] * h for f, _, h, _ in cylinders), Fraction(0)) != area(frame):
        raise NotJenkinsStrebel("cylinders do not fill the surface")

    nv = len(frame.classes)
    data = JSData(
        length=[dt.length for dt in darts],
        vertex=[dt.prong.vclass for dt in darts],
        rev=rev,
        faces=faces,
        cylinders=cylinders,
        vertex_order=[frame.class_order(v) for v in range(nv)],
        vertex_marked=list(frame.class_marked),
        vertex_label=[frame.class_label(v) if frame.is_stop(v) else None for v in range(nv)],
    )
    canon = _canonical_cylinders(data)
    data = JSData(
        data.length,
        data.vertex,
        data.rev,
        data.faces,
        [data.cylinders[c.index] for c in canon],
        data.vertex_order,
        data.vertex_marked,
        data.vertex_label,
    )
    canon = [
        Cylinder(i, c.circumference, c.height, c.twist, c.faces, c.boundary_words, i) for i, c in enumerate(canon)
    ]
    graph = _critical_graph(frame, tracer, data, stops)
    return CylinderDecomposition(s, d, frame, data, canon, graph, darts, virtual)


def _critical_graph(frame, tracer, data: JSData, stops) -> CriticalGraph:
    verts = tuple((v, frame.class_order(v), bool(frame.class_marked[v])) for v in sorted(stops))
    edges = tuple(
        (e, data.rev[e], data.vertex[e], data.vertex[data.rev[e]], data.length[e])
        for e in range(len(data.length))
        if e < data.rev[e]
    )
    start_of = {}
    for e, v in enumerate(data.vertex):
        start_of.setdefault(v, []).append(e)
    # darts were created in prong order, so per-vertex lists are already counterclockwise
    rotation = {v: tuple(start_of.get(v, ())) for v in sorted(stops)}
    parent = {v: v for v in stops}

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    for _, _, a, b, _ in edges:
        parent[find(a)] = find(b)
    comps = {}
    for v in sorted(stops):
        comps.setdefault(find(v), []).append(v)
    return CriticalGraph(verts, edges, rotation, tuple(tuple(c) for c in comps.values()))


def require_js(s: HalfTranslationSurface, d: Direction = Direction.horizontal(), max_crossings=DEFAULT_MAX_CROSSINGS):
    dec = cylinder_decomposition(s, d, max_crossings)
    if isinstance(dec, UndeterminedDecomposition):
        raise NotJenkinsStrebel(f"{len(dec.separatrices)} separatrices undetermined in direction {d}")
    return dec


def area_weights(dec: CylinderDecomposition) -> list:
    total = dec.total_area
    return [c.area / total for c in dec.cylinders]


# -- normal forms -----------------------------------------------------------


@dataclass(frozen=True)
class JSNormalForm:
    code: tuple
    cylinders: tuple  # (circumference, height, twist), canonical order
    labeled: bool

    def __eq__(self, other):
        return isinstance(other, JSNormalForm) and self.code == other.code

    def __hash__(self):
        return hash(self.code)


def normal_form_of_data(data: JSData, labeled: bool = False) -> tuple:
    n = len(data.length)
    across = [data.across(e) for e in range(n)]
    heights = [data.cylinders[data.cyl_of_face[data.face_of[e]]][2] for e in range(n)]

    def encode(d0):
        lab = {d0: 0}
        order = [d0]
        out = []
        k = 0
        while k < len(order):
            e = order[k]
            k += 1
            nbrs = (data.rev[e], data.next[e], across[e][0])
            for x in nbrs:
                if x not in lab:
                    lab[x] = len(order)
                    order.append(x)
            v = data.vertex[e]
            item = (data.length[e], data.vertex_order[v], bool(data.vertex_marked[v]))
            if labeled:
                item += (_label_key(data.vertex_label[v]),)
            item += (lab[nbrs[0]], lab[nbrs[1]], heights[e], lab[nbrs[2]], across[e][1])
            out.append(item)
        return tuple(out)

    return min(encode(d0) for d0 in range(n))


def js_normal_form(
    s: HalfTranslationSurface,
    d: Direction = Direction.horizontal(),
    labeled: bool | None = None,
    max_crossings: int = DEFAULT_MAX_CROSSINGS,
) -> JSNormalForm:
    """Presentation-independent form; equal iff the JS surfaces are isomorphic.

    With ``labeled`` (default: whenever ``s`` carries labels) isomorphisms must also
    respect point labels.
    """
    dec = s if isinstance(s, CylinderDecomposition) else require_js(s, d, max_crossings)
    if labeled is None:
        labeled = any(lbl is not None for lbl in dec.data.vertex_label)
    code = normal_form_of_data(dec.data, labeled)
    cyls = tuple((c.circumference, c.height, c.twist) for c in dec.cylinders)
    return JSNormalForm(code, cyls, labeled)


# -- rebuilding from cylinders -------------------------------------------------


def _as_shear(lam):
    if lam is None:
        return Fraction(0), Fraction(1)
    pt = HalfPlanePoint.of(lam)
    return pt.rationals()


def surface_from_cylinders(data: JSData, shears=None) -> HalfTranslationSurface:
    """Glue one polygon per cylinder; cylinder j is sheared by x + iy -> x + lam_j y."""
    n = len(data.length)
    own = [set() for _ in range(n)]
    for fb, ft, h, a in data.cylinders:
        c = data.face_length(fb)
        for g in data.faces[ft]:
            p = (a - data.pos[g]) % c
            if 0 < p < data.length[g]:
                own[g].add(p)
    splits = []
    for e in range(n):
        L = data.length[e]
        pts = {Fraction(0), L} | own[e] | {L - p for p in own[data.rev[e]]}
        splits.append(sorted(pts))

    polygons = []
    edge_of = {}
    sides = []
    start_corner = {}
    for j, (fb, ft, h, a) in enumerate(data.cylinders):
        mu, nu = _as_shear(shears[j] if shears is not None else None)
        c = data.face_length(fb)
        verts, meta = [], []
        for e in data.faces[fb]:
            sp = splits[e]
            for k in range(len(sp) - 1):
                if sp[k] == 0:
                    start_corner[e] = (j, len(verts))
                edge_of[(e, sp[k])] = (j, len(verts), sp[k + 1])
                verts.append((data.pos[e] + sp[k], Fraction(0)))
        right = len(verts)
        verts.append((c, Fraction(0)))
        top = []
        for g in data.faces[ft]:
            sp = splits[g]
            for k in range(len(sp) - 1):
                xs = (a - data.pos[g] - sp[k]) % c
                top.append((xs if xs != 0 else c, g, sp[k], sp[k + 1]))
        top.sort(key=lambda r: -r[0])
        cursor = c
        for xs, g, p0, p1 in top:
            if xs != cursor:
                raise ValueError("top boundary does not tile the circumference")
            cursor = xs - (p1 - p0)
            if p0 == 0:
                start_corner[g] = (j, len(verts))
            edge_of[(g, p0)] = (j, len(verts), p1)
            verts.append((xs, h))
        left = len(verts)
        verts.append((Fraction(0), h))
        polygons.append([(x + mu * y, nu * y) for x, y in verts])
        sides.append(((j, right), (j, left)))

    def vector(poly, i):
        p = polygons[poly]
        a, b = p[i], p[(i + 1) % len(p)]
        return sub(b, a)

    gluings = list(sides)
    kinds = ["T"] * len(sides)
    done = set()
    for (e, p0), (j, i, p1) in edge_of.items():
        if (j, i) in done:
            continue
        L = data.length[e]
        j2, i2, _ = edge_of[(data.rev[e], L - p1)]
        done.add((j, i))
        done.add((j2, i2))
        va, vb = vector(j, i), vector(j2, i2)
        gluings.append(((j, i), (j2, i2)))
        kinds.append("T" if vb == scale(-1, va) else "R")
    marks = []
    labels = {}
    for e in range(n):
        v = data.vertex[e]
        if data.vertex_marked[v] and e in start_corner:
            marks.append(start_corner[e])
        if data.vertex_label[v] is not None:
            labels[start_corner[e]] = data.vertex_label[v]
    return build_surface(
        polygons,
        [(a, b, k) for (a, b), k in zip(gluings, kinds)],
        marks,
        labels=labels or None,
    )


def _lambda_list(lam, k: int) -> list:
    lam = list(lam)
    if len(lam) != k:
        raise ValueError(f"expected {k} coordinates, got {len(lam)}")
    return [HalfPlanePoint.of(z) for z in lam]


def shear_cylinders(s: HalfTranslationSurface, lam) -> HalfTranslationSurface:
    """Apply x + iy -> x + lam_j y to the j-th horizontal cylinder (canonical order)."""
    dec = s if isinstance(s, CylinderDecomposition) else require_js(s)
    pts = _lambda_list(lam, dec.k)
    return surface_from_cylinders(dec.data, pts)


def verify_twist_identity(s: HalfTranslationSurface, j: int, lam, twist=Fraction(1)) -> bool:
    """Does adding ``twist / m_j`` to lam_j leave the (point-labelled) surface unchanged?

    ``twist = 1`` is a full Dehn twist; points are labelled by vertex class when ``s``
    carries no labels, so symmetries that permute marked points do not count.
    """
    if s.labels is None:
        s = s.with_labels(s.default_labels())
    dec = require_js(s)
    pts = _lambda_list(lam, dec.k)
    cyl = dec.cylinders[j]
    shift = rational(twist) / cyl.modulus
    bumped = list(pts)
    re, im = pts[j].rationals()
    bumped[j] = HalfPlanePoint(re + shift, im)
    a = js_normal_form(surface_from_cylinders(dec.data, pts), labeled=True)
    b = js_normal_form(surface_from_cylinders(dec.data, bumped), labeled=True)
    return a == b


def compose_shears(lam, mu) -> list:
    """(lam o mu)_j = Im(mu_j) lam_j + Re(mu_j): shearing by mu, then by lam."""
    out = []
    for l, m in zip(lam, mu):
        lr, li = HalfPlanePoint.of(l).rationals()
        mr, mi = HalfPlanePoint.of(m).rationals()
        out.append(HalfPlanePoint(mi * lr + mr, mi * li))
    return out


def kobayashi_nonexpansion_sample(s: HalfTranslationSurface, lam1, lam2, tol: float = 1e-12) -> tuple:
    """(sup_j d_H(lam1_j, lam2_j), modulus-ratio proxy for the Teichmüller side).

    The proxy max_j |log(m_j(lam1) / m_j(lam2))| / 2 uses only cylinder moduli; it is a
    sampled stand-in, not the Teichmüller distance.
    """
    dec = s if isinstance(s, CylinderDecomposition) else require_js(s)
    p1 = _lambda_list(lam1, dec.k)
    p2 = _lambda_list(lam2, dec.k)
    rhs = max(poincare_distance(a, b) for a, b in zip(p1, p2))
    proxy = max(0.5 * abs(math.log(float(a.im) / float(b.im))) for a, b in zip(p1, p2))
    assert proxy <= rhs + tol, (proxy, rhs)
    return rhs, proxy
