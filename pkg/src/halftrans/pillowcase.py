"""Quadratic differentials on the five-punctured sphere.

L-shaped pillowcases, the one/two-cylinder classification of horizontally
Jenkins-Strebel differentials in the stratum of five simple poles and a simple zero,
normalization of two-cylinder differentials to an L by shears, the collapsed path
and branched double covers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .affine import Mat2, apply_gl2
from .cylinders import (
    CylinderDecomposition,
    UndeterminedDecomposition,
    cylinder_decomposition,
    require_js,
    surface_from_cylinders,
)
from .errors import (
    InconsistentMonodromy,
    NonPositiveParameter,
    NotCase1,
    NotCase2,
    OutOfRange,
    WrongStratum,
)
from .surface import (
    HalfTranslationSurface,
    build_surface,
    neg,
    rational,
    stratum,
    sub,
)
from .trace import Direction

S05_ORDERS = (-1, -1, -1, -1, -1, 1)


@dataclass(frozen=True)
class LPillowParams:
    """Heights h1 (cylinder of length q) and h2 (cylinder of length 1), and q."""

    h1: Fraction
    h2: Fraction
    q: Fraction

    def __post_init__(self):
        for name in ("h1", "h2", "q"):
            v = rational(getattr(self, name))
            object.__setattr__(self, name, v)
        if self.h2 <= 0 or self.q <= 0 or self.h1 < 0:
            raise NonPositiveParameter(f"parameters must be positive: {self}")

    @property
    def weights(self) -> tuple:
        """Area fractions of the two cylinders (length-q cylinder first)."""
        return (self.q / (1 + self.q), 1 / (1 + self.q))

    @property
    def circumferences(self) -> tuple:
        return (2 * self.q, Fraction(2))

    @property
    def area(self) -> Fraction:
        return 2 * (self.q * self.h1 + self.h2)


def _mirror_double(verts, marked_vertices=()):
    """Double a polygon along its boundary; the copy is the mirror image in the x-axis."""
    verts = [(rational(x), rational(y)) for x, y in verts]
    n = len(verts)
    mirror = [(verts[n - 1 - k][0], -verts[n - 1 - k][1]) for k in range(n)]
    gluings = []
    for i in range(n):
        j = (n - 2 - i) % n
        ea = sub(verts[(i + 1) % n], verts[i])
        eb = sub(mirror[(j + 1) % n], mirror[j])
        gluings.append(((0, i), (1, j), "T" if eb == neg(ea) else "R"))
    return build_surface([verts, mirror], gluings, [(0, i) for i in marked_vertices])


def l_hexagon(p: LPillowParams) -> list:
    """Vertices of the half-pillow. For q = 1 the reflex corner straightens out."""
    h1, h2, q = p.h1, p.h2, p.q
    if q < 1:
        return [(0, 0), (1, 0), (1, h2), (q, h2), (q, h2 + h1), (0, h2 + h1)]
    if q > 1:
        return [(0, 0), (q, 0), (q, h1), (1, h1), (1, h1 + h2), (0, h1 + h2)]
    return [(0, 0), (1, 0), (1, h2), (1, h2 + h1), (0, h2 + h1)]


def make_l_pillowcase(h1, h2=None, q=None) -> HalfTranslationSurface:
    """The double of the right-angled L-hexagon: cylinders (h1, 2q) and (h2, 2).

    At q = 1 the zero merges with a pole; the result is a rectangle pillowcase with a
    marked regular point where the reflex corner was.
    """
    p = h1 if isinstance(h1, LPillowParams) else LPillowParams(h1, h2, q)
    if p.h1 <= 0:
        raise NonPositiveParameter("h1 must be positive; use collapse_top for h1 = 0")
    verts = l_hexagon(p)
    return _mirror_double(verts, marked_vertices=(2,) if p.q == 1 else ())


# -- classification ---------------------------------------------------------------


@dataclass(frozen=True)
class S05Case:
    tag: str  # "Case1" or "Case2"
    witness: object  # critical graph
    decomposition: CylinderDecomposition

    @property
    def num_cylinders(self) -> int:
        return self.decomposition.k


def _zero_vertex(dec: CylinderDecomposition) -> int:
    d = dec.data
    return next(v for v, o in enumerate(d.vertex_order) if o == 1 and v in set(d.vertex))


def classify_s05(s: HalfTranslationSurface) -> S05Case:
    st = stratum(s)
    if st.orders != S05_ORDERS or st.genus != 0:
        raise WrongStratum(f"expected five simple poles and a simple zero, got {st}")
    dec = require_js(s)
    d = dec.data
    z = _zero_vertex(dec)
    out = [e for e in range(len(d.length)) if d.vertex[e] == z]
    ends = [d.vertex[d.rev[e]] for e in out]
    if any(v == z for v in ends):
        tag = "Case2"
    elif all(d.vertex_order[v] == -1 for v in ends):
        tag = "Case1"
    else:
        raise AssertionError("zero prongs neither all reach poles nor close up")
    expected = 1 if tag == "Case1" else 2
    if dec.k != expected:
        raise AssertionError(f"{tag} with {dec.k} cylinders")
    return S05Case(tag, dec.critical_graph, dec)


# -- normalization to an L ------------------------------------------------------------


@dataclass(frozen=True)
class ToLResult:
    mu: tuple  # real shears for (cylinder of the loop, cylinder of the spike)
    params: LPillowParams
    scale: Fraction  # the L is the sheared surface scaled by this factor
    lam: tuple  # shear parameters in decomposition order, as (re, im) pairs
    indices: tuple  # decomposition indices of (loop cylinder, spike cylinder)


def shear_to_L(s: HalfTranslationSurface) -> ToLResult:
    """Real shears taking a two-cylinder differential to an L-shaped pillowcase.

    Shears are determined up to half twists: the Γ-faces have two poles half a
    circumference apart, and both choices give the same unlabelled surface.
    """
    case = classify_s05(s) if not isinstance(s, S05Case) else s
    if case.tag != "Case2":
        raise NotCase2(f"classified as {case.tag}")
    dec = case.decomposition
    d = dec.data
    z = _zero_vertex(dec)
    loop_face = next(
        f for f, darts in enumerate(d.faces) if len(darts) == 1 and d.vertex[darts[0]] == z and d.vertex[d.rev[darts[0]]] == z
    )
    c1_idx = d.cyl_of_face[loop_face]
    c2_idx = 1 - c1_idx
    fb1, ft1, h1, a1 = d.cylinders[c1_idx]
    gamma1 = ft1 if fb1 == loop_face else fb1
    c1 = d.face_length(loop_face)
    x_zero = d.pos[d.faces[loop_face][0]]
    mu1 = _align(d, gamma1, x_zero, a1, h1, c1)

    fb2, ft2, h2, a2 = d.cylinders[c2_idx]
    zface = next(f for f in (fb2, ft2) if any(d.vertex[e] == z for e in d.faces[f]))
    gamma2 = ft2 if fb2 == zface else fb2
    c2 = d.face_length(zface)
    spike_back = next(e for e in d.faces[zface] if d.vertex_order[d.vertex[e]] == -1)
    mu2 = _align(d, gamma2, d.pos[spike_back], a2, h2, c2)

    lam = [None, None]
    lam[c1_idx] = (mu1, Fraction(1))
    lam[c2_idx] = (mu2, Fraction(1))
    sigma = 2 / c2
    params = LPillowParams(sigma * h1, sigma * h2, c1 / c2)
    return ToLResult((mu1, mu2), params, sigma, tuple(lam), (c1_idx, c2_idx))


def _align(d, pole_face, x, a, h, c) -> Fraction:
    """Least shear putting position ``x`` straight across from a pole of ``pole_face``."""
    best = None
    period = c / h
    for e in d.faces[pole_face]:
        mu = ((d.pos[e] + x - a) / h) % period
        best = mu if best is None else min(best, mu)
    return best


def apply_to_L(s: HalfTranslationSurface, res: ToLResult) -> HalfTranslationSurface:
    """The sheared, rescaled surface that should coincide with the L of ``res.params``."""
    dec = require_js(s)
    sheared = surface_from_cylinders(dec.data, list(res.lam))
    return apply_gl2(sheared, Mat2(res.scale, 0, 0, res.scale))


# -- two-cylinder directions for one-cylinder differentials ---------------------------


@dataclass(frozen=True)
class NotFound:
    searched: int


def farey_directions(bound: int):
    """Non-horizontal directions p/q with max(|p|, q) <= bound, simplest first."""
    yield Direction.vertical()
    for n in range(1, bound + 1):
        found = []
        for q in range(1, n + 1):
            for p in range(1, n + 1):
                if max(p, q) != n:
                    continue
                if gcd(p, q) != 1:
                    continue
                found.append((p + q, p, q))
        for _, p, q in sorted(found):
            yield Direction(p, q)
            yield Direction(-p, q)


def find_two_cylinder_direction(s: HalfTranslationSurface, search_bound: int = 6, max_crossings: int = 5000):
    """First direction, simplest slopes first, whose decomposition has >= 2 cylinders."""
    case = classify_s05(s)
    if case.tag != "Case1":
        raise NotCase1(f"classified as {case.tag}")
    n = 0
    for d in farey_directions(search_bound):
        n += 1
        dec = cylinder_decomposition(s, d, max_crossings)
        if isinstance(dec, UndeterminedDecomposition):
            continue
        if dec.k >= 2:
            return d
    return NotFound(n)


# -- collapsed pillowcase -------------------------------------------------------------


@dataclass(frozen=True)
class CollapsedPillow:
    h2: Fraction
    slit_position: Fraction
    q: Fraction
    surface: HalfTranslationSurface


def collapsed_pillow(h2, slit) -> HalfTranslationSurface:
    """Doubled 1 x h2 rectangle with a marked regular point at (slit, h2)."""
    h2, slit = rational(h2), rational(slit)
    if h2 <= 0:
        raise NonPositiveParameter("h2 must be positive")
    if not 0 < slit < 1:
        raise OutOfRange(f"marked point {slit} must lie strictly inside the top side (0, 1)")
    verts = [(0, 0), (1, 0), (1, h2), (slit, h2), (0, h2)]
    return _mirror_double(verts, marked_vertices=(3,))


def collapse_top(p: LPillowParams, t) -> CollapsedPillow:
    """X(0, h2, q - t): the top cylinder collapsed, marked point moved left by t."""
    t = rational(t)
    if not 0 <= t < p.q:
        raise OutOfRange(f"t = {t} outside [0, q)")
    slit = p.q - t
    return CollapsedPillow(p.h2, slit, p.q, collapsed_pillow(p.h2, slit))


# -- branched double covers -----------------------------------------------------------


def _solve_gf2(rows, rhs, nvars):
    """Solve A x = b over GF(2); rows are sets of variable indices. None if inconsistent."""
    eqs = [(set(r), b) for r, b in zip(rows, rhs)]
    pivots = []
    for col in range(nvars):
        piv = next((k for k in range(len(pivots), len(eqs)) if col in eqs[k][0]), None)
        if piv is None:
            continue
        r = len(pivots)
        eqs[r], eqs[piv] = eqs[piv], eqs[r]
        pr, pb = eqs[r]
        for k in range(len(eqs)):
            if k != r and col in eqs[k][0]:
                eqs[k] = (eqs[k][0] ^ pr, eqs[k][1] ^ pb)
        pivots.append(col)
    for r, b in eqs[len(pivots):]:
        if not r and b:
            return None
    x = [0] * nvars
    for k, col in enumerate(pivots):
        x[col] = eqs[k][1]  # free variables are zero
    return x


def branched_double_cover(s: HalfTranslationSurface, branch) -> HalfTranslationSurface:
    """Double cover branched exactly over the vertex classes in ``branch``.

    Sheets are two copies of each polygon; gluing g switches sheets iff x_g = 1, where
    x solves: crossings around each vertex class sum to 1 exactly at branch points.
    """
    branch = {int(b) for b in branch}
    nclass = len(s.classes)
    for b in branch:
        if not 0 <= b < nclass:
            raise InconsistentMonodromy(f"no vertex class {b}")
        if not s.is_stop(b):
            raise InconsistentMonodromy(f"branch point {b} is neither singular nor marked")
    gindex = {}
    for k, g in enumerate(s.gluings):
        gindex[g.side_a] = k
        gindex[g.side_b] = k
    rows = []
    for cls in s.classes:
        row = set()
        for p, i in cls:
            n = len(s.polygons[p])
            row ^= {gindex[(p, (i - 1) % n)]}
        rows.append(row)
    x = _solve_gf2(rows, [1 if c in branch else 0 for c in range(nclass)], len(s.gluings))
    if x is None:
        raise InconsistentMonodromy(f"no double cover is branched exactly over {sorted(branch)}")
    n = len(s.polygons)
    polys = list(s.polygons) * 2
    gluings = []
    for k, g in enumerate(s.gluings):
        (p, e), (q, f) = g.side_a, g.side_b
        for sheet in (0, 1):
            other = sheet ^ x[k]
            gluings.append(((p + n * sheet, e), (q + n * other, f), g.kind))
    marks = []
    labels = {}
    for c, cls in enumerate(s.classes):
        if c in branch:
            continue
        p, i = cls[0]
        if s.class_marked[c]:
            marks += [(p, i), (p + n, i)]
        lbl = s.class_label(c)
        if lbl is not None:
            labels[(p, i)] = f"{lbl}.0"
            labels[(p + n, i)] = f"{lbl}.1"
    cover = build_surface(polys, gluings, marks, labels=labels or None)
    assert cover.euler_characteristic == 2 * s.euler_characteristic - len(branch)
    return cover


def pole_classes(s: HalfTranslationSurface) -> list:
    return [c for c in range(len(s.classes)) if s.cone_angles[c] == 1]
