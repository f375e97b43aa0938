"""Schwarz-Christoffel maps for the L-shaped hexagon and its degenerations.

A polygon with n vertices is the image of the upper half-plane under

    f(z) = w_0 + A * integral_{x_0}^{z} prod_j (zeta - x_j)^(alpha_j - 1) d zeta

with the last vertex at infinity. Prevertices are stored as gaps between consecutive
finite prevertices so that every difference x_j - x_k is a sum of positive numbers;
strongly crowded configurations (gaps of 1e-20 next to gaps of 1) stay accurate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_jacobi

from .errors import NoConvergence, NonPositiveSolution, OutOfRange, QuadratureFailure

NODES = 20
RIGHT = 0.5  # interior angle / pi of a right-angled corner
REFLEX = 1.5
STRAIGHT = 1.0

_rule_cache: dict = {}


def _jacobi(n: int, beta: float):
    """Nodes and weights on [-1, 1] for the weight (1 + x)^beta."""
    key = (n, round(beta, 15))
    if key not in _rule_cache:
        if beta == 0:
            x, w = np.polynomial.legendre.leggauss(n)
        else:
            x, w = roots_jacobi(n, 0.0, beta)
        _rule_cache[key] = (np.asarray(x, float), np.asarray(w, float))
    return _rule_cache[key]


def _jacobi_right(n: int, beta: float):
    """Nodes and weights on [-1, 1] for the weight (1 - x)^beta."""
    x, w = _jacobi(n, beta)
    return -x[::-1], w[::-1]


# -- geometry of prevertices ------------------------------------------------------------


@dataclass(frozen=True)
class SCPolygon:
    """Solved Schwarz-Christoffel data. ``alphas`` has one entry per vertex, the last
    vertex being the image of infinity; ``gaps`` separate the finite prevertices."""

    gaps: np.ndarray
    alphas: tuple
    scale: float  # |A|
    names: tuple = ()
    nodes: int = NODES
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def m(self) -> int:
        """Number of finite prevertices."""
        return len(self.alphas) - 1

    @property
    def betas(self) -> np.ndarray:
        return np.asarray(self.alphas[:-1], float) - 1.0

    @property
    def beta_inf(self) -> float:
        return self.alphas[-1] - 1.0

    @property
    def prevertices(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.gaps)])

    @property
    def exponents(self) -> tuple:
        return self.alphas

    def dist(self, j: int, k: int) -> float:
        """|x_j - x_k| as a sum of gaps."""
        a, b = sorted((j, k))
        return float(np.sum(self.gaps[a:b]))

    # -- real-axis integrals ---------------------------------------------------------
    def _half_side(self, anchor: int, toward: int, length: float, nb: float, n: int) -> float:
        """Integral of prod |zeta - x_j|^beta_j over s in [0, length] measured from
        x_anchor toward x_toward (``toward`` = +1 or -1), with x_anchor singular."""
        b = self.betas
        m = self.m
        behind, ahead = [], []
        for j in range(m):
            if j == anchor:
                continue
            d = self.dist(j, anchor)
            if (j - anchor) * toward > 0:
                ahead.append((d, b[j]))
            else:
                behind.append((d, b[j]))

        def rest(s):
            logv = np.zeros_like(s)
            for d, bj in behind:
                logv += bj * np.log(d + s)
            for d, bj in ahead:
                logv += bj * np.log(d - s)
            return np.exp(logv)

        delta = min(length, 0.5 * nb)
        x, w = _jacobi(n, b[anchor])
        s = 0.5 * delta * (1 + x)
        total = (0.5 * delta) ** (b[anchor] + 1) * np.dot(w, rest(s))
        xg, wg = _jacobi(n, 0.0)
        lo = delta
        while lo < length * (1 - 1e-15):
            hi = min(2 * lo, length)
            s = lo + 0.5 * (hi - lo) * (1 + xg)
            total += 0.5 * (hi - lo) * np.dot(wg, s ** b[anchor] * rest(s))
            lo = hi
        return float(total)

    def side_integral(self, k: int, n: int | None = None) -> float:
        """Integral over [x_k, x_{k+1}] of prod |zeta - x_j|^(alpha_j - 1)."""
        n = n or self.nodes
        g = float(self.gaps[k])
        half = 0.5 * g
        nb_left = float(self.gaps[k - 1]) if k > 0 else math.inf
        nb_right = float(self.gaps[k + 1]) if k + 1 < len(self.gaps) else math.inf
        val = self._half_side(k, +1, half, nb_left, n) + self._half_side(k + 1, -1, half, nb_right, n)
        if not math.isfinite(val) or val <= 0:
            raise QuadratureFailure(f"side integral {k} evaluated to {val}")
        return val

    def infinite_side_integral(self, which: str, n: int | None = None) -> float:
        """Integral from the last finite prevertex to +inf (``"right"``) or from -inf to
        the first (``"left"``); convergent because the vertex at infinity is a corner."""
        n = n or self.nodes
        m = self.m
        anchor = m - 1 if which == "right" else 0
        b = self.betas
        ds = [(self.dist(j, anchor), b[j]) for j in range(m) if j != anchor]
        nb = min((d for d, _ in ds), default=1.0)
        span = max((d for d, _ in ds), default=1.0)

        def rest(s):
            logv = np.zeros_like(s)
            for d, bj in ds:
                logv += bj * np.log(d + s)
            return np.exp(logv)

        delta = 0.5 * nb
        x, w = _jacobi(n, b[anchor])
        s = 0.5 * delta * (1 + x)
        total = (0.5 * delta) ** (b[anchor] + 1) * np.dot(w, rest(s))
        xg, wg = _jacobi(n, 0.0)
        lo = delta
        big = 4 * span
        while lo < big:
            hi = 2 * lo
            s = lo + 0.5 * (hi - lo) * (1 + xg)
            total += 0.5 * (hi - lo) * np.dot(wg, s ** b[anchor] * rest(s))
            lo = hi
        # tail: s = S / v on v in (0, 1]; the weight v^beta_inf comes out exactly
        S = lo
        xv, wv = _jacobi(n, self.beta_inf)
        v = 0.5 * (1 + xv)
        logv = b[anchor] * np.log(S) + np.zeros_like(v)
        for d, bj in ds:
            logv += bj * np.log(d * v + S)
        total += 0.5 ** (self.beta_inf + 1) * S * np.dot(wv, np.exp(logv))
        return float(total)

    # -- directions and vertices -----------------------------------------------------------
    def side_angle(self, k: int) -> float:
        """Direction of side k (from vertex k to k+1) relative to side 0; k = m - 1 is
        the side into the vertex at infinity and k = m the side out of it."""
        b = self.betas
        if k >= self.m:
            return math.pi * (float(np.sum(b)) - float(np.sum(b[1:]))) if k == self.m else 0.0
        return -math.pi * float(np.sum(b[1 : k + 1]))

    def side_vectors(self) -> np.ndarray:
        """All n side vectors of the image polygon (the two sides at infinity included)."""
        out = []
        for k in range(self.m - 1):
            out.append(self.scale * self.side_integral(k) * np.exp(1j * self.side_angle(k)))
        out.append(self.scale * self.infinite_side_integral("right") * np.exp(1j * self.side_angle(self.m - 1)))
        out.append(self.scale * self.infinite_side_integral("left") * np.exp(1j * self.side_angle(self.m)))
        return np.array(out)

    def refinement_error(self) -> float:
        """Largest relative change of the finite side integrals when the rule grows by
        half; the node count in use is adequate when this is below 1e-11."""
        worst = 0.0
        for k in range(self.m - 1):
            a = self.side_integral(k)
            b = self.side_integral(k, n=self.nodes + self.nodes // 2)
            worst = max(worst, abs(a - b) / abs(b))
        return worst

    def side_lengths(self) -> np.ndarray:
        """Lengths of the m - 1 finite sides."""
        return np.array([self.scale * self.side_integral(k) for k in range(self.m - 1)])

    def vertices(self) -> np.ndarray:
        sv = self.side_vectors()
        return np.concatenate([[0j], np.cumsum(sv[:-1])])

    def closure_residual(self) -> float:
        return float(abs(np.sum(self.side_vectors())))

    # -- interior evaluation ---------------------------------------------------------------
    def _integrand_segment(self, z0, z1, a, b, tau, one_minus_tau):
        """prod (zeta - x_j)^beta_j on zeta = z0 + (z1 - z0) tau, with the singular
        factors at prevertex endpoints ``a`` / ``b`` (or None) left out."""
        x = self.prevertices
        be = self.betas
        dz = z1 - z0
        logv = np.zeros_like(tau, dtype=complex)
        for j in range(self.m):
            if j == a or j == b:
                continue
            if a is not None:
                base = self.dist(j, a) * (1 if a > j else -1)
            else:
                base = z0 - x[j]
            zeta = base + dz * tau
            logv += be[j] * (np.log(np.abs(zeta)) + 1j * np.arctan2(np.abs(zeta.imag), zeta.real))
        if a is not None:
            logv += be[a] * (np.log(np.abs(dz)) + 1j * np.arctan2(abs(dz.imag), dz.real))
        if b is not None:
            back = z0 - z1
            # zeta - x_b = (z0 - z1)(1 - tau) with arg measured in the closed upper half-plane
            logv += be[b] * (np.log(np.abs(back)) + 1j * np.arctan2(abs(back.imag), back.real))
        return np.exp(logv)

    def _segment(self, z0, z1, a=None, b=None, n=None, depth_limit=200) -> complex:
        n = n or self.nodes
        x = self.prevertices
        dz = z1 - z0
        L = abs(dz)
        if L == 0:
            return 0j
        panels = []
        stack = [(0.0, 1.0, 0)]
        while stack:
            t0, t1, depth = stack.pop()
            if depth > depth_limit:
                raise QuadratureFailure("panel refinement did not terminate")
            touches_a = a is not None and t0 == 0.0
            touches_b = b is not None and t1 == 1.0
            if touches_a and touches_b:
                mid = 0.5 * (t0 + t1)
                stack += [(t0, mid, depth + 1), (mid, t1, depth + 1)]
                continue
            zm = z0 + dz * 0.5 * (t0 + t1)
            dists = [abs(zm - x[j]) for j in range(self.m) if not ((touches_a and j == a) or (touches_b and j == b))]
            near = min(dists) if dists else math.inf
            if (t1 - t0) * L <= near:
                panels.append((t0, t1, touches_a, touches_b))
            else:
                mid = 0.5 * (t0 + t1)
                stack += [(t0, mid, depth + 1), (mid, t1, depth + 1)]
        total = 0j
        be = self.betas
        for t0, t1, ta, tb in panels:
            h = t1 - t0
            if ta:
                xs, ws = _jacobi(n, be[a])
                tau = 0.5 * h * (1 + xs)
                f = self._integrand_segment(z0, z1, a, None, tau, 1 - tau)
                if b is not None:
                    f = f * self._bfactor(z0, z1, b, 1 - tau)
                total += (0.5 * h) ** (be[a] + 1) * np.dot(ws, f)
            elif tb:
                xs, ws = _jacobi_right(n, be[b])
                omt = 0.5 * h * (1 - xs)  # 1 - tau
                tau = 1 - omt
                f = self._integrand_segment(z0, z1, a, b, tau, omt)
                if a is not None:
                    f = f * self._afactor(z0, z1, a, tau)
                total += (0.5 * h) ** (be[b] + 1) * np.dot(ws, f)
            else:
                xs, ws = _jacobi(n, 0.0)
                tau = t0 + 0.5 * h * (1 + xs)
                f = self._integrand_segment(z0, z1, a, b, tau, 1 - tau)
                if a is not None:
                    f = f * self._afactor(z0, z1, a, tau)
                if b is not None:
                    f = f * self._bfactor(z0, z1, b, 1 - tau)
                total += 0.5 * h * np.dot(ws, f)
        return complex(total * dz)

    def _afactor(self, z0, z1, a, tau):
        return np.exp(self.betas[a] * np.log(tau))

    def _bfactor(self, z0, z1, b, omt):
        return np.exp(self.betas[b] * np.log(omt))

    def sc_map(self, z, start: int | None = None, via=None) -> complex:
        """Image of z in the closed upper half-plane.

        Integrates along a polyline from the finite prevertex ``start`` (default: the
        nearest one) through ``via`` to ``z``. A prevertex argument maps to its vertex.
        """
        z = complex(z)
        if z.imag < 0:
            raise ValueError("z must lie in the closed upper half-plane")
        x = self.prevertices
        verts = self.vertices()
        end = None
        for j in range(self.m):
            if z.imag == 0 and z.real == x[j]:
                end = j
        if start is None:
            cands = [j for j in range(self.m) if j != end]
            start = min(cands, key=lambda j: abs(z - x[j]))
        if start == end:
            return complex(verts[start])
        pts = [complex(x[start])]
        if via is not None:
            pts.append(complex(via))
        elif end is not None or z.imag == 0:
            mid = 0.5 * (x[start] + z.real)
            pts.append(complex(mid, max(abs(z.real - x[start]), 1e-300)))
        pts.append(z)
        total = 0j
        for k in range(len(pts) - 1):
            a = start if k == 0 else None
            b = end if k == len(pts) - 2 else None
            total += self._segment(pts[k], pts[k + 1], a, b)
        return complex(verts[start] + self._A() * total)

    def _A(self) -> complex:
        return self.scale * np.exp(-1j * math.pi * float(np.sum(self.betas[1:])))


# -- solving the parameter problem -----------------------------------------------------


def damped_newton(F, u0, tol=1e-12, max_iter=80, fd_step=1e-6, what="system"):
    """Newton with central-difference Jacobian and backtracking on the residual norm."""
    u = np.asarray(u0, float)

    def safe(v):
        try:
            r = np.asarray(F(v), float)
        except (QuadratureFailure, FloatingPointError, OverflowError, ValueError, ZeroDivisionError):
            return None
        return r if np.all(np.isfinite(r)) else None

    r = safe(u)
    if r is None:
        raise NoConvergence(f"{what}: residual undefined at the initial guess", {"u0": u.tolist()})
    history = [float(np.linalg.norm(r))]
    for it in range(max_iter):
        norm = np.linalg.norm(r)
        if norm < tol:
            return u, {"iterations": it, "residual": float(norm), "history": history}
        J = np.empty((len(r), len(u)))
        for i in range(len(u)):
            e = np.zeros_like(u)
            e[i] = fd_step
            rp, rm = safe(u + e), safe(u - e)
            if rp is None or rm is None:
                raise NoConvergence(f"{what}: Jacobian undefined", {"u": u.tolist(), "history": history})
            J[:, i] = (rp - rm) / (2 * fd_step)
        try:
            du = np.linalg.lstsq(J, -r, rcond=None)[0]
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"{what}: singular Jacobian", {"u": u.tolist()}) from exc
        lam = 1.0
        while lam > 1e-6:
            un = u + lam * du
            rn = safe(un)
            if rn is not None and np.linalg.norm(rn) < (1 - 1e-4 * lam) * norm:
                break
            lam *= 0.5
        else:
            if norm < 100 * tol:
                return u, {"iterations": it, "residual": float(norm), "history": history}
            raise NoConvergence(f"{what}: line search failed", {"u": u.tolist(), "residual": float(norm), "history": history})
        u, r = un, rn
        history.append(float(np.linalg.norm(r)))
    norm = float(np.linalg.norm(r))
    if norm < 100 * tol:
        return u, {"iterations": max_iter, "residual": norm, "history": history}
    raise NoConvergence(f"{what}: no convergence in {max_iter} iterations", {"u": u.tolist(), "residual": norm, "history": history})


def solve_polygon(alphas, sides, names=(), guess=None, tol=1e-12) -> SCPolygon:
    """Prevertices for a polygon with interior angles alphas*pi and finite side lengths
    ``sides`` (the m - 1 sides between finite prevertices; the vertex at infinity last).

    Unknowns are log-gaps 1..m-2 with the first gap fixed to 1. Starts from gaps equal
    to side ratios; on failure, continues in the target log-ratios from that guess.
    """
    alphas = tuple(float(a) for a in alphas)
    sides = np.asarray(sides, float)
    m = len(alphas) - 1
    if len(sides) != m - 1 or np.any(sides <= 0):
        raise ValueError("need m - 1 positive side lengths")
    if abs(sum(a - 1 for a in alphas) + 2) > 1e-12:
        raise ValueError("interior angles do not close up")
    target = np.log(sides[1:] / sides[0])

    def ratios(u):
        gaps = np.concatenate([[1.0], np.exp(u)])
        poly = SCPolygon(gaps, alphas, 1.0, tuple(names))
        ints = np.array([poly.side_integral(k) for k in range(m - 1)])
        return np.log(ints[1:] / ints[0])

    u0 = np.log(sides[1:] / sides[0]) if guess is None else np.asarray(guess, float)
    if len(u0) == 0:
        u, info = u0, {"iterations": 0, "residual": 0.0}
    else:
        try:
            u, info = damped_newton(lambda v: ratios(v) - target, u0, tol=tol, what="polygon")
        except NoConvergence:
            u = u0
            start = ratios(u0)
            steps = 16
            for i in range(1, steps + 1):
                goal = start + (target - start) * i / steps
                u, info = damped_newton(lambda v, g=goal: ratios(v) - g, u, tol=tol if i == steps else 1e-9, what="continuation")
    gaps = np.concatenate([[1.0], np.exp(u)])
    poly = SCPolygon(gaps, alphas, 1.0, tuple(names))
    scale = sides[0] / poly.side_integral(0)
    return SCPolygon(gaps, alphas, float(scale), tuple(names), meta={"solver": info, "target_sides": sides.tolist()})


SCHexagon = SCPolygon


def hexagon_sides(h1: float, h2: float, q: float):
    """(alphas, finite sides, names) of the half-pillow with the top-left corner at infinity."""
    if min(h1, h2, q) <= 0:
        raise OutOfRange("parameters must be positive")
    names = ("P1", "P2", "P3", "Z", "P4", "P5")
    alphas = (RIGHT, RIGHT, RIGHT, REFLEX, RIGHT, RIGHT)
    if q < 1:
        return alphas, [1.0, h2, 1 - q, h1], names
    if q > 1:
        return alphas, [q, h1, q - 1, h2], names
    return (RIGHT, RIGHT, STRAIGHT, RIGHT, RIGHT), [1.0, h2, h1], ("P1", "P2", "M", "P4", "P5")


def solve_hexagon(h1, h2, q, guess=None) -> SCPolygon:
    """Prevertices of the L-hexagon (0,0),(1,0),(1,h2),(q,h2),(q,h1+h2),(0,h1+h2).

    For q = 1 (or h1 = 0) the reflex corner straightens and the problem becomes a
    rectangle with a marked boundary point.
    """
    h1, h2, q = float(h1), float(h2), float(q)
    if h1 == 0:
        return solve_slit_pillow(h2, q)
    alphas, sides, names = hexagon_sides(h1, h2, q)
    return solve_polygon(alphas, sides, names, guess=guess)


def solve_slit_pillow(h2, slit) -> SCPolygon:
    """Rectangle 1 x h2 with a marked point at (slit, h2) on its top side.

    Vertex order BL, BR, TR, M, TL; TL goes to infinity.
    """
    h2, slit = float(h2), float(slit)
    if h2 <= 0:
        raise OutOfRange("h2 must be positive")
    if not 0 < slit < 1:
        raise OutOfRange("the marked point must lie inside the top side")
    return solve_polygon((RIGHT, RIGHT, RIGHT, STRAIGHT, RIGHT), [1.0, h2, 1 - slit], ("BL", "BR", "TR", "M", "TL"))


# -- conformal invariants ---------------------------------------------------------------


@dataclass(frozen=True)
class SphereFiveInvariants:
    """Five points on the real line normalized so the 1st goes to 0, the 4th to 1 and
    the 5th to infinity; x4 < x5 are the images of the 2nd and 3rd points.

    ``gaps`` holds (x4, x5 - x4, 1 - x5) computed without cancellation.
    """

    x4: float
    x5: float
    gaps: tuple

    def as_log_gaps(self) -> np.ndarray:
        g = np.asarray(self.gaps)
        return np.log(g[:2] / g[2])


def invariants_from_gaps(g1, g2, g3) -> SphereFiveInvariants:
    """Points 0, g1, g1+g2, g1+g2+g3, infinity."""
    s = g1 + g2 + g3
    return SphereFiveInvariants(g1 / s, (g1 + g2) / s, (g1 / s, g2 / s, g3 / s))


def normalize_points(points, triple=(0, 3, 4)) -> np.ndarray:
    """Real Möbius image of five points (math.inf allowed) sending points[triple] to
    0, 1, infinity; returns the images of the other two in index order."""

    def cr(z, a, b, c):
        # (z - a)(b - c) / ((z - c)(b - a)), with infinities handled
        def diff(p, r):
            return p - r

        if math.isinf(z):
            return (b - c) / (b - a) if not any(map(math.isinf, (a, b, c))) else _cr_inf(z, a, b, c)
        if any(map(math.isinf, (a, b, c))):
            return _cr_inf(z, a, b, c)
        return diff(z, a) * diff(b, c) / (diff(z, c) * diff(b, a))

    a, b, c = (points[i] for i in triple)
    others = [i for i in range(5) if i not in triple]
    return np.array([cr(points[i], a, b, c) for i in others])


def _cr_inf(z, a, b, c):
    """Cross-ratio (z - a)(b - c)/((z - c)(b - a)) when exactly one entry is infinite."""
    if math.isinf(z):
        return (b - c) / (b - a)
    if math.isinf(a):
        return (b - c) / (z - c)
    if math.isinf(b):
        return (z - a) / (z - c)
    return (z - a) / (b - a)


def invariants_of_hexagon(h: SCPolygon) -> SphereFiveInvariants:
    """Normalized positions of the five pole prevertices (the marked points of the double).

    For the generic hexagon the reflex prevertex Z lies between P3 and P4 and is not a
    marked point; for the degenerate rectangle all five finite/infinite points count.
    """
    g = h.gaps
    if len(h.alphas) == 6:
        return invariants_from_gaps(g[0], g[1], g[2] + g[3])
    return invariants_from_gaps(g[0], g[1], g[2])


def invariants_of_slit_pillow(h2, slit) -> SphereFiveInvariants:
    return invariants_of_hexagon(solve_slit_pillow(h2, slit))


def symmetry_residual(inv_points, perm) -> float:
    """How far a relabelling ``perm`` of five real points is from a real Möbius symmetry."""
    base = normalize_points(inv_points)
    moved = normalize_points([inv_points[p] for p in perm])
    return float(np.max(np.abs(base - moved)))


def five_points(inv: SphereFiveInvariants) -> list:
    return [0.0, inv.x4, inv.x5, 1.0, math.inf]


# -- the boundary path ------------------------------------------------------------------


def _sigmoid_pair(v):
    """(1/(1+e^-v), 1/(1+e^v)) without cancellation."""
    if v >= 0:
        e = math.exp(-v)
        return 1 / (1 + e), e / (1 + e)
    e = math.exp(v)
    return e / (1 + e), 1 / (1 + e)


def _hexagon_from_pole_gaps(tau, v) -> SCPolygon:
    s3, s4 = _sigmoid_pair(v)
    gaps = np.array([tau[0], tau[1], tau[2] * s3, tau[2] * s4])
    alphas = (RIGHT, RIGHT, RIGHT, REFLEX, RIGHT, RIGHT)
    poly = SCPolygon(gaps, alphas, 1.0, ("P1", "P2", "P3", "Z", "P4", "P5"))
    return SCPolygon(gaps, alphas, 1.0 / poly.side_integral(0), poly.names)


def match_moduli(q, t, method: str = "reduced", guess=None, tol: float = 1e-13) -> tuple:
    """(h1, h2) with X(h1, h2, q) conformally equal to X(0, 1, q - t), for q <= 1.

    ``reduced``: the five pole prevertices are fixed by the target, so only the reflex
    prevertex moves (one equation |P3 Z| = 1 - q; none when q = 1).
    ``newton2d``: Newton on (log h1, log h2) through full hexagon solves.
    """
    q, t = float(q), float(t)
    if not 0 < t < q:
        raise OutOfRange("need 0 < t < q")
    if q > 1:
        raise OutOfRange("the collapsed path is described for q <= 1")
    target = invariants_of_slit_pillow(1.0, q - t)
    if method == "newton2d":
        return _match_newton(q, target, guess, tol)
    tau = np.asarray(target.gaps)
    if q == 1:
        poly = SCPolygon(tau, (RIGHT, RIGHT, STRAIGHT, RIGHT, RIGHT), 1.0)
        ints = [poly.side_integral(k) for k in range(3)]
        h2, h1 = ints[1] / ints[0], ints[2] / ints[0]
    else:
        goal = math.log(1 - q)

        def resid(v):
            poly = _hexagon_from_pole_gaps(tau, v)
            return math.log(poly.scale * poly.side_integral(2)) - goal

        v = _bracketed_root(resid, -40.0, 60.0, tol)
        poly = _hexagon_from_pole_gaps(tau, v)
        h2 = poly.scale * poly.side_integral(1)
        h1 = poly.scale * poly.side_integral(3)
    if not (h1 > 0 and h2 > 0):
        raise NonPositiveSolution(f"h1 = {h1}, h2 = {h2}")
    return float(h1), float(h2)


def _bracketed_root(f, lo, hi, tol, max_iter=200) -> float:
    """Root of an increasing function by bisection-safeguarded secant steps."""
    flo, fhi = f(lo), f(hi)
    if flo > 0 or fhi < 0:
        raise NoConvergence("root not bracketed", {"lo": lo, "hi": hi, "f(lo)": flo, "f(hi)": fhi})
    x, fx = lo, flo
    for _ in range(max_iter):
        x = lo - flo * (hi - lo) / (fhi - flo)
        if not lo < x < hi or (hi - lo) > 1:
            x = 0.5 * (lo + hi) if (hi - lo) > 1 else x
        if not lo < x < hi:
            x = 0.5 * (lo + hi)
        fx = f(x)
        if abs(fx) < tol:
            return x
        if fx < 0:
            lo, flo = x, fx
        else:
            hi, fhi = x, fx
        if hi - lo < 1e-15 * max(1.0, abs(x)):
            return x
    raise NoConvergence("bracketed root finding did not converge", {"x": x, "f": fx})


def _match_newton(q, target: SphereFiveInvariants, guess, tol):
    goal = target.as_log_gaps()
    u0 = np.log(guess) if guess is not None else np.array([math.log(1e-2), 0.0])

    def F(u):
        h = solve_hexagon(math.exp(u[0]), math.exp(u[1]), q)
        return invariants_of_hexagon(h).as_log_gaps() - goal

    u, _ = damped_newton(F, u0, tol=max(tol, 1e-11), what="match_moduli")
    h1, h2 = float(np.exp(u[0])), float(np.exp(u[1]))
    if not (h1 > 0 and h2 > 0):
        raise NonPositiveSolution(f"h1 = {h1}, h2 = {h2}")
    return h1, h2


def default_t_samples(tmin=1e-5, tmax=1e-2, per_decade=20) -> np.ndarray:
    decades = math.log10(tmax / tmin)
    n = int(round(decades * per_decade)) + 1
    return np.geomspace(tmin, tmax, n)


def boundary_path(q, ts) -> np.ndarray:
    """Rows (t, h1, h2, D) with D = a1 h1 + a2 h2 - a2, a1 = q/(1+q), a2 = 1/(1+q)."""
    q = float(q)
    a1, a2 = q / (1 + q), 1 / (1 + q)
    rows = []
    for t in ts:
        h1, h2 = match_moduli(q, float(t))
        rows.append((float(t), h1, h2, a1 * h1 + a2 * (h2 - 1)))
    return np.array(rows)


@dataclass(frozen=True)
class AsymptoticFit:
    c1: float
    c2: float
    residual: float  # relative RMS of the t/log(1/t), t^2/log(1/t) model
    poly_coeffs: tuple
    poly_residual: float  # relative RMS of the t, t^2, t^3 model
    t_range: tuple
    samples: int


def _fit(basis: np.ndarray, D: np.ndarray):
    """Least squares in relative error: minimize sum ((D - B c) / D)^2."""
    W = basis / D[:, None]
    coef, *_ = np.linalg.lstsq(W, np.ones_like(D), rcond=None)
    rel = (basis @ coef - D) / D
    return coef, float(np.sqrt(np.mean(rel**2)))


def fit_path(rows: np.ndarray) -> AsymptoticFit:
    t, D = rows[:, 0], rows[:, 3]
    L = np.log(1 / t)
    coef, res = _fit(np.stack([t / L, t**2 / L], axis=1), D)
    pcoef, pres = _fit(np.stack([t, t**2, t**3], axis=1), D)
    return AsymptoticFit(float(coef[0]), float(coef[1]), res, tuple(float(c) for c in pcoef), pres, (float(t.min()), float(t.max())), len(t))


def asymptotic_fit(q, t_samples=None) -> AsymptoticFit:
    ts = default_t_samples() if t_samples is None else np.asarray(t_samples, float)
    if ts.max() / ts.min() < 100 - 1e-9:
        raise ValueError("t samples must span at least two decades")
    if ts.max() >= float(q) / 10:
        raise ValueError("t samples must lie in (0, q/10)")
    return fit_path(boundary_path(q, ts))


# -- oracle for rectangles ---------------------------------------------------------------


def rectangle_ratio_oracle(x3: float) -> tuple:
    """Side ratio |[1, x3]| / |[0, 1]| of the rectangle with prevertices 0, 1, x3, inf,
    from scipy's elliptic integral and from adaptive quadrature of the defining integrals."""
    from scipy.integrate import quad
    from scipy.special import ellipk

    m = 1.0 / x3
    closed = float(ellipk(1 - m) / ellipk(m))
    # substitute t = sin^2 to remove the endpoint singularities
    k1 = quad(lambda th: 1 / math.sqrt(1 - m * math.sin(th) ** 2), 0, math.pi / 2, epsabs=0, epsrel=1e-12, limit=200)[0]
    k2 = quad(lambda th: 1 / math.sqrt(1 - (1 - m) * math.sin(th) ** 2), 0, math.pi / 2, epsabs=0, epsrel=1e-12, limit=200)[0]
    return closed, k2 / k1
