"""Holomorphic maps H^k -> H fixing the diagonal, and the translation flow on them.

Points of H^k are complex numpy arrays whose last axis has length k; evaluation is
vectorized over any leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainViolation


class DiagonalFixingMap:
    k: int

    def __call__(self, lam):
        return evaluate(self, lam)

    def _eval(self, lam: np.ndarray) -> np.ndarray:
        raise NotImplementedError


def _weights(w) -> np.ndarray:
    w = np.asarray([float(x) for x in w], dtype=float)
    if w.ndim != 1 or len(w) == 0 or np.any(w <= 0):
        raise ValueError("weights must be a nonempty list of positive numbers")
    if abs(w.sum() - 1) > 1e-12:
        raise ValueError(f"weights sum to {w.sum()}, not 1")
    return w


@dataclass(frozen=True, eq=False)
class Linear(DiagonalFixingMap):
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(_weights(self.weights)))

    @property
    def k(self):
        return len(self.weights)

    def _eval(self, lam):
        return lam @ np.asarray(self.weights)


@dataclass(frozen=True, eq=False)
class GeometricMean(DiagonalFixingMap):
    """prod lam_j^{a_j} with principal branches; maps H^k into H since sum a_j = 1."""

    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(_weights(self.weights)))

    @property
    def k(self):
        return len(self.weights)

    def _eval(self, lam):
        return np.exp(np.log(lam) @ np.asarray(self.weights))


@dataclass(frozen=True, eq=False)
class MobiusConjugate(DiagonalFixingMap):
    """M^-1 o inner o (M, ..., M) for a real matrix M = (a, b, c, d) with ad - bc > 0."""

    inner: DiagonalFixingMap
    mobius: tuple

    def __post_init__(self):
        a, b, c, d = (float(x) for x in self.mobius)
        if a * d - b * c <= 0:
            raise ValueError("Möbius matrix must have positive determinant")
        object.__setattr__(self, "mobius", (a, b, c, d))

    @property
    def k(self):
        return self.inner.k

    def _eval(self, lam):
        a, b, c, d = self.mobius
        z = self.inner._eval((a * lam + b) / (c * lam + d))
        return (d * z - b) / (-c * z + a)


@dataclass(frozen=True, eq=False)
class FlowShift(DiagonalFixingMap):
    inner: DiagonalFixingMap
    t: float

    @property
    def k(self):
        return self.inner.k

    def _eval(self, lam):
        return self.inner._eval(lam - self.t) + self.t


def evaluate(f: DiagonalFixingMap, lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=complex)
    if lam.shape[-1] != f.k:
        raise ValueError(f"expected points of H^{f.k}")
    if np.any(lam.imag <= 0):
        raise DomainViolation("argument outside the polyplane")
    out = f._eval(lam)
    if np.any(out.imag <= 0):
        raise DomainViolation("value outside the upper half-plane")
    return out


def flow(f: DiagonalFixingMap, t: float) -> DiagonalFixingMap:
    """f_t(lam) = f(lam - t) + t. Linear maps are fixed points; shifts compose by adding."""
    if t == 0 or isinstance(f, Linear):
        return f
    if isinstance(f, FlowShift):
        total = f.t + t
        return f.inner if total == 0 else FlowShift(f.inner, total)
    return FlowShift(f, t)


def linear_part(f: DiagonalFixingMap, h: float = 1e-5) -> np.ndarray:
    """Partial derivatives at (i, ..., i): central differences, one Richardson step."""
    base = np.full(f.k, 1j)
    out = np.empty(f.k)
    for j in range(f.k):
        e = np.zeros(f.k)
        e[j] = 1.0

        def central(step):
            pts = np.stack([base + step * e, base - step * e])
            v = evaluate(f, pts)
            return (v[0] - v[1]) / (2 * step)

        d = (4 * central(h / 2) - central(h)) / 3
        out[j] = d.real
    return out


@dataclass(frozen=True)
class CompactGrid:
    nodes: np.ndarray  # shape (n, k), complex
    weights: np.ndarray  # shape (n,)
    radius: float


def default_grid(k: int, radius: float = 4.0, per_axis: int = 5) -> CompactGrid:
    """Product grid in {|Re| <= R, 1/R <= Im <= R}^k with unit weights."""
    re = np.linspace(-radius, radius, per_axis)
    im = np.geomspace(1 / radius, radius, per_axis)
    factor = (re[:, None] + 1j * im[None, :]).ravel()
    mesh = np.meshgrid(*([factor] * k), indexing="ij")
    nodes = np.stack([m.ravel() for m in mesh], axis=-1)
    return CompactGrid(nodes, np.ones(len(nodes)), radius)


def poincare_distance_array(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Curvature -4 distance artanh|(z - w)/(z - conj w)|, elementwise."""
    r = np.abs((z - w) / (z - np.conj(w)))
    return np.arctanh(np.minimum(r, 1.0))


def grid_distance(f: DiagonalFixingMap, g: DiagonalFixingMap, grid: CompactGrid | None = None) -> float:
    grid = grid or default_grid(f.k)
    d = poincare_distance_array(evaluate(f, grid.nodes), evaluate(g, grid.nodes))
    return float(np.max(grid.weights * d))


def flow_distances(f: DiagonalFixingMap, ts, grid: CompactGrid | None = None, limit=None) -> np.ndarray:
    """grid_distance(flow(f, t), limit) for each t; ``limit`` defaults to the linear part."""
    grid = grid or default_grid(f.k)
    limit = limit or Linear(_normalized(linear_part(f)))
    target = evaluate(limit, grid.nodes)
    return np.array([
        float(np.max(grid.weights * poincare_distance_array(evaluate(flow(f, float(t)), grid.nodes), target)))
        for t in ts
    ])


def _normalized(a: np.ndarray) -> np.ndarray:
    a = np.clip(a, 1e-300, None)
    return a / a.sum()


def sample_times(r: float, t_step: float) -> np.ndarray:
    n = int(np.floor(2 * r / t_step + 1e-9))
    return -r + t_step * np.arange(n + 1)


def density_estimate(f, eps: float, r: float, t_step: float = 1.0, grid: CompactGrid | None = None) -> float:
    """Fraction of sampled t in [-r, r] with f_t within ``eps`` of its linear part."""
    if eps <= 0 or r <= 0 or t_step <= 0:
        raise ValueError("eps, r and t_step must be positive")
    ts = sample_times(r, t_step)
    return float(np.mean(flow_distances(f, ts, grid) < eps))


def schwarz_pick_check(f: DiagonalFixingMap, sample_count: int = 10_000, seed: int = 0) -> float:
    """max over random pairs of d(f(x), f(y)) - max_j d(x_j, y_j); should be <= 0."""
    rng = np.random.default_rng(seed)

    def sample():
        re = rng.uniform(-5, 5, size=(sample_count, f.k))
        im = np.exp(rng.uniform(np.log(0.05), np.log(20), size=(sample_count, f.k)))
        return re + 1j * im

    x, y = sample(), sample()
    lhs = poincare_distance_array(evaluate(f, x), evaluate(f, y))
    rhs = np.max(poincare_distance_array(x, y), axis=-1)
    return float(np.max(lhs - rhs))


def affine_composition(weights, mu) -> tuple:
    """(c, d) with Linear(a)(Im mu_j lam + Re mu_j) = c lam + d on the diagonal.

    c = sum a_j Im mu_j and d = sum a_j Re mu_j.
    """
    a = _weights(weights)
    mu = np.asarray(mu, dtype=complex)
    return float(a @ mu.imag), float(a @ mu.real)


def builtin_families(k: int = 2) -> dict:
    """Certified members of the space of diagonal-fixing maps used in experiments."""
    w = np.arange(1, k + 1, dtype=float)
    w /= w.sum()
    return {
        "linear": Linear(w),
        "geometric": GeometricMean(w),
        "mobius-linear": MobiusConjugate(Linear(w), (2.0, 1.0, -1.0, 1.0)),
        "mobius-geometric": MobiusConjugate(GeometricMean(w), (1.0, -0.5, 0.5, 2.0)),
        "flowed-geometric": flow(GeometricMean(w), 3.0),
    }
