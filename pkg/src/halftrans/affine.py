"""The GL2+ action on flat charts, Teichmüller disks and the hyperbolic plane."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

from .errors import NonPositiveDeterminant, NotUpperHalfPlane
from .surface import HalfTranslationSurface, linear_image, rational


def _num(x):
    """Keep exact numbers exact; floats become exact binary rationals."""
    if isinstance(x, (Fraction, int, str)) and not isinstance(x, bool):
        return rational(x)
    return Fraction(float(x))


@dataclass(frozen=True)
class Mat2:
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, _num(getattr(self, name)))
        if self.det <= 0:
            raise NonPositiveDeterminant(f"determinant {self.det} is not positive")

    @property
    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1, 0, 0, 1)

    @classmethod
    def parse(cls, text: str) -> "Mat2":
        parts = [p for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError("a matrix needs four entries a,b,c,d")
        return cls(*(rational(p) for p in parts))


@dataclass(frozen=True)
class HalfPlanePoint:
    re: object
    im: object

    def __post_init__(self):
        im = self.im
        if not (im > 0):
            raise NotUpperHalfPlane(f"imaginary part {im} is not positive")

    @classmethod
    def of(cls, z) -> "HalfPlanePoint":
        if isinstance(z, HalfPlanePoint):
            return z
        if isinstance(z, tuple):
            return cls(*z)
        if isinstance(z, Real):
            return cls(z, 0)
        z = complex(z)
        return cls(z.real, z.imag)

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (Fraction, int)) for v in (self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def rationals(self) -> tuple:
        return _num(self.re), _num(self.im)


def apply_gl2(s: HalfTranslationSurface, m: Mat2) -> HalfTranslationSurface:
    if not isinstance(m, Mat2):
        m = Mat2(*m)
    return linear_image(s, m.a, m.b, m.c, m.d)


def teich_disk_matrix(lam) -> Mat2:
    lam = HalfPlanePoint.of(lam)
    re, im = lam.rationals()
    return Mat2(1, re, 0, im)


def teich_disk_point(s: HalfTranslationSurface, lam) -> HalfTranslationSurface:
    """The surface x + iy -> x + lam*y applied to every flat chart."""
    return apply_gl2(s, teich_disk_matrix(lam))


def beltrami_coefficient(lam) -> complex:
    z = complex(HalfPlanePoint.of(lam))
    return (1j - z) / (1j + z)


def geodesic_matrix(t: float) -> Mat2:
    e = math.exp(t)
    return Mat2(Fraction(e), 0, 0, Fraction(math.exp(-t)))


def geodesic_flow(s: HalfTranslationSurface, t: float) -> HalfTranslationSurface:
    """diag(e^t, e^-t), in float mode (entries are the binary rationals of the floats)."""
    if t == 0:
        return s
    return apply_gl2(s, geodesic_matrix(t))


def horocycle_flow(s: HalfTranslationSurface, t) -> HalfTranslationSurface:
    """[[1, t], [0, 1]]; exact for rational ``t``."""
    return apply_gl2(s, Mat2(1, t, 0, 1))


def poincare_distance(z, w) -> float:
    """Distance for the curvature -4 metric on the upper half-plane."""
    z = complex(HalfPlanePoint.of(z))
    w = complex(HalfPlanePoint.of(w))
    if z == w:
        return 0.0
    r = abs((z - w) / (z - w.conjugate()))
    # artanh via log for accuracy when r is small
    return 0.5 * math.log1p(2 * r / (1 - r)) if r < 1 else math.inf


def mobius(z: complex, a: float, b: float, c: float, d: float) -> complex:
    """(az + b)/(cz + d) for a real matrix of positive determinant."""
    return (a * z + b) / (c * z + d)


def principal_power(z: complex, a: float) -> complex:
    return cmath.exp(a * cmath.log(z))
