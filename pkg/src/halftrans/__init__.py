"""Half-translation surfaces as glued polygons, with exact rational geometry.

Submodules: ``surface`` (polygons, gluings, strata), ``trace`` and ``cylinders``
(separatrices, cylinder decompositions, shears), ``affine`` (linear actions),
``pillowcase`` (five poles and a zero), ``flowlab`` and ``scmap`` (numerics).
"""

from .affine import HalfPlanePoint, Mat2, apply_gl2, geodesic_flow, horocycle_flow, poincare_distance, teich_disk_point
from .cylinders import (
    CylinderDecomposition,
    JSData,
    compose_shears,
    cylinder_decomposition,
    js_normal_form,
    shear_cylinders,
    surface_from_cylinders,
    verify_twist_identity,
)
from .errors import HalfTransError
from .io import load, loads, save
from .pillowcase import (
    LPillowParams,
    branched_double_cover,
    classify_s05,
    collapse_top,
    find_two_cylinder_direction,
    make_l_pillowcase,
    shear_to_L,
)
from .surface import FlatPolygon, GlueKind, HalfTranslationSurface, build_surface, singularities, stratum
from .trace import Direction, trace_separatrices

__all__ = [
    "Direction",
    "CylinderDecomposition",
    "FlatPolygon",
    "GlueKind",
    "HalfPlanePoint",
    "HalfTransError",
    "HalfTranslationSurface",
    "JSData",
    "LPillowParams",
    "Mat2",
    "apply_gl2",
    "branched_double_cover",
    "build_surface",
    "classify_s05",
    "collapse_top",
    "compose_shears",
    "cylinder_decomposition",
    "find_two_cylinder_direction",
    "geodesic_flow",
    "horocycle_flow",
    "js_normal_form",
    "load",
    "loads",
    "make_l_pillowcase",
    "poincare_distance",
    "save",
    "shear_cylinders",
    "shear_to_L",
    "singularities",
    "stratum",
    "surface_from_cylinders",
    "teich_disk_point",
    "trace_separatrices",
    "verify_twist_identity",
]
