"""Command-line front end. JSON goes to stdout, errors to stderr as {"code", "message"}.

Exit status: 0 on success, 1 for domain errors, 2 for usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import affine, cylinders, flowlab, pillowcase, render, scmap
from .errors import HalfTransError
from .io import load, save, surface_to_dict
from .surface import area, singularities, stratum
from .trace import Direction


class UsageError(Exception):
    pass


def _f17(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    return format(x, ".17g")


def to_json(obj, indent: int = 0) -> str:
    """Deterministic JSON: sorted keys, floats at 17 significant digits, Fractions as "p/q"."""
    pad = " " * (indent + 1)
    end = " " * indent
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _f17(obj)
    if isinstance(obj, Fraction):
        return json.dumps(f"{obj.numerator}/{obj.denominator}" if obj.denominator != 1 else str(obj.numerator))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(obj[k], indent + 1)}" for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + to_json(v, indent + 1) for v in obj) + "\n" + end + "]"
    if hasattr(obj, "tolist"):
        return to_json(obj.tolist(), indent)
    return json.dumps(str(obj))


def _rat(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc


def _rats(text: str) -> list:
    return [_rat(t) for t in text.split(",") if t.strip()]


def _load(path):
    try:
        return load(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _surface_summary(s) -> dict:
    st = stratum(s)
    return {
        "stratum": list(st.orders),
        "genus": st.genus,
        "punctures": st.num_punctures,
        "area": area(s),
        "singularities": [
            {"cone_angle_pi": sg.cone_angle, "order": sg.order, "marked": sg.is_puncture, "corners": sorted(list(c) for c in sg.vertex_class)}
            for sg in singularities(s)
        ],
    }


def _emit_surface(s, out_path):
    if out_path:
        save(s, out_path)
        return {"written": out_path, **_surface_summary(s)}
    return {"surface": surface_to_dict(s), **_surface_summary(s)}


# -- verbs -------------------------------------------------------------------------------


def cmd_validate(a):
    return {"valid": True, **_surface_summary(_load(a.file))}


def cmd_act(a):
    s = _load(a.file)
    chosen = [x is not None for x in (a.matrix, a.lam, a.horocycle, a.geodesic)]
    if sum(chosen) != 1:
        raise UsageError("give exactly one of --matrix, --lambda, --horocycle, --geodesic")
    if a.matrix is not None:
        vals = _rats(a.matrix)
        if len(vals) != 4:
            raise UsageError("--matrix needs four entries a,b,c,d")
        out = affine.apply_gl2(s, affine.Mat2(*vals))
    elif a.lam is not None:
        vals = _rats(a.lam)
        if len(vals) != 2:
            raise UsageError("--lambda needs re,im")
        out = affine.teich_disk_point(s, tuple(vals))
    elif a.horocycle is not None:
        out = affine.horocycle_flow(s, _rat(a.horocycle))
    else:
        out = affine.geodesic_flow(s, float(_rat(a.geodesic)))
    return _emit_surface(out, a.out)


def cmd_decompose(a):
    s = _load(a.file)
    try:
        d = Direction.parse(a.direction)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad direction {a.direction!r}") from exc
    dec = cylinders.cylinder_decomposition(s, d, a.max_crossings)
    if isinstance(dec, cylinders.UndeterminedDecomposition):
        return {"direction": str(d), "undetermined": [{"vertex": u.start, "prong": u.prong, "crossings": u.crossings} for u in dec.separatrices]}
    return dec.to_json()


def cmd_pillowcase(a):
    p = pillowcase.LPillowParams(_rat(a.h1), _rat(a.h2), _rat(a.q))
    s = pillowcase.make_l_pillowcase(p)
    res = _emit_surface(s, a.out)
    res["weights"] = list(p.weights)
    return res


def cmd_classify(a):
    s = _load(a.file)
    case = pillowcase.classify_s05(s)
    out = {"case": case.tag, "cylinders": case.num_cylinders}
    if case.tag == "Case1":
        d = pillowcase.find_two_cylinder_direction(s)
        out["two_cylinder_direction"] = None if isinstance(d, pillowcase.NotFound) else str(d)
    return out


def cmd_to_l(a):
    s = _load(a.file)
    res = pillowcase.shear_to_L(s)
    return {
        "mu": list(res.mu),
        "scale": res.scale,
        "h1": res.params.h1,
        "h2": res.params.h2,
        "q": res.params.q,
        "lambda": [[re, im] for re, im in res.lam],
    }


def cmd_cover(a):
    s = _load(a.file)
    try:
        branch = [int(x) for x in a.branch.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError("--branch takes comma-separated vertex class ids") from exc
    return _emit_surface(pillowcase.branched_double_cover(s, branch), a.out)


def cmd_flow_density(a):
    w = [float(x) for x in _rats(a.weights)]
    fams = {"geometric": flowlab.GeometricMean, "linear": flowlab.Linear}
    if a.family not in fams:
        raise UsageError(f"unknown family {a.family!r}")
    f = fams[a.family](w)
    eps, r, step = float(_rat(a.eps)), float(_rat(a.r)), float(_rat(a.step))
    if eps <= 0 or r <= 0 or step <= 0:
        raise UsageError("--eps, --r and --step must be positive")
    ts = flowlab.sample_times(r, step)
    dist = flowlab.flow_distances(f, ts)
    frac = float(np.mean(dist < eps))
    out = {"family": a.family, "weights": w, "eps": eps, "r": r, "step": step, "fraction": frac, "samples": len(ts)}
    if a.csv:
        with open(a.csv, "w", encoding="utf-8") as fh:
            cw = csv.writer(fh, lineterminator="\n")
            cw.writerow(["t", "distance"])
            for t, d in zip(ts, dist):
                cw.writerow([_f17(float(t)), _f17(float(d))])
        out["csv"] = a.csv
    return out


def cmd_sc_path(a):
    q = float(_rat(a.q))
    ts = scmap.default_t_samples(float(_rat(a.tmin)), float(_rat(a.tmax)), int(a.per_decade))
    rows = scmap.boundary_path(q, ts)
    fit = scmap.fit_path(rows)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "h1", "h2", "D"])
    for row in rows:
        w.writerow([_f17(float(v)) for v in row])
    if a.csv:
        with open(a.csv, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    report = {
        "q": q,
        "samples": fit.samples,
        "t_range": list(fit.t_range),
        "log_model": {"c1": fit.c1, "c2": fit.c2, "residual": fit.residual},
        "cubic_model": {"coefficients": list(fit.poly_coeffs), "residual": fit.poly_residual},
        "log_model_better": fit.residual < fit.poly_residual,
    }
    if a.csv:
        report["csv"] = a.csv
    else:
        report["rows"] = rows.tolist()
    return report


def cmd_render(a):
    s = _load(a.file)
    render.save_svg(s, a.svg)
    return {"written": a.svg, "polygons": len(s.polygons)}


# -- parser ------------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="halftrans", description="Computations with half-translation surfaces.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="check a surface file and print its stratum")
    v.add_argument("file")
    v.set_defaults(func=cmd_validate)

    v = sub.add_parser("act", help="apply a linear map, a point of H, or a flow")
    v.add_argument("file")
    v.add_argument("--matrix", help="a,b,c,d with ad - bc > 0")
    v.add_argument("--lambda", dest="lam", help="re,im of a point of the upper half-plane")
    v.add_argument("--horocycle", help="time t of [[1, t], [0, 1]]")
    v.add_argument("--geodesic", help="time t of diag(e^t, e^-t) (float mode)")
    v.add_argument("--out", help="write the surface here instead of stdout")
    v.set_defaults(func=cmd_act)

    v = sub.add_parser("decompose", help="cylinder decomposition in a rational direction")
    v.add_argument("file")
    v.add_argument("--direction", default="0", help="slope p/q, or 'vertical' (default horizontal)")
    v.add_argument("--max-crossings", type=int, default=100_000)
    v.set_defaults(func=cmd_decompose)

    v = sub.add_parser("pillowcase", help="build the L-shaped pillowcase")
    v.add_argument("--h1", required=True)
    v.add_argument("--h2", required=True)
    v.add_argument("--q", required=True)
    v.add_argument("--out")
    v.set_defaults(func=cmd_pillowcase)

    v = sub.add_parser("classify", help="Case1 / Case2 for five poles and a zero")
    v.add_argument("file")
    v.set_defaults(func=cmd_classify)

    v = sub.add_parser("to-L", help="shears taking a two-cylinder differential to an L")
    v.add_argument("file")
    v.set_defaults(func=cmd_to_l)

    v = sub.add_parser("cover", help="double cover branched over vertex classes")
    v.add_argument("file")
    v.add_argument("--branch", required=True, help="comma-separated vertex class ids")
    v.add_argument("--out")
    v.set_defaults(func=cmd_cover)

    v = sub.add_parser("flow-density", help="fraction of flow times close to the linear part")
    v.add_argument("--weights", required=True, help="a1,a2,... summing to 1")
    v.add_argument("--eps", default="1/20")
    v.add_argument("--r", default="1000")
    v.add_argument("--step", default="1")
    v.add_argument("--family", default="geometric", help="geometric or linear")
    v.add_argument("--csv", help="write rows t,distance here")
    v.set_defaults(func=cmd_flow_density)

    v = sub.add_parser(
        "sc-path",
        help="boundary path t -> (h1, h2); CSV columns t,h1,h2,D with D = a1 h1 + a2 h2 - a2",
    )
    v.add_argument("--q", default="1")
    v.add_argument("--tmin", default="1/100000")
    v.add_argument("--tmax", default="1/100")
    v.add_argument("--per-decade", default=20, type=int)
    v.add_argument("--csv", help="write the CSV here; otherwise rows go into the JSON")
    v.set_defaults(func=cmd_sc_path)

    v = sub.add_parser("render", help="draw the polygons as SVG")
    v.add_argument("file")
    v.add_argument("--svg", required=True)
    v.set_defaults(func=cmd_render)
    return p


def _fail(code: str, message: str, status: int, stderr) -> int:
    stderr.write(json.dumps({"code": code, "message": message}, sort_keys=True) + "\n")
    return status


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        result = args.func(args)
    except UsageError as exc:
        return _fail("UsageError", str(exc), 2, stderr)
    except HalfTransError as exc:
        return _fail(exc.code, str(exc), 1, stderr)
    except OSError as exc:
        return _fail("IOError", str(exc), 1, stderr)
    except ValueError as exc:
        return _fail("UsageError", str(exc), 2, stderr)
    stdout.write(to_json(result) + "\n")
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
