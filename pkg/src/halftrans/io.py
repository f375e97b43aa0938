"""Versioned JSON surface format with exact rationals written as "num/den" strings."""

from __future__ import annotations

import json
from fractions import Fraction

from .errors import FormatError
from .surface import HalfTranslationSurface, build_surface

FORMAT_VERSION = 1


def fmt_rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text) -> Fraction:
    if isinstance(text, bool):
        raise FormatError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise FormatError(f"rationals must be strings, got {text!r}")
    try:
        num, _, den = text.partition("/")
        return Fraction(int(num), int(den)) if den else Fraction(int(num))
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"not a rational: {text!r}") from exc


def surface_to_dict(s: HalfTranslationSurface) -> dict:
    out = {
        "version": FORMAT_VERSION,
        "polygons": [[[fmt_rational(x), fmt_rational(y)] for x, y in p.vertices] for p in s.polygons],
        "gluings": [[list(g.side_a), list(g.side_b), g.kind.value] for g in s.gluings],
        "marked": sorted([list(m) for m in s.marked]),
    }
    if s.labels:
        out["labels"] = sorted([[p, i, str(lbl)] for (p, i), lbl in s.labels.items()])
    return out


def surface_from_dict(d: dict) -> HalfTranslationSurface:
    if not isinstance(d, dict) or d.get("version") != FORMAT_VERSION:
        raise FormatError(f"expected a version {FORMAT_VERSION} surface object")
    try:
        polys = [[(parse_rational(x), parse_rational(y)) for x, y in poly] for poly in d["polygons"]]
        gluings = []
        for a, b, kind in d["gluings"]:
            if kind not in ("T", "R"):
                raise FormatError(f"unknown gluing kind {kind!r}")
            gluings.append(((int(a[0]), int(a[1])), (int(b[0]), int(b[1])), kind))
        marked = [(int(p), int(i)) for p, i in d.get("marked", [])]
        labels = {(int(p), int(i)): lbl for p, i, lbl in d["labels"]} if "labels" in d else None
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed surface file: {exc}") from exc
    return build_surface(polys, gluings, marked, labels=labels)


def dumps(s: HalfTranslationSurface) -> str:
    return json.dumps(surface_to_dict(s), indent=1, sort_keys=True)


def loads(text: str) -> HalfTranslationSurface:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
    return surface_from_dict(d)


def load(path) -> HalfTranslationSurface:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def save(s: HalfTranslationSurface, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(s) + "\n")
