"""SVG diagrams of glued polygons: poles drawn as crosses, zeros as dots."""

from __future__ import annotations

from xml.sax.saxutils import escape

from .surface import HalfTranslationSurface

PAD = 0.6
GAP = 0.8


def _label(k: int) -> str:
    letters = "abcdefghijklmnopqrstuvwxyz"
    return letters[k % 26] + (str(k // 26) if k >= 26 else "")


def layout(s: HalfTranslationSurface) -> list:
    """Offsets placing the polygons side by side, left to right, in float coordinates."""
    offsets = []
    cursor = 0.0
    for poly in s.polygons:
        xs = [float(v[0]) for v in poly.vertices]
        ys = [float(v[1]) for v in poly.vertices]
        offsets.append((cursor - min(xs), -min(ys)))
        cursor += max(xs) - min(xs) + GAP
    return offsets


def render_svg(s: HalfTranslationSurface, unit: float = 80.0) -> str:
    offsets = layout(s)
    pts = []
    for poly, (dx, dy) in zip(s.polygons, offsets):
        pts.append([(float(x) + dx, float(y) + dy) for x, y in poly.vertices])
    width = max(x for p in pts for x, _ in p) + 2 * PAD
    height = max(y for p in pts for _, y in p) + 2 * PAD

    def sx(x):
        return f"{(x + PAD) * unit:.2f}"

    def sy(y):
        return f"{(height - PAD - y) * unit:.2f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width * unit:.0f}" height="{height * unit:.0f}" '
        f'viewBox="0 0 {width * unit:.2f} {height * unit:.2f}">',
        '<g fill="#eef3fb" stroke="#223" stroke-width="1.5">',
    ]
    for p in pts:
        path = " ".join(f"{sx(x)},{sy(y)}" for x, y in p)
        out.append(f'<polygon points="{path}"/>')
    out.append("</g>")

    # gluing labels at edge midpoints, pulled slightly inward; R gluings get a bar
    out.append('<g font-family="sans-serif" font-size="13" text-anchor="middle" fill="#333">')
    for k, g in enumerate(s.gluings):
        name = _label(k) + ("̅" if g.kind.value == "R" else "")
        for p, e in (g.side_a, g.side_b):
            poly = pts[p]
            (x0, y0), (x1, y1) = poly[e], poly[(e + 1) % len(poly)]
            mx, my = (x0 + x1) / 2, (y0 + y1) / 2
            nx, ny = -(y1 - y0), x1 - x0
            norm = (nx * nx + ny * ny) ** 0.5 or 1.0
            mx, my = mx + 0.15 * nx / norm, my + 0.15 * ny / norm
            out.append(f'<text x="{sx(mx)}" y="{sy(my)}" dy="4">{escape(name)}</text>')
    out.append("</g>")

    out.append('<g stroke="#b00" fill="#b00" stroke-width="2">')
    r = 0.07 * unit
    for c, cls in enumerate(s.classes):
        order = s.class_order(c)
        for p, i in cls:
            x, y = pts[p][i]
            X, Y = float(sx(x)), float(sy(y))
            if order == -1:
                out.append(f'<path d="M{X - r:.2f},{Y - r:.2f}L{X + r:.2f},{Y + r:.2f}M{X - r:.2f},{Y + r:.2f}L{X + r:.2f},{Y - r:.2f}"/>')
            elif order > 0:
                out.append(f'<circle cx="{X:.2f}" cy="{Y:.2f}" r="{r * 0.8:.2f}"/>')
            elif s.class_marked[c]:
                out.append(f'<circle cx="{X:.2f}" cy="{Y:.2f}" r="{r * 0.7:.2f}" fill="none"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def save_svg(s: HalfTranslationSurface, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_svg(s))
