"""Dependency-free SVG figures: 3-D region views and sum-rate curves."""

import math

import numpy as np

from .dofregion import tight_rows

WIDTH, HEIGHT = 800, 600
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _f(x):
    return f"{x:.2f}"


def _header():
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]


def _project(v):
    # axonometric view: d3 up, d1 towards lower left, d2 towards lower right
    x, y, z = v
    c, s = math.cos(math.radians(30)), math.sin(math.radians(30))
    return (y - x) * c, z - (x + y) * s


def vertex_letters(vertices, m):
    """Letters A, B, C, ... for vertices off the coordinate axes.

    Ordered by decreasing no-CSIT sum, then decreasing coordinates, which
    puts the corner shared by both groups first.
    """
    named = [v for v in vertices if sum(1 for x in v if x > 1e-9) >= 2]
    named.sort(key=lambda v: (-sum(v[m:]), tuple(-x for x in v)))
    return {v: chr(ord("A") + i) for i, v in enumerate(named[:26])}


def _facets(poly, vertices):
    verts = [np.array(v) for v in vertices]
    out = []
    for r in range(len(poly.halfspaces)):
        on = [v for v in verts if r in tight_rows(poly, v)]
        if len(on) < 3:
            continue
        centre = np.mean(on, axis=0)
        normal = poly.A[r] / np.linalg.norm(poly.A[r])
        u = on[0] - centre
        if np.linalg.norm(u) < 1e-12:
            u = on[1] - centre
        u = u / np.linalg.norm(u)
        w = np.cross(normal, u)
        on.sort(key=lambda v: math.atan2(np.dot(v - centre, w), np.dot(v - centre, u)))
        out.append(on)
    return out


def _edges(poly, vertices):
    verts = [np.array(v) for v in vertices]
    tights = [set(tight_rows(poly, v)) for v in verts]
    edges = []
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            common = sorted(tights[i] & tights[j])
            if common and np.linalg.matrix_rank(poly.A[common]) == poly.dim - 1:
                edges.append((vertices[i], vertices[j]))
    return edges


def _panel(poly, vertices, letters, x0, title, fill):
    scale, cx, cy = 150.0, x0 + 200.0, 380.0

    def pt(v):
        px, py = _project(v)
        return cx + scale * px, cy - scale * py

    out = [f'<text x="{_f(x0 + 200)}" y="40" text-anchor="middle" font-size="15">{title}</text>']
    for axis, name in ((0, "d1"), (1, "d2"), (2, "d3")):
        tip = [0.0, 0.0, 0.0]
        tip[axis] = 1.25
        (ax, ay), (bx, by) = pt((0, 0, 0)), pt(tip)
        out.append(f'<line x1="{_f(ax)}" y1="{_f(ay)}" x2="{_f(bx)}" y2="{_f(by)}" '
                   'stroke="#999" stroke-dasharray="4 3"/>')
        out.append(f'<text x="{_f(bx)}" y="{_f(by - 4)}" fill="#555">{name}</text>')
    for facet in _facets(poly, vertices):
        pts = " ".join(f"{_f(a)},{_f(b)}" for a, b in (pt(v) for v in facet))
        out.append(f'<polygon points="{pts}" fill="{fill}" fill-opacity="0.18" stroke="none"/>')
    for a, b in _edges(poly, vertices):
        (ax, ay), (bx, by) = pt(a), pt(b)
        out.append(f'<line x1="{_f(ax)}" y1="{_f(ay)}" x2="{_f(bx)}" y2="{_f(by)}" '
                   'stroke="black" stroke-width="1.5"/>')
    for v in vertices:
        x, y = pt(v)
        out.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="3" fill="black"/>')
        if v in letters:
            coords = ", ".join(f"{c:g}" for c in v)
            out.append(f'<text x="{_f(x + 6)}" y="{_f(y - 6)}">{letters[v]} ({coords})</text>')
    return out


def region_svg(pp_poly, pp_vertices, tp_poly, tp_vertices, m, alpha):
    """Side-by-side 3-D views of the optimum and time-partitioning regions."""
    if pp_poly.dim != 3:
        raise ValueError("region plots need exactly three users")
    letters = vertex_letters(pp_vertices, m)
    lines = _header()
    lines += _panel(pp_poly, pp_vertices, letters, 0, "power partitioning (optimum region)", COLORS[0])
    lines += _panel(tp_poly, tp_vertices, letters, 400, "time partitioning", COLORS[1])
    lines.append(f'<text x="400" y="580" text-anchor="middle" fill="#555">alpha = {alpha:g}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _nice_ticks(lo, hi, n=6):
    span = hi - lo if hi > lo else 1.0
    raw = span / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=mag * 10)
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9:
        ticks.append(round(t, 10))
        t += step
    return ticks


def sweep_svg(rows, title="sum rate of the CSIT group"):
    """Sum rate versus SNR, one curve per (scheme, offset)."""
    curves = {}
    for r in rows:
        curves.setdefault((r.scheme, r.offset_db), []).append((r.snr_db, r.sum_rate_kalpha))
    xs = [x for pts in curves.values() for x, _ in pts]
    ys = [y for pts in curves.values() for _, y in pts]
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1, x_hi + 1
    y_lo, y_hi = 0.0, max(ys) * 1.05 if max(ys) > 0 else 1.0
    left, right, top, bottom = 80, 760, 60, 530

    def sx(x):
        return left + (x - x_lo) / (x_hi - x_lo) * (right - left)

    def sy(y):
        return bottom - (y - y_lo) / (y_hi - y_lo) * (bottom - top)

    lines = _header()
    lines.append(f'<text x="{(left + right) / 2:.0f}" y="30" text-anchor="middle" font-size="15">{title}</text>')
    lines.append(f'<rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" '
                 'fill="none" stroke="black"/>')
    for t in _nice_ticks(x_lo, x_hi):
        lines.append(f'<line x1="{_f(sx(t))}" y1="{bottom}" x2="{_f(sx(t))}" y2="{top}" stroke="#eee"/>')
        lines.append(f'<text x="{_f(sx(t))}" y="{bottom + 18}" text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(y_lo, y_hi):
        lines.append(f'<line x1="{left}" y1="{_f(sy(t))}" x2="{right}" y2="{_f(sy(t))}" stroke="#eee"/>')
        lines.append(f'<text x="{left - 8}" y="{_f(sy(t) + 4)}" text-anchor="end">{t:g}</text>')
    lines.append(f'<text x="{(left + right) / 2:.0f}" y="{bottom + 45}" text-anchor="middle">SNR [dB]</text>')
    lines.append(f'<text x="20" y="{(top + bottom) / 2:.0f}" text-anchor="middle" '
                 f'transform="rotate(-90 20 {(top + bottom) / 2:.0f})">sum rate [bits/channel use]</text>')

    for i, ((scheme, offset), pts) in enumerate(sorted(curves.items())):
        color = COLORS[i % len(COLORS)]
        dash = ' stroke-dasharray="6 4"' if scheme == "tp" else ""
        path = " ".join(f"{'M' if j == 0 else 'L'}{_f(sx(x))},{_f(sy(y))}" for j, (x, y) in enumerate(pts))
        lines.append(f'<path d="{path}" fill="none" stroke="{color}" stroke-width="2"{dash}/>')
        for x, y in pts:
            lines.append(f'<circle cx="{_f(sx(x))}" cy="{_f(sy(y))}" r="3" fill="{color}"/>')
        ly = top + 20 + 18 * i
        lines.append(f'<line x1="{left + 15}" y1="{ly}" x2="{left + 45}" y2="{ly}" '
                     f'stroke="{color}" stroke-width="2"{dash}/>')
        label = "power partitioning" if scheme == "pp" else "time partitioning"
        lines.append(f'<text x="{left + 52}" y="{ly + 4}">{label} ({offset:g} dB)</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
