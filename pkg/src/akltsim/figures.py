"""Hand-rolled SVG output: sampled-graph pictures and study figures.

No plotting dependency: every figure is assembled from a small set of SVG
primitives with fixed numeric formatting, so identical inputs give identical
bytes.  Colors follow the measurement axes (x magenta, y yellow, z cyan).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analysis import DomainScalingCurve, PercolationStudy
from .domain_reduction import StochasticGraph

__all__ = ["RenderStyle", "LABEL_COLORS", "render_graph", "plot_scaling", "plot_percolation"]

LABEL_COLORS = {"X": "#c2317e", "Y": "#d8a400", "Z": "#12a5b5"}
_PALETTE = ("#1f6fb4", "#c2582b", "#3b8f4a", "#7a4fa3", "#a23b3b", "#50707c")


def _f(x: float) -> str:
    return f"{x:.2f}"


@dataclass(frozen=True)
class RenderStyle:
    width: int = 640
    height: int = 640
    margin: float = 40.0
    node_scale: float = 2.6
    show_lattice: bool = True
    highlight_largest: bool = True


class _Svg:
    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        ]

    def line(self, x1, y1, x2, y2, stroke="#222222", width=1.0, cls=None, dash=None):
        extra = f' class="{cls}"' if cls else ""
        if dash:
            extra += f' stroke-dasharray="{dash}"'
        self.parts.append(
            f'<line{extra} x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
            f'stroke="{stroke}" stroke-width="{_f(width)}"/>'
        )

    def circle(self, cx, cy, r, fill, stroke="#222222", width=1.0, cls=None):
        extra = f' class="{cls}"' if cls else ""
        self.parts.append(
            f'<circle{extra} cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(r)}" fill="{fill}" '
            f'stroke="{stroke}" stroke-width="{_f(width)}"/>'
        )

    def polyline(self, points, stroke, width=1.5, cls=None, dash=None):
        extra = f' class="{cls}"' if cls else ""
        if dash:
            extra += f' stroke-dasharray="{dash}"'
        pts = " ".join(f"{_f(x)},{_f(y)}" for x, y in points)
        self.parts.append(
            f'<polyline{extra} points="{pts}" fill="none" stroke="{stroke}" '
            f'stroke-width="{_f(width)}"/>'
        )

    def text(self, x, y, s, size=12, anchor="start", fill="#222222"):
        self.parts.append(
            f'<text x="{_f(x)}" y="{_f(y)}" font-size="{size}" font-family="sans-serif" '
            f'text-anchor="{anchor}" fill="{fill}">{s}</text>'
        )

    def done(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def render_graph(graph: StochasticGraph, style: RenderStyle | None = None) -> str:
    """Draw the reduced graph over a faint lattice; one circle per domain.

    Domains sit at the centroid of their member sites with area proportional
    to their size; parity edges are straight segments between centroids.
    An edge whose shortest route wraps the periodic seam is drawn dashed,
    heading to the nearest periodic image and clipped at the canvas, and the
    largest domain gets a heavier outline.
    """
    style = style or RenderStyle()
    lat = graph.lattice
    pos = lat.positions
    lo = pos.min(axis=0)
    hi = pos.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    scale = min(
        (style.width - 2 * style.margin) / span[0],
        (style.height - 2 * style.margin) / span[1],
    )

    def to_px(p):
        x = style.margin + (p[0] - lo[0]) * scale
        y = style.height - style.margin - (p[1] - lo[1]) * scale
        return x, y

    seam = 0.55 * float(np.max(span))
    svg = _Svg(style.width, style.height)
    if style.show_lattice:
        for a, b, _, _ in lat.bonds:
            pa, pb = pos[a], pos[b]
            if float(np.max(np.abs(pa - pb))) > seam:
                continue
            xa, ya = to_px(pa)
            xb, yb = to_px(pb)
            svg.line(xa, ya, xb, yb, stroke="#dddddd", width=0.8, cls="lattice-bond")

    centroids = np.array([pos[m].mean(axis=0) for m in graph.members])
    t1, t2 = lat.translations()
    shifts = [i * t1 + j * t2 for i in (-1, 0, 1) for j in (-1, 0, 1)]
    for p, q in graph.edges:
        ca, cb = centroids[p], centroids[q]
        best = min(shifts, key=lambda s: float(np.sum((cb + s - ca) ** 2)))
        xa, ya = to_px(ca)
        xb, yb = to_px(cb + best)
        wrapped = bool(np.any(np.abs(best) > 1e-9))
        svg.line(xa, ya, xb, yb, stroke="#555555", width=1.2, cls="edge",
                 dash="4 3" if wrapped else None)

    largest = int(np.argmax(graph.vertex_sizes)) if graph.n_vertices else -1
    order = np.argsort(graph.vertex_sizes)[::-1]
    for v in order:
        x, y = to_px(centroids[v])
        label = "XYZ"[graph.vertex_labels[v]]
        emphas = style.highlight_largest and int(v) == largest
        svg.circle(
            x, y,
            style.node_scale * float(np.sqrt(graph.vertex_sizes[v])),
            fill=LABEL_COLORS[label],
            stroke="#111111" if emphas else "#444444",
            width=2.5 if emphas else 0.8,
            cls=f"vertex label-{label}",
        )
    svg.text(style.margin, 20, f"{graph.n_vertices} domains, {graph.n_edges} edges", size=13)
    return svg.done()


def _axes(svg: _Svg, x0, y0, x1, y1, xlim, ylim, xlabel, ylabel, logx=False):
    """Draw axes with 5 ticks each; return the data-to-pixel mapping."""
    svg.line(x0, y0, x1, y0, width=1.2)
    svg.line(x0, y0, x0, y1, width=1.2)
    xa, xb = xlim
    ya, yb = ylim

    def tx(x):
        if logx:
            return x0 + (np.log(x) - np.log(xa)) / (np.log(xb) - np.log(xa)) * (x1 - x0)
        return x0 + (x - xa) / (xb - xa) * (x1 - x0)

    def ty(y):
        return y0 - (y - ya) / (yb - ya) * (y0 - y1)

    xticks = np.geomspace(xa, xb, 5) if logx else np.linspace(xa, xb, 5)
    for t in xticks:
        px = tx(t)
        svg.line(px, y0, px, y0 + 5, width=1.0)
        svg.text(px, y0 + 18, f"{t:g}", size=10, anchor="middle")
    for t in np.linspace(ya, yb, 5):
        py = ty(t)
        svg.line(x0 - 5, py, x0, py, width=1.0)
        svg.text(x0 - 8, py + 4, f"{t:g}", size=10, anchor="end")
    svg.text((x0 + x1) / 2, y0 + 34, xlabel, size=12, anchor="middle")
    svg.text(14, (y0 + y1) / 2, ylabel, size=12, anchor="middle")
    return tx, ty


def plot_scaling(curves: list[DomainScalingCurve], width=640, height=480) -> str:
    """Mean largest domain against lattice size, with both fitted models dashed."""
    svg = _Svg(width, height)
    x0, y0, x1, y1 = 60.0, height - 50.0, width - 20.0, 20.0
    all_n = np.concatenate([c.sizes for c in curves]).astype(np.float64)
    all_y = np.concatenate([c.mean_max_domain + c.std_error for c in curves])
    tx, ty = _axes(
        svg, x0, y0, x1, y1,
        (all_n.min() * 0.9, all_n.max() * 1.1),
        (0.0, float(all_y.max()) * 1.1),
        "number of spins", "mean largest domain", logx=True,
    )
    for k, c in enumerate(curves):
        color = _PALETTE[k % len(_PALETTE)]
        xs = c.sizes.astype(np.float64)
        dense = np.geomspace(xs.min(), xs.max(), 60)
        svg.polyline(
            [(tx(x), ty(c.fit_log.slope * np.log(x) + c.fit_log.intercept)) for x in dense],
            stroke=color, width=1.0, dash="6 3", cls="fit-log",
        )
        svg.polyline(
            [(tx(x), ty(c.fit_linear.slope * x + c.fit_linear.intercept)) for x in dense],
            stroke=color, width=1.0, dash="2 3", cls="fit-linear",
        )
        for x, y, e in zip(xs, c.mean_max_domain, c.std_error):
            svg.line(tx(x), ty(y - e), tx(x), ty(y + e), stroke=color, width=1.0)
            svg.circle(tx(x), ty(y), 3.5, fill=color, stroke="#222222", width=0.6, cls="point")
        svg.text(x0 + 10, y1 + 16 + 14 * k, f"a^2 = {c.a_squared:g}", size=11, fill=color)
    return svg.done()


def plot_percolation(study: PercolationStudy, estimate: float | None = None,
                     width=640, height=480) -> str:
    """Spanning probability against deformation, one curve per lattice size."""
    svg = _Svg(width, height)
    x0, y0, x1, y1 = 60.0, height - 50.0, width - 20.0, 20.0
    grid = study.a_grid
    tx, ty = _axes(
        svg, x0, y0, x1, y1,
        (float(grid.min()), float(grid.max())), (0.0, 1.0),
        "deformation a^2", "spanning probability",
    )
    for k in range(study.sizes.size):
        color = _PALETTE[k % len(_PALETTE)]
        pts = [(tx(a), ty(p)) for a, p in zip(grid, study.spanning_probability[k])]
        svg.polyline(pts, stroke=color, width=1.5, cls="curve")
        for j, a in enumerate(grid):
            svg.line(tx(a), ty(study.ci_low[k, j]), tx(a), ty(study.ci_high[k, j]),
                     stroke=color, width=1.0)
            svg.circle(tx(a), ty(study.spanning_probability[k, j]), 3.0,
                       fill=color, stroke="#222222", width=0.6, cls="point")
        svg.text(x0 + 10, y1 + 16 + 14 * k, f"N = {int(study.sizes[k])}", size=11, fill=color)
    if estimate is not None:
        svg.line(tx(estimate), y0, tx(estimate), y1, stroke="#333333", width=1.0,
                 dash="4 3", cls="critical-point")
        svg.text(tx(estimate) + 4, y1 + 12, f"a^2 = {estimate:.3f}", size=11)
    return svg.done()
