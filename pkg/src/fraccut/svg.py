"""Deterministic SVG 1.1 rendering of planar instances and results."""
import math
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
SIZE = 480
PAD = 16


def _num(x):
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class Scene:
    """Layers drawn in insertion order over fixed world bounds."""

    def __init__(self, bounds):
        (x0, x1), (y0, y1) = bounds
        if not (x1 > x0 and y1 > y0):
            raise ValueError("empty drawing bounds")
        self.x0, self.y0 = float(x0), float(y0)
        self.scale = (SIZE - 2 * PAD) / max(float(x1 - x0), float(y1 - y0))
        self.bounds = tuple(map(float, (x0, x1, y0, y1)))
        self.items = []

    def px(self, x, y):
        return PAD + (x - self.x0) * self.scale, SIZE - PAD - (y - self.y0) * self.scale

    def heatmap(self, grid, color="#000000"):
        v = grid.fvalues
        vmax = float(np.abs(v).max()) or 1.0
        ny, nx = v.shape
        hx, hy = map(float, grid.spacing)
        gx, gy = map(float, grid.origin)
        w, h = hx * self.scale, hy * self.scale
        for j in range(ny):
            for i in range(nx):
                if v[j, i] == 0:
                    continue
                X, Y = self.px(gx + i * hx, gy + (j + 1) * hy)
                self.items.append(f'<rect x="{_num(X)}" y="{_num(Y)}" width="{_num(w)}" height="{_num(h)}" '
                                  f'fill="{color}" fill-opacity="{_num(0.6 * abs(v[j, i]) / vmax)}"/>')

    def points(self, pts, colors):
        for p, c in zip(pts, colors):
            X, Y = self.px(float(p[0]), float(p[1]))
            self.items.append(f'<circle cx="{_num(X)}" cy="{_num(Y)}" r="3" fill="{PALETTE[c % len(PALETTE)]}"/>')

    def line(self, a, b, c, color="#000000"):
        """The line a x + b y + c = 0 clipped to the bounds."""
        x0, x1, y0, y1 = self.bounds
        ends = []
        if b != 0:
            for x in (x0, x1):
                ends.append((x, -(a * x + c) / b))
        if a != 0:
            for y in (y0, y1):
                ends.append((-(b * y + c) / a, y))
        eps = 1e-12 * max(1.0, x1 - x0, y1 - y0)
        inside = sorted({(round(x, 12), round(y, 12)) for x, y in ends
                         if x0 - eps <= x <= x1 + eps and y0 - eps <= y <= y1 + eps})
        if len(inside) < 2:
            return
        (ax, ay), (bx, by) = self.px(*inside[0]), self.px(*inside[-1])
        self.items.append(f'<line x1="{_num(ax)}" y1="{_num(ay)}" x2="{_num(bx)}" y2="{_num(by)}" '
                          f'stroke="{color}" stroke-width="1.5"/>')

    def circle(self, centre, radius, color="#000000"):
        X, Y = self.px(*centre)
        self.items.append(f'<circle cx="{_num(X)}" cy="{_num(Y)}" r="{_num(radius * self.scale)}" '
                          f'fill="none" stroke="{color}" stroke-width="1.5"/>')

    def cells(self, labels, xs, ys):
        """Colour a label raster (ny, nx) sampled at cell centres xs, ys."""
        dx, dy = xs[1] - xs[0], ys[1] - ys[0]
        for j, y in enumerate(ys):
            for i, x in enumerate(xs):
                X, Y = self.px(x - dx / 2, y + dy / 2)
                self.items.append(f'<rect x="{_num(X)}" y="{_num(Y)}" width="{_num(dx * self.scale)}" '
                                  f'height="{_num(dy * self.scale)}" fill="{PALETTE[labels[j, i] % len(PALETTE)]}" '
                                  f'fill-opacity="0.15"/>')

    def title(self, text):
        self.items.append(f'<text x="{PAD}" y="{PAD - 4}" font-size="11" font-family="sans-serif">'
                          f'{escape(text)}</text>')

    def render(self):
        head = ('<?xml version="1.0" encoding="UTF-8"?>\n'
                f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
                f'viewBox="0 0 {SIZE} {SIZE}">\n<rect width="{SIZE}" height="{SIZE}" fill="#ffffff"/>\n')
        return head + "\n".join(self.items) + "\n</svg>\n"


def _require_planar(dim):
    if dim != 2:
        raise ValueError(f"only planar (2D) inputs can be rendered, got dimension {dim}")


def _bounds_of(points=(), grids=()):
    xs, ys = [], []
    for p in points:
        xs.append(float(p[0]))
        ys.append(float(p[1]))
    for g in grids:
        (a, b), (c, d) = g.bounds()
        xs += [float(a), float(b)]
        ys += [float(c), float(d)]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    mx = 0.05 * max(x1 - x0, y1 - y0, 1e-9)
    return (x0 - mx, x1 + mx), (y0 - mx, y1 + mx)


def render_points(s, witness=None):
    _require_planar(s.dim)
    scene = Scene(_bounds_of(s.points))
    if witness is not None:
        f = witness.halfspace.functional
        scene.line(float(f.normal[0]), float(f.normal[1]), float(f.offset))
    scene.points(s.points, s.colors)
    return scene.render()


def render_grids(grids, halfspace=None, partition=None, window=None, res=96):
    for g in grids:
        _require_planar(g.dim)
    scene = Scene(_bounds_of(grids=grids))
    for k, g in enumerate(grids):
        scene.heatmap(g, PALETTE[k % len(PALETTE)])
    if partition is not None:
        (x0, x1), (y0, y1) = scene.bounds[:2], scene.bounds[2:]
        xs = x0 + (np.arange(res) + 0.5) * (x1 - x0) / res
        ys = y0 + (np.arange(res) + 0.5) * (y1 - y0) / res
        X, Y = np.meshgrid(xs, ys)
        labels = partition.cell_of(np.column_stack([X.ravel(), Y.ravel()])).reshape(res, res)
        scene.cells(labels, xs, ys)
        from .window import extract_convex_cell
        _draw_cell(scene, extract_convex_cell(partition))
    if window is not None:
        for cell in window.cells:
            _draw_cell(scene, cell)
    if halfspace is not None and not halfspace.is_degenerate:
        f = halfspace.functional
        scene.line(float(f.normal[0]), float(f.normal[1]), float(f.offset))
    return scene.render()


def _draw_cell(scene, cell):
    for con in cell.constraints:
        if con.kind == "halfplane":
            scene.line(con.l[0], con.l[1], con.c)
        else:
            centre, r2 = con.disk()
            if r2 > 0:
                scene.circle(tuple(centre), math.sqrt(r2))
