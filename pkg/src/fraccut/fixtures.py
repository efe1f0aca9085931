"""Deterministic instance generators for the constructions the solvers are tested on."""
import math
from fractions import Fraction

import numpy as np

from .balanced import extreme_order_permutations
from .errors import NonGeneralPosition
from .geometry import ColoredPointSet, strictly_inside_hull
from .grid import DensityGrid

MAX_TRIES = 1000


def _rng(seed):
    return np.random.default_rng(seed)


def _try_build(points, colors):
    try:
        return ColoredPointSet(points, colors)
    except NonGeneralPosition:
        return None


# ---------------------------------------------------------------------------
# colored point sets
# ---------------------------------------------------------------------------

def bereg_kano(n, seed, radius=1000):
    """3n planar points, n per color, in general position, hull vertices all color 0.

    With n = 2 a monochromatic hull is impossible (it needs three vertices), so
    the two color-0 points are placed far out on a line and the instance is
    accepted when some extreme-order permutation is missing instead.
    """
    if n < 2:
        raise ValueError("bereg-kano instances need n >= 2")
    rng = _rng(seed)
    if n == 2:
        return _bereg_kano_pair(rng, radius)
    for _ in range(MAX_TRIES):
        angles = np.sort(rng.uniform(0, 2 * np.pi, n))
        outer = [(int(round(radius * math.cos(a))), int(round(radius * math.sin(a)))) for a in angles]
        inner = []
        for _ in range(2 * n):
            w = rng.dirichlet(np.ones(n)) * 0.9 + 0.1 / n
            x = sum(wi * p[0] for wi, p in zip(w, outer))
            y = sum(wi * p[1] for wi, p in zip(w, outer))
            inner.append((int(round(x)), int(round(y))))
        points = outer + inner
        colors = [0] * n + [1] * n + [2] * n
        s = _try_build(points, colors)
        if s is None:
            continue
        P, _ = s.int_coords
        if strictly_inside_hull(P, list(range(n, 3 * n)), list(range(n))) and _hull_is_monochromatic(s):
            return s
    raise RuntimeError("could not generate a bereg-kano instance")


def _bereg_kano_pair(rng, radius):
    for _ in range(MAX_TRIES):
        a = rng.uniform(0, np.pi)
        ux, uy = math.cos(a), math.sin(a)
        outer = [(int(round(radius * ux)), int(round(radius * uy))),
                 (int(round(-radius * ux)), int(round(-radius * uy)))]
        inner = [(int(round(x)), int(round(y))) for x, y in rng.uniform(-radius / 10, radius / 10, size=(4, 2))]
        s = _try_build(outer + inner, [0, 0, 1, 1, 2, 2])
        if s is not None and extreme_order_permutations(s).missing:
            return s
    raise RuntimeError("could not generate a bereg-kano instance")


def _hull_is_monochromatic(s):
    from scipy.spatial import ConvexHull
    pts = np.array([[float(c) for c in p] for p in s.points])
    hull = ConvexHull(pts)
    return len({s.colors[i] for i in hull.vertices}) == 1


def hull_inside_points(d, n, seed, radius=1000, inner=60):
    """(d+1)n points in R^d; color 0 sits strictly inside the hull of the others."""
    rng = _rng(seed)
    for _ in range(MAX_TRIES):
        outer = []
        for c in range(1, d + 1):
            for _ in range(n):
                v = rng.normal(size=d)
                v = v / np.linalg.norm(v) * radius * rng.uniform(0.8, 1.0)
                outer.append(tuple(int(round(x)) for x in v))
        centroid = np.mean(np.array(outer, dtype=float), axis=0)
        core = [tuple(int(round(x)) for x in centroid + rng.uniform(-inner, inner, size=d)) for _ in range(n)]
        points = core + outer
        colors = [0] * n + [c for c in range(1, d + 1) for _ in range(n)]
        s = _try_build(points, colors)
        if s is None:
            continue
        P, _ = s.int_coords
        if strictly_inside_hull(P, list(range(n)), list(range(n, len(points)))):
            return s
    raise RuntimeError("could not generate a hull-inside instance")


def triangle_vertices(radius=1.0):
    return [(radius * math.cos(math.pi / 2 + 2 * math.pi * k / 3),
             radius * math.sin(math.pi / 2 + 2 * math.pi * k / 3)) for k in range(3)]


def triangle_rays_points(n, seed, scale=100, jitter=2):
    """n points of color k near the outward ray from vertex k of a regular triangle."""
    rng = _rng(seed)
    verts = [(round(scale * x), round(scale * y)) for x, y in triangle_vertices()]
    for _ in range(MAX_TRIES):
        points, colors = [], []
        for k, (vx, vy) in enumerate(verts):
            ts = np.sort(rng.choice(np.arange(1, 40), size=n, replace=False)) / 4
            for t in ts:
                off = int(rng.integers(-jitter, jitter + 1))
                # outward along v, small perpendicular offset
                points.append((Fraction(vx) * (1 + Fraction(t)) - off * Fraction(vy, scale),
                               Fraction(vy) * (1 + Fraction(t)) + off * Fraction(vx, scale)))
                colors.append(k)
        s = _try_build(points, colors)
        if s is not None:
            return s
    raise RuntimeError("could not generate a triangle-rays instance")


# ---------------------------------------------------------------------------
# densities
# ---------------------------------------------------------------------------

def rasterize(fn, size, bounds=((0.0, 1.0), (0.0, 1.0)), k=8):
    """Cell averages of ``fn(x, y)`` (vectorised) on a size x size grid, by k x k supersampling."""
    (x0, x1), (y0, y1) = bounds
    hx, hy = (x1 - x0) / size, (y1 - y0) / size
    xs = x0 + (np.arange(size * k) + 0.5) * hx / k
    ys = y0 + (np.arange(size * k) + 0.5) * hy / k
    X, Y = np.meshgrid(xs, ys)
    vals = fn(X, Y).reshape(size, k, size, k).mean(axis=(1, 3))
    grid = DensityGrid((x0, y0), (hx, hy), vals)
    return grid.normalized()


def remark13_triple(seed, size=24):
    """Three planar measures; measure 0 lies strictly inside the hull of the other two.

    Measures 1 and 2 share an annulus split into alternating angular sectors,
    measure 0 is a bump well inside the annulus. Any halfplane reaching
    measure 0 takes at least two whole sectors of the annulus, so for
    epsilon up to about 0.1 measure 0 is never the strict maximum among
    small fractions. Returns (grids, inside_index).
    """
    rng = _rng(seed)
    cx, cy = 0.5 + rng.uniform(-0.03, 0.03, size=2)
    r_in, r_out = 0.28, 0.45
    K = int(rng.choice([6, 8]))
    phase = rng.uniform(0, 2 * np.pi)
    weights = rng.uniform(0.5, 1.5, size=K)
    bx, by = cx + rng.uniform(-0.03, 0.03), cy + rng.uniform(-0.03, 0.03)
    br = rng.uniform(0.07, 0.11)
    tilt = rng.uniform(-1, 1, size=2)

    def annulus(X, Y, parity):
        r = np.hypot(X - cx, Y - cy)
        sector = (np.floor(((np.arctan2(Y - cy, X - cx) - phase) % (2 * np.pi)) / (2 * np.pi / K))).astype(int)
        ring = (r >= r_in) & (r <= r_out)
        return np.where(ring & (sector % 2 == parity), weights[sector % K], 0.0)

    def bump(X, Y):
        r = np.hypot(X - bx, Y - by)
        return np.where(r <= br, 1.0 + tilt[0] * (X - bx) / br * 0.5 + tilt[1] * (Y - by) / br * 0.5, 0.0)

    grids = [rasterize(bump, size), rasterize(lambda X, Y: annulus(X, Y, 0), size),
             rasterize(lambda X, Y: annulus(X, Y, 1), size)]
    return grids, 0


def triangle_rays_measures(size=48, width=0.02, length=0.3):
    """Three planar measures spread uniformly along the outward rays of a regular triangle."""
    verts = triangle_vertices(0.12)
    grids = []
    for vx, vy in verts:
        nrm = math.hypot(vx, vy)
        ux, uy = vx / nrm, vy / nrm

        def strip(X, Y, vx=vx, vy=vy, ux=ux, uy=uy):
            dx, dy = X - 0.5 - vx, Y - 0.5 - vy
            along = dx * ux + dy * uy
            across = -dx * uy + dy * ux
            return ((along >= 0) & (along <= length) & (np.abs(across) <= width / 2)).astype(float)

        grids.append(rasterize(strip, size))
    return grids


def random_measures(seed, count=3, size=16, bumps=3):
    """``count`` planar probability grids: positive background plus a few Gaussian bumps."""
    rng = _rng(seed)
    out = []
    for _ in range(count):
        centers = rng.uniform(0.15, 0.85, size=(bumps, 2))
        widths = rng.uniform(0.08, 0.2, size=bumps)
        amps = rng.uniform(0.5, 2.0, size=bumps)
        bg = rng.uniform(0.05, 0.3)

        def dens(X, Y, centers=centers, widths=widths, amps=amps, bg=bg):
            v = np.full_like(X, bg)
            for (mx, my), w, a in zip(centers, widths, amps):
                v += a * np.exp(-((X - mx) ** 2 + (Y - my) ** 2) / (2 * w * w))
            return v

        out.append(rasterize(dens, size, k=4))
    return out


def random_charge(seed, size=16):
    """Signed planar grid: difference of two random measures."""
    a, b = random_measures(seed, count=2, size=size)
    rng = _rng(seed + 10_000)
    w = rng.uniform(0.3, 1.5)
    return DensityGrid(a.origin, a.spacing, a.fvalues - w * b.fvalues)


def random_rational_density(rng, cells=64, lo=0, hi=9):
    """1D exact probability grid on [0, 1] with integer weights in [lo, hi]."""
    w = rng.integers(lo, hi + 1, size=cells)
    if w.sum() == 0:
        w[0] = 1
    total = int(w.sum())
    vals = [Fraction(int(x) * cells, total) for x in w]
    return DensityGrid.exact((0,), (Fraction(1, cells),), vals)
