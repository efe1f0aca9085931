"""Piecewise-constant densities on axis-aligned grids (d = 1 or 2)."""
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import kernels
from .errors import DimensionMismatch
from .geometry import AffineFunctional, Halfspace, to_rational


@dataclass(frozen=True, eq=False)
class DensityGrid:
    """Cell values on a regular grid.

    1D: ``values`` has shape (nx,), cell i is [x0 + i hx, x0 + (i+1) hx].
    2D: ``values`` has shape (ny, nx), row j covers y in [y0 + j hy, y0 + (j+1) hy].
    Exact grids store Fractions (object dtype); others store float64.
    """

    origin: tuple
    spacing: tuple
    values: np.ndarray

    def __post_init__(self):
        origin = tuple(to_rational(v) for v in self.origin)
        spacing = tuple(to_rational(v) for v in self.spacing)
        vals = np.asarray(self.values)
        if vals.dtype != object:
            vals = vals.astype(np.float64)
        vals = vals.copy()
        vals.setflags(write=False)
        if vals.ndim not in (1, 2):
            raise ValueError("only 1D and 2D grids are supported")
        if len(origin) != vals.ndim or len(spacing) != vals.ndim:
            raise DimensionMismatch("origin/spacing length must equal grid dimension")
        if any(h <= 0 for h in spacing):
            raise ValueError("cell sizes must be positive")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "values", vals)

    @classmethod
    def exact(cls, origin, spacing, values):
        vals = np.array([to_rational(v) for v in np.asarray(values, dtype=object).ravel()], dtype=object)
        return cls(origin, spacing, vals.reshape(np.shape(values)))

    @property
    def dim(self):
        return self.values.ndim

    @property
    def shape(self):
        return self.values.shape

    @property
    def is_exact(self):
        return self.values.dtype == object

    @property
    def cell_volume(self):
        return math.prod(self.spacing)

    @cached_property
    def fvalues(self):
        return self.values.astype(np.float64)

    @cached_property
    def total(self):
        if self.is_exact:
            return sum(self.values.ravel(), Fraction(0)) * self.cell_volume
        return float(self.fvalues.sum()) * float(self.cell_volume)

    @cached_property
    def total_variation(self):
        if self.is_exact:
            return sum((abs(v) for v in self.values.ravel()), Fraction(0)) * self.cell_volume
        return float(np.abs(self.fvalues).sum()) * float(self.cell_volume)

    @property
    def is_measure(self):
        return bool((self.values >= 0).all())

    def bounds(self):
        """((xmin, xmax), [(ymin, ymax)]) as Fractions."""
        n = self.shape[::-1]
        return tuple((o, o + h * k) for o, h, k in zip(self.origin, self.spacing, n))

    def same_geometry(self, other):
        return self.shape == other.shape and self.origin == other.origin and self.spacing == other.spacing

    def normalized(self):
        t = self.total
        if t == 0:
            raise ValueError("cannot normalize a grid with zero total")
        return DensityGrid(self.origin, self.spacing, self.values / t)

    def with_values(self, values):
        return DensityGrid(self.origin, self.spacing, values)

    def to_float(self):
        return self if not self.is_exact else DensityGrid(self.origin, self.spacing, self.fvalues)

    def __eq__(self, other):
        if not isinstance(other, DensityGrid):
            return NotImplemented
        return (self.same_geometry(other) and self.values.dtype == other.values.dtype
                and bool(np.all(self.values == other.values)))

    __hash__ = None

    def cell_centers(self, k=1):
        """Sub-cell centre points (k x k per cell in 2D, k per cell in 1D) as floats."""
        if self.dim == 1:
            (nx,) = self.shape
            x0, hx = float(self.origin[0]), float(self.spacing[0])
            return x0 + (np.arange(nx * k) + 0.5) * hx / k
        ny, nx = self.shape
        x0, y0 = map(float, self.origin)
        hx, hy = map(float, self.spacing)
        xs = x0 + (np.arange(nx * k) + 0.5) * hx / k
        ys = y0 + (np.arange(ny * k) + 0.5) * hy / k
        X, Y = np.meshgrid(xs, ys)
        return np.column_stack([X.ravel(), Y.ravel()])

    def sample_weights(self, k=1):
        """Mass carried by each sub-cell from :meth:`cell_centers`, float."""
        v = self.fvalues * (float(self.cell_volume) / k ** self.dim)
        if self.dim == 1:
            return np.repeat(v, k)
        return np.repeat(np.repeat(v, k, axis=0), k, axis=1).ravel()


def exactify(g):
    """Exact copy of a float grid (each double converted to its binary value)."""
    if g.is_exact:
        return g
    vals = np.array([Fraction(float(v)) for v in g.values.ravel()], dtype=object).reshape(g.shape)
    return DensityGrid(g.origin, g.spacing, vals)


def combine(terms):
    """Linear combination sum(c * grid) of grids sharing one geometry."""
    terms = list(terms)
    first = terms[0][1]
    for _, g in terms[1:]:
        if not g.same_geometry(first):
            raise DimensionMismatch("grids must share origin, spacing and shape to be combined")
    exact = all(g.is_exact for _, g in terms) and all(isinstance(c, (int, Fraction)) for c, _ in terms)
    if exact:
        vals = sum((g.values * Fraction(c) for c, g in terms[1:]), terms[0][1].values * Fraction(terms[0][0]))
    else:
        vals = sum(float(c) * g.fvalues for c, g in terms)
    return DensityGrid(first.origin, first.spacing, vals)


# ---------------------------------------------------------------------------
# halfspace mass
# ---------------------------------------------------------------------------

def _mass_1d_exact(g, a, c, sense):
    # inside = {sense * (a x + c) >= 0} with a != 0
    t = -Fraction(c) / Fraction(a)
    below = _cum_1d(g.values, g.origin[0], g.spacing[0], t, Fraction(0))
    return g.total - below if sense * a > 0 else below


def _cum_1d(values, x0, h, t, zero):
    n = len(values)
    pos = (t - x0) / h
    if pos <= 0:
        return zero
    if pos >= n:
        return sum(values, zero) * h
    i = math.floor(pos)
    return (sum(values[:i], zero) + values[i] * (pos - i)) * h


def _clip_area_exact(xs, ys, a, b, c):
    """Area of the rectangle xs x ys intersected with {a x + b y + c >= 0}, in Fractions."""
    poly = [(xs[0], ys[0]), (xs[1], ys[0]), (xs[1], ys[1]), (xs[0], ys[1])]
    out = []
    for k in range(4):
        p, q = poly[k], poly[(k + 1) % 4]
        gp = a * p[0] + b * p[1] + c
        gq = a * q[0] + b * q[1] + c
        if gp >= 0:
            out.append(p)
        if (gp >= 0) != (gq >= 0):
            t = gp / (gp - gq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    if len(out) < 3:
        return Fraction(0)
    s = Fraction(0)
    for k in range(len(out)):
        x1, y1 = out[k]
        x2, y2 = out[(k + 1) % len(out)]
        s += x1 * y2 - x2 * y1
    return s / 2


def _mass_2d_exact(g, a, b, c, sense):
    a, b, c = sense * Fraction(a), sense * Fraction(b), sense * Fraction(c)
    ny, nx = g.shape
    x0, y0 = g.origin
    hx, hy = g.spacing
    total = Fraction(0)
    for j in range(ny):
        ys = (y0 + j * hy, y0 + (j + 1) * hy)
        for i in range(nx):
            v = g.values[j, i]
            if v == 0:
                continue
            total += v * _clip_area_exact((x0 + i * hx, x0 + (i + 1) * hx), ys, a, b, c)
    return total


def halfspace_mass(g, H, exact=None):
    """Integral of the density of ``g`` over the closed halfspace ``H``.

    ``exact=None`` uses rational arithmetic when the grid is exact and the
    halfspace has rational (or float-convertible) coefficients; ``exact=True``
    forces it (floats are converted exactly), ``exact=False`` forces doubles.
    """
    if H.dim != g.dim:
        raise DimensionMismatch(f"halfspace dim {H.dim} vs grid dim {g.dim}")
    if exact is None:
        exact = g.is_exact and H.functional.is_rational()
    if H.kind == "empty":
        return Fraction(0) if exact else 0.0
    if H.kind == "full":
        return to_rational(g.total) if exact else float(g.total)
    f = H.functional
    if exact:
        if not g.is_exact:
            g = exactify(g)
        normal = [to_rational(v) for v in f.normal]
        off = to_rational(f.offset)
        if g.dim == 1:
            return _mass_1d_exact(g, normal[0], off, H.sense)
        return _mass_2d_exact(g, normal[0], normal[1], off, H.sense)
    normal = [float(v) * H.sense for v in f.normal]
    off = float(f.offset) * H.sense
    if g.dim == 1:
        a = normal[0]
        t = -off / a
        vals = g.fvalues
        below = _cum_1d_float(vals, float(g.origin[0]), float(g.spacing[0]), t)
        return float(g.total) - below if a > 0 else below
    x0, y0 = map(float, g.origin)
    hx, hy = map(float, g.spacing)
    return float(kernels.rect_halfplane_mass(g.fvalues, x0, y0, hx, hy, normal[0], normal[1], off))


def _cum_1d_float(vals, x0, h, t):
    n = vals.size
    pos = (t - x0) / h
    if pos <= 0:
        return 0.0
    if pos >= n:
        return float(vals.sum()) * h
    i = int(math.floor(pos))
    return (float(vals[:i].sum()) + float(vals[i]) * (pos - i)) * h


def halfspace_from_coeffs(coeffs, sense=1):
    """Halfspace {coeffs[:-1] . x + coeffs[-1] >= 0} (times ``sense``)."""
    coeffs = list(coeffs)
    return Halfspace(AffineFunctional(tuple(coeffs[:-1]), coeffs[-1]), sense)
