"""Exact rational predicates and halfspace dichotomies of colored point sets."""
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm

import numpy as np

from .errors import DegenerateSpan, DimensionMismatch, NonGeneralPosition


def to_rational(x):
    """Exact Fraction from an int, Fraction, float (binary value) or a "p/q"/decimal string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(float(x))


def as_point(coords):
    return tuple(to_rational(c) for c in coords)


def _sign(v):
    return int(v > 0) - int(v < 0)


def _det_int(M):
    """Bareiss fraction-free determinant of a square integer matrix."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(row) for row in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for r in range(k + 1, n):
                if A[r][k] != 0:
                    A[k], A[r] = A[r], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def _primitive(coeffs):
    """Divide an integer vector by its gcd and make the first nonzero entry positive."""
    g = 0
    for c in coeffs:
        g = gcd(g, c)
    if g == 0:
        return tuple(coeffs)
    out = [c // g for c in coeffs]
    for c in out:
        if c != 0:
            if c < 0:
                out = [-v for v in out]
            break
    return tuple(out)


@dataclass(frozen=True)
class AffineFunctional:
    """h(x) = normal . x + offset."""

    normal: tuple
    offset: object = 0

    def __post_init__(self):
        object.__setattr__(self, "normal", tuple(self.normal))

    @property
    def dim(self):
        return len(self.normal)

    @property
    def is_degenerate(self):
        return all(a == 0 for a in self.normal)

    def __call__(self, x):
        if len(x) != self.dim:
            raise DimensionMismatch(f"point has dim {len(x)}, functional has dim {self.dim}")
        return sum(a * xi for a, xi in zip(self.normal, x)) + self.offset

    def __neg__(self):
        return AffineFunctional(tuple(-a for a in self.normal), -self.offset)

    def is_rational(self):
        return all(isinstance(a, (int, Fraction)) for a in self.normal + (self.offset,))

    def canonical(self):
        """Primitive integer representative with the first nonzero normal coordinate positive."""
        vals = [to_rational(a) for a in self.normal] + [to_rational(self.offset)]
        den = 1
        for v in vals:
            den = lcm(den, v.denominator)
        ints = _primitive([int(v * den) for v in vals])
        return AffineFunctional(ints[:-1], ints[-1])

    def as_tuple(self):
        return self.normal + (self.offset,)


@dataclass(frozen=True)
class Halfspace:
    """Closed halfspace {x : sense * h(x) >= 0}, or one of the degenerate sets.

    ``kind`` is "none" for a proper halfspace, "empty" for the empty set and
    "full" for the whole space. A functional with zero normal always yields a
    degenerate halfspace.
    """

    functional: AffineFunctional
    sense: int = 1
    kind: str = "none"

    def __post_init__(self):
        if self.sense not in (1, -1):
            raise ValueError("sense must be +1 or -1")
        if self.functional.is_degenerate and self.kind == "none":
            inside = self.sense * self.functional.offset >= 0
            object.__setattr__(self, "kind", "full" if inside else "empty")
        if self.kind not in ("none", "empty", "full"):
            raise ValueError(f"unknown halfspace kind {self.kind!r}")

    @classmethod
    def empty(cls, dim):
        return cls(AffineFunctional((0,) * dim, -1), 1, "empty")

    @classmethod
    def full(cls, dim):
        return cls(AffineFunctional((0,) * dim, 1), 1, "full")

    @property
    def dim(self):
        return self.functional.dim

    @property
    def is_degenerate(self):
        return self.kind != "none"

    def side(self, x):
        """+1 strictly inside, -1 strictly outside, 0 on the boundary."""
        if self.kind == "full":
            return 1
        if self.kind == "empty":
            return -1
        return self.sense * _sign(self.functional(x))

    def contains(self, x):
        return self.side(x) >= 0

    def complement(self):
        kind = {"none": "none", "empty": "full", "full": "empty"}[self.kind]
        return Halfspace(self.functional, -self.sense, kind)


@dataclass(frozen=True)
class SideAssignment:
    """Explicit side (+1/-1) for each point lying on a hyperplane."""

    sides: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "sides", tuple(sorted((int(i), int(s)) for i, s in self.sides)))
        if any(s not in (1, -1) for _, s in self.sides):
            raise ValueError("sides must be +1 or -1")

    def as_dict(self):
        return dict(self.sides)

    @property
    def indices(self):
        return tuple(i for i, _ in self.sides)


def side_of(h, p):
    """Sign of h(p) in {-1, 0, +1}; exact when both are rational."""
    if h.dim != len(p):
        raise DimensionMismatch(f"functional dim {h.dim} vs point dim {len(p)}")
    return _sign(h(p))


def span_hyperplane(points):
    """Canonical integer functional vanishing on d affinely independent points of R^d."""
    pts = [as_point(p) for p in points]
    if not pts:
        raise DegenerateSpan("no points")
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise DimensionMismatch("points of mixed dimension")
    if len(pts) != d:
        raise DegenerateSpan(f"need exactly {d} points to span a hyperplane in R^{d}, got {len(pts)}")
    rows = []
    for p in pts:
        den = 1
        for c in p:
            den = lcm(den, c.denominator)
        rows.append([int(c * den) for c in p] + [den])
    cof = []
    for k in range(d + 1):
        minor = [row[:k] + row[k + 1:] for row in rows]
        cof.append((-1) ** k * _det_int(minor))
    if all(c == 0 for c in cof[:d]):
        raise DegenerateSpan("points are affinely dependent")
    ints = _primitive(cof)
    return AffineFunctional(ints[:d], ints[d])


# ---------------------------------------------------------------------------
# colored point sets
# ---------------------------------------------------------------------------

def _int_coords(points):
    den = 1
    for p in points:
        for c in p:
            den = lcm(den, c.denominator)
    ints = [[int(c * den) for c in p] for p in points]
    return ints, den


def _as_array(ints, d):
    bound = max((abs(v) for row in ints for v in row), default=0)
    safe = d <= 3 and 64 * max(bound, 1) ** max(d, 1) < 2 ** 62
    arr = np.array(ints, dtype=np.int64 if safe else object)
    return arr.reshape(len(ints), d), safe


def _orientation_dets(P, combos):
    """det(p_1 - p_0, ..., p_d - p_0) for every (d+1)-subset in ``combos``."""
    d = P.shape[1]
    base = P[combos[:, 0]]
    E = [P[combos[:, t]] - base for t in range(1, d + 1)]
    if d == 1:
        return E[0][:, 0]
    if d == 2:
        return E[0][:, 0] * E[1][:, 1] - E[0][:, 1] * E[1][:, 0]
    if d == 3:
        a, b, c = E
        return (a[:, 0] * (b[:, 1] * c[:, 2] - b[:, 2] * c[:, 1])
                - a[:, 1] * (b[:, 0] * c[:, 2] - b[:, 2] * c[:, 0])
                + a[:, 2] * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0]))
    out = []
    for row in combos:
        b0 = P[row[0]]
        out.append(_det_int([[int(v) for v in P[r] - b0] for r in row[1:]]))
    return np.array(out, dtype=object)


def _hyperplanes(P, combos):
    """Integer (normals, offsets) of the hyperplanes through each d-subset."""
    d = P.shape[1]
    base = P[combos[:, 0]]
    if d == 1:
        normals = np.ones((len(combos), 1), dtype=P.dtype)
    elif d == 2:
        e = P[combos[:, 1]] - base
        normals = np.stack([-e[:, 1], e[:, 0]], axis=1)
    elif d == 3:
        a = P[combos[:, 1]] - base
        b = P[combos[:, 2]] - base
        normals = np.stack([a[:, 1] * b[:, 2] - a[:, 2] * b[:, 1],
                            a[:, 2] * b[:, 0] - a[:, 0] * b[:, 2],
                            a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]], axis=1)
    else:
        rows = []
        for row in combos:
            f = span_hyperplane([tuple(Fraction(int(v)) for v in P[r]) for r in row])
            rows.append(f.normal)
        normals = np.array(rows, dtype=object)
    offsets = -(normals * base).sum(axis=1)
    return normals, offsets


@dataclass(frozen=True)
class ColoredPointSet:
    """Rational points in R^d carrying colors 0..d, n points per color."""

    points: tuple
    colors: tuple
    check_general_position: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        pts = tuple(as_point(p) for p in self.points)
        cols = tuple(int(c) for c in self.colors)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "colors", cols)
        if not pts:
            raise ValueError("empty point set")
        if len(pts) != len(cols):
            raise ValueError("points and colors differ in length")
        d = len(pts[0])
        if d < 1:
            raise ValueError("dimension must be positive")
        if any(len(p) != d for p in pts):
            raise DimensionMismatch("points of mixed dimension")
        if any(c < 0 or c > d for c in cols):
            raise ValueError(f"colors must lie in 0..{d}")
        counts = [cols.count(c) for c in range(d + 1)]
        if len(set(counts)) != 1 or counts[0] == 0:
            raise ValueError(f"need the same positive number of points per color, got {counts}")
        if self.check_general_position:
            bad = self.general_position_violation()
            if bad is not None:
                raise NonGeneralPosition(f"points {bad} lie on a common hyperplane")

    @property
    def dim(self):
        return len(self.points[0])

    @property
    def n(self):
        return len(self.points) // (self.dim + 1)

    @property
    def colors_count(self):
        return self.dim + 1

    def __len__(self):
        return len(self.points)

    @cached_property
    def int_coords(self):
        """(array, scale): integer coordinates equal to scale * points."""
        ints, den = _int_coords(self.points)
        arr, _ = _as_array(ints, self.dim)
        return arr, den

    @cached_property
    def color_array(self):
        return np.array(self.colors, dtype=np.int64)

    def general_position_violation(self):
        """Indices of d+1 points on a common hyperplane, or None."""
        d, N = self.dim, len(self.points)
        if N < d + 1:
            for i, j in itertools.combinations(range(N), 2):
                if self.points[i] == self.points[j]:
                    return (i, j)
            return None
        P, _ = self.int_coords
        combos = np.array(list(itertools.combinations(range(N), d + 1)), dtype=np.int64)
        dets = _orientation_dets(P, combos)
        zero = np.flatnonzero(dets == 0)
        if zero.size:
            return tuple(int(i) for i in combos[zero[0]])
        return None

    def by_color(self, c):
        return [p for p, col in zip(self.points, self.colors) if col == c]


class Arrangement:
    """All hyperplanes through d points of a set, canonically sorted.

    ``keys[k]`` is the canonical integer functional (original coordinates) of
    the k-th hyperplane; ``signs[:, k]`` are the exact sides of every point.
    """

    def __init__(self, P, scale, d):
        N = P.shape[0]
        self.d = d
        self.combos = np.array(list(itertools.combinations(range(N), d)), dtype=np.int64).reshape(-1, d)
        normals, offsets = _hyperplanes(P, self.combos)
        keys = []
        flip = np.ones(len(self.combos), dtype=np.int64)
        for k in range(len(self.combos)):
            nk = [int(v) for v in normals[k]]
            lead = next(v for v in nk if v != 0)
            if lead < 0:
                flip[k] = -1
            keys.append(_primitive([v * scale for v in nk] + [int(offsets[k])]))
        vals = P @ normals.T + offsets[None, :]
        signs = ((vals > 0).astype(np.int8) - (vals < 0).astype(np.int8)) * flip[None, :].astype(np.int8)
        order = sorted(range(len(keys)), key=keys.__getitem__)
        self.order = np.array(order, dtype=np.int64)
        self.keys = [keys[k] for k in order]
        self.combos = self.combos[self.order]
        self.signs = np.ascontiguousarray(signs[:, self.order])

    def functional(self, k):
        key = self.keys[k]
        return AffineFunctional(key[:-1], key[-1])


def _arrangement(s):
    P, scale = s.int_coords
    return Arrangement(P, scale, s.dim)


def _assignments(k):
    """All side tuples over k incident points, '-' before '+', lexicographic."""
    return list(itertools.product((-1, 1), repeat=k))


def enumerate_dichotomies(s):
    """Yield (Halfspace, SideAssignment) for every hyperplane through d points.

    Hyperplanes come in canonical lexicographic order; for each one all 2^k
    assignments of its k incident points follow. The Halfspace is the closed
    positive side of the canonical functional; the assignment decides which
    side the incident points count toward.
    """
    arr = _arrangement(s)
    for k in range(len(arr.keys)):
        h = arr.functional(k)
        incident = [int(i) for i in np.flatnonzero(arr.signs[:, k] == 0)]
        for sides in _assignments(len(incident)):
            yield Halfspace(h, 1), SideAssignment(zip(incident, sides))


def plus_side(s, halfspace, assignment):
    """Indices counted on the + side of a (halfspace, assignment) dichotomy."""
    fixed = assignment.as_dict()
    out = []
    for i, p in enumerate(s.points):
        side = halfspace.side(p)
        if side == 0:
            if i not in fixed:
                raise ValueError(f"point {i} lies on the hyperplane but has no assigned side")
            side = fixed[i]
        if side > 0:
            out.append(i)
    return frozenset(out)


def separable_subsets(s):
    """Bitmasks of both sides of every dichotomy from :func:`enumerate_dichotomies`.

    The stream fixes one orientation per hyperplane, so each element stands
    for an unordered split; its two sides are both separable subsets.
    """
    arr = _arrangement(s)
    N = len(s)
    everything = (1 << N) - 1
    weights = np.array([1 << i for i in range(N)], dtype=object)
    out = set()
    for k in range(len(arr.keys)):
        col = arr.signs[:, k]
        base = int((weights * (col > 0)).sum())
        incident = [int(i) for i in np.flatnonzero(col == 0)]
        for sides in _assignments(len(incident)):
            mask = base
            for i, sd in zip(incident, sides):
                if sd > 0:
                    mask |= 1 << i
            out.add(mask)
            out.add(everything ^ mask)
    return out


def separable_count_formula(N, d):
    """Number of linearly separable subsets of N points in general position in R^d."""
    from math import comb
    return 2 * sum(comb(N - 1, i) for i in range(d + 1))


def strictly_inside_hull(P, inside_idx, hull_idx):
    """True iff every point of ``inside_idx`` is interior to conv(P[hull_idx]). Exact."""
    d = P.shape[1]
    H = P[list(hull_idx)]
    Q = P[list(inside_idx)]
    if len(hull_idx) < d + 1:
        return False
    if d == 1:
        lo, hi = H[:, 0].min(), H[:, 0].max()
        return bool(((Q[:, 0] > lo) & (Q[:, 0] < hi)).all())
    combos = np.array(list(itertools.combinations(range(len(hull_idx)), d)), dtype=np.int64)
    normals, offsets = _hyperplanes(H, combos)
    hv = H @ normals.T + offsets[None, :]
    qv = Q @ normals.T + offsets[None, :]
    pos = (hv > 0).sum(axis=0)
    neg = (hv < 0).sum(axis=0)
    facet = (pos == 0) | (neg == 0)
    full = (pos + neg) > 0
    if not (facet & full).any():
        return False  # hull is not full-dimensional
    for k in np.flatnonzero(facet & full):
        inner = 1 if pos[k] > 0 else -1
        if not ((qv[:, k] * inner) > 0).all():
            return False
    return True
