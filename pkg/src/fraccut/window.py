"""Convex sets cutting the same fraction of several measures.

d = 1 is exact: an interval with fraction 1/m of two step densities, and the
counterexample pairs for every other alpha. d = 2 uses generalized Voronoi
partitions (cells of pointwise minima of a0 + a.x + b|x|^2) fitted by a
derivative-free multistart, then the cell with the largest b, which is convex.
"""
import bisect
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np
from scipy.optimize import least_squares, minimize

from . import kernels
from .errors import NoConvergence, NoRoot, NotRepresentable
from .geometry import to_rational
from .grid import DensityGrid, exactify

# ---------------------------------------------------------------------------
# d = 1, exact
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntervalWindow:
    a: Fraction
    b: Fraction
    fractions: tuple


class _StepCDF:
    """Exact CDF of a 1D step density, with its breakpoints."""

    def __init__(self, g):
        if g.dim != 1:
            raise ValueError("1D grid expected")
        g = exactify(g)
        x0, h = g.origin[0], g.spacing[0]
        self.edges = [x0 + i * h for i in range(len(g.values) + 1)]
        self.dens = list(g.values)
        cum = [Fraction(0)]
        for v in self.dens:
            cum.append(cum[-1] + v * h)
        self.cum = cum

    @property
    def total(self):
        return self.cum[-1]

    def __call__(self, x):
        e = self.edges
        if x <= e[0]:
            return Fraction(0)
        if x >= e[-1]:
            return self.cum[-1]
        i = bisect.bisect_right(e, x) - 1
        return self.cum[i] + self.dens[i] * (x - e[i])

    def density(self, lo, hi):
        """Density on the open interval (lo, hi), which must not contain an edge."""
        e = self.edges
        mid = (lo + hi) / 2
        if mid <= e[0] or mid >= e[-1]:
            return Fraction(0)
        return self.dens[bisect.bisect_right(e, mid) - 1]

    def lowest_inverse(self, v):
        """Smallest x in the grid range with F(x) = v, or None."""
        if v < 0 or v > self.cum[-1]:
            return None
        i = bisect.bisect_left(self.cum, v)
        if self.cum[i] == v:
            return self.edges[i]
        # cum[i-1] < v < cum[i], density positive on cell i-1
        return self.edges[i - 1] + (v - self.cum[i - 1]) / self.dens[i - 1]


def _alpha_as_unit(alpha):
    alpha = to_rational(alpha)
    if alpha <= 0 or alpha.numerator != 1 or alpha.denominator < 2:
        raise NotRepresentable(f"alpha must be 1/m with integer m >= 2, got {alpha}")
    return alpha


def _lex_min(rows, box_a, box_b):
    """Lexicographically least (a, b) in the box with r_b b - r_a a = c for every row.

    a < b needs no check: both fractions equal alpha > 0 only when b > a.
    """
    (alo, ahi), (blo, bhi) = box_a, box_b
    live = []
    for rb, ra, c in rows:
        if rb == 0 and ra == 0:
            if c != 0:
                return None
            continue
        live.append((rb, ra, c))
    if not live:
        return alo, blo
    rb, ra, c = live[0]
    for rb2, ra2, c2 in live[1:]:
        det = ra * rb2 - rb * ra2
        if det != 0:
            a = (rb * c2 - rb2 * c) / det
            b = (ra * c2 - ra2 * c) / det
            return (a, b) if alo <= a <= ahi and blo <= b <= bhi else None
        if rb * c2 != rb2 * c or ra * c2 != ra2 * c:
            return None  # parallel, inconsistent
    if rb == 0:
        a = Fraction(-c, 1) / ra
        return (a, blo) if alo <= a <= ahi else None
    # b = slope a + icpt; keep blo <= b <= bhi
    slope, icpt = Fraction(ra) / rb, Fraction(c) / rb
    lo, hi = alo, ahi
    if slope == 0:
        if not blo <= icpt <= bhi:
            return None
    else:
        t1, t2 = (blo - icpt) / slope, (bhi - icpt) / slope
        lo, hi = max(lo, min(t1, t2)), min(hi, max(t1, t2))
    if lo > hi:
        return None
    return lo, slope * lo + icpt


def find_interval_window(m0, m1, alpha):
    """Interval [a, b] with exactly ``alpha`` = 1/m of both step densities.

    Both cumulative functions are linear on every pair of breakpoint cells, so
    each pair is a 2x2 rational linear system. Cells for a are scanned left
    to right; the first solution (smallest a, then smallest b) is returned.
    """
    alpha = _alpha_as_unit(alpha)
    F = [_StepCDF(m0), _StepCDF(m1)]
    pts = sorted(set(F[0].edges) | set(F[1].edges))
    vals = [[f(p) for p in pts] for f in F]
    nc = len(pts) - 1
    for i in range(nc):
        best = None
        p, q = pts[i], pts[i + 1]
        da = [f.density(p, q) for f in F]
        # b-cells where F0(b) can equal F0(a) + alpha for some a in [p, q]
        lo_v, hi_v = vals[0][i] + alpha, vals[0][i + 1] + alpha
        j0 = max(i, bisect.bisect_left(vals[0], lo_v) - 1)
        for j in range(j0, nc):
            if vals[0][j] > hi_v:
                break
            r, s = pts[j], pts[j + 1]
            rows = []
            for k, f in enumerate(F):
                db = f.density(r, s)
                # F(b) - F(a) = alpha with F linear on each cell
                c = alpha - vals[k][j] + db * r + vals[k][i] - da[k] * p
                rows.append((db, da[k], c))
            sol = _lex_min(rows, (p, q), (r, s))
            if sol is not None and (best is None or sol < best):
                best = sol
        if best is not None:
            a, b = best
            fr = tuple(f(b) - f(a) for f in F)
            if fr != (alpha, alpha):  # pragma: no cover - guarded by the algebra above
                raise AssertionError("interval window failed exact re-check")
            return IntervalWindow(a, b, fr)
    raise NoRoot(f"no interval carries {alpha} of both measures (totals {F[0].total}, {F[1].total})")


def interval_fraction(g, a, b):
    f = _StepCDF(g)
    return f(to_rational(b)) - f(to_rational(a))


def build_interval_counterexample(n, alpha, eps_len):
    """Pair (m0, m1) on [0, 1] with no interval carrying alpha of both.

    m0 is uniform; m1 puts mass 1/n on each of n blocks of width ``eps_len``
    centred at i/(n+1). Needs 1/(n+1) < alpha < 1/n and
    0 < eps_len < alpha - 1/(n+1).
    """
    alpha, eps_len = to_rational(alpha), to_rational(eps_len)
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")
    if not Fraction(1, n + 1) < alpha < Fraction(1, n):
        raise ValueError(f"alpha must satisfy 1/{n + 1} < alpha < 1/{n}")
    if not 0 < eps_len < alpha - Fraction(1, n + 1):
        raise ValueError(f"eps_len must satisfy 0 < eps_len < alpha - 1/{n + 1} = {alpha - Fraction(1, n + 1)}")
    edges = []
    for i in range(1, n + 1):
        c = Fraction(i, n + 1)
        edges += [c - eps_len / 2, c + eps_len / 2]
    L = math.lcm(*(e.denominator for e in edges))
    h = Fraction(1, L)
    m0 = DensityGrid.exact((0,), (h,), [1] * L)
    vals = [Fraction(0)] * L
    dens = Fraction(1, n) / eps_len
    for i in range(n):
        lo, hi = int(edges[2 * i] * L), int(edges[2 * i + 1] * L)
        for k in range(lo, hi):
            vals[k] = dens
    m1 = DensityGrid.exact((0,), (h,), vals)
    return m0, m1


@dataclass(frozen=True)
class CounterexampleReport:
    impossible: bool
    min_m1_over_family: Fraction
    max_m1_over_family: Fraction


def verify_interval_counterexample(m0, m1, alpha):
    """Exact sweep over {[a, b(a)] : m0([a, b(a)]) = alpha}.

    b(a) is the lowest such endpoint, so g(a) = m1([a, b(a)]) is piecewise
    linear between the nodes where a or b(a) crosses a breakpoint; extrema sit
    on nodes. ``impossible`` is true iff g never equals alpha.
    """
    alpha = to_rational(alpha)
    F0, F1 = _StepCDF(m0), _StepCDF(m1)
    edges = sorted(set(F0.edges) | set(F1.edges))
    a_lo = F0.lowest_inverse(Fraction(0))
    a_hi = F0.lowest_inverse(F0.total - alpha)
    if a_hi is None:
        raise ValueError("alpha exceeds the mass of m0")
    nodes = {a_lo, a_hi}
    for e in edges:
        if a_lo <= e <= a_hi:
            nodes.add(e)
        a = F0.lowest_inverse(F0(e) - alpha)
        if a is not None and a_lo <= a <= a_hi:
            nodes.add(a)
    g = []
    for a in sorted(nodes):
        b = F0.lowest_inverse(F0(a) + alpha)
        g.append(F1(b) - F1(a))
    lo, hi = min(g), max(g)
    return CounterexampleReport(not lo <= alpha <= hi, lo, hi)


# ---------------------------------------------------------------------------
# d = 2, generalized Voronoi partitions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticFunctional:
    """f(x) = a0 + a . x + b |x|^2."""

    a0: float
    a: tuple
    b: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.a0 + x @ np.asarray(self.a) + self.b * np.sum(x * x, axis=-1)

    def as_row(self):
        return (float(self.a0), *map(float, self.a), float(self.b))

    @classmethod
    def from_row(cls, row):
        return cls(float(row[0]), tuple(float(v) for v in row[1:-1]), float(row[-1]))


@dataclass(frozen=True)
class GVPartition:
    functionals: tuple
    cell_measures: np.ndarray | None = field(default=None, compare=False)
    residual: float | None = field(default=None, compare=False)

    @property
    def m(self):
        return len(self.functionals)

    def matrix(self):
        return np.array([f.as_row() for f in self.functionals])

    def cell_of(self, x):
        """Index of the minimising functional at each point (lowest index on ties)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        vals = np.stack([f(x) for f in self.functionals], axis=1)
        return np.argmin(vals, axis=1)


@dataclass(frozen=True)
class Constraint:
    """{q |x|^2 + l . x + c <= 0} with q >= 0; a halfplane when q == 0, else a disk."""

    kind: str
    q: float
    l: tuple
    c: float

    def value(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return self.q * np.sum(x * x, axis=1) + x @ np.asarray(self.l) + self.c

    def disk(self):
        """(centre, squared radius) of a disk constraint."""
        centre = -np.asarray(self.l) / (2 * self.q)
        return centre, float(centre @ centre - self.c / self.q)


@dataclass(frozen=True)
class ConvexCell:
    index: int
    constraints: tuple

    def contains(self, x, slack=0.0):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        ok = np.ones(len(x), dtype=bool)
        for con in self.constraints:
            ok &= con.value(x) <= slack
        return ok


def extract_convex_cell(p):
    """Cell of the functional with the largest b (lowest index on ties), constraints classified."""
    bs = [f.b for f in p.functionals]
    i = int(np.argmax(bs))
    fi = p.functionals[i]
    cons = []
    for j, fj in enumerate(p.functionals):
        if j == i:
            continue
        q = fi.b - fj.b
        cons.append(Constraint("halfplane" if q == 0 else "disk", q,
                               tuple(x - y for x, y in zip(fi.a, fj.a)), fi.a0 - fj.a0))
    return ConvexCell(i, tuple(cons))


@dataclass(frozen=True)
class GVConfig:
    tol: float = 1e-3
    subsample: int = 4
    verify_subsample: int = 8
    starts: int = 20
    budget: int = 10_000
    seed: int = 0
    box: float = 10.0


class _Cloud:
    """Weighted sample points of several measures in a unit-square frame."""

    def __init__(self, points, weights, origin, scale):
        self.points = points
        self.weights = weights
        self.origin = origin
        self.scale = scale

    @classmethod
    def from_grids(cls, grids, k):
        if any(g.dim != 2 for g in grids):
            raise ValueError("generalized Voronoi partitions need 2D grids")
        lo = np.array([[float(b[0]) for b in g.bounds()] for g in grids]).min(axis=0)
        hi = np.array([[float(b[1]) for b in g.bounds()] for g in grids]).max(axis=0)
        scale = float((hi - lo).max())
        pts, wts = [], []
        K = len(grids)
        for j, g in enumerate(grids):
            w = g.sample_weights(k) / float(g.total)
            keep = w != 0
            pts.append(g.cell_centers(k)[keep])
            col = np.zeros((int(keep.sum()), K))
            col[:, j] = w[keep]
            wts.append(col)
        pts = (np.vstack(pts) - lo) / scale
        return cls(np.ascontiguousarray(pts), np.ascontiguousarray(np.vstack(wts)), lo, scale)

    def restricted(self, mask):
        w = self.weights * mask[:, None]
        tot = w.sum(axis=0)
        if np.any(tot <= 0):
            raise NoConvergence("restriction removed all mass of a measure", None, math.inf, None)
        return _Cloud(self.points, w / tot, self.origin, self.scale)

    def to_raw(self, funcs):
        """Functional rows (a0, a1, a2, b) from the unit frame to raw coordinates."""
        o, L = self.origin, self.scale
        out = []
        for a0, a1, a2, b in funcs:
            a = np.array([a1, a2])
            out.append((a0 - a @ o / L + b * (o @ o) / L ** 2,
                        *(a / L - 2 * b * o / L ** 2), b / L ** 2))
        return np.array(out)


def _funcs(theta, m):
    return np.vstack([np.asarray(theta, dtype=float).reshape(m - 1, 4), np.zeros((1, 4))])


def _measures(cloud, funcs, pixel, soft):
    return kernels.cell_measures(cloud.points, cloud.weights, funcs, pixel, soft)


def _seed_starts(m, cfg, cloud):
    rng = np.random.default_rng(cfg.seed)
    mass = cloud.weights.sum(axis=1)
    mass = mass / mass.sum()
    centre = mass @ cloud.points
    spread = math.sqrt(float(mass @ np.sum((cloud.points - centre) ** 2, axis=1)))
    starts = []
    # power-like seed: Voronoi of m sites on a circle around the centre of mass
    sites = centre + 0.5 * spread * np.array([[math.cos(2 * math.pi * i / m), math.sin(2 * math.pi * i / m)]
                                              for i in range(m)])
    f = np.array([[s @ s, -2 * s[0], -2 * s[1], 0.0] for s in sites])
    starts.append((f[:-1] - f[-1]).ravel())
    for k in range(cfg.starts - 1):
        family = k % 3
        if family == 2:
            f = _nested_start(cloud, mass, m, centre + rng.normal(scale=0.3 * spread, size=2), rng)
        else:
            sites = cloud.points[rng.choice(len(mass), size=m, p=mass)]
            # family 0: multiplicatively weighted Voronoi, f_i = w_i |x - s_i|^2, every
            # site lies in its own cell; family 1: power diagram, straight boundaries
            ws = rng.uniform(0.5, 1.5, size=m) if family == 0 else np.ones(m)
            f = np.array([[w * (s @ s), -2 * w * s[0], -2 * w * s[1], w] for s, w in zip(sites, ws)])
            if family == 1:
                f[:, 0] += rng.uniform(-0.5, 0.5, size=m) * spread ** 2
        starts.append(np.clip((f[:-1] - f[-1]).ravel(), -cfg.box, cfg.box))
    return starts


def _nested_start(cloud, mass, m, c, rng):
    """Disk inside rings inside the outside, each holding about 1/m of the pooled mass around c."""
    r = np.sqrt(np.sum((cloud.points - c) ** 2, axis=1))
    order = np.argsort(r)
    cum = np.cumsum(mass[order])
    radii = [r[order[min(np.searchsorted(cum, q / m), len(r) - 1)]] for q in range(1, m)]
    bs = np.sort(rng.uniform(0.5, 3.0, size=m))[::-1]
    bs[-1] = 0.0
    # ring q has coefficient bs[q]; consecutive rings meet at radii[q]
    a0 = np.zeros(m)
    for q in range(m - 2, -1, -1):
        a0[q] = a0[q + 1] - (bs[q] - bs[q + 1]) * radii[q] ** 2
    f = np.array([[a + b * (c @ c), -2 * b * c[0], -2 * b * c[1], b] for a, b in zip(a0, bs)])
    return f[rng.permutation(m)]


def _fit(cloud, m, theta0, cfg, pixel, soft=True, nelder_mead=True):
    target = 1.0 / m

    def resid(theta):
        return (_measures(cloud, _funcs(theta, m), pixel, soft) - target).ravel()

    def obj(theta):
        over = np.abs(theta) - cfg.box
        pen = float(np.sum(np.where(over > 0, over, 0.0) ** 2))
        r = resid(np.clip(theta, -cfg.box, cfg.box))
        return float(r @ r) + pen

    theta = np.clip(theta0, -cfg.box, cfg.box)
    if nelder_mead:
        res = minimize(obj, theta, method="Nelder-Mead",
                       options={"maxfev": cfg.budget, "xatol": 1e-7, "fatol": 1e-12, "adaptive": True})
        theta = np.clip(res.x, -cfg.box, cfg.box)
    ls = least_squares(resid, theta, bounds=(-cfg.box, cfg.box), diff_step=1e-7, xtol=1e-15,
                       ftol=1e-15, gtol=1e-15, max_nfev=200)
    return ls.x if ls.cost * 2 <= obj(theta) else theta


def _hard_polish(cloud, m, theta, cfg, budget=2000):
    """Nelder-Mead on the hard (piecewise-constant) count from a small simplex."""
    target = 1.0 / m

    def obj(t):
        M = _measures(cloud, _funcs(np.clip(t, -cfg.box, cfg.box), m), 1.0, False)
        return float(np.max(np.abs(M - target)))

    step = 1e-3 * np.maximum(np.abs(theta), 0.05)
    simplex = np.vstack([theta] + [theta + step[i] * np.eye(len(theta))[i] for i in range(len(theta))])
    res = minimize(obj, theta, method="Nelder-Mead",
                   options={"initial_simplex": simplex, "maxfev": budget, "xatol": 1e-12, "fatol": 0.0})
    return np.clip(res.x, -cfg.box, cfg.box)


def _partition_error(cloud, theta, m):
    M = _measures(cloud, _funcs(theta, m), 1.0, False)
    return float(np.max(np.abs(M - 1.0 / m))), M


def _gv(clouds, m, cfg):
    """Fit on clouds = (optimisation cloud, verification cloud); returns (error, theta, matrix).

    Pass 1 polishes every start by least squares only; pass 2, reached when no
    start verified, runs the Nelder-Mead continuation first. The first start
    that verifies wins, otherwise the smallest error (earliest start on ties).
    """
    opt, ver = clouds
    pix_opt = 1.0 / opt.res
    starts = _seed_starts(m, cfg, opt)
    level_cfg = replace(cfg, budget=max(1, cfg.budget // 10))
    best = (math.inf, None, None)
    for nelder_mead in (False, True):
        for theta0 in starts:
            theta = theta0
            if nelder_mead:
                # smoothing continuation: wide classification ramp first, then the sample spacing
                for pix in (0.15, 0.05):
                    theta = _fit(opt, m, theta, level_cfg, pix)
            theta = _fit(opt, m, theta, level_cfg, pix_opt, nelder_mead=nelder_mead)
            err, theta, M = _refine(ver, m, theta, cfg)
            if err < best[0]:
                best = (err, theta, M)
            if err <= cfg.tol:
                return best
    return best


def _refine(ver, m, theta, cfg):
    """Push a soft-fitted theta towards the hard count on the verification samples."""
    err, M = _partition_error(ver, theta, m)
    if err > 10 * cfg.tol:
        return err, theta, M  # wrong basin, not worth polishing
    for shrink in (1, 4, 16):
        if err <= cfg.tol / 2:
            return err, theta, M
        cand = _fit(ver, m, theta, cfg, 1.0 / (ver.res * shrink), nelder_mead=False)
        e2, M2 = _partition_error(ver, cand, m)
        if e2 < err:
            theta, err, M = cand, e2, M2
    cand = _hard_polish(ver, m, theta, cfg)
    e2, M2 = _partition_error(ver, cand, m)
    if e2 < err:
        theta, err, M = cand, e2, M2
    return err, theta, M


def _clouds(grids, cfg):
    out = []
    for k in (cfg.subsample, cfg.verify_subsample):
        c = _Cloud.from_grids(grids, k)
        # samples per unit length, for the soft classification ramp
        c.res = max(g.shape[i] * k / (float(b[1] - b[0]) / c.scale) for g in grids
                    for i, b in enumerate(g.bounds()[::-1]))
        out.append(c)
    return out


def _as_partition(cloud, theta, m, M, err):
    raw = cloud.to_raw(_funcs(theta, m))
    return GVPartition(tuple(QuadraticFunctional.from_row(r) for r in raw), M, err)


def gv_equipartition(measures, m, cfg=None):
    """Generalized Voronoi partition giving every cell 1/m of every measure.

    The last functional is fixed to 0 and the other 4(m-1) coefficients are
    fitted by Nelder-Mead on a soft-classified k x k subsample (k =
    cfg.subsample), polished by least squares, and accepted when the hard
    classification at cfg.verify_subsample is within cfg.tol of 1/m.
    """
    cfg = cfg or GVConfig()
    if m not in (2, 3, 5):
        raise ValueError("m must be 2, 3 or 5")
    clouds = _clouds(measures, cfg)
    return _gv_on(clouds, m, cfg)


def _gv_on(clouds, m, cfg, stage=None):
    err, theta, M = _gv(clouds, m, cfg)
    part = _as_partition(clouds[1], theta, m, M, err)
    if err > cfg.tol:
        raise NoConvergence(f"best partition misses 1/{m} by {err:.3g} > {cfg.tol}", part, err, stage)
    return part


def midpoint_probe(cell, points, pairs=10_000, seed=0, slack=1e-9):
    """Count midpoints of random pairs of ``points`` inside ``cell`` that fall outside it."""
    inside = points[cell.contains(points)]
    if len(inside) < 2:
        return 0
    rng = np.random.default_rng(seed)
    i = rng.integers(0, len(inside), size=pairs)
    j = rng.integers(0, len(inside), size=pairs)
    mid = (inside[i] + inside[j]) / 2
    return int((~cell.contains(mid, slack)).sum())


@dataclass(frozen=True)
class ConvexWindow:
    """Intersection of the convex cells of successive stages."""

    cells: tuple
    partitions: tuple
    fractions: tuple

    def contains(self, x, slack=0.0):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        ok = np.ones(len(x), dtype=bool)
        for c in self.cells:
            ok &= c.contains(x, slack)
        return ok


def prime_factors(m):
    out = []
    for p in (2, 3, 5):
        while m % p == 0:
            out.append(p)
            m //= p
    if m != 1 or not out:
        raise ValueError("m must be at least 2 with prime factors in {2, 3, 5}")
    return out


def window_fractions(measures, window, k=8):
    """Fraction of each measure in the window by k x k subsample classification."""
    out = []
    for g in measures:
        pts = g.cell_centers(k)
        w = g.sample_weights(k)
        out.append(float(w[window.contains(pts)].sum() / w.sum()))
    return tuple(out)


def convex_window(measures, m, cfg=None):
    """Convex region holding 1/m of every measure, for m with prime factors in {2, 3, 5}.

    Each stage splits the current (restricted) measures into p equal parts,
    keeps the convex cell and restricts every measure to it.
    """
    cfg = cfg or GVConfig()
    factors = prime_factors(m)
    clouds = _clouds(measures, cfg)
    cells, parts = [], []
    for stage, p in enumerate(factors):
        part = _gv_on(clouds, p, cfg, stage)
        cell = extract_convex_cell(part)
        parts.append(part)
        cells.append(cell)
        nxt = []
        for c in clouds:
            raw = c.points * c.scale + c.origin
            r = c.restricted(cell.contains(raw).astype(float))
            r.res = c.res
            nxt.append(r)
        clouds = nxt
    win = ConvexWindow(tuple(cells), tuple(parts), ())
    return ConvexWindow(win.cells, win.partitions, window_fractions(measures, win, cfg.verify_subsample))


# ---------------------------------------------------------------------------
# planar counterexample fixture
# ---------------------------------------------------------------------------

def build_simplex_counterexample(n, alpha, width=0.02, size=64, eps_len=None):
    """Three planar grids after the 1D counterexample, lifted onto a regular triangle.

    m0 is uniform on a strip of thickness ``width`` along v0v1; m1 has n blocks
    of mass 1/n on the segment joining the midpoints of v0v2 and v1v2; m2 is a
    small disk at v2. No impossibility check is attached.
    """
    from .fixtures import rasterize
    alpha = to_rational(alpha)
    if not Fraction(1, n + 1) < alpha < Fraction(1, n):
        raise ValueError(f"alpha must satisfy 1/{n + 1} < alpha < 1/{n}")
    if not width > 0:
        raise ValueError("width must be positive")
    eps = float(eps_len if eps_len is not None else (alpha - Fraction(1, n + 1)) / 2)
    if not 0 < eps < float(alpha - Fraction(1, n + 1)):
        raise ValueError("eps_len must satisfy 0 < eps_len < alpha - 1/(n+1)")
    v0, v1 = np.array([0.1, 0.15]), np.array([0.9, 0.15])
    v2 = np.array([0.5, 0.15 + 0.8 * math.sqrt(3) / 2])

    def segment(p, q, blocks):
        d = q - p
        length = float(np.hypot(*d))
        u = d / length
        nrm = np.array([-u[1], u[0]])

        def f(X, Y):
            dx, dy = X - p[0], Y - p[1]
            t = (dx * u[0] + dy * u[1]) / length
            s = dx * nrm[0] + dy * nrm[1]
            ok = np.zeros_like(X, dtype=bool)
            for lo, hi in blocks:
                ok |= (t >= lo) & (t <= hi)
            return (ok & (np.abs(s) <= width / 2)).astype(float)
        return f

    g0 = rasterize(segment(v0, v1, [(0.0, 1.0)]), size)
    blocks = [(i / (n + 1) - eps / 2, i / (n + 1) + eps / 2) for i in range(1, n + 1)]
    g1 = rasterize(segment((v0 + v2) / 2, (v1 + v2) / 2, blocks), size)
    g2 = rasterize(lambda X, Y: (np.hypot(X - v2[0], Y - v2[1]) <= max(width, 1.5 / size)).astype(float), size)
    return g0, g1, g2
