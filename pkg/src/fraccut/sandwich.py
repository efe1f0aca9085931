"""Continuous halfspace cuts: charge bisection, equal-fraction continuation, not-permuted probe."""
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .errors import DegenerateLimit, DimensionMismatch, NoConvergence
from .geometry import AffineFunctional, Halfspace
from .grid import DensityGrid


@dataclass(frozen=True, eq=False)
class Charge:
    """Signed density; ``total`` is its integral over the whole space."""

    grid: DensityGrid

    @property
    def dim(self):
        return self.grid.dim

    @property
    def total(self):
        return float(self.grid.total)

    @property
    def total_variation(self):
        return float(self.grid.total_variation)


def _grid_of(x):
    return x.grid if isinstance(x, Charge) else x


@dataclass(frozen=True, eq=False)
class SphereParam:
    """Unit vector u in R^{d+1}; it encodes {x : u[:d] . x + u[d] >= 0}."""

    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=np.float64).ravel()
        nrm = np.linalg.norm(u)
        if nrm == 0 or not np.isfinite(nrm):
            raise ValueError("sphere parameter must be a nonzero finite vector")
        u = u / nrm
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @property
    def dim(self):
        return self.u.size - 1

    def antipode(self):
        return SphereParam(-self.u)


def lift_param(u):
    """Halfspace of R^d cut out by the hyperplane through the origin of R^{d+1} with normal u."""
    if not isinstance(u, SphereParam):
        u = SphereParam(u)
    d = u.dim
    normal = tuple(float(v) for v in u.u[:d])
    off = float(u.u[d])
    if all(v == 0.0 for v in normal):
        return Halfspace(AffineFunctional(normal, off), 1, "full" if off > 0 else "empty")
    return Halfspace(AffineFunctional(normal, off), 1)


# ---------------------------------------------------------------------------
# evaluation of measure masses along the sphere
# ---------------------------------------------------------------------------

def _mass_float(g, coeffs):
    """Mass of float grid ``g`` in {coeffs[:d] . x + coeffs[d] >= 0}."""
    d = g.dim
    normal = coeffs[:d]
    if not np.any(normal):
        return float(g.total) if coeffs[d] >= 0 else 0.0
    if d == 1:
        a, c = coeffs
        x0, h = float(g.origin[0]), float(g.spacing[0])
        vals = g.fvalues
        pos = (-c / a - x0) / h
        n = vals.size
        if pos <= 0:
            below = 0.0
        elif pos >= n:
            below = float(vals.sum()) * h
        else:
            i = int(math.floor(pos))
            below = (float(vals[:i].sum()) + float(vals[i]) * (pos - i)) * h
        return float(g.total) - below if a > 0 else below
    x0, y0 = map(float, g.origin)
    hx, hy = map(float, g.spacing)
    return float(kernels.rect_halfplane_mass(g.fvalues, x0, y0, hx, hy,
                                             float(coeffs[0]), float(coeffs[1]), float(coeffs[2])))


class _Frame:
    """Affine normalisation x = center + scale * y used by the solvers."""

    def __init__(self, grids):
        lo = np.full(grids[0].dim, np.inf)
        hi = np.full(grids[0].dim, -np.inf)
        for g in grids:
            for k, (a, b) in enumerate(g.bounds()):
                lo[k] = min(lo[k], float(a))
                hi[k] = max(hi[k], float(b))
        self.center = 0.5 * (lo + hi)
        self.scale = 0.5 * float(np.max(hi - lo))

    def to_raw(self, v):
        """Coefficients in original coordinates of {v[:d] . y + v[d] >= 0}, unit length."""
        d = v.size - 1
        a = v[:d] / self.scale
        raw = np.append(a, v[d] - a @ self.center)
        return raw / np.linalg.norm(raw)

    def from_raw(self, u):
        d = u.size - 1
        a = u[:d] * self.scale
        v = np.append(a, u[d] + u[:d] @ self.center)
        return v / np.linalg.norm(v)


class _OddMap:
    """P(v) = 2 A m(v) - A m(R^d) for measure masses m and a mixing matrix A."""

    def __init__(self, grids, A, frame):
        self.grids = [_grid_of(g).to_float() for g in grids]
        self.A = np.asarray(A, dtype=np.float64)
        self.frame = frame
        self.totals = np.array([float(g.total) for g in self.grids])
        self.evals = 0

    def masses(self, v):
        raw = self.frame.to_raw(v)
        self.evals += 1
        return np.array([_mass_float(g, raw) for g in self.grids])

    def __call__(self, v):
        m = self.masses(v)
        return self.A @ (2.0 * m - self.totals)


def icosphere(level=3):
    """Vertices of the subdivided icosahedron (10 * 4**level + 2 points)."""
    t = (1.0 + 5 ** 0.5) / 2.0
    verts = [(-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0), (0, -1, t), (0, 1, t),
             (0, -1, -t), (0, 1, -t), (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1)]
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11), (1, 5, 9), (5, 11, 4),
             (11, 10, 2), (10, 7, 6), (7, 1, 8), (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8),
             (3, 8, 9), (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    verts = [np.array(v, dtype=np.float64) / np.linalg.norm(v) for v in verts]
    for _ in range(level):
        cache = {}

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = verts[i] + verts[j]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        new = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new
    return np.array(verts)


def _hemisphere(points):
    # one representative of each antipodal pair
    keep = []
    for p in points:
        nz = p[np.abs(p) > 1e-12]
        if nz.size and nz[-1] > 0:
            keep.append(p)
    return np.array(keep)


def _tangent_basis(v):
    _, _, vt = np.linalg.svd(v[None, :])
    return vt[1:]


def _retract(v, delta):
    w = v + delta
    return w / np.linalg.norm(w)


def _newton(F, v0, tol, max_iter=60, h=1e-5):
    """Damped Gauss-Newton on the sphere with central-difference Jacobians.

    Returns (v, F(v), converged).
    """
    v = v0 / np.linalg.norm(v0)
    Fv = F(v)
    for _ in range(max_iter):
        if np.max(np.abs(Fv)) <= tol:
            return v, Fv, True
        E = _tangent_basis(v)
        J = np.empty((Fv.size, E.shape[0]))
        for k, e in enumerate(E):
            J[:, k] = (F(_retract(v, h * e)) - F(_retract(v, -h * e))) / (2.0 * h)
        step, *_ = np.linalg.lstsq(J, -Fv, rcond=None)
        f0 = float(Fv @ Fv)
        t = 1.0
        for _ in range(30):
            w = _retract(v, t * (step @ E))
            Fw = F(w)
            if float(Fw @ Fw) < f0:
                break
            t *= 0.5
        else:
            return v, Fv, False
        v, Fv = w, Fw
    return v, Fv, bool(np.max(np.abs(Fv)) <= tol)


def _solve_circle(F, tol, scan=720):
    """Zero of an odd scalar map on S^1 by sign-change scan and Brent refinement."""
    phis = np.linspace(0.0, np.pi, scan + 1)
    g = lambda phi: float(F(np.array([np.cos(phi), np.sin(phi)]))[0])
    vals = [g(p) for p in phis]
    best = int(np.argmin(np.abs(vals)))
    for k in range(scan):
        if vals[k] == 0.0:
            phi = phis[k]
            break
        if vals[k] * vals[k + 1] < 0:
            phi = brentq(g, phis[k], phis[k + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
            break
    else:
        phi = phis[best]
    v = np.array([np.cos(phi), np.sin(phi)])
    Fv = F(v)
    return v, Fv, bool(np.max(np.abs(Fv)) <= tol)


def _solve_sphere(F, d, tol, warm=None, level=3, candidates=12):
    """Zero of an odd map S^d -> R^d. Warm start first, then multistart."""
    if d == 1:
        if warm is not None:
            v, Fv, ok = _newton(F, warm, tol)
            if ok:
                return v, Fv, True
        return _solve_circle(F, tol)
    best = None
    if warm is not None:
        v, Fv, ok = _newton(F, warm, tol)
        if ok:
            return v, Fv, True
        best = (v, Fv)
    for lev in (level, level + 1):
        starts = _hemisphere(icosphere(lev))
        vals = np.array([np.max(np.abs(F(p))) for p in starts])
        order = np.argsort(vals, kind="stable")
        for k in order[:candidates]:
            v, Fv, ok = _newton(F, starts[k], tol)
            if ok:
                return v, Fv, True
            if best is None or np.max(np.abs(Fv)) < np.max(np.abs(best[1])):
                best = (v, Fv)
    return best[0], best[1], False


def _check_charges(charges, allowed=(1, 2)):
    grids = [_grid_of(c) for c in charges]
    d = grids[0].dim
    if any(g.dim != d for g in grids):
        raise DimensionMismatch("charges live on grids of different dimension")
    if d not in allowed:
        raise DimensionMismatch(f"dimension {d} not supported here (allowed: {allowed})")
    return grids, d


def odd_map(charges, u):
    """(rho_i(H_u) - rho_i(R^d \\ H_u))_i for the halfspace encoded by u."""
    grids, d = _check_charges(charges, allowed=(1, 2))
    if len(grids) != d:
        raise DimensionMismatch(f"need {d} charges in R^{d}, got {len(grids)}")
    if not isinstance(u, SphereParam):
        u = SphereParam(u)
    if u.dim != d:
        raise DimensionMismatch("sphere parameter has the wrong dimension")
    m = np.array([_mass_float(g.to_float(), u.u) for g in grids])
    totals = np.array([float(g.total) for g in grids])
    return 2.0 * m - totals


def find_charge_bisection(charges, tol=1e-9):
    """Halfspace bisecting each of d charges in R^d (d in {1, 2}).

    Success means max_i |P_i(u)| <= tol * sum_i TV(rho_i). The result may be
    degenerate (empty or full) when every charge has total zero.
    """
    grids, d = _check_charges(charges)
    if len(grids) != d:
        raise DimensionMismatch(f"need {d} charges in R^{d}, got {len(grids)}")
    frame = _Frame(grids)
    F = _OddMap(grids, np.eye(d), frame)
    tv = sum(float(g.total_variation) for g in grids)
    atol = tol * tv if tv > 0 else tol
    v, Fv, ok = _solve_sphere(F, d, atol)
    u = SphereParam(frame.to_raw(v))
    if not ok:
        raise NoConvergence(f"charge bisection residual {np.max(np.abs(Fv)):.3e} above {atol:.3e}",
                            best=u, residual=float(np.max(np.abs(Fv))))
    return u, lift_param(u)


# ---------------------------------------------------------------------------
# equal-fraction cut by continuation in s
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContinuationConfig:
    s0: float = 0.25
    gamma: float = 0.5
    s_min: float = 1e-6
    zero_tol: float = 1e-8
    epsilon: float = 0.05
    angle_tol: float = 1e-6
    pole_tol: float = 1e-4
    polish: bool = True

    def __post_init__(self):
        if not 0 < self.s_min < self.s0:
            raise ValueError("need 0 < s_min < s0")
        if not 0 < self.gamma < 1:
            raise ValueError("need 0 < gamma < 1")
        if not 0 < self.epsilon < 0.5:
            raise ValueError("need 0 < epsilon < 1/2")
        if self.zero_tol <= 0:
            raise ValueError("zero_tol must be positive")


@dataclass(frozen=True)
class ContinuationStep:
    s: float
    u: tuple
    fractions: tuple  # in solver order
    eq2_residuals: tuple  # |mu_{i-1}(H) - (1+s) mu_i(H) + s/2|, i = 1..d


@dataclass(frozen=True)
class FractionCutResult:
    halfspace: Halfspace
    u: SphereParam
    fractions: tuple  # per input measure, original labels
    common_fraction: float
    residual: float
    order: tuple
    steps: list = field(default_factory=list, compare=False)
    polished: bool = False


def _perturbed_matrix(d, s):
    # rows: rho^s_i = (1+s) mu_i - mu_{i-1}, i = 1..d
    A = np.zeros((d, d + 1))
    for i in range(1, d + 1):
        A[i - 1, i] = 1.0 + s
        A[i - 1, i - 1] = -1.0
    return A


def _angle(a, b):
    return float(np.arccos(np.clip(a @ b, -1.0, 1.0)))


def find_equal_fraction_halfspace(measures, cfg=None, order=None):
    """Halfspace cutting the same fraction t in [eps, 1/2] of d+1 probability measures.

    Solves rho^s_i(H) = rho^s_i(R^d)/2 = s/2 for rho^s_i = (1+s) mu_i - mu_{i-1}
    along a geometric schedule s0, gamma s0, ... >= s_min, warm-starting each
    solve, then (optionally) polishes at s = 0. ``order`` relabels the
    measures before solving: measure order[k] plays the role of mu_k.
    """
    cfg = cfg or ContinuationConfig()
    grids, d = _check_charges(measures)
    if len(grids) != d + 1:
        raise DimensionMismatch(f"need {d + 1} measures in R^{d}, got {len(grids)}")
    order = tuple(range(d + 1)) if order is None else tuple(order)
    if sorted(order) != list(range(d + 1)):
        raise ValueError(f"order must be a permutation of 0..{d}")
    mus = [grids[o].to_float() for o in order]
    for g in mus:
        if not g.is_measure or abs(float(g.total) - 1.0) > 1e-9:
            raise ValueError("measures must be nonnegative with total 1")
    frame = _Frame(mus)
    steps = []
    v = None
    prev_v = None
    pole_hits = 0
    s = cfg.s0
    while True:
        F = _OddMap(mus, _perturbed_matrix(d, s), frame)
        v, Fv, ok = _solve_sphere(F, d, cfg.zero_tol, warm=v)
        if not ok:
            raise NoConvergence(f"no zero at s={s:.3e} (residual {np.max(np.abs(Fv)):.3e})",
                                best=SphereParam(frame.to_raw(v)), residual=float(np.max(np.abs(Fv))))
        fr = F.masses(v)
        eq2 = tuple(abs(fr[i - 1] - (1 + s) * fr[i] + s / 2) for i in range(1, d + 1))
        steps.append(ContinuationStep(s, tuple(frame.to_raw(v)), tuple(fr), eq2))
        low = fr if fr.mean() <= 0.5 else 1.0 - fr
        if np.all(low < cfg.epsilon):
            H = lift_param(SphereParam(frame.to_raw(v if fr.mean() <= 0.5 else -v)))
            raise DegenerateLimit(
                f"at s={s:.3e} every fraction is below epsilon={cfg.epsilon}: "
                "the measures are not epsilon-not-permuted in this order",
                diagnostic=(H, tuple(_unpermute(low, order))), steps=steps)
        pole_hits = pole_hits + 1 if abs(v[d]) > 1.0 - cfg.pole_tol else 0
        if pole_hits >= 2:
            raise DegenerateLimit(f"iterates approach a degenerate halfspace at s={s:.3e}",
                                  diagnostic=(lift_param(SphereParam(frame.to_raw(v))),
                                              tuple(_unpermute(low, order))), steps=steps)
        if s <= cfg.s_min or (prev_v is not None and _angle(prev_v, v) < cfg.angle_tol):
            break
        prev_v = v
        s = max(s * cfg.gamma, cfg.s_min)
    polished = False
    if cfg.polish:
        F0 = _OddMap(mus, _perturbed_matrix(d, 0.0), frame)
        w, Fw, ok = _newton(F0, v, cfg.zero_tol)
        if ok and _angle(w, v) < 1e-3:
            fw = F0.masses(w)
            lw = fw if fw.mean() <= 0.5 else 1.0 - fw
            if np.max(lw) >= cfg.epsilon:
                v, polished = w, True
    fr = _OddMap(mus, np.zeros((d, d + 1)), frame).masses(v)
    if fr.mean() > 0.5:
        v = -v
        fr = 1.0 - fr
    u = SphereParam(frame.to_raw(v))
    fractions = tuple(_unpermute(fr, order))
    t = float(np.mean(fr))
    residual = float(np.max(fr) - np.min(fr))
    if t < cfg.epsilon - 1e-4:
        raise DegenerateLimit(f"common fraction {t:.3e} is below epsilon", diagnostic=(lift_param(u), fractions),
                              steps=steps)
    return FractionCutResult(lift_param(u), u, fractions, t, residual, order, steps, polished)


def _unpermute(values, order):
    out = [0.0] * len(order)
    for k, o in enumerate(order):
        out[o] = float(values[k])
    return out


# ---------------------------------------------------------------------------
# epsilon-not-permuted probe
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProbeReport:
    violations: list
    realized_perms: frozenset
    samples: int
    violation_count: int = 0


def _support_corners(grids):
    pts = []
    for g in grids:
        if g.dim == 1:
            x0, h = float(g.origin[0]), float(g.spacing[0])
            idx = np.flatnonzero(g.fvalues != 0)
            pts += [[x0 + i * h] for i in idx] + [[x0 + (i + 1) * h] for i in idx]
        else:
            x0, y0 = map(float, g.origin)
            hx, hy = map(float, g.spacing)
            jj, ii = np.nonzero(g.fvalues != 0)
            for dx in (0, 1):
                for dy in (0, 1):
                    pts.append(np.column_stack([x0 + (ii + dx) * hx, y0 + (jj + dy) * hy]))
    return np.vstack(pts) if grids[0].dim == 2 else np.array(pts)


def epsilon_not_permuted_probe(measures, epsilon, budget=100000, offsets_per_direction=50, max_stored=100):
    """Sample small-mass halfspaces and record the strict orders of the fractions.

    Only halfspaces with every fraction below ``epsilon`` count. A violation is
    a halfspace with mu_0(H) < mu_1(H) < ... < mu_d(H). Violations prove the
    measures are not epsilon-not-permuted; their absence is sampled evidence.
    """
    grids, d = _check_charges(measures)
    if len(grids) != d + 1:
        raise DimensionMismatch(f"need {d + 1} measures in R^{d}, got {len(grids)}")
    grids = [g.to_float() for g in grids]
    totals = np.array([float(g.total) for g in grids])
    corners = _support_corners(grids)
    if d == 1:
        directions = np.array([[1.0], [-1.0]])
    else:
        n_dir = max(4, budget // offsets_per_direction)
        phis = np.arange(n_dir) * (2 * np.pi / n_dir)
        directions = np.column_stack([np.cos(phis), np.sin(phis)])
    per_dir = max(1, budget // len(directions))
    identity = tuple(range(d + 1))
    realized = set()
    violations = []
    count = 0
    samples = 0
    for n in directions:
        proj = corners @ n
        t_hi, t_lo = float(proj.max()), float(proj.min())

        def fracs(t):
            coeffs = np.append(n, -t)
            return np.array([_mass_float(g, coeffs) for g in grids]) / totals

        # largest-cap offset still below epsilon for every measure
        a, b = t_lo, t_hi
        if np.all(fracs(a) < epsilon):
            b = a
        else:
            for _ in range(48):
                mid = 0.5 * (a + b)
                if np.all(fracs(mid) < epsilon):
                    b = mid
                else:
                    a = mid
        ts = b + (t_hi - b) * (np.arange(per_dir) + 0.5) / per_dir
        coeffs = np.column_stack([np.tile(n, (per_dir, 1)), -ts])
        if d == 1:
            F = np.array([[_mass_float(g, c) for g in grids] for c in coeffs]) / totals
        else:
            F = np.column_stack([
                kernels.rect_halfplane_mass_many(g.fvalues, float(g.origin[0]), float(g.origin[1]),
                                                 float(g.spacing[0]), float(g.spacing[1]), coeffs)
                for g in grids]) / totals
        samples += per_dir
        for row, c in zip(F, coeffs):
            if not np.all(row < epsilon):
                continue
            srt = np.sort(row)
            if np.any(np.diff(srt) <= 0):
                continue
            perm = tuple(int(i) for i in np.argsort(row))
            realized.add(perm)
            if perm == identity:
                count += 1
                if len(violations) < max_stored:
                    H = Halfspace(AffineFunctional(tuple(float(x) for x in c[:d]), float(c[d])), 1)
                    violations.append((H, tuple(float(x) for x in row)))
    return ProbeReport(violations, frozenset(realized), samples, count)


def choose_order(report, d):
    """A labeling under which the ascending permutation was never realized, or None."""
    identity = tuple(range(d + 1))
    if identity not in report.realized_perms:
        return identity
    for perm in itertools.permutations(range(d + 1)):
        if perm not in report.realized_perms:
            return perm
    return None


# ---------------------------------------------------------------------------
# cut through a prescribed point
# ---------------------------------------------------------------------------

def point_anchored_equal_cut(measures, p, tol=1e-9, scan=720):
    """Halfplane with p on its boundary cutting the same fraction of two planar measures."""
    grids, d = _check_charges(measures, allowed=(2,))
    if len(grids) != d:
        raise DimensionMismatch(f"need {d} measures, got {len(grids)}")
    grids = [g.to_float() for g in grids]
    totals = [float(g.total) for g in grids]
    px, py = float(p[0]), float(p[1])
    corners = _support_corners(grids)
    _require_in_hull(corners, np.array([px, py]))

    def functional(phi):
        nx, ny = math.cos(phi), math.sin(phi)
        return AffineFunctional((nx, ny), -(nx * px + ny * py))

    def gap(phi):
        f = functional(phi)
        coeffs = np.array([f.normal[0], f.normal[1], f.offset])
        return _mass_float(grids[1], coeffs) / totals[1] - _mass_float(grids[0], coeffs) / totals[0]

    phis = np.linspace(0.0, np.pi, scan + 1)
    vals = [gap(x) for x in phis]
    phi = None
    for k in range(scan):
        if vals[k] == 0.0:
            phi = phis[k]
            break
        if vals[k] * vals[k + 1] < 0:
            phi = brentq(gap, phis[k], phis[k + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
            break
    if phi is None:
        phi = phis[int(np.argmin(np.abs(vals)))]
    res = abs(gap(phi))
    H = Halfspace(functional(phi), 1)
    if res > tol:
        raise NoConvergence(f"anchored cut residual {res:.3e} above {tol:.3e}", best=H, residual=res)
    return H


def _require_in_hull(points, p):
    from scipy.spatial import Delaunay
    if Delaunay(points).find_simplex(p) < 0:
        raise ValueError("anchor point lies outside the convex hull of the supports")


def halfspace_fractions(measures, H):
    """Fractions mu_i(H) / mu_i(R^d) in doubles."""
    from .grid import halfspace_mass
    return tuple(float(halfspace_mass(g, H, exact=False)) / float(g.total) for g in map(_grid_of, measures))
