"""Balanced hyperplanes of colored point sets and the conditions that guarantee them."""
import functools
import itertools
from dataclasses import dataclass, field

import numpy as np

from .geometry import (Halfspace, SideAssignment, _arrangement, _assignments, separable_subsets,
                       side_of, strictly_inside_hull)


@dataclass(frozen=True)
class BalancedWitness:
    halfspace: Halfspace
    assignment: SideAssignment
    side_counts: tuple  # per color: (count on +, count on -)

    @property
    def common_count(self):
        return self.side_counts[0][0]


@dataclass(frozen=True)
class NotFound:
    """Certified negative: every dichotomy was inspected and none is balanced."""

    dichotomies_inspected: int
    subsets_inspected: int


def _onehot(s):
    k = s.colors_count
    return (s.color_array[:, None] == np.arange(k)[None, :]).astype(np.int64)


def find_balanced_hyperplane(s):
    """Lexicographically least balanced (hyperplane, assignment) of ``s``, or NotFound.

    A witness puts the same number c of every color on the + side with
    1 <= c <= n-1. Exhaustive over hyperplanes through d points, so NotFound
    is exact.
    """
    arr = _arrangement(s)
    n, d = s.n, s.dim
    onehot = _onehot(s)
    plus0 = onehot.T @ (arr.signs > 0).astype(np.int64)  # (k, C)
    patterns = _assignments(d)
    ok = np.zeros((len(patterns), plus0.shape[1]), dtype=bool)
    for pi, pat in enumerate(patterns):
        plus = plus0.copy()
        for t, side in enumerate(pat):
            if side > 0:
                plus += onehot[arr.combos[:, t]].T
        c = plus[0]
        ok[pi] = (plus == c[None, :]).all(axis=0) & (c >= 1) & (c <= n - 1)
    hits = np.flatnonzero(ok.any(axis=0))
    if hits.size == 0:
        return NotFound(dichotomies_inspected=len(arr.keys) * len(patterns),
                        subsets_inspected=len(separable_subsets(s)))
    k = int(hits[0])
    pi = int(np.flatnonzero(ok[:, k])[0])
    assignment = SideAssignment(zip((int(i) for i in arr.combos[k]), patterns[pi]))
    halfspace = Halfspace(arr.functional(k), 1)
    return BalancedWitness(halfspace, assignment, _side_counts(s, halfspace, assignment))


def _side_counts(s, halfspace, assignment):
    fixed = assignment.as_dict()
    counts = [[0, 0] for _ in range(s.colors_count)]
    for i, (p, c) in enumerate(zip(s.points, s.colors)):
        side = side_of(halfspace.functional, p) * halfspace.sense
        if side == 0:
            side = fixed[i]
        counts[c][0 if side > 0 else 1] += 1
    return tuple(tuple(x) for x in counts)


def verify_witness(s, w):
    """Exact recount of a witness; True iff it is a nontrivial balanced split."""
    fixed = w.assignment.as_dict()
    on_plane = {i for i, p in enumerate(s.points) if side_of(w.halfspace.functional, p) == 0}
    if on_plane != set(fixed):
        return False
    counts = _side_counts(s, w.halfspace, w.assignment)
    if counts != tuple(w.side_counts):
        return False
    plus = {c[0] for c in counts}
    if len(plus) != 1:
        return False
    c = plus.pop()
    return 1 <= c <= s.n - 1


# ---------------------------------------------------------------------------
# extreme-order permutations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtremeOrderReport:
    """Orders of colors by maximal projection, ascending, over all directions."""

    realized: frozenset
    missing: frozenset
    witnesses: dict = field(default_factory=dict, compare=False)
    approximate: bool = False


def _order_at(P, colors, k, u):
    proj = P @ np.asarray(u, dtype=P.dtype)
    maxima = [max(proj[colors == c].tolist()) for c in range(k)]
    if len(set(maxima)) < k:
        return None
    return tuple(sorted(range(k), key=maxima.__getitem__))


def _angle_cmp(u, v):
    hu = 0 if (u[1] > 0 or (u[1] == 0 and u[0] > 0)) else 1
    hv = 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1
    if hu != hv:
        return hu - hv
    cross = u[0] * v[1] - u[1] * v[0]
    return -1 if cross > 0 else (1 if cross < 0 else 0)


def extreme_order_permutations(s, samples=20000, seed=0):
    """Realized/missing extreme-order permutations of the colors.

    d = 1 and d = 2 are exact: in the plane the critical directions (normal to
    p - q for every pair of differently colored points) are sorted exactly and
    the order is read strictly between consecutive ones. d >= 3 samples
    ``samples`` random directions and marks the report approximate.
    """
    d, k = s.dim, s.colors_count
    P, _ = s.int_coords
    colors = s.color_array
    everything = frozenset(itertools.permutations(range(k)))
    witnesses = {}
    if d == 1:
        for u in ((1,), (-1,)):
            order = _order_at(P, colors, k, u)
            if order is not None:
                witnesses.setdefault(order, u)
        approximate = False
    elif d == 2:
        dirs = []
        pts = [tuple(int(v) for v in row) for row in P]
        for i, j in itertools.combinations(range(len(pts)), 2):
            if colors[i] == colors[j]:
                continue
            wx, wy = pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]
            dirs.append((-wy, wx))
            dirs.append((wy, -wx))
        dirs.sort(key=functools.cmp_to_key(_angle_cmp))
        uniq = []
        for u in dirs:
            if uniq and _angle_cmp(uniq[-1], u) == 0:
                continue
            uniq.append(u)
        for a, b in zip(uniq, uniq[1:] + uniq[:1]):
            if a[0] * b[1] - a[1] * b[0] > 0:
                mid = (a[0] + b[0], a[1] + b[1])
            else:
                # gap of at least pi: rotate a by +90 degrees
                mid = (-a[1], a[0])
            order = _order_at(P, colors, k, mid)
            if order is not None:
                witnesses.setdefault(order, mid)
        approximate = False
    else:
        rng = np.random.default_rng(seed)
        U = rng.normal(size=(samples, d))
        Pf = np.array([[float(c) for c in p] for p in s.points])
        proj = Pf @ U.T
        maxima = np.stack([proj[colors == c].max(axis=0) for c in range(k)])
        orders = np.argsort(maxima, axis=0, kind="stable").T
        srt = np.sort(maxima, axis=0)
        strict = (np.diff(srt, axis=0) > 0).all(axis=0)
        for t in np.flatnonzero(strict):
            witnesses.setdefault(tuple(int(c) for c in orders[t]), tuple(U[t]))
        approximate = True
    realized = frozenset(witnesses)
    return ExtremeOrderReport(realized, everything - realized, witnesses, approximate)


@dataclass(frozen=True)
class ConditionReport:
    holds_as_labeled: bool
    holds_after_relabeling: tuple | None  # new label of each old color


def condition_ii_check(s, report=None, **kwargs):
    """Whether the ascending-in-color extreme order is missing, as labeled or after relabeling."""
    report = report or extreme_order_permutations(s, **kwargs)
    k = s.colors_count
    identity = tuple(range(k))
    as_labeled = identity in report.missing
    if not report.missing:
        return ConditionReport(as_labeled, None)
    perm = identity if as_labeled else min(report.missing)
    relabel = [0] * k
    for new, old in enumerate(perm):
        relabel[old] = new
    return ConditionReport(as_labeled, tuple(relabel))


def relabel(s, new_label):
    """Copy of ``s`` with color c renamed to new_label[c]."""
    from .geometry import ColoredPointSet
    return ColoredPointSet(s.points, [new_label[c] for c in s.colors], check_general_position=False)


def inside_colors(s):
    """Colors whose points all lie strictly inside the hull of the other colors."""
    P, _ = s.int_coords
    out = []
    for c in range(s.colors_count):
        inside = [i for i, col in enumerate(s.colors) if col == c]
        others = [i for i, col in enumerate(s.colors) if col != c]
        if strictly_inside_hull(P, inside, others):
            out.append(c)
    return out


def hull_condition_check(s):
    return bool(inside_colors(s))
