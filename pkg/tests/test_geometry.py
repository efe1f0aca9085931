import random
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraccut.errors import DegenerateSpan, DimensionMismatch, NonGeneralPosition
from fraccut.geometry import (AffineFunctional, ColoredPointSet, Halfspace, enumerate_dichotomies, plus_side,
                              separable_count_formula, separable_subsets, side_of, span_hyperplane, to_rational)
from fraccut.grid import DensityGrid, halfspace_mass

import oracles

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=30)


def _general_set(rng, N, d, span=60):
    while True:
        pts = [tuple(Fraction(int(rng.integers(-span, span + 1))) for _ in range(d)) for _ in range(N)]
        colors = [i % (d + 1) for i in range(N)]
        try:
            return ColoredPointSet(pts, colors)
        except NonGeneralPosition:
            continue


# --- side_of -----------------------------------------------------------------

def test_side_of_examples():
    assert side_of(AffineFunctional((1,), -1), (2,)) == 1
    assert side_of(AffineFunctional((1, 1), -1), (Fraction(1, 2), Fraction(1, 2))) == 0


def test_side_of_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        side_of(AffineFunctional((1, 1), 0), (1,))


@given(st.lists(rationals, min_size=3, max_size=3), st.lists(rationals, min_size=2, max_size=2))
def test_side_of_antisymmetric(h, p):
    f = AffineFunctional(tuple(h[:2]), h[2])
    assert side_of(-f, p) == -side_of(f, p)


def test_side_of_antisymmetry_100_random():
    rng = random.Random(5)
    for _ in range(100):
        vals = [Fraction(rng.randint(-99, 99), rng.randint(1, 20)) for _ in range(5)]
        f = AffineFunctional(tuple(vals[:2]), vals[2])
        p = tuple(vals[3:])
        s = f(p)
        assert side_of(f, p) == (s > 0) - (s < 0)
        assert side_of(-f, p) == -side_of(f, p)


# --- span_hyperplane -------------------------------------------------------------

def test_span_examples():
    f = span_hyperplane([(0, 0), (1, 1)])
    assert (f.normal, f.offset) == ((1, -1), 0)
    f = span_hyperplane([(0, 0), (2, 0)])
    assert (f.normal, f.offset) == ((0, 1), 0)


def test_span_degenerate():
    with pytest.raises(DegenerateSpan):
        span_hyperplane([(0, 0, 0), (1, 1, 1), (1, 1, 1)])
    with pytest.raises(DegenerateSpan):
        span_hyperplane([(0, 0, 0), (1, 1, 1), (2, 2, 2)])


@given(st.lists(st.tuples(rationals, rationals, rationals), min_size=3, max_size=3, unique=True), st.randoms())
def test_span_canonical_under_permutation(pts, rnd):
    try:
        f = span_hyperplane(pts)
    except DegenerateSpan:
        return
    shuffled = list(pts)
    rnd.shuffle(shuffled)
    g = span_hyperplane(shuffled)
    assert f == g
    assert all(f(p) == 0 for p in pts)
    first = next(a for a in f.normal if a != 0)
    assert first > 0


# --- point sets --------------------------------------------------------------

def test_point_set_rejects_collinear():
    with pytest.raises(NonGeneralPosition):
        ColoredPointSet([(0, 0), (1, 1), (2, 2)], [0, 1, 2])


def test_point_set_rejects_unequal_counts():
    with pytest.raises(ValueError):
        ColoredPointSet([(0, 0), (1, 0), (0, 1), (3, 5)], [0, 0, 1, 2])


def test_to_rational_decimal_is_exact():
    assert to_rational("0.1") == Fraction(1, 10)
    assert to_rational("3/7") == Fraction(3, 7)


# --- dichotomies ---------------------------------------------------------------

def test_three_points_all_subsets_separable():
    s = ColoredPointSet([(0, 0), (5, 1), (2, 7)], [0, 1, 2])
    assert separable_subsets(s) == oracles.separable_masks(s.points) == set(range(8))


def test_convex_quadrilateral_has_14_subsets():
    pts = [tuple(map(Fraction, p)) for p in [(0, 0), (4, 0), (5, 3), (1, 4)]]
    masks = oracles.separable_masks(pts)
    assert len(masks) == 14
    assert not masks & {0b0101, 0b1010}  # the diagonal pairs


@pytest.mark.parametrize("d,N", [(1, 4), (1, 6), (2, 3), (2, 6), (2, 8), (3, 4), (3, 8)])
def test_separable_count_matches_formula_and_lp(d, N):
    rng = np.random.default_rng(100 * d + N)
    N -= N % (d + 1)
    s = _general_set(rng, N, d)
    subsets = separable_subsets(s)
    assert len(subsets) == separable_count_formula(N, d) == 2 * sum(comb(N - 1, i) for i in range(d + 1))
    if N <= 8:
        assert subsets == oracles.separable_masks(s.points)


@settings(max_examples=25)
@given(st.integers(0, 10_000))
def test_dichotomies_are_consistent_splits(seed):
    rng = np.random.default_rng(seed)
    s = _general_set(rng, 6, 2)
    for H, A in enumerate_dichotomies(s):
        on = {i for i, p in enumerate(s.points) if side_of(H.functional, p) == 0}
        assert set(A.as_dict()) == on
        plus = plus_side(s, H, A)
        for i, p in enumerate(s.points):
            side = H.side(p)
            if side != 0:
                assert (i in plus) == (side > 0)


# --- halfspace mass ------------------------------------------------------------

def _uniform_square(n=4):
    return DensityGrid.exact((0, 0), (Fraction(1, n), Fraction(1, n)), [[1] * n] * n)


def test_mass_examples():
    g = _uniform_square()
    left = Halfspace(AffineFunctional((-1, 0), Fraction(1, 2)))
    assert halfspace_mass(g, left) == Fraction(1, 2)
    tri = Halfspace(AffineFunctional((-1, -1), 1))
    assert halfspace_mass(g, tri) == Fraction(1, 2)
    assert halfspace_mass(g, Halfspace.empty(2)) == 0
    assert halfspace_mass(g, Halfspace.full(2)) == 1


def test_mass_1d_exact():
    g = DensityGrid.exact((0,), (Fraction(1, 4),), [1, 2, 0, 1])
    H = Halfspace(AffineFunctional((1,), Fraction(-3, 8)))  # x >= 3/8
    assert halfspace_mass(g, H) == Fraction(1, 8) * 2 + 0 + Fraction(1, 4)


def test_mass_vs_monte_carlo():
    rng = np.random.default_rng(3)
    vals = rng.normal(size=(8, 8))
    g = DensityGrid((0, 0), (0.125, 0.125), vals)
    H = Halfspace(AffineFunctional((0.7, -0.4), -0.1))
    pts = rng.uniform(0, 1, size=(1_000_000, 2))
    inside = pts @ np.array([0.7, -0.4]) - 0.1 >= 0
    ij = np.minimum((pts * 8).astype(int), 7)
    mc = float(np.mean(vals[ij[:, 1], ij[:, 0]] * inside))
    assert abs(halfspace_mass(g, H) - mc) <= 3e-3


@settings(max_examples=40)
@given(st.lists(st.integers(-9, 9), min_size=9, max_size=9),
       st.tuples(rationals, rationals, rationals).filter(lambda t: t[0] != 0 or t[1] != 0))
def test_mass_additivity_exact(vals, coeffs):
    g = DensityGrid.exact((0, 0), (Fraction(1, 3), Fraction(1, 2)), np.array(vals, dtype=object).reshape(3, 3))
    H = Halfspace(AffineFunctional(coeffs[:2], coeffs[2]))
    assert halfspace_mass(g, H) + halfspace_mass(g, H.complement()) == g.total


@settings(max_examples=40)
@given(st.integers(0, 10_000))
def test_mass_additivity_float_and_oracle(seed):
    rng = np.random.default_rng(seed)
    g = DensityGrid((rng.uniform(-1, 0), rng.uniform(-1, 0)), (0.1, 0.15), rng.normal(size=(5, 6)))
    a, b, c = rng.normal(size=3)
    H = Halfspace(AffineFunctional((a, b), c))
    m = halfspace_mass(g, H, exact=False)
    assert abs(m + halfspace_mass(g, H.complement(), exact=False) - float(g.total)) <= 1e-12
    assert abs(m - oracles.halfplane_mass_shapely(g, a, b, c)) <= 1e-10
