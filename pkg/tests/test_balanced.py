import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraccut import fixtures as fx
from fraccut.balanced import (BalancedWitness, NotFound, condition_ii_check, extreme_order_permutations,
                              find_balanced_hyperplane, hull_condition_check, inside_colors, relabel,
                              verify_witness)
from fraccut.errors import NonGeneralPosition
from fraccut.geometry import ColoredPointSet, separable_count_formula

import oracles


def _random_set(seed, n, d=2, span=200):
    rng = np.random.default_rng(seed)
    while True:
        pts = [tuple(int(v) for v in rng.integers(-span, span + 1, size=d)) for _ in range((d + 1) * n)]
        try:
            return ColoredPointSet(pts, [c for c in range(d + 1) for _ in range(n)])
        except NonGeneralPosition:
            continue


def test_one_dimensional_example():
    s = ColoredPointSet([(-1,), (2,), (0,), (1,)], [0, 0, 1, 1])
    w = find_balanced_hyperplane(s)
    assert isinstance(w, BalancedWitness)
    assert verify_witness(s, w)
    assert w.side_counts == ((1, 1), (1, 1))
    # the cut sits between 0 and 1: exactly one of them is on each side
    plus = {i for i, p in enumerate(s.points) if (w.halfspace.side(p) or w.assignment.as_dict()[i]) > 0}
    assert len(plus & {2, 3}) == 1


def test_extreme_orders_one_dimensional_example():
    s = ColoredPointSet([(-1,), (2,), (0,), (1,)], [0, 0, 1, 1])
    rep = extreme_order_permutations(s)
    assert rep.realized == {(1, 0)}
    assert rep.missing == {(0, 1)}
    cond = condition_ii_check(s, report=rep)
    assert cond.holds_as_labeled and cond.holds_after_relabeling == (0, 1)


@pytest.mark.parametrize("seed", range(5))
def test_bereg_kano_pair_has_witness(seed):
    s = fx.bereg_kano(2, seed)
    w = find_balanced_hyperplane(s)
    assert isinstance(w, BalancedWitness) and verify_witness(s, w)


def test_bereg_kano_fixture_hypotheses():
    s = fx.bereg_kano(3, 7)
    assert len(s) == 9 and s.dim == 2
    assert fx._hull_is_monochromatic(s)
    assert hull_condition_check(s)


def test_triangle_rays_is_certified_negative():
    s = fx.triangle_rays_points(3, 0)
    res = find_balanced_hyperplane(s)
    assert isinstance(res, NotFound)
    assert res.subsets_inspected == separable_count_formula(len(s), 2)
    assert not oracles.balanced_exists_lp(s.points, s.colors, s.n)


def test_inside_color_missing_permutations():
    # colors 1 and 2 form a hexagon around the two points of color 0
    s = ColoredPointSet([(1, 1), (-1, 2), (0, 30), (-25, -14), (26, -15), (3, -29)], [0, 0, 1, 1, 2, 2])
    assert inside_colors(s) == [0]
    rep = extreme_order_permutations(s)
    assert all(p[-1] != 0 for p in rep.realized)
    assert {p for p in oracles.all_permutations(3) if p[-1] == 0} <= rep.missing
    cond = condition_ii_check(s, report=rep)
    assert cond.holds_after_relabeling is not None


def test_interleaved_set_realizes_everything():
    angles = [2 * math.pi * k / 12 for k in range(12)]
    pts = [(round(1000 * math.cos(a)), round(1000 * math.sin(a))) for a in angles]
    s = ColoredPointSet(pts, [k % 3 for k in range(12)])
    rep = extreme_order_permutations(s)
    assert rep.missing == frozenset()
    cond = condition_ii_check(s, report=rep)
    assert (cond.holds_as_labeled, cond.holds_after_relabeling) == (False, None)
    assert not hull_condition_check(s)


def test_hull_condition_centroid_cluster():
    s = ColoredPointSet([(0, 1), (1, -1), (-300, -200), (310, -190), (5, 320), (-8, 330)],
                        [0, 0, 1, 1, 2, 2])
    assert hull_condition_check(s)


@settings(max_examples=20)
@given(st.integers(0, 100_000), st.integers(2, 4))
def test_exact_orders_contain_sampled(seed, n):
    s = _random_set(seed, n)
    rep = extreme_order_permutations(s)
    assert rep.realized | rep.missing == oracles.all_permutations(3)
    for perm, u in rep.witnesses.items():
        assert oracles.extreme_orders_sampled(s.points, s.colors, [np.array(u, dtype=float)]) == {perm}
    rng = np.random.default_rng(seed)
    U = rng.normal(size=(10_000, 2))
    assert oracles.extreme_orders_sampled(s.points, s.colors, U) <= rep.realized


def test_exact_orders_equal_dense_sampling():
    for seed in range(5):
        s = _random_set(seed, 4)
        phis = np.linspace(0, 2 * np.pi, 200_000, endpoint=False)
        U = np.column_stack([np.cos(phis), np.sin(phis)])
        assert oracles.extreme_orders_sampled(s.points, s.colors, U) == extreme_order_permutations(s).realized


@settings(max_examples=30)
@given(st.integers(0, 100_000), st.integers(2, 3))
def test_witnesses_are_sound(seed, n):
    s = _random_set(seed, n)
    res = find_balanced_hyperplane(s)
    if isinstance(res, BalancedWitness):
        assert verify_witness(s, res)
        c = res.common_count
        assert 1 <= c <= n - 1
        assert all(side == (c, n - c) for side in res.side_counts)
        assert oracles.balanced_exists_lp(s.points, s.colors, n)
    else:
        assert not oracles.balanced_exists_lp(s.points, s.colors, n)


@settings(max_examples=20)
@given(st.integers(0, 100_000), st.integers(2, 4))
def test_hull_condition_implies_relabeling_and_witness(seed, n):
    s = fx.hull_inside_points(2, n, seed)
    assert hull_condition_check(s)
    assert condition_ii_check(s).holds_after_relabeling is not None
    assert isinstance(find_balanced_hyperplane(s), BalancedWitness)


@settings(max_examples=15)
@given(st.integers(0, 100_000))
def test_condition_ii_after_relabeling_gives_witness(seed):
    s = _random_set(seed, 3)
    cond = condition_ii_check(s)
    if cond.holds_after_relabeling is None:
        return
    t = relabel(s, cond.holds_after_relabeling)
    assert condition_ii_check(t).holds_as_labeled
    assert isinstance(find_balanced_hyperplane(t), BalancedWitness)


def test_sampled_mode_for_3d_is_flagged():
    s = fx.hull_inside_points(3, 2, 0)
    rep = extreme_order_permutations(s, samples=2000, seed=1)
    assert rep.approximate
    assert rep == extreme_order_permutations(s, samples=2000, seed=1)


def test_witness_fraction_free_of_floats():
    w = find_balanced_hyperplane(fx.bereg_kano(3, 1))
    assert all(isinstance(v, (int, Fraction)) for v in w.halfspace.functional.as_tuple())
