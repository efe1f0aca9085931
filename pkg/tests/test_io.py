from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraccut import fixtures as fx
from fraccut import io
from fraccut.balanced import NotFound, find_balanced_hyperplane
from fraccut.geometry import AffineFunctional, Halfspace
from fraccut.grid import DensityGrid
from fraccut.window import GVConfig, GVPartition, IntervalWindow, QuadraticFunctional, convex_window

floats = st.floats(-1e6, 1e6, allow_nan=False)


@pytest.mark.parametrize("maker", [lambda: fx.bereg_kano(3, 7), lambda: fx.hull_inside_points(3, 2, 1),
                                   lambda: fx.triangle_rays_points(2, 0)])
def test_points_round_trip(maker):
    s = maker()
    assert io.parse_points(io.format_points(s)) == s


def test_points_header_and_line_errors():
    good = "dim 2 colors 3 n 1\n0 0 0\n1 1/2 3\n2 -1 0.25\n"
    assert len(io.parse_points(good)) == 3
    with pytest.raises(io.ParseError, match=r"f.txt:3: not a rational"):
        io.parse_points("dim 2 colors 3 1\n0 0 0\n1 x 3\n2 -1 0\n", "f.txt")
    with pytest.raises(io.ParseError, match=r":1: header"):
        io.parse_points("dims 2\n")
    with pytest.raises(io.ParseError, match="expected 3 points"):
        io.parse_points("dim 2 colors 3 1\n0 0 0\n1 1 3\n")
    with pytest.raises(io.ParseError, match="common hyperplane"):
        io.parse_points("dim 2 colors 3 1\n0 0 0\n1 1 1\n2 2 2\n")


def test_decimals_parse_exactly():
    s = io.parse_points("dim 1 colors 2 1\n0 0.1\n1 0.3\n")
    assert s.points == ((Fraction(1, 10),), (Fraction(3, 10),))


@settings(max_examples=40)
@given(st.integers(1, 5), st.integers(1, 5), st.lists(floats, min_size=25, max_size=25), floats, floats)
def test_float_grid_round_trip(nx, ny, vals, x0, y0):
    g = DensityGrid((x0, y0), (Fraction(1, 3), Fraction(2, 7)), np.array(vals[:nx * ny]).reshape(ny, nx))
    assert io.parse_grid(io.format_grid(g), exact=False) == g


@settings(max_examples=40)
@given(st.lists(st.fractions(-100, 100, max_denominator=50), min_size=1, max_size=12))
def test_exact_grid_round_trip(vals):
    g = DensityGrid.exact((Fraction(-1, 3),), (Fraction(1, 7),), vals)
    back = io.parse_grid(io.format_grid(g))
    assert back == g and back.is_exact


def test_grid_value_count_error():
    with pytest.raises(io.ParseError):
        io.parse_grid("dim 2 2 2 0 0 1 1\n1 2 3\n")


def test_witness_round_trip():
    s = fx.bereg_kano(4, 3)
    w = find_balanced_hyperplane(s)
    assert io.parse_witness(io.format_witness(w)) == w
    nf = NotFound(144, 74)
    assert io.parse_witness(io.format_not_found(nf)) == nf


@settings(max_examples=30)
@given(st.lists(floats, min_size=8, max_size=20).filter(lambda v: len(v) % 4 == 0),
       st.one_of(st.none(), st.floats(0, 1)))
def test_partition_round_trip(vals, residual):
    rows = np.array(vals).reshape(-1, 4)
    m = len(rows)
    p = GVPartition(tuple(QuadraticFunctional.from_row(r) for r in rows), np.full((m, 3), 1 / m), residual)
    q = io.parse_partition(io.format_partition(p))
    assert q == p
    np.testing.assert_array_equal(q.cell_measures, p.cell_measures)
    assert q.residual == p.residual


def test_window_round_trip():
    grids = fx.random_measures(0)
    w = convex_window(grids, 4, GVConfig(seed=0))
    v = io.parse_window(io.format_window(w))
    assert v.cells == w.cells and v.partitions == w.partitions and v.fractions == w.fractions


def test_halfspace_and_cut_round_trip():
    H = Halfspace(AffineFunctional((0.25, -1.5), 0.125), 1)
    back, fr = io.parse_halfspace(io.format_halfspace(H, (0.1, 0.2)))
    assert back == H and fr == (0.1, 0.2)
    line = io.format_fraction_cut((0.1, 0.2, 0.3), (0.4, 0.4, 0.4), 0.4, 1e-13)
    assert io.parse_fraction_cut(line) == ((0.1, 0.2, 0.3), (0.4, 0.4, 0.4), 0.4, 1e-13)


def test_interval_round_trip():
    w = IntervalWindow(Fraction(1, 3), Fraction(5, 6), (Fraction(1, 2), Fraction(1, 2)))
    assert io.parse_interval(io.format_interval(w)) == (w.a, w.b)


def test_write_atomic(tmp_path):
    p = tmp_path / "out.txt"
    io.write_atomic(p, "a\n")
    io.write_atomic(p, "b\n")
    assert p.read_text() == "b\n"
    assert [x.name for x in tmp_path.iterdir()] == ["out.txt"]
