import xml.dom.minidom
from fractions import Fraction

import numpy as np
import pytest

from fraccut import fixtures as fx
from fraccut import svg
from fraccut.balanced import find_balanced_hyperplane
from fraccut.geometry import AffineFunctional, Halfspace
from fraccut.grid import DensityGrid
from fraccut.window import GVPartition, QuadraticFunctional


def _blob_grids():
    vals = np.ones((6, 6))
    return [DensityGrid((0.0, 0.0), (1 / 6, 1 / 6), vals), DensityGrid((0.0, 0.0), (1 / 6, 1 / 6), vals[::-1] * 2)]


def test_witness_drawing_is_deterministic_and_well_formed():
    s = fx.bereg_kano(2, 11)
    w = find_balanced_hyperplane(s)
    a, b = svg.render_points(s, w), svg.render_points(s, w)
    assert a == b
    xml.dom.minidom.parseString(a)
    assert a.count("<line") == 1 and a.count("<circle") == len(s.points) == 6


def test_grid_drawing_with_halfspace():
    H = Halfspace(AffineFunctional((1.0, -1.0), 0.0), 1)
    text = svg.render_grids(_blob_grids(), halfspace=H)
    xml.dom.minidom.parseString(text)
    assert text.count("<line") == 1 and "<rect" in text


def test_unequal_curvature_partition_draws_circle():
    p = GVPartition((QuadraticFunctional(0.0, (0.0, 0.0), 0.0),
                     QuadraticFunctional(0.2, (-1.0, -1.0), 1.0)))
    text = svg.render_grids(_blob_grids(), partition=p, res=16)
    assert text.count("<circle") == 1 and 'fill="none"' in text
    assert text == svg.render_grids(_blob_grids(), partition=p, res=16)


def test_equal_curvature_partition_draws_line():
    p = GVPartition((QuadraticFunctional(0.0, (1.0, 0.0), 0.5), QuadraticFunctional(0.5, (0.0, 0.0), 0.5)))
    text = svg.render_grids(_blob_grids(), partition=p, res=16)
    assert text.count("<circle") == 0 and text.count("<line") == 1


def test_non_planar_inputs_refused():
    with pytest.raises(ValueError, match="planar"):
        svg.render_grids([DensityGrid.exact((Fraction(0),), (Fraction(1, 4),), [1, 2, 3])])
    with pytest.raises(ValueError, match="planar"):
        svg.render_points(fx.hull_inside_points(3, 2, 0))
