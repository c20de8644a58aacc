from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carpetcurl.geometry import (
    NonSimplePolygon,
    clip_convex,
    clip_to_box,
    is_convex,
    is_simple,
    normalize_polygon,
    point_in_convex,
    polygon_area,
    polygon_moments,
    triangulate,
)

F = Fraction

SQUARE = ((F(0), F(0)), (F(1), F(0)), (F(1), F(1)), (F(0), F(1)))


def test_normalize_orients_counterclockwise():
    cw = ((F(0), F(0)), (F(0), F(1)), (F(1), F(1)), (F(1), F(0)))
    assert polygon_area(normalize_polygon(cw)) == 1


def test_normalize_drops_collinear_vertices():
    poly = ((F(0), F(0)), (F(1, 2), F(0)), (F(1), F(0)), (F(1), F(1)), (F(0), F(1)))
    assert len(normalize_polygon(poly)) == 4


def test_unit_square_moments_match_analytic_integrals():
    mom = polygon_moments(SQUARE)
    assert mom[(0, 0)] == 1
    assert mom[(1, 0)] == F(1, 2)
    assert mom[(0, 1)] == F(1, 2)
    assert mom[(2, 0)] == F(1, 3)
    assert mom[(0, 2)] == F(1, 3)
    assert mom[(1, 1)] == F(1, 4)


def test_triangle_moments_match_analytic_integrals():
    tri = ((F(0), F(0)), (F(1), F(0)), (F(0), F(1)))
    mom = polygon_moments(tri)
    assert mom[(0, 0)] == F(1, 2)
    assert mom[(1, 0)] == F(1, 6)
    assert mom[(2, 0)] == F(1, 12)
    assert mom[(1, 1)] == F(1, 24)


def test_clip_to_box_cuts_a_corner():
    out = clip_to_box(SQUARE, F(1, 2), F(1, 2), F(2), F(2))
    assert polygon_area(out) == F(1, 4)


def test_clip_disjoint_is_empty():
    assert clip_to_box(SQUARE, F(2), F(2), F(3), F(3)) == ()


def test_clip_convex_intersection_of_triangles():
    a = ((F(0), F(0)), (F(1), F(0)), (F(1), F(1)))
    b = ((F(0), F(0)), (F(1), F(0)), (F(0), F(1)))
    out = clip_convex(a, b)
    assert polygon_area(out) == F(1, 4)


def test_point_in_convex_boundary_counts_as_inside():
    assert point_in_convex(SQUARE, (F(0), F(1, 2)))
    assert point_in_convex(SQUARE, (F(1, 3), F(1, 3)))
    assert not point_in_convex(SQUARE, (F(2), F(0)))


def test_triangulate_l_shape_preserves_area():
    ell = ((F(0), F(0)), (F(1), F(0)), (F(1), F(1, 2)), (F(1, 2), F(1, 2)),
           (F(1, 2), F(1)), (F(0), F(1)))
    tris = triangulate(ell)
    assert sum(polygon_area(t) for t in tris) == F(3, 4)


def test_bowtie_is_rejected():
    bowtie = ((F(0), F(0)), (F(1), F(1)), (F(1), F(0)), (F(0), F(1)))
    assert not is_simple(bowtie)
    with pytest.raises(NonSimplePolygon):
        triangulate(bowtie)


coords = st.fractions(min_value=0, max_value=1, max_denominator=12)


@st.composite
def convex_quads(draw):
    # quadrilateral sampled inside the unit square around its center
    x1 = draw(st.fractions(min_value=F(1, 12), max_value=F(5, 12), max_denominator=24))
    x2 = draw(st.fractions(min_value=F(7, 12), max_value=F(11, 12), max_denominator=24))
    y1 = draw(st.fractions(min_value=F(1, 12), max_value=F(5, 12), max_denominator=24))
    y2 = draw(st.fractions(min_value=F(7, 12), max_value=F(11, 12), max_denominator=24))
    quad = ((x1, y1), (x2, y1), (x2, y2), (x1, y2))
    return normalize_polygon(quad)


@given(convex_quads(), coords)
@settings(max_examples=60, deadline=None)
def test_moments_additive_under_vertical_split(quad, t):
    x0 = min(p[0] for p in quad)
    x1 = max(p[0] for p in quad)
    cut = x0 + t * (x1 - x0)
    left = clip_to_box(quad, F(-1), F(-1), cut, F(2))
    right = clip_to_box(quad, cut, F(-1), F(2), F(2))
    whole = polygon_moments(quad)
    for key in whole:
        parts = 0
        if left:
            parts += polygon_moments(left)[key]
        if right:
            parts += polygon_moments(right)[key]
        assert parts == whole[key]


@given(convex_quads())
@settings(max_examples=30, deadline=None)
def test_convexity_detected(quad):
    assert is_convex(quad)
    assert is_simple(quad)
