import math

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from shapely.geometry import LineString

from middlemile.checks import sector_polygon
from middlemile.geometry import (
    angle_between,
    discs_overlap,
    in_sector,
    sectors_overlap,
    segment_intersects_sector,
    segments_intersect,
)

O, E = (0.0, 0.0), (1.0, 0.0)


def test_sector_membership_examples():
    assert in_sector(O, E, 90, 10, (3, 0))
    assert not in_sector(O, E, 90, 10, (0, 5))
    assert in_sector(O, E, 90, 10, (5, 5))  # exactly on the 45 degree edge
    assert not in_sector(O, E, 90, 10, (11, 0))


def test_segment_vs_sector_examples():
    assert not segment_intersects_sector(O, E, 90, 10, (20, -1), (20, 1))
    assert segment_intersects_sector(O, E, 90, 10, (5, -20), (5, 20))
    # crosses only the arc region
    assert segment_intersects_sector(O, E, 10, 10, (9.9, -2), (9.9, 2))
    # passes behind the apex
    assert not segment_intersects_sector(O, E, 90, 10, (-1, -5), (-1, 5))


def test_angle_between():
    assert angle_between(O, E, (0, 1)) == pytest.approx(90)
    assert angle_between(O, E, (-1, 0)) == pytest.approx(180)
    with pytest.raises(ValueError):
        angle_between(O, O, (1, 1))


def test_segments_intersect_collinear_touching():
    assert segments_intersect((0, 0), (2, 0), (2, 0), (3, 0))
    assert not segments_intersect((0, 0), (1, 0), (2, 0), (3, 0))
    assert segments_intersect((0, 0), (2, 2), (0, 2), (2, 0))


@pytest.mark.parametrize("d, expected", [(8, True), (10, False), (9, False)])
def test_disc_overlap_examples(d, expected):
    assert discs_overlap((0, 0), 5, (d, 0), 4) is expected


def test_sectors_overlap_wraps_around():
    assert sectors_overlap(170, 30, -170, 30)
    assert not sectors_overlap(0, 60, 60, 60)  # touching
    assert sectors_overlap(0, 60, 59, 60)


coord = st.floats(-50, 50, allow_nan=False)


@given(coord, coord, coord, coord, st.floats(-180, 180), st.floats(1, 170), st.floats(1, 40))
def test_segment_test_agrees_with_polygon(x1, y1, x2, y2, theta, bw, rad):
    toward = (math.cos(math.radians(theta)), math.sin(math.radians(theta)))
    seg = LineString([(x1, y1), (x2, y2)])
    assume(seg.length > 1e-3)
    poly = sector_polygon(O, toward, bw, rad)
    # the polygon sits inside the sector, so hitting it implies hitting the sector
    if seg.intersects(poly):
        assert segment_intersects_sector(O, toward, bw, rad, (x1, y1), (x2, y2))
    # a clear miss of a slightly larger polygon implies missing the sector
    if seg.distance(sector_polygon(O, toward, min(bw + 1, 359), rad * 1.01)) > 1e-3:
        assert not segment_intersects_sector(O, toward, bw, rad, (x1, y1), (x2, y2))
