"""Planar sector and disc predicates used by hyperlink placement."""

from __future__ import annotations

import math

Point = tuple[float, float]

LEN_EPS = 1e-7
ANG_EPS = 1e-9  # degrees


def angle_between(apex: Point, toward: Point, p: Point) -> float:
    """Unsigned angle in degrees between rays apex->toward and apex->p."""
    ax, ay = toward[0] - apex[0], toward[1] - apex[1]
    bx, by = p[0] - apex[0], p[1] - apex[1]
    if ax == 0 and ay == 0:
        raise ValueError("degenerate sector direction")
    if bx == 0 and by == 0:
        return 0.0
    return math.degrees(abs(math.atan2(ax * by - ay * bx, ax * bx + ay * by)))


def in_sector(apex: Point, toward: Point, bw: float, rad: float, p: Point) -> bool:
    d = math.dist(apex, p)
    if d <= LEN_EPS:
        return True
    return d <= rad + LEN_EPS and angle_between(apex, toward, p) <= bw / 2 + ANG_EPS


def _orient(a: Point, b: Point, c: Point) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a: Point, b: Point, p: Point) -> bool:
    return (
        min(a[0], b[0]) - LEN_EPS <= p[0] <= max(a[0], b[0]) + LEN_EPS
        and min(a[1], b[1]) - LEN_EPS <= p[1] <= max(a[1], b[1]) + LEN_EPS
    )


def segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool:
    """Closed segment intersection, collinear overlaps included."""
    d1, d2 = _orient(q1, q2, p1), _orient(q1, q2, p2)
    d3, d4 = _orient(p1, p2, q1), _orient(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    scale = max(1.0, math.dist(p1, p2) * math.dist(q1, q2))
    tol = 1e-12 * scale
    return (
        (abs(d1) <= tol and _on_segment(q1, q2, p1))
        or (abs(d2) <= tol and _on_segment(q1, q2, p2))
        or (abs(d3) <= tol and _on_segment(p1, p2, q1))
        or (abs(d4) <= tol and _on_segment(p1, p2, q2))
    )


def segment_circle_points(p: Point, q: Point, center: Point, r: float) -> list[Point]:
    dx, dy = q[0] - p[0], q[1] - p[1]
    fx, fy = p[0] - center[0], p[1] - center[1]
    a = dx * dx + dy * dy
    if a == 0:
        return []
    b = 2 * (fx * dx + fy * dy)
    c = fx * fx + fy * fy - r * r
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    root = math.sqrt(disc)
    out = []
    for t in ((-b - root) / (2 * a), (-b + root) / (2 * a)):
        if -1e-12 <= t <= 1 + 1e-12:
            out.append((p[0] + t * dx, p[1] + t * dy))
    return out


def segment_intersects_sector(apex: Point, toward: Point, bw: float, rad: float, p: Point, q: Point) -> bool:
    """Does the closed segment ``pq`` meet the closed sector?

    Either an endpoint lies inside, or the segment crosses one of the two
    bounding radii or the arc.
    """
    if in_sector(apex, toward, bw, rad, p) or in_sector(apex, toward, bw, rad, q):
        return True
    base = math.atan2(toward[1] - apex[1], toward[0] - apex[0])
    half = math.radians(min(bw / 2, 180.0))
    for side in (half, -half):
        end = (apex[0] + rad * math.cos(base + side), apex[1] + rad * math.sin(base + side))
        if segments_intersect(p, q, apex, end):
            return True
    return any(angle_between(apex, toward, x) <= bw / 2 + ANG_EPS for x in segment_circle_points(p, q, apex, rad))


def sectors_overlap(dir1: float, bw1: float, dir2: float, bw2: float) -> bool:
    """Two sectors sharing an apex overlap when their angular spans intersect.

    Directions and beamwidths are in degrees; touching boundaries do not count.
    """
    gap = abs((dir1 - dir2 + 180.0) % 360.0 - 180.0)
    return gap < (bw1 + bw2) / 2 - ANG_EPS


def bearing(apex: Point, toward: Point) -> float:
    return math.degrees(math.atan2(toward[1] - apex[1], toward[0] - apex[0]))


def discs_overlap(c1: Point, r1: float, c2: Point, r2: float) -> bool:
    """Strict overlap; tangent discs are disjoint."""
    return math.dist(c1, c2) < r1 + r2 - LEN_EPS
