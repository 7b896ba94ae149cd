"""Axis-aligned geometry primitives shared across the layout pipeline."""

from __future__ import annotations

import math
from dataclasses import dataclass

EPS = 1e-6
_ORIENT_EPS = 1e-9

Point = tuple[float, float]


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle anchored at its top-left corner."""

    x: float
    y: float
    width: float
    height: float

    @property
    def x1(self) -> float:
        return self.x + self.width

    @property
    def y1(self) -> float:
        return self.y + self.height

    @property
    def cx(self) -> float:
        return self.x + self.width / 2.0

    @property
    def cy(self) -> float:
        return self.y + self.height / 2.0

    def translated(self, dx: float, dy: float) -> Rect:
        return Rect(self.x + dx, self.y + dy, self.width, self.height)

    def contains_rect(self, other: Rect, eps: float = EPS) -> bool:
        return (
            other.x >= self.x - eps
            and other.y >= self.y - eps
            and other.x1 <= self.x1 + eps
            and other.y1 <= self.y1 + eps
        )

    def union(self, other: Rect) -> Rect:
        x0 = min(self.x, other.x)
        y0 = min(self.y, other.y)
        x1 = max(self.x1, other.x1)
        y1 = max(self.y1, other.y1)
        return Rect(x0, y0, x1 - x0, y1 - y0)


def rects_conflict(a: Rect, b: Rect, gap: float = 0.0, eps: float = EPS) -> bool:
    """True if the rectangles come closer than ``gap`` on both axes.

    A pair separated by exactly ``gap`` along either axis does not conflict.
    """
    return (
        a.x < b.x1 + gap - eps
        and b.x < a.x1 + gap - eps
        and a.y < b.y1 + gap - eps
        and b.y < a.y1 + gap - eps
    )


def rect_distance(a: Rect, b: Rect) -> float:
    """Minimum Euclidean distance between two rectangles (0 when touching)."""
    dx = max(a.x - b.x1, b.x - a.x1, 0.0)
    dy = max(a.y - b.y1, b.y - a.y1, 0.0)
    return math.hypot(dx, dy)


def nearest_boundary_points(a: Rect, b: Rect) -> tuple[Point, Point]:
    """A canonical nearest point pair on the boundaries of two rectangles.

    Where a whole edge segment is equidistant, the pair is centred on the
    overlap of the facing edges, which keeps connector stubs visually tidy.
    """
    if b.x >= a.x1:
        ax: float = a.x1
        bx: float = b.x
    elif a.x >= b.x1:
        ax = a.x
        bx = b.x1
    else:
        lo = max(a.x, b.x)
        hi = min(a.x1, b.x1)
        ax = bx = (lo + hi) / 2.0
    if b.y >= a.y1:
        ay: float = a.y1
        by: float = b.y
    elif a.y >= b.y1:
        ay = a.y
        by = b.y1
    else:
        lo = max(a.y, b.y)
        hi = min(a.y1, b.y1)
        ay = by = (lo + hi) / 2.0
    return (ax, ay), (bx, by)


def _orient(a: Point, b: Point, c: Point) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def segments_cross(p: Point, q: Point, r: Point, s: Point) -> bool:
    """Strict proper crossing test: segment interiors intersect in one point.

    Shared endpoints, touching at an endpoint and collinear overlap all
    report False.
    """
    d1 = _orient(p, q, r)
    d2 = _orient(p, q, s)
    d3 = _orient(r, s, p)
    d4 = _orient(r, s, q)
    return (
        (d1 > _ORIENT_EPS and d2 < -_ORIENT_EPS) or (d1 < -_ORIENT_EPS and d2 > _ORIENT_EPS)
    ) and (
        (d3 > _ORIENT_EPS and d4 < -_ORIENT_EPS) or (d3 < -_ORIENT_EPS and d4 > _ORIENT_EPS)
    )


def polyline_length(points: tuple[Point, ...] | list[Point]) -> float:
    total = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        total += math.hypot(x1 - x0, y1 - y0)
    return total
