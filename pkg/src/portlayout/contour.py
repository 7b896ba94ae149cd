"""Rectilinear contours and exact single-axis separation shifts.

A contour is a bag of axis-aligned rectangles covering everything a subtree
occupies.  Keeping the raw rectangles (rather than a stitched outline) makes
the shift computations exact: separating two contours along one axis reduces
to interval arithmetic over every rectangle pair that stays in conflict range
on the other axis.
"""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import EPS, Rect

Axis = str  # "x" or "y"


@dataclass(frozen=True)
class Contour:
    rects: tuple[Rect, ...] = ()

    @staticmethod
    def of(*rects: Rect) -> Contour:
        return Contour(tuple(rects))

    def translated(self, dx: float, dy: float) -> Contour:
        if dx == 0.0 and dy == 0.0:
            return self
        return Contour(tuple(r.translated(dx, dy) for r in self.rects))

    def union(self, other: Contour) -> Contour:
        return Contour(self.rects + other.rects)

    def bounds(self) -> Rect:
        if not self.rects:
            return Rect(0.0, 0.0, 0.0, 0.0)
        x0 = min(r.x for r in self.rects)
        y0 = min(r.y for r in self.rects)
        x1 = max(r.x1 for r in self.rects)
        y1 = max(r.y1 for r in self.rects)
        return Rect(x0, y0, x1 - x0, y1 - y0)

    def span(self, lo: float, hi: float, axis: Axis) -> tuple[float, float] | None:
        """Occupied extent on ``axis`` over the interval [lo, hi] of the other axis."""
        best: tuple[float, float] | None = None
        for r in self.rects:
            if axis == "y":
                if r.x1 <= lo or r.x >= hi:
                    continue
                ext = (r.y, r.y1)
            else:
                if r.y1 <= lo or r.y >= hi:
                    continue
                ext = (r.x, r.x1)
            best = ext if best is None else (min(best[0], ext[0]), max(best[1], ext[1]))
        return best


def _forbidden_intervals(
    moving: Contour, static: Contour, axis: Axis, gap: float
) -> list[tuple[float, float]]:
    """Open intervals of shift values that leave some rectangle pair in conflict."""
    out: list[tuple[float, float]] = []
    for c in moving.rects:
        for s in static.rects:
            if axis == "y":
                if c.x >= s.x1 + gap - EPS or s.x >= c.x1 + gap - EPS:
                    continue
                lo = s.y - gap - c.y1
                hi = s.y1 + gap - c.y
            else:
                if c.y >= s.y1 + gap - EPS or s.y >= c.y1 + gap - EPS:
                    continue
                lo = s.x - gap - c.x1
                hi = s.x1 + gap - c.x
            if hi - lo > EPS:
                out.append((lo, hi))
    return out


def min_separation_shift(moving: Contour, static: Contour, axis: Axis, gap: float) -> float:
    """Smallest non-negative shift of ``moving`` along +axis clearing ``static``.

    Clearing means every rectangle pair ends at least ``gap`` apart along one
    of the two axes; a pair already touching at exactly ``gap`` is clear.
    """
    intervals = _forbidden_intervals(moving, static, axis, gap)
    intervals.sort()
    t = 0.0
    for lo, hi in intervals:
        if lo >= t - EPS:
            # Sorted by lower end: no later interval can cover the current t.
            break
        if hi > t + EPS:
            t = hi
    return t


def max_feasible_shift(
    moving: Contour, static: Contour, axis: Axis, gap: float, desired: float
) -> float:
    """Largest shift in [0, desired] of ``moving`` along +axis avoiding conflict.

    Assumes the zero shift is conflict-free (the caller starts from a valid
    placement); feasibility is not monotone, so the answer backs off to the
    nearest conflict-interval boundary at or below ``desired``.
    """
    if desired <= EPS:
        return 0.0
    intervals = _forbidden_intervals(moving, static, axis, gap)
    t = desired
    for lo, hi in sorted(intervals, key=lambda iv: -iv[0]):
        if lo < t - EPS and hi > t + EPS:
            t = lo
    return max(t, 0.0)
