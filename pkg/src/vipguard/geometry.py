"""Planar geometry helpers: point-segment distance, disk occlusion, circular means."""

from __future__ import annotations

import math
from typing import Iterable, Sequence


def point_segment_distance(
    p: Sequence[float], a: Sequence[float], b: Sequence[float]
) -> tuple[float, float]:
    """Distance from point p to segment ab.

    Returns (distance, t) where t in [0, 1] is the clamped parameter of the
    closest point a + t*(b - a). Degenerate segments (a == b) return the
    distance to a with t = 0.
    """
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    px, py = float(p[0]), float(p[1])
    dx, dy = bx - ax, by - ay
    seg_sq = dx * dx + dy * dy
    if seg_sq == 0.0:
        return math.hypot(px - ax, py - ay), 0.0
    t = ((px - ax) * dx + (py - ay) * dy) / seg_sq
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    cx, cy = ax + t * dx, ay + t * dy
    return math.hypot(px - cx, py - cy), t


def line_of_sight(
    a: Sequence[float],
    b: Sequence[float],
    blockers: Iterable[tuple[Sequence[float], float]],
) -> int:
    """1 if the open segment (a, b) misses every blocker disk, else 0.

    Blockers are (center, radius) pairs. A disk that only touches an endpoint
    does not block: the segment is open, so tangency exactly at t=0 or t=1
    leaves the interior clear. Coincident a == b means an empty open segment,
    which nothing can block.
    """
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    if ax == bx and ay == by:
        return 1
    for center, radius in blockers:
        d, t = point_segment_distance(center, (ax, ay), (bx, by))
        if d < radius or (d == radius and 0.0 < t < 1.0):
            return 0
    return 1


def circular_mean(angles: Sequence[float]) -> float:
    """Mean direction of a set of angles (radians), via the summed unit vectors.

    A zero resultant (perfectly opposed headings) falls back to angle 0; the
    callers treat that as an arbitrary but deterministic choice.
    """
    s = sum(math.sin(t) for t in angles)
    c = sum(math.cos(t) for t in angles)
    return math.atan2(s, c)


def wrap_angle(theta: float) -> float:
    """Wrap to [0, 2*pi)."""
    two_pi = 2.0 * math.pi
    out = math.fmod(theta, two_pi)
    if out < 0.0:
        out += two_pi
    if out >= two_pi:  # adding 2*pi to a tiny negative rounds onto 2*pi
        out = 0.0
    return out
