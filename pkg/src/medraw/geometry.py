"""Planar primitives and partial-edge (stub) geometry.

Segments are parameterised from ``a`` (s=0) to ``b`` (s=1). A partial edge
keeps the parameter ranges ``[0, alpha]`` and ``[beta, 1]`` and drops the
middle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

EPS = 1e-9


class CollinearOverlap(ValueError):
    """Two segments lie on one line and share more than a point."""


class Point(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point

    def __post_init__(self):
        object.__setattr__(self, "a", Point(float(self.a[0]), float(self.a[1])))
        object.__setattr__(self, "b", Point(float(self.b[0]), float(self.b[1])))

    @property
    def length(self) -> float:
        return math.hypot(self.b.x - self.a.x, self.b.y - self.a.y)


@dataclass(frozen=True)
class ParamInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if not 0.0 <= self.lo <= self.hi <= 1.0:
            raise ValueError(f"bad parameter interval [{self.lo}, {self.hi}]")

    def contains(self, s: float) -> bool:
        return self.lo <= s <= self.hi


class CrossingPoint(NamedTuple):
    u1: float
    u2: float
    p: Point


@dataclass(frozen=True)
class StubSet:
    """Drawn portions of one edge: the full edge or a pair of stubs."""

    pieces: tuple[tuple[Segment, ParamInterval], ...]

    @property
    def is_complete(self) -> bool:
        return len(self.pieces) == 1

    def covers(self, s: float) -> bool:
        return any(iv.contains(s) for _, iv in self.pieces)

    def drawn_length(self) -> float:
        return sum(seg.length for seg, _ in self.pieces)


def point_at(e: Segment, s: float) -> Point:
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"parameter {s} outside [0, 1]")
    return Point(s * e.b.x + (1.0 - s) * e.a.x, s * e.b.y + (1.0 - s) * e.a.y)


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def segment_intersection(s1: Segment, s2: Segment, eps: float = EPS) -> CrossingPoint | None:
    """Proper crossing of two segments, or None.

    Contacts at parameter 0 or 1 (within ``eps``) on either segment are not
    reported, so edges sharing a node never cross. Raises
    :class:`CollinearOverlap` when the segments overlap along a common line.
    """
    rx, ry = s1.b.x - s1.a.x, s1.b.y - s1.a.y
    sx, sy = s2.b.x - s2.a.x, s2.b.y - s2.a.y
    qx, qy = s2.a.x - s1.a.x, s2.a.y - s1.a.y
    denom = _cross(rx, ry, sx, sy)
    scale = math.hypot(rx, ry) * math.hypot(sx, sy)

    if abs(denom) <= eps * scale:
        # parallel; collinear if q lies on the line of s1
        if abs(_cross(qx, qy, rx, ry)) > eps * math.hypot(qx, qy) * math.hypot(rx, ry) + eps:
            return None
        rr = rx * rx + ry * ry
        t0 = (qx * rx + qy * ry) / rr
        t1 = t0 + (sx * rx + sy * ry) / rr
        lo, hi = min(t0, t1), max(t0, t1)
        if min(hi, 1.0) - max(lo, 0.0) > eps:
            raise CollinearOverlap(f"collinear overlap between {s1} and {s2}")
        return None

    u1 = _cross(qx, qy, sx, sy) / denom
    u2 = _cross(qx, qy, rx, ry) / denom
    if not (eps < u1 < 1.0 - eps and eps < u2 < 1.0 - eps):
        return None
    return CrossingPoint(u1, u2, point_at(s1, u1))


def gamma(e: Segment, alpha: float, beta: float) -> StubSet:
    """Drawn set of ``e`` with the open range (alpha, beta) removed."""
    if not (0.0 <= alpha <= 1.0 and 0.0 <= beta <= 1.0):
        raise ValueError(f"partial-edge parameters must lie in [0, 1], got {alpha}, {beta}")
    if alpha >= beta:
        return StubSet(((e, ParamInterval(0.0, 1.0)),))
    head = Segment(e.a, point_at(e, alpha))
    tail = Segment(point_at(e, beta), e.b)
    return StubSet(((head, ParamInterval(0.0, alpha)), (tail, ParamInterval(beta, 1.0))))


def blank_area(delta: float) -> tuple[float, float]:
    """Bounds of the open centre range left undrawn by a symmetric ``delta`` PED."""
    if not 0.0 <= delta <= 0.5:
        raise ValueError(f"delta must lie in [0, 1/2], got {delta}")
    return (delta, 1.0 - delta)
