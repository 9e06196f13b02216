"""Exact convex polygon clipping over the rationals.

Regions of the triangle are intersections of half-planes with rational
coefficients, so all vertices and areas are exact Fractions.  Polygons are
stored as counterclockwise vertex lists; degenerate intersections (empty,
a point, a segment) are represented by polygons with fewer than three
vertices and area zero.

Boundary conventions do not matter here: every region of interest differs
from its closure by a null set, and only areas are consumed downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

Vertex = tuple[Fraction, Fraction]


def shoelace_area(vertices: Sequence[Vertex]) -> Fraction:
    """Signed area of a vertex loop (positive for counterclockwise order)."""
    if len(vertices) < 3:
        return Fraction(0)
    total = Fraction(0)
    for (x0, y0), (x1, y1) in zip(vertices, list(vertices[1:]) + [vertices[0]]):
        total += x0 * y1 - x1 * y0
    return total / 2


def clip_halfplane(vertices: Sequence[Vertex], a, b, c) -> list[Vertex]:
    """Intersect a convex polygon with the half-plane a x + b y <= c.

    Standard single-edge Sutherland-Hodgman pass; exact arithmetic means no
    epsilon handling anywhere.
    """
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if not vertices:
        return []
    out: list[Vertex] = []
    prev = vertices[-1]
    prev_val = a * prev[0] + b * prev[1]
    for cur in vertices:
        cur_val = a * cur[0] + b * cur[1]
        if cur_val <= c:
            if prev_val > c:
                out.append(_edge_crossing(prev, cur, prev_val, cur_val, c))
            out.append(cur)
        elif prev_val <= c:
            out.append(_edge_crossing(prev, cur, prev_val, cur_val, c))
        prev, prev_val = cur, cur_val
    return _dedupe(out)


def _edge_crossing(p, q, vp, vq, c) -> Vertex:
    lam = (c - vp) / (vq - vp)
    return (p[0] + lam * (q[0] - p[0]), p[1] + lam * (q[1] - p[1]))


def _dedupe(vertices: list[Vertex]) -> list[Vertex]:
    out: list[Vertex] = []
    for v in vertices:
        if not out or v != out[-1]:
            out.append(v)
    if len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


def _is_convex_ccw(vertices: Sequence[Vertex]) -> bool:
    n = len(vertices)
    if n < 3:
        return True
    for i in range(n):
        ox, oy = vertices[i]
        ax, ay = vertices[(i + 1) % n]
        bx, by = vertices[(i + 2) % n]
        cross = (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)
        if cross < 0:
            return False
    return True


@dataclass(frozen=True)
class RegionPolygon:
    """A convex region with exact vertices and exact area.

    `measure` is the normalized triangle measure, i.e. twice the raw area
    (the whole triangle has area 1/2).
    """

    vertices: tuple[Vertex, ...]
    area: Fraction = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        verts = tuple(
            (Fraction(x), Fraction(y)) for x, y in self.vertices
        )
        signed = shoelace_area(verts)
        if signed < 0:
            verts = tuple(reversed(verts))
            signed = -signed
        object.__setattr__(self, "vertices", verts)
        if self.area is None:
            object.__setattr__(self, "area", signed)
        elif self.area != signed:
            raise ValueError("stated area disagrees with the shoelace value")
        if not _is_convex_ccw(verts):
            raise ValueError("vertex loop is not convex")

    @property
    def measure(self) -> Fraction:
        return 2 * self.area

    def is_empty(self) -> bool:
        return self.area == 0

    def clipped(self, a, b, c) -> "RegionPolygon":
        """This region intersected with the half-plane a x + b y <= c."""
        return RegionPolygon(tuple(clip_halfplane(list(self.vertices), a, b, c)))


EMPTY_REGION = RegionPolygon(())


def intersect_regions(r1: RegionPolygon, r2: RegionPolygon) -> RegionPolygon:
    """Exact intersection of two convex regions (clip r1 by r2's edges)."""
    if r1.is_empty() or r2.is_empty():
        return EMPTY_REGION
    verts = list(r1.vertices)
    n = len(r2.vertices)
    for i in range(n):
        (x0, y0), (x1, y1) = r2.vertices[i], r2.vertices[(i + 1) % n]
        # inside of a CCW edge: cross((p1-p0), (v-p0)) >= 0
        a = -(y1 - y0)
        b = x1 - x0
        c = a * x0 + b * y0
        verts = clip_halfplane(verts, -a, -b, -c)
        if not verts:
            return EMPTY_REGION
    return RegionPolygon(tuple(verts))


__all__ = [
    "EMPTY_REGION",
    "RegionPolygon",
    "Vertex",
    "clip_halfplane",
    "intersect_regions",
    "shoelace_area",
]
