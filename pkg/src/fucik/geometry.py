"""Planar domains built as unions of primitive shapes, with exact clearance.

A domain is the union of open primitives (balls, rectangles, stadiums,
annuli, simple polygons).  The quantity every solver needs is the
*clearance* of an interior point, i.e. its Euclidean distance to the
complement of the union.  For a union this is not the minimum of per-shape
boundary distances (that is only a lower bound inside overlaps), so the
boundary of the union is computed explicitly: each primitive's boundary is
split into segments and circular arcs, every piece is cut where it crosses
another primitive's boundary, and the sub-pieces lying inside another
primitive are discarded.  Distances to the surviving pieces have closed
forms.

A one-dimensional :class:`Interval` is accepted as a degenerate domain so
that the interval case can flow through the same entry points.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Any, NamedTuple, Sequence, Union

import numpy as np

from .errors import DomainError, ValidationError

TWO_PI = 2.0 * math.pi


class Point2(NamedTuple):
    x: float
    y: float


def _point(value: Any, what: str) -> tuple[float, float]:
    try:
        x, y = (float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{what} must be a pair of numbers, got {value!r}") from exc
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValidationError(f"{what} has non-finite coordinates: {value!r}")
    return (x, y)


def _positive(value: Any, what: str) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{what} must be a number, got {value!r}") from exc
    if not math.isfinite(v) or v <= 0.0:
        raise ValidationError(f"{what} must be finite and strictly positive, got {value!r}")
    return v


def _rotate(p: tuple[float, float], angle: float, shift: tuple[float, float]) -> tuple[float, float]:
    c, s = math.cos(angle), math.sin(angle)
    return (c * p[0] - s * p[1] + shift[0], s * p[0] + c * p[1] + shift[1])


# ---------------------------------------------------------------------------
# Boundary pieces


@dataclass(frozen=True)
class Segment:
    p0: tuple[float, float]
    p1: tuple[float, float]

    def point_at(self, u: float) -> tuple[float, float]:
        return (self.p0[0] + u * (self.p1[0] - self.p0[0]), self.p0[1] + u * (self.p1[1] - self.p0[1]))

    @property
    def length(self) -> float:
        return math.hypot(self.p1[0] - self.p0[0], self.p1[1] - self.p0[1])

    def param_of(self, q: tuple[float, float]) -> float:
        dx, dy = self.p1[0] - self.p0[0], self.p1[1] - self.p0[1]
        return ((q[0] - self.p0[0]) * dx + (q[1] - self.p0[1]) * dy) / (dx * dx + dy * dy)

    def sub(self, u0: float, u1: float) -> "Segment":
        return Segment(self.point_at(u0), self.point_at(u1))


@dataclass(frozen=True)
class Arc:
    """Counterclockwise arc from angle ``theta0`` sweeping ``span`` radians."""

    center: tuple[float, float]
    radius: float
    theta0: float
    span: float

    def point_at(self, u: float) -> tuple[float, float]:
        a = self.theta0 + u * self.span
        return (self.center[0] + self.radius * math.cos(a), self.center[1] + self.radius * math.sin(a))

    @property
    def length(self) -> float:
        return self.radius * self.span

    @property
    def full(self) -> bool:
        return self.span >= TWO_PI - 1e-15

    def param_of(self, q: tuple[float, float]) -> float:
        a = math.atan2(q[1] - self.center[1], q[0] - self.center[0])
        rel = (a - self.theta0) % TWO_PI
        if self.full:
            return rel / self.span
        # Points just before theta0 wrap to ~2*pi; snap them back to 0.
        if rel > self.span and rel > 0.5 * (self.span + TWO_PI):
            rel -= TWO_PI
        return rel / self.span

    def sub(self, u0: float, u1: float) -> "Arc":
        return Arc(self.center, self.radius, self.theta0 + u0 * self.span, (u1 - u0) * self.span)


Piece = Union[Segment, Arc]


def _on_piece(piece: Piece, q: tuple[float, float], eps: float) -> bool:
    u = piece.param_of(q)
    slack = eps / max(piece.length, 1e-300)
    if isinstance(piece, Arc) and piece.full:
        return True
    return -slack <= u <= 1.0 + slack


def _carrier_intersections(p: Piece, q: Piece) -> list[tuple[float, float]]:
    """Intersection points of the full lines/circles supporting two pieces."""
    if isinstance(p, Segment) and isinstance(q, Segment):
        d1 = (p.p1[0] - p.p0[0], p.p1[1] - p.p0[1])
        d2 = (q.p1[0] - q.p0[0], q.p1[1] - q.p0[1])
        den = d1[0] * d2[1] - d1[1] * d2[0]
        if abs(den) <= 1e-15 * math.hypot(*d1) * math.hypot(*d2):
            return []
        w = (q.p0[0] - p.p0[0], q.p0[1] - p.p0[1])
        u = (w[0] * d2[1] - w[1] * d2[0]) / den
        return [p.point_at(u)]
    if isinstance(p, Arc) and isinstance(q, Segment):
        return _carrier_intersections(q, p)
    if isinstance(p, Segment):
        assert isinstance(q, Arc)
        d = (p.p1[0] - p.p0[0], p.p1[1] - p.p0[1])
        f = (p.p0[0] - q.center[0], p.p0[1] - q.center[1])
        a = d[0] * d[0] + d[1] * d[1]
        b = 2.0 * (f[0] * d[0] + f[1] * d[1])
        c = f[0] * f[0] + f[1] * f[1] - q.radius * q.radius
        disc = b * b - 4.0 * a * c
        if disc < 0.0:
            return []
        r = math.sqrt(disc)
        return [p.point_at((-b - r) / (2 * a)), p.point_at((-b + r) / (2 * a))]
    assert isinstance(p, Arc) and isinstance(q, Arc)
    dx, dy = q.center[0] - p.center[0], q.center[1] - p.center[1]
    dist = math.hypot(dx, dy)
    if dist <= 1e-15 * (p.radius + q.radius):
        return []
    if dist > p.radius + q.radius or dist < abs(p.radius - q.radius):
        return []
    a = (p.radius**2 - q.radius**2 + dist**2) / (2 * dist)
    h = math.sqrt(max(p.radius**2 - a * a, 0.0))
    mx, my = p.center[0] + a * dx / dist, p.center[1] + a * dy / dist
    return [(mx + h * dy / dist, my - h * dx / dist), (mx - h * dy / dist, my + h * dx / dist)]


# ---------------------------------------------------------------------------
# Primitive shapes


@dataclass(frozen=True)
class Ball:
    center: tuple[float, float]
    radius: float
    kind = "ball"

    def __post_init__(self):
        object.__setattr__(self, "center", _point(self.center, "ball center"))
        object.__setattr__(self, "radius", _positive(self.radius, "ball radius"))

    def contains(self, pts: np.ndarray) -> np.ndarray:
        d2 = (pts[:, 0] - self.center[0]) ** 2 + (pts[:, 1] - self.center[1]) ** 2
        return d2 < self.radius**2

    def boundary(self) -> list[Piece]:
        return [Arc(self.center, self.radius, 0.0, TWO_PI)]

    def bbox(self) -> tuple[float, float, float, float]:
        (x, y), r = self.center, self.radius
        return (x - r, y - r, x + r, y + r)

    def scaled(self, s: float) -> "Ball":
        return Ball((self.center[0] * s, self.center[1] * s), self.radius * s)

    def moved(self, angle: float, shift: tuple[float, float]) -> "Ball":
        return Ball(_rotate(self.center, angle, shift), self.radius)

    def to_dict(self) -> dict:
        return {"type": "ball", "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class Rectangle:
    min: tuple[float, float]
    max: tuple[float, float]
    kind = "rectangle"

    def __post_init__(self):
        lo, hi = _point(self.min, "rectangle min"), _point(self.max, "rectangle max")
        if not (lo[0] < hi[0] and lo[1] < hi[1]):
            raise ValidationError(f"rectangle corners must be strictly ordered, got {lo} and {hi}")
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)

    def contains(self, pts: np.ndarray) -> np.ndarray:
        x, y = pts[:, 0], pts[:, 1]
        return (x > self.min[0]) & (x < self.max[0]) & (y > self.min[1]) & (y < self.max[1])

    def corners(self) -> list[tuple[float, float]]:
        (x0, y0), (x1, y1) = self.min, self.max
        return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]

    def boundary(self) -> list[Piece]:
        c = self.corners()
        return [Segment(c[i], c[(i + 1) % 4]) for i in range(4)]

    def bbox(self) -> tuple[float, float, float, float]:
        return (*self.min, *self.max)

    def scaled(self, s: float) -> "Rectangle":
        return Rectangle((self.min[0] * s, self.min[1] * s), (self.max[0] * s, self.max[1] * s))

    def moved(self, angle: float, shift: tuple[float, float]) -> "Rectangle | Polygon":
        if angle % TWO_PI == 0.0:
            return Rectangle(
                (self.min[0] + shift[0], self.min[1] + shift[1]),
                (self.max[0] + shift[0], self.max[1] + shift[1]),
            )
        return Polygon(tuple(_rotate(c, angle, shift) for c in self.corners()))

    def to_dict(self) -> dict:
        return {"type": "rectangle", "min": list(self.min), "max": list(self.max)}


@dataclass(frozen=True)
class Stadium:
    """Points within ``half_width`` of the segment ``a``-``b``."""

    a: tuple[float, float]
    b: tuple[float, float]
    half_width: float
    kind = "stadium"

    def __post_init__(self):
        a, b = _point(self.a, "stadium endpoint a"), _point(self.b, "stadium endpoint b")
        if a == b:
            raise ValidationError("stadium endpoints coincide; use a ball instead")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "half_width", _positive(self.half_width, "stadium half_width"))

    def contains(self, pts: np.ndarray) -> np.ndarray:
        seg = np.array([[*self.a, *self.b]])
        return _segment_distances(pts, seg)[:, 0] < self.half_width

    def boundary(self) -> list[Piece]:
        (ax, ay), (bx, by), w = self.a, self.b, self.half_width
        th = math.atan2(by - ay, bx - ax)
        nx, ny = -math.sin(th), math.cos(th)
        return [
            Segment((ax + w * nx, ay + w * ny), (bx + w * nx, by + w * ny)),
            Arc(self.b, w, th - math.pi / 2, math.pi),
            Segment((bx - w * nx, by - w * ny), (ax - w * nx, ay - w * ny)),
            Arc(self.a, w, th + math.pi / 2, math.pi),
        ]

    def bbox(self) -> tuple[float, float, float, float]:
        w = self.half_width
        return (
            min(self.a[0], self.b[0]) - w,
            min(self.a[1], self.b[1]) - w,
            max(self.a[0], self.b[0]) + w,
            max(self.a[1], self.b[1]) + w,
        )

    def scaled(self, s: float) -> "Stadium":
        return Stadium((self.a[0] * s, self.a[1] * s), (self.b[0] * s, self.b[1] * s), self.half_width * s)

    def moved(self, angle: float, shift: tuple[float, float]) -> "Stadium":
        return Stadium(_rotate(self.a, angle, shift), _rotate(self.b, angle, shift), self.half_width)

    def to_dict(self) -> dict:
        return {"type": "stadium", "a": list(self.a), "b": list(self.b), "half_width": self.half_width}


@dataclass(frozen=True)
class Annulus:
    center: tuple[float, float]
    inner: float
    outer: float
    kind = "annulus"

    def __post_init__(self):
        object.__setattr__(self, "center", _point(self.center, "annulus center"))
        inner = _positive(self.inner, "annulus inner radius")
        outer = _positive(self.outer, "annulus outer radius")
        if not inner < outer:
            raise ValidationError(f"annulus needs inner < outer, got {inner} >= {outer}")
        object.__setattr__(self, "inner", inner)
        object.__setattr__(self, "outer", outer)

    def contains(self, pts: np.ndarray) -> np.ndarray:
        d2 = (pts[:, 0] - self.center[0]) ** 2 + (pts[:, 1] - self.center[1]) ** 2
        return (d2 > self.inner**2) & (d2 < self.outer**2)

    def boundary(self) -> list[Piece]:
        return [Arc(self.center, self.outer, 0.0, TWO_PI), Arc(self.center, self.inner, 0.0, TWO_PI)]

    def bbox(self) -> tuple[float, float, float, float]:
        (x, y), r = self.center, self.outer
        return (x - r, y - r, x + r, y + r)

    def scaled(self, s: float) -> "Annulus":
        return Annulus((self.center[0] * s, self.center[1] * s), self.inner * s, self.outer * s)

    def moved(self, angle: float, shift: tuple[float, float]) -> "Annulus":
        return Annulus(_rotate(self.center, angle, shift), self.inner, self.outer)

    def to_dict(self) -> dict:
        return {"type": "annulus", "center": list(self.center), "inner": self.inner, "outer": self.outer}


def _segments_cross(p1, p2, q1, q2) -> bool:
    """Closed-segment intersection test (touching counts)."""

    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return 0 if v == 0 else (1 if v > 0 else -1)

    def on_seg(a, b, c):
        return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    o1, o2, o3, o4 = orient(p1, p2, q1), orient(p1, p2, q2), orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True
    return (
        (o1 == 0 and on_seg(p1, p2, q1))
        or (o2 == 0 and on_seg(p1, p2, q2))
        or (o3 == 0 and on_seg(q1, q2, p1))
        or (o4 == 0 and on_seg(q1, q2, p2))
    )


@dataclass(frozen=True)
class Polygon:
    """Simple polygon; vertices are stored counterclockwise."""

    vertices: tuple[tuple[float, float], ...]
    kind = "polygon"

    def __post_init__(self):
        verts = tuple(_point(v, "polygon vertex") for v in self.vertices)
        if len(verts) >= 2 and verts[0] == verts[-1]:
            verts = verts[:-1]
        n = len(verts)
        if n < 3:
            raise ValidationError("polygon needs at least 3 vertices")
        area = 0.5 * sum(
            verts[i][0] * verts[(i + 1) % n][1] - verts[(i + 1) % n][0] * verts[i][1] for i in range(n)
        )
        if area == 0.0:
            raise ValidationError("polygon has zero area")
        if area < 0.0:
            verts = verts[::-1]
        for i in range(n):
            if verts[i] == verts[(i + 1) % n]:
                raise ValidationError("polygon has repeated consecutive vertices")
        for i in range(n):
            for j in range(i + 1, n):
                p1, p2 = verts[i], verts[(i + 1) % n]
                q1, q2 = verts[j], verts[(j + 1) % n]
                adjacent = j == i + 1 or (i == 0 and j == n - 1)
                if adjacent:
                    # Adjacent edges may only share their common vertex.
                    shared = p2 if j == i + 1 else p1
                    far_p = p1 if j == i + 1 else p2
                    far_q = q2 if j == i + 1 else q1
                    d1 = (far_p[0] - shared[0], far_p[1] - shared[1])
                    d2 = (far_q[0] - shared[0], far_q[1] - shared[1])
                    cross = d1[0] * d2[1] - d1[1] * d2[0]
                    if cross == 0 and d1[0] * d2[0] + d1[1] * d2[1] > 0:
                        raise ValidationError("polygon has overlapping adjacent edges")
                elif _segments_cross(p1, p2, q1, q2):
                    raise ValidationError("polygon is not simple (edges intersect)")
        object.__setattr__(self, "vertices", verts)

    def _edges(self) -> np.ndarray:
        v = np.asarray(self.vertices)
        return np.hstack([v, np.roll(v, -1, axis=0)])

    def contains(self, pts: np.ndarray) -> np.ndarray:
        e = self._edges()
        xi, yi, xj, yj = (e[:, k][None, :] for k in range(4))
        px, py = pts[:, 0:1], pts[:, 1:2]
        straddle = (yi > py) != (yj > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = (xj - xi) * (py - yi) / (yj - yi) + xi
        crossings = np.count_nonzero(straddle & (px < xint), axis=1)
        on_edge = _segment_distances(pts, e).min(axis=1) == 0.0
        return (crossings % 2 == 1) & ~on_edge

    def boundary(self) -> list[Piece]:
        v, n = self.vertices, len(self.vertices)
        return [Segment(v[i], v[(i + 1) % n]) for i in range(n)]

    def bbox(self) -> tuple[float, float, float, float]:
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return (min(xs), min(ys), max(xs), max(ys))

    def scaled(self, s: float) -> "Polygon":
        return Polygon(tuple((x * s, y * s) for x, y in self.vertices))

    def moved(self, angle: float, shift: tuple[float, float]) -> "Polygon":
        return Polygon(tuple(_rotate(v, angle, shift) for v in self.vertices))

    def to_dict(self) -> dict:
        return {"type": "polygon", "vertices": [list(v) for v in self.vertices]}


@dataclass(frozen=True)
class Interval:
    """The open interval (a, b); a one-dimensional degenerate domain."""

    a: float
    b: float
    kind = "interval"

    def __post_init__(self):
        try:
            a, b = float(self.a), float(self.b)
        except (TypeError, ValueError) as exc:
            raise ValidationError("interval endpoints must be numbers") from exc
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise ValidationError(f"interval needs finite a < b, got ({self.a}, {self.b})")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def length(self) -> float:
        return self.b - self.a

    def contains(self, pts: np.ndarray) -> np.ndarray:
        return (pts[:, 0] > self.a) & (pts[:, 0] < self.b) & (pts[:, 1] == 0.0)

    def bbox(self) -> tuple[float, float, float, float]:
        return (self.a, 0.0, self.b, 0.0)

    def scaled(self, s: float) -> "Interval":
        return Interval(self.a * s, self.b * s)

    def moved(self, angle: float, shift: tuple[float, float]) -> "Interval":
        return Interval(self.a + shift[0], self.b + shift[0])

    def to_dict(self) -> dict:
        return {"type": "interval", "a": self.a, "b": self.b}


Shape = Union[Ball, Rectangle, Stadium, Annulus, Polygon, Interval]


# ---------------------------------------------------------------------------
# Domain


@dataclass(frozen=True)
class DomainSpec:
    """A union of primitive shapes, treated as one open set."""

    shapes: tuple[Shape, ...]

    def __post_init__(self):
        shapes = tuple(self.shapes)
        if not shapes:
            raise ValidationError("a domain needs at least one shape")
        for s in shapes:
            if not isinstance(s, (Ball, Rectangle, Stadium, Annulus, Polygon, Interval)):
                raise ValidationError(f"unknown shape object {s!r}")
        if any(isinstance(s, Interval) for s in shapes) and len(shapes) > 1:
            raise ValidationError("an interval domain must consist of a single interval")
        if len(set(shapes)) != len(shapes):
            raise ValidationError("domain contains duplicate shapes")
        object.__setattr__(self, "shapes", shapes)

    @property
    def is_interval(self) -> bool:
        return isinstance(self.shapes[0], Interval)

    def scaled(self, s: float) -> "DomainSpec":
        s = _positive(s, "scale factor")
        return DomainSpec(tuple(sh.scaled(s) for sh in self.shapes))

    def moved(self, angle: float, shift: Sequence[float] = (0.0, 0.0)) -> "DomainSpec":
        """Rigid motion: rotate by ``angle`` about the origin, then translate."""
        sh = _point(shift, "shift")
        return DomainSpec(tuple(s.moved(angle, sh) for s in self.shapes))

    def union(self, *others: Shape) -> "DomainSpec":
        return DomainSpec(self.shapes + tuple(others))

    def to_dict(self) -> dict:
        return {"shapes": [s.to_dict() for s in self.shapes]}


# ---------------------------------------------------------------------------
# Constructors and JSON


def ball(radius: float = 1.0, center: Sequence[float] = (0.0, 0.0)) -> DomainSpec:
    return DomainSpec((Ball(tuple(center), radius),))


def rectangle(lo: Sequence[float] = (0.0, 0.0), hi: Sequence[float] = (1.0, 1.0)) -> DomainSpec:
    return DomainSpec((Rectangle(tuple(lo), tuple(hi)),))


def unit_square() -> DomainSpec:
    return rectangle((0.0, 0.0), (1.0, 1.0))


def interval(a: float = 0.0, b: float = 1.0) -> DomainSpec:
    return DomainSpec((Interval(a, b),))


def linked_balls(
    r1: float, r2: float, gap: float, tube_half_width: float | None = None
) -> DomainSpec:
    """Ball of radius ``r1`` joined to a ball of radius ``r2`` by a straight tube.

    The balls are centred on the x-axis with ``gap`` between them; the tube
    is a stadium running centre to centre so its rounded ends stay inside
    the balls.  Requires ``0 < gap < r1 <= r2`` and ``tube_half_width < r1``
    (default ``r1 / 2``).
    """
    r1 = _positive(r1, "r1")
    r2 = _positive(r2, "r2")
    gap = _positive(gap, "gap")
    if r1 > r2:
        raise ValidationError(f"linked balls need r1 <= r2, got {r1} > {r2}")
    if gap >= r1:
        raise ValidationError(f"linked balls need gap < r1, got {gap} >= {r1}")
    w = r1 / 2.0 if tube_half_width is None else _positive(tube_half_width, "tube_half_width")
    if w >= r1:
        raise ValidationError(f"tube_half_width must be below r1, got {w} >= {r1}")
    c2 = (r1 + gap + r2, 0.0)
    return DomainSpec((Ball((0.0, 0.0), r1), Stadium((0.0, 0.0), c2, w), Ball(c2, r2)))


def _shape_from_dict(obj: Any) -> Shape:
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValidationError(f"shape entries must be objects with a 'type' key, got {obj!r}")
    kind = obj["type"]
    try:
        if kind == "ball":
            return Ball(obj["center"], obj["radius"])
        if kind == "rectangle":
            return Rectangle(obj["min"], obj["max"])
        if kind == "stadium":
            return Stadium(obj["a"], obj["b"], obj["half_width"])
        if kind == "annulus":
            return Annulus(obj["center"], obj["inner"], obj["outer"])
        if kind == "polygon":
            return Polygon(tuple(obj["vertices"]))
        if kind == "interval":
            return Interval(obj["a"], obj["b"])
    except KeyError as exc:
        raise ValidationError(f"shape of type {kind!r} is missing field {exc}") from exc
    raise ValidationError(f"unknown shape type {kind!r}")


def domain_from_dict(obj: Any) -> DomainSpec:
    """Build a domain from its JSON object form.

    Either ``{"shapes": [...]}`` or the generator form
    ``{"linked_balls": {"r1": ..., "r2": ..., "gap": ..., "tube_half_width": ...}}``.
    Both keys may appear together; the generated shapes are appended.
    """
    if not isinstance(obj, dict):
        raise ValidationError("domain JSON must be an object")
    shapes: list[Shape] = []
    if "shapes" in obj:
        if not isinstance(obj["shapes"], list):
            raise ValidationError("'shapes' must be a list")
        shapes.extend(_shape_from_dict(s) for s in obj["shapes"])
    if "linked_balls" in obj:
        lb = obj["linked_balls"]
        if not isinstance(lb, dict):
            raise ValidationError("'linked_balls' must be an object")
        try:
            gen = linked_balls(lb["r1"], lb["r2"], lb["gap"], lb.get("tube_half_width"))
        except KeyError as exc:
            raise ValidationError(f"linked_balls is missing field {exc}") from exc
        shapes.extend(gen.shapes)
    if not shapes:
        raise ValidationError("domain JSON defines no shapes")
    return DomainSpec(tuple(shapes))


def load_domain(path: str | Path) -> DomainSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read domain file {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed domain JSON in {path}: {exc}") from exc
    return domain_from_dict(obj)


# ---------------------------------------------------------------------------
# Union boundary arrangement


def _segment_distances(pts: np.ndarray, segs: np.ndarray) -> np.ndarray:
    """Distances from points (M, 2) to segments (S, 4); returns (M, S)."""
    a = segs[:, :2]
    ab = segs[:, 2:] - a
    l2 = np.einsum("ij,ij->i", ab, ab)
    ap = pts[:, None, :] - a[None, :, :]
    u = np.clip(np.einsum("msk,sk->ms", ap, ab) / l2, 0.0, 1.0)
    diff = ap - u[..., None] * ab[None, :, :]
    return np.sqrt(np.einsum("msk,msk->ms", diff, diff))


def _arc_distances(pts: np.ndarray, arcs: np.ndarray) -> np.ndarray:
    """Distances from points (M, 2) to arcs (A, 5) = (cx, cy, r, theta0, span)."""
    c = arcs[:, :2]
    r, th0, span = arcs[:, 2], arcs[:, 3], arcs[:, 4]
    v = pts[:, None, :] - c[None, :, :]
    rho = np.hypot(v[..., 0], v[..., 1])
    rel = np.mod(np.arctan2(v[..., 1], v[..., 0]) - th0, TWO_PI)
    on = (rel <= span) | (span >= TWO_PI - 1e-15)
    d_on = np.abs(rho - r)
    e0 = c + r[:, None] * np.stack([np.cos(th0), np.sin(th0)], axis=1)
    e1 = c + r[:, None] * np.stack([np.cos(th0 + span), np.sin(th0 + span)], axis=1)
    d0 = np.hypot(pts[:, None, 0] - e0[None, :, 0], pts[:, None, 1] - e0[None, :, 1])
    d1 = np.hypot(pts[:, None, 0] - e1[None, :, 0], pts[:, None, 1] - e1[None, :, 1])
    return np.where(on, d_on, np.minimum(d0, d1))


class Arrangement:
    """Boundary of a union of shapes as a list of surviving segments and arcs."""

    def __init__(self, shapes: Sequence[Shape]):
        self.shapes = tuple(shapes)
        lo = np.min([s.bbox()[:2] for s in shapes], axis=0)
        hi = np.max([s.bbox()[2:] for s in shapes], axis=0)
        self.bbox = (float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))
        scale = float(np.hypot(*(hi - lo)))
        eps = 1e-11 * scale
        pieces: list[Piece] = []
        boundaries = [s.boundary() for s in shapes]
        for i, own in enumerate(boundaries):
            others = [j for j in range(len(shapes)) if j != i]
            for piece in own:
                pieces.extend(self._clip(piece, [boundaries[j] for j in others], [shapes[j] for j in others], eps))
        self.pieces = pieces
        segs = [(*p.p0, *p.p1) for p in pieces if isinstance(p, Segment)]
        arcs = [(*p.center, p.radius, p.theta0, p.span) for p in pieces if isinstance(p, Arc)]
        self.segs = np.array(segs, dtype=float).reshape(-1, 4)
        self.arcs = np.array(arcs, dtype=float).reshape(-1, 5)

    @staticmethod
    def _clip(piece: Piece, other_bounds, other_shapes, eps: float) -> list[Piece]:
        if not other_shapes:
            return [piece]
        params = {0.0, 1.0}
        for bound in other_bounds:
            for q in bound:
                for x in _carrier_intersections(piece, q):
                    if _on_piece(piece, x, eps) and _on_piece(q, x, eps):
                        params.add(min(max(piece.param_of(x), 0.0), 1.0))
        us = sorted(params)
        keep: list[tuple[float, float]] = []
        for u0, u1 in zip(us[:-1], us[1:]):
            if (u1 - u0) * piece.length <= eps:
                continue
            mid = np.array([piece.point_at(0.5 * (u0 + u1))])
            if any(bool(s.contains(mid)[0]) for s in other_shapes):
                continue
            if keep and abs(keep[-1][1] - u0) * piece.length <= eps:
                keep[-1] = (keep[-1][0], u1)
            else:
                keep.append((u0, u1))
        if isinstance(piece, Arc) and piece.full and len(keep) >= 2 and keep[0][0] == 0.0 and keep[-1][1] == 1.0:
            # Rejoin the two halves of a surviving arc that straddles angle theta0.
            first, last = keep.pop(0), keep.pop()
            keep.append((last[0], first[1] + 1.0))
        return [piece if (u0, u1) == (0.0, 1.0) else piece.sub(u0, u1) for u0, u1 in keep]

    def distance(self, pts: np.ndarray) -> np.ndarray:
        """Distance from each point to the union boundary."""
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        d = np.full(len(pts), np.inf)
        if len(self.segs):
            d = np.minimum(d, _segment_distances(pts, self.segs).min(axis=1))
        if len(self.arcs):
            d = np.minimum(d, _arc_distances(pts, self.arcs).min(axis=1))
        return d

    def piece_distances(self, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Distance from one point to every boundary piece, with gradients.

        Returns ``(d, g)`` with ``d`` of shape (P,) and ``g`` of shape (P, 2);
        ``g[k]`` is the unit vector from the nearest point of piece ``k`` to
        ``p`` (zero where undefined).  Segments come first, then arcs.
        """
        p = np.asarray(p, dtype=float).reshape(2)
        ds, gs = [], []
        if len(self.segs):
            a, b = self.segs[:, :2], self.segs[:, 2:]
            ab = b - a
            u = np.clip(((p - a) * ab).sum(1) / (ab * ab).sum(1), 0.0, 1.0)
            v = p - (a + u[:, None] * ab)
            ds.append(np.hypot(v[:, 0], v[:, 1]))
            gs.append(v)
        if len(self.arcs):
            c, r, th0, span = self.arcs[:, :2], self.arcs[:, 2], self.arcs[:, 3], self.arcs[:, 4]
            v = p - c
            rho = np.hypot(v[:, 0], v[:, 1])
            rel = np.mod(np.arctan2(v[:, 1], v[:, 0]) - th0, TWO_PI)
            on = (rel <= span) | (span >= TWO_PI - 1e-15)
            with np.errstate(invalid="ignore", divide="ignore"):
                radial = np.where((rho > 0)[:, None], v / rho[:, None], 0.0)
            near = c + r[:, None] * radial
            e0 = c + r[:, None] * np.column_stack([np.cos(th0), np.sin(th0)])
            e1 = c + r[:, None] * np.column_stack([np.cos(th0 + span), np.sin(th0 + span)])
            d0, d1 = np.hypot(*(p - e0).T), np.hypot(*(p - e1).T)
            end = np.where((d0 <= d1)[:, None], e0, e1)
            q = np.where(on[:, None], near, end)
            w = p - q
            ds.append(np.hypot(w[:, 0], w[:, 1]))
            gs.append(w)
        d = np.concatenate(ds)
        g = np.concatenate(gs)
        with np.errstate(invalid="ignore", divide="ignore"):
            g = np.where((d > 0)[:, None], g / d[:, None], 0.0)
        return d, g

    def contains(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        inside = np.zeros(len(pts), dtype=bool)
        for s in self.shapes:
            inside |= s.contains(pts)
        return inside

    def signed_clearance(self, pts: np.ndarray) -> np.ndarray:
        """Clearance inside the domain, minus the distance to it outside."""
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        d = self.distance(pts)
        return np.where(self.contains(pts), d, -d)

    def boundary_samples(self, n: int = 2048) -> np.ndarray:
        """Points spread along the union boundary by arc length, endpoints included."""
        total = sum(p.length for p in self.pieces)
        out = []
        for p in self.pieces:
            k = max(2, int(math.ceil(n * p.length / total)) + 1)
            out.extend(p.point_at(u) for u in np.linspace(0.0, 1.0, k))
        return np.array(out)


@lru_cache(maxsize=256)
def arrangement(domain: DomainSpec) -> Arrangement:
    if domain.is_interval:
        raise ValidationError("interval domains have no planar boundary arrangement")
    return Arrangement(domain.shapes)


# ---------------------------------------------------------------------------
# Public queries


def contains(domain: DomainSpec, p: Sequence[float]) -> bool:
    """True iff ``p`` lies in the open union (boundary points are outside)."""
    q = np.array([_point(p, "query point")])
    if domain.is_interval:
        iv = domain.shapes[0]
        return bool(iv.a < q[0, 0] < iv.b and q[0, 1] == 0.0)
    return bool(arrangement(domain).contains(q)[0])


def clearance(domain: DomainSpec, p: Sequence[float]) -> float:
    """Exact Euclidean distance from an interior point to the complement."""
    q = _point(p, "query point")
    if not contains(domain, q):
        raise DomainError(f"point {q} is not inside the domain")
    if domain.is_interval:
        iv = domain.shapes[0]
        return min(q[0] - iv.a, iv.b - q[0])
    return float(arrangement(domain).distance(np.array([q]))[0])


def bounding_box(domain: DomainSpec) -> tuple[Point2, Point2]:
    boxes = np.array([s.bbox() for s in domain.shapes])
    return (
        Point2(float(boxes[:, 0].min()), float(boxes[:, 1].min())),
        Point2(float(boxes[:, 2].max()), float(boxes[:, 3].max())),
    )


@lru_cache(maxsize=256)
def diameter(domain: DomainSpec) -> float:
    """Largest distance between two points of the closure (sampled boundary)."""
    if domain.is_interval:
        return domain.shapes[0].length
    from scipy.spatial import ConvexHull

    pts = arrangement(domain).boundary_samples(1024)
    hull = pts[ConvexHull(pts).vertices]
    diff = hull[:, None, :] - hull[None, :, :]
    return float(np.sqrt(np.einsum("ijk,ijk->ij", diff, diff).max()))


class RasterClearance:
    """Grid approximation of clearance for polygon-heavy unions.

    The domain is rasterised at spacing ``h`` (default ``diameter / 2048``),
    an exact Euclidean distance transform is taken of the inside mask and
    queries are answered by bilinear interpolation.  The error against the
    exact clearance is O(h); :attr:`error_bound` gives the bound used by
    the tests.
    """

    def __init__(self, domain: DomainSpec, h: float | None = None):
        from scipy.ndimage import distance_transform_edt

        arr = arrangement(domain)
        self.h = float(h) if h is not None else diameter(domain) / 2048.0
        x0, y0, x1, y1 = arr.bbox
        self.origin = (x0 - 2 * self.h, y0 - 2 * self.h)
        nx = int(math.ceil((x1 - x0) / self.h)) + 5
        ny = int(math.ceil((y1 - y0) / self.h)) + 5
        xs = self.origin[0] + self.h * np.arange(nx)
        ys = self.origin[1] + self.h * np.arange(ny)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        mask = arr.contains(np.column_stack([gx.ravel(), gy.ravel()])).reshape(nx, ny)
        self.field = distance_transform_edt(mask, sampling=self.h)
        self.error_bound = 2.0 * self.h

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        from scipy.ndimage import map_coordinates

        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        coords = np.stack([(pts[:, 0] - self.origin[0]) / self.h, (pts[:, 1] - self.origin[1]) / self.h])
        return map_coordinates(self.field, coords, order=1, mode="nearest")
