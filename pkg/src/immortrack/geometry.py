"""Oriented 3D boxes and their overlap measures.

Boxes are gravity-aligned: the only rotation is yaw about the z axis, so the
3D intersection factorises into a bird's-eye-view polygon overlap times a
vertical interval overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

# points within this distance of a clipping edge count as inside
CLIP_EPS = 1e-9

Point = tuple[float, float]


def normalize_angle(a: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    r = math.remainder(a, 2.0 * math.pi)
    if r <= -math.pi:
        r += 2.0 * math.pi
    return r


@dataclass(frozen=True)
class Box3D:
    """Gravity-aligned 3D box: center (x, y, z), heading yaw, size (l, w, h).

    ``l`` runs along the heading, ``w`` across it. The yaw is normalised
    into (-pi, pi] on construction.
    """

    x: float
    y: float
    z: float
    yaw: float
    l: float
    w: float
    h: float

    def __post_init__(self):
        vals = (self.x, self.y, self.z, self.yaw, self.l, self.w, self.h)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite box field in {vals}")
        if self.l <= 0 or self.w <= 0 or self.h <= 0:
            raise ValueError(f"box dimensions must be positive, got l={self.l} w={self.w} h={self.h}")
        for name in ("x", "y", "z", "l", "w", "h"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "yaw", normalize_angle(float(self.yaw)))

    @classmethod
    def from_array(cls, v: Sequence[float]) -> "Box3D":
        """Build from a ``[x, y, z, yaw, l, w, h]`` vector."""
        return cls(*(float(c) for c in v[:7]))

    def key(self) -> tuple[float, ...]:
        return (self.x, self.y, self.z, self.yaw, self.l, self.w, self.h)

    def to_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.yaw, self.l, self.w, self.h])

    @property
    def volume(self) -> float:
        return self.l * self.w * self.h

    @property
    def z_min(self) -> float:
        return self.z - 0.5 * self.h

    @property
    def z_max(self) -> float:
        return self.z + 0.5 * self.h


def bev_corners(b: Box3D) -> list[Point]:
    """Corners of the box footprint, counter-clockwise, front-left first."""
    c, s = math.cos(b.yaw), math.sin(b.yaw)
    hl, hw = 0.5 * b.l, 0.5 * b.w
    out = []
    for dx, dy in ((hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)):
        out.append((b.x + c * dx - s * dy, b.y + s * dx + c * dy))
    return out


def polygon_area(poly: Sequence[Point]) -> float:
    """Signed shoelace area (positive for counter-clockwise)."""
    n = len(poly)
    if n < 3:
        return 0.0
    acc = 0.0
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        acc += x0 * y1 - x1 * y0
    return 0.5 * acc


def _clip(subject: list[Point], a: Point, b: Point) -> list[Point]:
    # keep the part of `subject` left of the directed line a->b
    ex, ey = b[0] - a[0], b[1] - a[1]
    norm = math.hypot(ex, ey)

    def side(p: Point) -> float:
        # signed distance, positive on the left
        return (ex * (p[1] - a[1]) - ey * (p[0] - a[0])) / norm

    out: list[Point] = []
    n = len(subject)
    for i in range(n):
        cur, nxt = subject[i], subject[(i + 1) % n]
        dc, dn = side(cur), side(nxt)
        cur_in, nxt_in = dc >= -CLIP_EPS, dn >= -CLIP_EPS
        if cur_in:
            out.append(cur)
        if cur_in != nxt_in:
            t = dc / (dc - dn)
            out.append((cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])))
    return out


def polygon_intersection_area(p: Sequence[Point], q: Sequence[Point]) -> float:
    """Area of the intersection of two convex counter-clockwise polygons.

    Clips ``p`` successively against every edge of ``q``. Degenerate
    (zero-area) inputs give 0.
    """
    area_p, area_q = abs(polygon_area(p)), abs(polygon_area(q))
    if area_p <= 0.0 or area_q <= 0.0:
        return 0.0
    poly = list(p)
    m = len(q)
    for i in range(m):
        a, b = q[i], q[(i + 1) % m]
        if a == b:
            continue
        poly = _clip(poly, a, b)
        if len(poly) < 3:
            return 0.0
    return min(max(abs(polygon_area(poly)), 0.0), area_p, area_q)


def convex_hull(points: Sequence[Point]) -> list[Point]:
    """Andrew's monotone chain; counter-clockwise, no repeated end point."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _z_overlap(a: Box3D, b: Box3D) -> float:
    return max(0.0, min(a.z_max, b.z_max) - max(a.z_min, b.z_min))


def _intersection_volume(a: Box3D, b: Box3D) -> float:
    dz = _z_overlap(a, b)
    if dz <= 0.0:
        return 0.0
    # clip in a canonical order so the result is bitwise symmetric
    if b.key() < a.key():
        a, b = b, a
    return polygon_intersection_area(bev_corners(a), bev_corners(b)) * dz


def iou3d(a: Box3D, b: Box3D) -> float:
    """Volumetric intersection-over-union of two boxes."""
    inter = _intersection_volume(a, b)
    union = a.volume + b.volume - inter
    return min(1.0, max(0.0, inter / union))


def giou3d(a: Box3D, b: Box3D) -> float:
    """Generalised IoU with an enclosing volume of BEV hull area times z-span.

    Lies in (-1, 1]; equals ``iou3d`` only when the enclosing volume
    coincides with the union.
    """
    inter = _intersection_volume(a, b)
    union = a.volume + b.volume - inter
    hull = convex_hull(bev_corners(a) + bev_corners(b))
    span = max(a.z_max, b.z_max) - min(a.z_min, b.z_min)
    enclosing = max(abs(polygon_area(hull)) * span, union)
    iou = inter / union
    return min(1.0, iou - (enclosing - union) / enclosing)


def _candidate_pairs(a: Sequence[Box3D], b: Sequence[Box3D]) -> np.ndarray:
    # bounding-circle and z-interval test; pairs failing it have zero overlap
    ca = np.array([[o.x, o.y, o.z_min, o.z_max, 0.5 * math.hypot(o.l, o.w)] for o in a])
    cb = np.array([[o.x, o.y, o.z_min, o.z_max, 0.5 * math.hypot(o.l, o.w)] for o in b])
    dist = np.hypot(ca[:, None, 0] - cb[None, :, 0], ca[:, None, 1] - cb[None, :, 1])
    close = dist < ca[:, None, 4] + cb[None, :, 4]
    zok = (ca[:, None, 3] > cb[None, :, 2]) & (cb[None, :, 3] > ca[:, None, 2])
    return np.argwhere(close & zok)


def iou3d_matrix(a: Sequence[Box3D], b: Sequence[Box3D]) -> np.ndarray:
    """Pairwise ``iou3d``; only pairs whose footprints can touch are clipped."""
    out = np.zeros((len(a), len(b)))
    if len(a) == 0 or len(b) == 0:
        return out
    for i, j in _candidate_pairs(a, b):
        out[i, j] = iou3d(a[i], b[j])
    return out


def giou3d_matrix(a: Sequence[Box3D], b: Sequence[Box3D]) -> np.ndarray:
    out = np.zeros((len(a), len(b)))
    for i, bi in enumerate(a):
        for j, bj in enumerate(b):
            out[i, j] = giou3d(bi, bj)
    return out
