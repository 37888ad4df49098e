"""
Overlap of oriented 3D boxes
============================

IoU and generalized IoU between gravity-aligned boxes, compared against a
brute-force point-sampling estimate.
"""

import math

import numpy as np

from immortrack.geometry import Box3D, giou3d, iou3d

# two unit cubes, the second slid half a side along x: IoU is 1/3
a = Box3D(0, 0, 0, 0, 1, 1, 1)
b = Box3D(0.5, 0, 0, 0, 1, 1, 1)
print("half offset      iou=%.6f giou=%.6f" % (iou3d(a, b), giou3d(a, b)))

# spin the second one by 45 degrees about its own center
b45 = Box3D(0.5, 0, 0, math.pi / 4, 1, 1, 1)
print("rotated 45 deg   iou=%.6f giou=%.6f" % (iou3d(a, b45), giou3d(a, b45)))

# GIoU keeps ranking boxes that no longer touch
for gap in (0.0, 0.5, 1.0, 2.0):
    c = Box3D(1.0 + gap, 0, 0, 0, 1, 1, 1)
    print("gap %.1f          iou=%.6f giou=%+.6f" % (gap, iou3d(a, c), giou3d(a, c)))


def sampled_iou(p, q, n=400_000, seed=0):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-3, 3, size=(n, 3))

    def inside(box):
        c, s = math.cos(box.yaw), math.sin(box.yaw)
        dx, dy = pts[:, 0] - box.x, pts[:, 1] - box.y
        return ((np.abs(c * dx + s * dy) <= box.l / 2) & (np.abs(-s * dx + c * dy) <= box.w / 2)
                & (np.abs(pts[:, 2] - box.z) <= box.h / 2))

    ip, iq = inside(p), inside(q)
    return np.count_nonzero(ip & iq) / np.count_nonzero(ip | iq)


car = Box3D(0, 0, 0.8, 0.3, 4.5, 1.9, 1.6)
other = Box3D(1.2, 0.6, 0.9, -0.4, 4.2, 1.8, 1.5)
print("car pair         exact=%.4f sampled=%.4f" % (iou3d(car, other), sampled_iou(car, other)))
