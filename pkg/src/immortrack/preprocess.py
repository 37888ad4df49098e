"""Per-frame detection conditioning: confidence filter, then strict 3D NMS."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .geometry import Box3D, iou3d_matrix


@dataclass(frozen=True)
class Detection:
    box: Box3D
    score: float
    frame: int

    def __post_init__(self):
        if not (math.isfinite(self.score) and 0.0 <= self.score <= 1.0):
            raise ValueError(f"detection score must lie in [0, 1], got {self.score}")


@dataclass(frozen=True)
class PreprocessConfig:
    score_min: float = 0.5
    nms_iou: float = 0.25

    def __post_init__(self):
        for name in ("score_min", "nms_iou"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


def score_filter(dets: Sequence[Detection], score_min: float) -> list[Detection]:
    return [d for d in dets if d.score >= score_min]


def nms3d(dets: Sequence[Detection], nms_iou: float) -> list[Detection]:
    """Greedy NMS. A box is suppressed only if its IoU with a kept box
    strictly exceeds ``nms_iou``. Output is sorted by score, descending."""
    order = sorted(range(len(dets)), key=lambda i: (-dets[i].score, i))
    ranked = [dets[i] for i in order]
    iou = iou3d_matrix([d.box for d in ranked], [d.box for d in ranked])
    suppressed = [False] * len(ranked)
    keep = []
    for i, d in enumerate(ranked):
        if suppressed[i]:
            continue
        keep.append(d)
        for j in range(i + 1, len(ranked)):
            if iou[i, j] > nms_iou:
                suppressed[j] = True
    return keep


def preprocess(dets: Sequence[Detection], cfg: PreprocessConfig) -> list[Detection]:
    return nms3d(score_filter(dets, cfg.score_min), cfg.nms_iou)
