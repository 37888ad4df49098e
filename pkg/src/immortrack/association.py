"""Detection-to-prediction matching for one frame."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .geometry import Box3D, giou3d_matrix, iou3d_matrix


class Metric(str, enum.Enum):
    IOU3D = "iou3d"
    GIOU3D = "giou3d"


DEFAULT_GATES = {Metric.IOU3D: 0.1, Metric.GIOU3D: -0.5}


@dataclass(frozen=True)
class AssocConfig:
    metric: Metric = Metric.IOU3D
    gate: float | None = None  # None picks the metric's default

    def __post_init__(self):
        metric = Metric(self.metric)
        object.__setattr__(self, "metric", metric)
        gate = DEFAULT_GATES[metric] if self.gate is None else float(self.gate)
        lo = 0.0 if metric is Metric.IOU3D else -1.0
        if not lo <= gate <= 1.0:
            raise ValueError(f"gate {gate} outside [{lo}, 1] for {metric.value}")
        object.__setattr__(self, "gate", gate)


@dataclass
class AssociationResult:
    matched: list[tuple[int, int]] = field(default_factory=list)
    unmatched_detections: list[int] = field(default_factory=list)
    unmatched_tracklets: list[int] = field(default_factory=list)


def similarity_matrix(dets: Sequence[Box3D], preds: Sequence[Box3D], cfg: AssocConfig) -> np.ndarray:
    if cfg.metric is Metric.IOU3D:
        return iou3d_matrix(dets, preds)
    return giou3d_matrix(dets, preds)


def similarity_to_cost(sim: np.ndarray, metric: Metric) -> np.ndarray:
    if metric is Metric.IOU3D:
        return 1.0 - sim
    return 1.0 - (sim + 1.0) / 2.0


def hungarian(cost) -> list[tuple[int, int]]:
    """Minimum-cost maximal matching on a rectangular matrix.

    Returns ``(row, col)`` pairs sorted by row.
    """
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2:
        raise ValueError("cost must be a 2D matrix")
    if cost.size == 0:
        return []
    if not np.all(np.isfinite(cost)):
        raise ValueError("cost entries must be finite")
    rows, cols = linear_sum_assignment(cost)
    return [(int(r), int(c)) for r, c in zip(rows, cols)]


def associate(dets: Sequence[Box3D], preds: Sequence[Box3D], cfg: AssocConfig) -> AssociationResult:
    """Globally optimal assignment, then drop pairs below the gate."""
    sim = similarity_matrix(dets, preds, cfg)
    pairs = hungarian(similarity_to_cost(sim, cfg.metric))
    matched = [(i, j) for i, j in pairs if sim[i, j] >= cfg.gate]
    used_d = {i for i, _ in matched}
    used_t = {j for _, j in matched}
    return AssociationResult(
        matched=matched,
        unmatched_detections=[i for i in range(len(dets)) if i not in used_d],
        unmatched_tracklets=[j for j in range(len(preds)) if j not in used_t],
    )
