"""CLEAR-MOT scoring of track output against ground truth.

Only visible ground-truth boxes are scored. A ground-truth object keeps its
last hypothesis correspondence across frames where it is hidden or
unmatched, so re-acquiring the same track id later is not a mismatch.

Every mismatch is further split into *early termination* (the new id had
never covered another object: one trajectory broke into two ids) and
*wrong association* (the new id had previously covered a different object).
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .association import hungarian
from .geometry import Box3D, iou3d_matrix
from .tracker import FrameResult

# cost for pairs below the match threshold; larger than any real cost
_FORBIDDEN = 1e6


class FrameRangeError(ValueError):
    """Hypotheses cover frames the ground truth does not."""


@dataclass
class GroundTruthTrack:
    object_id: int
    boxes: dict[int, Box3D] = field(default_factory=dict)
    visible: dict[int, bool] = field(default_factory=dict)

    def add(self, frame: int, box: Box3D, visible: bool = True) -> None:
        if self.boxes and frame <= max(self.boxes):
            raise ValueError(f"object {self.object_id}: frame {frame} not after {max(self.boxes)}")
        self.boxes[frame] = box
        self.visible[frame] = bool(visible)

    @property
    def frames(self) -> list[int]:
        return sorted(self.boxes)


@dataclass(frozen=True)
class MismatchEvent:
    frame: int
    gt_id: int
    prev_hyp: int
    new_hyp: int


@dataclass
class EvalReport:
    num_gt: int
    num_hyp: int
    matches: int
    fp: int
    miss: int
    mismatch: int
    mota: float
    fp_pct: float
    miss_pct: float
    mismatch_pct: float
    ids_early_termination: int
    ids_wrong_association: int

    def as_dict(self) -> dict:
        return asdict(self)

    def to_text(self) -> str:
        """``name=value`` lines, ratios to six decimals."""
        lines = [
            f"mota={self.mota:.6f}",
            f"fp_pct={self.fp_pct:.6f}",
            f"miss_pct={self.miss_pct:.6f}",
            f"mismatch_pct={self.mismatch_pct:.6f}",
            f"ids={self.mismatch}",
            f"ids_early_termination={self.ids_early_termination}",
            f"ids_wrong_association={self.ids_wrong_association}",
            f"num_gt={self.num_gt}",
            f"fp={self.fp}",
            f"miss={self.miss}",
        ]
        return "\n".join(lines) + "\n"


HypFrames = Mapping[int, Sequence[tuple[int, Box3D]]]


def hyp_from_results(results: Sequence[FrameResult]) -> dict[int, list[tuple[int, Box3D]]]:
    return {r.frame: [(o.track_id, o.box) for o in r.outputs] for r in results}


def _gt_by_frame(gt: Sequence[GroundTruthTrack]) -> dict[int, list[tuple[int, Box3D]]]:
    out: dict[int, list[tuple[int, Box3D]]] = defaultdict(list)
    for track in gt:
        for f, box in track.boxes.items():
            if track.visible.get(f, True):
                out[f].append((track.object_id, box))
    return out


def _frame_range(gt: Sequence[GroundTruthTrack]) -> tuple[int, int] | None:
    frames = [f for t in gt for f in t.boxes]
    if not frames:
        return None
    return min(frames), max(frames)


def classify_ids(
    events: Sequence[MismatchEvent], history: Sequence[tuple[int, int, int]]
) -> tuple[int, int]:
    """Split mismatches into ``(early_termination, wrong_association)``.

    ``history`` holds every ``(frame, gt_id, hyp_id)`` match made during
    evaluation. A switch to hypothesis ``b`` on object ``g`` is a wrong
    association when ``b`` matched some other object in an earlier frame.
    """
    seen: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for frame, g, h in history:
        seen[h].append((frame, g))
    early = wrong = 0
    for ev in events:
        if any(f < ev.frame and g != ev.gt_id for f, g in seen.get(ev.new_hyp, ())):
            wrong += 1
        else:
            early += 1
    return early, wrong


def clear_mot_events(
    gt: Sequence[GroundTruthTrack],
    hyp: HypFrames | Sequence[FrameResult],
    match_iou: float = 0.5,
) -> tuple[EvalReport, list[MismatchEvent], list[tuple[int, int, int]]]:
    """Like :func:`clear_mot` but also returns mismatch events and the
    ``(frame, gt_id, hyp_id)`` match history."""
    if not isinstance(hyp, Mapping):
        hyp = hyp_from_results(hyp)
    span = _frame_range(gt)
    hyp_frames = [f for f, items in hyp.items() if items]
    if hyp_frames:
        if span is None or min(hyp_frames) < span[0] or max(hyp_frames) > span[1]:
            raise FrameRangeError(
                f"hypothesis frames {min(hyp_frames)}..{max(hyp_frames)} exceed "
                f"ground-truth range {span}"
            )
    gt_frames = _gt_by_frame(gt)

    corr: dict[int, int] = {}
    events: list[MismatchEvent] = []
    history: list[tuple[int, int, int]] = []
    num_gt = num_hyp = matches = fp = miss = 0

    frames = range(span[0], span[1] + 1) if span else range(0)
    for f in frames:
        g_items = sorted(gt_frames.get(f, ()), key=lambda it: it[0])
        h_items = list(hyp.get(f, ()))
        ids = [h for h, _ in h_items]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate hypothesis id in frame {f}")
        num_gt += len(g_items)
        num_hyp += len(h_items)
        iou = iou3d_matrix([b for _, b in g_items], [b for _, b in h_items])
        col_of = {h: j for j, h in enumerate(ids)}

        pairs: list[tuple[int, int]] = []
        free_g, used_h = [], set()
        for i, (g, _) in enumerate(g_items):
            j = col_of.get(corr.get(g, -1))
            if j is not None and j not in used_h and iou[i, j] >= match_iou:
                pairs.append((i, j))
                used_h.add(j)
            else:
                free_g.append(i)
        free_h = [j for j in range(len(h_items)) if j not in used_h]
        if free_g and free_h:
            sub = iou[np.ix_(free_g, free_h)]
            cost = np.where(sub >= match_iou, 1.0 - sub, _FORBIDDEN)
            for a, b in hungarian(cost):
                if sub[a, b] >= match_iou:
                    pairs.append((free_g[a], free_h[b]))

        for i, j in pairs:
            g, h = g_items[i][0], ids[j]
            prev = corr.get(g)
            if prev is not None and prev != h:
                events.append(MismatchEvent(f, g, prev, h))
            corr[g] = h
            history.append((f, g, h))
        matches += len(pairs)
        fp += len(h_items) - len(pairs)
        miss += len(g_items) - len(pairs)

    early, wrong = classify_ids(events, history)
    mismatch = len(events)
    if num_gt:
        mota = 1.0 - (fp + miss + mismatch) / num_gt
        pcts = (fp / num_gt, miss / num_gt, mismatch / num_gt)
    else:
        mota = math.nan
        pcts = (math.nan,) * 3
    report = EvalReport(
        num_gt=num_gt,
        num_hyp=num_hyp,
        matches=matches,
        fp=fp,
        miss=miss,
        mismatch=mismatch,
        mota=mota,
        fp_pct=pcts[0],
        miss_pct=pcts[1],
        mismatch_pct=pcts[2],
        ids_early_termination=early,
        ids_wrong_association=wrong,
    )
    return report, events, history


def clear_mot(
    gt: Sequence[GroundTruthTrack],
    hyp: HypFrames | Sequence[FrameResult],
    match_iou: float = 0.5,
) -> EvalReport:
    """Score hypotheses against ground truth with the CLEAR-MOT rules.

    Per frame, still-valid correspondences from earlier frames are kept
    first; the rest are matched by IoU-maximising assignment gated at
    ``match_iou``. Unmatched hypotheses count as false positives, unmatched
    visible ground truth as misses, and an object whose matched id changes
    as one mismatch.
    """
    return clear_mot_events(gt, hyp, match_iou)[0]
