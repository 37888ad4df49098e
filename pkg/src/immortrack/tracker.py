"""Tracklet life-cycle: predict, associate, update or coast, spawn, output.

Two modes share everything except termination. ``IMMORTAL`` keeps every
tracklet forever, coasting it on its own prediction while unobserved;
``BASELINE`` drops a tracklet once it has gone more than ``a_max`` frames
without a match.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .association import AssocConfig, associate
from .geometry import Box3D
from .kalman import KfConfig, KfState, kf_coast, kf_init, kf_predict, kf_update
from .preprocess import Detection

logger = logging.getLogger(__name__)


class Mode(str, enum.Enum):
    IMMORTAL = "immortal"
    BASELINE = "baseline"


class Status(str, enum.Enum):
    BIRTH = "birth"
    ALIVE = "alive"


class FrameOrderError(ValueError):
    """Frames were presented out of order."""


@dataclass(frozen=True)
class TrackerConfig:
    mode: Mode = Mode.IMMORTAL
    m_hits: int = 1
    a_max: int = 2
    assoc: AssocConfig = field(default_factory=AssocConfig)
    kf: KfConfig = field(default_factory=KfConfig)

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.m_hits < 0:
            raise ValueError(f"m_hits must be >= 0, got {self.m_hits}")
        if self.mode is Mode.BASELINE and self.a_max < 1:
            raise ValueError(f"a_max must be >= 1 in baseline mode, got {self.a_max}")


@dataclass
class Tracklet:
    id: int
    kf: KfState
    status: Status
    born_frame: int
    last_matched_frame: int
    latest_score: float
    consecutive_hits: int = 1  # cumulative matches since birth, the birth detection included
    frames_since_match: int = 0

    def box(self) -> Box3D:
        return self.kf.box()


@dataclass(frozen=True)
class TrackOutput:
    track_id: int
    box: Box3D
    score: float
    det_index: int  # index into the frame's detection list that produced it


@dataclass
class FrameResult:
    frame: int
    outputs: list[TrackOutput] = field(default_factory=list)


class Tracker:
    """One tracker per sequence; feed frames in increasing order to :meth:`step`."""

    def __init__(self, cfg: TrackerConfig | None = None):
        self.cfg = cfg or TrackerConfig()
        self.tracklets: list[Tracklet] = []
        self.next_id = 1
        self.last_frame: int | None = None
        self.stats = {"frames": 0, "created": 0, "matches": 0, "terminated": 0}

    def step(self, frame: int, dets: Sequence[Detection]) -> FrameResult:
        if self.last_frame is not None and frame <= self.last_frame:
            raise FrameOrderError(f"frame {frame} does not follow frame {self.last_frame}")
        self.last_frame = frame
        cfg = self.cfg

        preds = []
        for t in self.tracklets:
            t.kf, pred = kf_predict(t.kf, cfg.kf)
            preds.append(pred)

        res = associate([d.box for d in dets], preds, cfg.assoc)

        matched_det = {}
        for di, ti in res.matched:
            t, d = self.tracklets[ti], dets[di]
            t.kf = kf_update(t.kf, d.box, cfg.kf)
            t.frames_since_match = 0
            t.consecutive_hits += 1
            t.last_matched_frame = frame
            t.latest_score = d.score
            if t.status is Status.BIRTH and t.consecutive_hits >= cfg.m_hits:
                t.status = Status.ALIVE
            matched_det[t.id] = di

        for ti in res.unmatched_tracklets:
            t = self.tracklets[ti]
            t.kf = kf_coast(t.kf, cfg.kf)
            t.frames_since_match += 1

        if cfg.mode is Mode.BASELINE:
            before = len(self.tracklets)
            self.tracklets = [t for t in self.tracklets if t.frames_since_match <= cfg.a_max]
            self.stats["terminated"] += before - len(self.tracklets)

        for di in res.unmatched_detections:
            d = dets[di]
            t = Tracklet(
                id=self.next_id,
                kf=kf_init(d.box, cfg.kf),
                status=Status.ALIVE if cfg.m_hits <= 1 else Status.BIRTH,
                born_frame=frame,
                last_matched_frame=frame,
                latest_score=d.score,
            )
            self.next_id += 1
            self.tracklets.append(t)
            matched_det[t.id] = di

        outputs = [
            TrackOutput(t.id, t.box(), t.latest_score, matched_det[t.id])
            for t in self.tracklets
            if t.status is Status.ALIVE and t.frames_since_match == 0
        ]
        outputs.sort(key=lambda o: o.track_id)

        self.stats["frames"] += 1
        self.stats["created"] += len(res.unmatched_detections)
        self.stats["matches"] += len(res.matched)
        return FrameResult(frame, outputs)


def group_by_frame(
    dets: Iterable[Detection], first: int | None = None, last: int | None = None
) -> list[tuple[int, list[Detection]]]:
    """Bucket detections into a contiguous run of frames, filling gaps with
    empty lists so the motion model advances one step per frame."""
    buckets: dict[int, list[Detection]] = {}
    for d in dets:
        buckets.setdefault(d.frame, []).append(d)
    if not buckets and (first is None or last is None):
        return []
    lo = min(buckets) if first is None else first
    hi = max(buckets) if last is None else last
    return [(f, buckets.get(f, [])) for f in range(lo, hi + 1)]


def run_sequence(
    frames: Iterable[tuple[int, Sequence[Detection]]], cfg: TrackerConfig | None = None
) -> list[FrameResult]:
    tracker = Tracker(cfg)
    out = []
    prev = None
    for frame, dets in frames:
        if prev is not None and frame != prev + 1:
            raise FrameOrderError(f"frame {frame} does not follow frame {prev} contiguously")
        prev = frame
        out.append(tracker.step(frame, dets))
    logger.debug("sequence done: %s", tracker.stats)
    return out
