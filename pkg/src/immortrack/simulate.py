"""Seeded synthetic scenarios: vehicles that go dark, and a noisy detector.

Every object lives for the whole sequence and moves at constant speed,
optionally with a constant turn rate. An occluded object stays in the ground
truth with ``visible=False`` and emits no detection. Outside occlusions each
box is detected with Gaussian noise unless dropped. False positives are
uniform random boxes over the world square.

All randomness comes from one NumPy ``PCG64`` stream seeded by
``ScenarioConfig.seed``. Draw order is fixed (objects first, then frame by
frame: object detections in id order, then false positives), so a config
fully determines the output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .association import hungarian
from .geometry import Box3D, iou3d_matrix, normalize_angle
from .metrics import GroundTruthTrack
from .preprocess import Detection

RNG_NAME = "numpy-PCG64"


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = 0
    num_objects: int = 100
    num_frames: int = 200
    world_extent: float = 1000.0
    speed_min: float = 0.5
    speed_max: float = 1.5
    turn_rate_min: float = 0.0
    turn_rate_max: float = 0.0
    length_range: tuple[float, float] = (3.8, 5.2)
    width_range: tuple[float, float] = (1.7, 2.1)
    height_range: tuple[float, float] = (1.4, 1.9)
    occlusion_prob: float = 1.0
    occlusion_min: int = 10
    occlusion_max: int = 30
    # visible frames kept before and after an occlusion window, when they fit
    occlusion_margin: int = 5
    pos_sigma: float = 0.1
    yaw_sigma: float = 0.02
    size_sigma: float = 0.05
    dropout: float = 0.05
    fp_rate: float = 0.5
    matched_score_range: tuple[float, float] = (0.6, 1.0)
    fp_score_range: tuple[float, float] = (0.3, 0.7)

    def __post_init__(self):
        if self.num_objects < 0 or self.num_frames < 0:
            raise ValueError("num_objects and num_frames must be >= 0")
        for name in ("occlusion_prob", "dropout"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be a probability")
        if self.occlusion_min < 1 or self.occlusion_max < self.occlusion_min:
            raise ValueError("occlusion durations need 1 <= min <= max")
        if self.fp_rate < 0 or min(self.pos_sigma, self.yaw_sigma, self.size_sigma) < 0:
            raise ValueError("rates and noise levels must be non-negative")
        if self.speed_min > self.speed_max or self.turn_rate_min > self.turn_rate_max:
            raise ValueError("range bounds out of order")
        for name in ("length_range", "width_range", "height_range", "matched_score_range", "fp_score_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} bounds out of order")
            object.__setattr__(self, name, (float(lo), float(hi)))

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


@dataclass
class Scenario:
    config: ScenarioConfig
    gt: list[GroundTruthTrack]
    detections: list[Detection]
    # object id behind each detection, 0 for false positives
    sources: list[int]
    occlusions: dict[int, tuple[int, int] | None]

    def header_comment(self) -> str:
        return f"generator={RNG_NAME} seed={self.config.seed}"


def _draw_occlusion(rng: np.random.Generator, cfg: ScenarioConfig):
    if rng.random() >= cfg.occlusion_prob:
        return None
    dur = int(rng.integers(cfg.occlusion_min, cfg.occlusion_max + 1))
    dur = min(dur, cfg.num_frames)
    lo = cfg.occlusion_margin
    hi = cfg.num_frames - dur - cfg.occlusion_margin
    if hi < lo:
        lo, hi = 0, cfg.num_frames - dur
    start = int(rng.integers(lo, hi + 1))
    return start, start + dur - 1


def generate(cfg: ScenarioConfig) -> Scenario:
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    half = 0.5 * cfg.world_extent

    objects = []
    for k in range(cfg.num_objects):
        x, y = rng.uniform(-half, half, size=2)
        heading = rng.uniform(-math.pi, math.pi)
        speed = rng.uniform(cfg.speed_min, cfg.speed_max)
        turn = rng.uniform(cfg.turn_rate_min, cfg.turn_rate_max)
        l = rng.uniform(*cfg.length_range)
        w = rng.uniform(*cfg.width_range)
        h = rng.uniform(*cfg.height_range)
        occ = _draw_occlusion(rng, cfg)
        objects.append(dict(id=k + 1, x=x, y=y, heading=heading, speed=speed, turn=turn, l=l, w=w, h=h, occ=occ))

    gt = [GroundTruthTrack(o["id"]) for o in objects]
    dets: list[Detection] = []
    sources: list[int] = []
    noise_sigma = np.array([cfg.pos_sigma] * 3 + [cfg.yaw_sigma] + [cfg.size_sigma] * 3)

    for t in range(cfg.num_frames):
        for o, track in zip(objects, gt):
            true = Box3D(o["x"], o["y"], 0.5 * o["h"], o["heading"], o["l"], o["w"], o["h"])
            occ = o["occ"]
            hidden = occ is not None and occ[0] <= t <= occ[1]
            track.add(t, true, visible=not hidden)

            noise = rng.standard_normal(7) * noise_sigma
            dropped = rng.random() < cfg.dropout
            score = rng.uniform(*cfg.matched_score_range)
            if not hidden and not dropped:
                v = true.to_array() + noise
                v[4:7] = np.maximum(v[4:7], 0.1)
                dets.append(Detection(Box3D.from_array(v), float(score), t))
                sources.append(o["id"])

            # advance to the next frame
            o["x"] += o["speed"] * math.cos(o["heading"])
            o["y"] += o["speed"] * math.sin(o["heading"])
            o["heading"] = normalize_angle(o["heading"] + o["turn"])

        for _ in range(int(rng.poisson(cfg.fp_rate))):
            x, y = rng.uniform(-half, half, size=2)
            yaw = rng.uniform(-math.pi, math.pi)
            l = rng.uniform(*cfg.length_range)
            w = rng.uniform(*cfg.width_range)
            h = rng.uniform(*cfg.height_range)
            score = rng.uniform(*cfg.fp_score_range)
            dets.append(Detection(Box3D(x, y, 0.5 * h, yaw, l, w, h), float(score), t))
            sources.append(0)

    return Scenario(cfg, gt, dets, sources, {o["id"]: o["occ"] for o in objects})


def _runs(frames: list[int]) -> list[tuple[int, int]]:
    out: list[tuple[int, int]] = []
    for f in frames:
        if out and f == out[-1][1] + 1:
            out[-1] = (out[-1][0], f)
        else:
            out.append((f, f))
    return out


def occlusion_report(
    gt: list[GroundTruthTrack], dets: list[Detection], sources: list[int] | None = None
) -> dict[int, list[tuple[int, int]]]:
    """Per object, the maximal inclusive frame intervals with no detection.

    With ``sources`` the detection-to-object link is taken as given;
    without it, detections are linked by IoU-maximising assignment
    (IoU > 0) against each frame's ground truth.
    """
    covered: dict[int, set[int]] = {t.object_id: set() for t in gt}
    if sources is not None:
        for d, src in zip(dets, sources):
            if src in covered:
                covered[src].add(d.frame)
    else:
        by_frame: dict[int, list[Detection]] = {}
        for d in dets:
            by_frame.setdefault(d.frame, []).append(d)
        for f, fdets in by_frame.items():
            present = [(t.object_id, t.boxes[f]) for t in gt if f in t.boxes]
            if not present:
                continue
            iou = iou3d_matrix([b for _, b in present], [d.box for d in fdets])
            for i, j in hungarian(1.0 - iou):
                if iou[i, j] > 0.0:
                    covered[present[i][0]].add(f)

    return {
        t.object_id: _runs([f for f in t.frames if f not in covered[t.object_id]])
        for t in gt
    }
