"""Plain-text detection, track and ground-truth files, and the run config.

All three record formats are one header line followed by space-separated
records; further lines starting with ``#`` are comments. Reals are written
with 9 significant digits.

    #immortal-dets v1     frame score x y z yaw l w h
    #immortal-tracks v1   frame track_id score x y z yaw l w h
    #immortal-gt v1       frame object_id visible x y z yaw l w h
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .association import AssocConfig, Metric
from .geometry import Box3D
from .kalman import KfConfig
from .metrics import GroundTruthTrack
from .preprocess import Detection, PreprocessConfig
from .simulate import ScenarioConfig
from .tracker import FrameResult, Mode, TrackerConfig

DETS_HEADER = "#immortal-dets v1"
TRACKS_HEADER = "#immortal-tracks v1"
GT_HEADER = "#immortal-gt v1"


class FormatError(ValueError):
    def __init__(self, msg: str, lineno: int | None = None, path: str | None = None):
        where = ""
        if path:
            where += f"{path}:"
        if lineno is not None:
            where += f"line {lineno}: "
        elif where:
            where += " "
        super().__init__(where + msg)
        self.lineno = lineno


def fmt(v: float) -> str:
    return f"{v:.9g}"


def _box_fields(b: Box3D) -> str:
    return " ".join(fmt(v) for v in (b.x, b.y, b.z, b.yaw, b.l, b.w, b.h))


@dataclass(frozen=True)
class TrackRecord:
    frame: int
    track_id: int
    score: float
    box: Box3D


def _records(lines: Iterable[str], header: str, nfields: int, path: str | None):
    """Yield ``(lineno, fields)`` for each data line after validating the header."""
    seen_header = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if not seen_header:
            if line != header:
                raise FormatError(f"expected header {header!r}, got {line!r}", lineno, path)
            seen_header = True
            continue
        if line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < nfields:
            raise FormatError(f"expected {nfields} fields, got {len(parts)}", lineno, path)
        yield lineno, parts
    if not seen_header:
        raise FormatError(f"missing header {header!r}", None, path)


def _int(tok: str, lineno: int, path, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"{what} must be an integer, got {tok!r}", lineno, path) from None


def _box(parts: Sequence[str], lineno: int, path) -> Box3D:
    try:
        return Box3D(*(float(p) for p in parts[:7]))
    except ValueError as e:
        raise FormatError(f"bad box: {e}", lineno, path) from None


def _score(tok: str, lineno: int, path) -> float:
    try:
        s = float(tok)
    except ValueError:
        raise FormatError(f"bad score {tok!r}", lineno, path) from None
    if not 0.0 <= s <= 1.0:
        raise FormatError(f"score {s} outside [0, 1]", lineno, path)
    return s


def parse_detections(lines: Iterable[str], path: str | None = None) -> list[Detection]:
    out = []
    for lineno, p in _records(lines, DETS_HEADER, 9, path):
        frame = _int(p[0], lineno, path, "frame")
        out.append(Detection(_box(p[2:9], lineno, path), _score(p[1], lineno, path), frame))
    return out


def parse_tracks(lines: Iterable[str], path: str | None = None) -> list[TrackRecord]:
    out, seen = [], set()
    for lineno, p in _records(lines, TRACKS_HEADER, 10, path):
        frame = _int(p[0], lineno, path, "frame")
        tid = _int(p[1], lineno, path, "track id")
        if tid <= 0:
            raise FormatError(f"track id must be positive, got {tid}", lineno, path)
        if (frame, tid) in seen:
            raise FormatError(f"duplicate track {tid} in frame {frame}", lineno, path)
        seen.add((frame, tid))
        out.append(TrackRecord(frame, tid, _score(p[2], lineno, path), _box(p[3:10], lineno, path)))
    return out


def parse_gt(lines: Iterable[str], path: str | None = None) -> list[GroundTruthTrack]:
    tracks: dict[int, GroundTruthTrack] = {}
    for lineno, p in _records(lines, GT_HEADER, 10, path):
        frame = _int(p[0], lineno, path, "frame")
        oid = _int(p[1], lineno, path, "object id")
        if p[2] not in ("0", "1"):
            raise FormatError(f"visible must be 0 or 1, got {p[2]!r}", lineno, path)
        track = tracks.setdefault(oid, GroundTruthTrack(oid))
        if frame in track.boxes:
            raise FormatError(f"duplicate object {oid} in frame {frame}", lineno, path)
        try:
            track.add(frame, _box(p[3:10], lineno, path), p[2] == "1")
        except ValueError as e:
            raise FormatError(str(e), lineno, path) from None
    return [tracks[k] for k in sorted(tracks)]


def format_detections(dets: Iterable[Detection], comments: Sequence[str] = ()) -> str:
    lines = [DETS_HEADER] + [f"# {c}" for c in comments]
    lines += [f"{d.frame} {fmt(d.score)} {_box_fields(d.box)}" for d in dets]
    return "\n".join(lines) + "\n"


def format_tracks(items: Iterable[FrameResult] | Iterable[TrackRecord]) -> str:
    lines = [TRACKS_HEADER]
    for it in items:
        if isinstance(it, FrameResult):
            for o in it.outputs:
                lines.append(f"{it.frame} {o.track_id} {fmt(o.score)} {_box_fields(o.box)}")
        else:
            lines.append(f"{it.frame} {it.track_id} {fmt(it.score)} {_box_fields(it.box)}")
    return "\n".join(lines) + "\n"


def format_gt(gt: Iterable[GroundTruthTrack], comments: Sequence[str] = ()) -> str:
    rows = []
    for t in gt:
        for f in t.frames:
            rows.append((f, t.object_id, int(t.visible.get(f, True)), t.boxes[f]))
    rows.sort(key=lambda r: (r[0], r[1]))
    lines = [GT_HEADER] + [f"# {c}" for c in comments]
    lines += [f"{f} {oid} {vis} {_box_fields(b)}" for f, oid, vis, b in rows]
    return "\n".join(lines) + "\n"


def _read(path: str | os.PathLike, parser):
    with open(path, encoding="utf-8") as fh:
        return parser(fh, str(path))


def _write(path: str | os.PathLike, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def read_detections(path) -> list[Detection]:
    return _read(path, parse_detections)


def read_tracks(path) -> list[TrackRecord]:
    return _read(path, parse_tracks)


def read_gt(path) -> list[GroundTruthTrack]:
    return _read(path, parse_gt)


def write_detections(path, dets: Iterable[Detection], comments: Sequence[str] = ()) -> None:
    _write(path, format_detections(dets, comments))


def write_tracks(path, items) -> None:
    _write(path, format_tracks(items))


def write_gt(path, gt: Iterable[GroundTruthTrack], comments: Sequence[str] = ()) -> None:
    _write(path, format_gt(gt, comments))


def tracks_to_hyp(records: Iterable[TrackRecord]) -> dict[int, list[tuple[int, Box3D]]]:
    hyp: dict[int, list[tuple[int, Box3D]]] = {}
    for r in records:
        hyp.setdefault(r.frame, []).append((r.track_id, r.box))
    return hyp


# ---------------------------------------------------------------------------
# config file


class ConfigError(FormatError):
    pass


@dataclass
class RunConfig:
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    tracker: TrackerConfig = field(default_factory=TrackerConfig)
    match_iou: float = 0.5
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)

    SWEEP_KEYS = ("a_max", "m_hits", "gate", "nms_iou")

    def with_override(self, key: str, value: float) -> "RunConfig":
        """Copy with one sweepable parameter replaced.

        Sweeping ``a_max`` switches the tracker to baseline mode, the only
        mode in which a termination age exists.
        """
        rep = dataclasses.replace
        if key == "a_max":
            tracker = rep(self.tracker, mode=Mode.BASELINE, a_max=int(value))
            return rep(self, tracker=tracker)
        if key == "m_hits":
            return rep(self, tracker=rep(self.tracker, m_hits=int(value)))
        if key == "gate":
            assoc = AssocConfig(metric=self.tracker.assoc.metric, gate=float(value))
            return rep(self, tracker=rep(self.tracker, assoc=assoc))
        if key == "nms_iou":
            return rep(self, preprocess=rep(self.preprocess, nms_iou=float(value)))
        raise KeyError(key)


def _floats(s: str) -> tuple[float, ...]:
    return tuple(float(t) for t in s.split(",") if t.strip())


def _int_value(s: str) -> int:
    f = float(s)
    if f != int(f):
        raise ValueError(f"expected an integer, got {s}")
    return int(f)


_SIM_TYPES = {f.name: f.type for f in dataclasses.fields(ScenarioConfig)}

CONFIG_KEYS: dict[str, dict[str, object]] = {
    "preprocess": {"score_min": float, "nms_iou": float},
    "association": {"metric": str, "gate": float},
    "kalman": {"p0": _floats, "q": _floats, "r": _floats},
    "tracker": {"mode": str, "m_hits": _int_value, "a_max": _int_value},
    "eval": {"match_iou": float},
    "simulate": {
        name: (_floats if "tuple" in str(t) else _int_value if "int" in str(t) else float)
        for name, t in _SIM_TYPES.items()
    },
}


def parse_config(lines: Iterable[str], path: str | None = None) -> RunConfig:
    """Parse ``[section]`` headers and ``key = value`` lines; ``#`` starts a comment."""
    values: dict[str, dict[str, object]] = {s: {} for s in CONFIG_KEYS}
    where: dict[tuple[str, str], int] = {}
    section = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in CONFIG_KEYS:
                raise ConfigError(f"unknown section [{section}]", lineno, path)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno, path)
        key, val = (s.strip() for s in line.split("=", 1))
        if section is None:
            raise ConfigError(f"key {key!r} outside any section", lineno, path)
        conv = CONFIG_KEYS[section].get(key)
        if conv is None:
            raise ConfigError(f"unknown key {key!r} in [{section}]", lineno, path)
        try:
            values[section][key] = conv(val)
        except ValueError as e:
            raise ConfigError(f"bad value for {key}: {e}", lineno, path) from None
        where[(section, key)] = lineno

    def build(section, fn):
        try:
            return fn()
        except (ValueError, TypeError) as e:
            line = max((n for (s, _), n in where.items() if s == section), default=None)
            raise ConfigError(f"[{section}] {e}", line, path) from None

    pre = build("preprocess", lambda: PreprocessConfig(**values["preprocess"]))
    a = values["association"]
    assoc = build("association", lambda: AssocConfig(metric=Metric(a.get("metric", "iou3d")), gate=a.get("gate")))
    k = values["kalman"]
    kf_defaults = KfConfig()
    kf = build(
        "kalman",
        lambda: KfConfig(
            P0_diag=k.get("p0", kf_defaults.P0_diag),
            Q_diag=k.get("q", kf_defaults.Q_diag),
            R_diag=k.get("r", kf_defaults.R_diag),
        ),
    )
    t = values["tracker"]
    tracker = build(
        "tracker",
        lambda: TrackerConfig(
            mode=Mode(t.get("mode", "immortal")),
            m_hits=t.get("m_hits", 1),
            a_max=t.get("a_max", 2),
            assoc=assoc,
            kf=kf,
        ),
    )
    match_iou = values["eval"].get("match_iou", 0.5)
    if not 0.0 <= match_iou <= 1.0:
        raise ConfigError(f"match_iou must lie in [0, 1], got {match_iou}", where[("eval", "match_iou")], path)
    scenario = build("simulate", lambda: ScenarioConfig(**values["simulate"]))
    return RunConfig(pre, tracker, match_iou, scenario)


def read_config(path) -> RunConfig:
    if path is None:
        return RunConfig()
    return _read(path, parse_config)
