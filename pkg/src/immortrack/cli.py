"""Command line: ``track``, ``eval``, ``simulate`` and ``ablate``.

Exit codes: 0 success, 1 usage or parse error, 2 data-consistency error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import io
from .metrics import EvalReport, FrameRangeError, clear_mot
from .preprocess import Detection, preprocess
from .simulate import generate
from .tracker import FrameOrderError, FrameResult, Tracker, group_by_frame

EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def check_frame_order(dets: Sequence[Detection]) -> None:
    for prev, cur in zip(dets, dets[1:]):
        if cur.frame < prev.frame:
            raise FrameOrderError(f"detection frames go backwards: {prev.frame} then {cur.frame}")


def track_detections(dets: Sequence[Detection], cfg: io.RunConfig) -> tuple[list[FrameResult], dict]:
    """Preprocess every frame and run the tracker; returns results and stats."""
    check_frame_order(dets)
    tracker = Tracker(cfg.tracker)
    results = [tracker.step(f, preprocess(fd, cfg.preprocess)) for f, fd in group_by_frame(dets)]
    stats = dict(tracker.stats, outputs=sum(len(r.outputs) for r in results))
    return results, stats


def evaluate(gt, records: Sequence[io.TrackRecord], cfg: io.RunConfig) -> EvalReport:
    return clear_mot(gt, io.tracks_to_hyp(records), cfg.match_iou)


def cmd_track(args) -> int:
    cfg = io.read_config(args.config)
    dets = io.read_detections(args.dets)
    results, stats = track_detections(dets, cfg)
    io.write_tracks(args.out, results)
    print(" ".join(f"{k}={v}" for k, v in stats.items()), file=sys.stderr)
    return 0


def cmd_eval(args) -> int:
    cfg = io.read_config(args.config)
    gt = io.read_gt(args.gt)
    records = io.read_tracks(args.tracks)
    report = evaluate(gt, records, cfg)
    sys.stdout.write(report.to_text())
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(report.as_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def cmd_simulate(args) -> int:
    cfg = io.read_config(args.config)
    sc = generate(cfg.scenario)
    io.write_detections(args.out_dets, sc.detections, [sc.header_comment()])
    io.write_gt(args.out_gt, sc.gt, [sc.header_comment()])
    print(f"objects={len(sc.gt)} detections={len(sc.detections)}", file=sys.stderr)
    return 0


def parse_sweep(spec: str) -> tuple[str, list[float]]:
    key, sep, vals = spec.partition("=")
    key = key.strip()
    if not sep or key not in io.RunConfig.SWEEP_KEYS:
        raise ValueError(f"sweep key must be one of {', '.join(io.RunConfig.SWEEP_KEYS)}; got {spec!r}")
    try:
        values = [float(v) for v in vals.split(",") if v.strip()]
    except ValueError:
        raise ValueError(f"bad sweep values in {spec!r}") from None
    if not values:
        raise ValueError(f"no sweep values in {spec!r}")
    return key, values


def ablate(dets, gt, cfg: io.RunConfig, key: str, values: Sequence[float]) -> list[tuple[float, EvalReport]]:
    rows = []
    for v in values:
        run_cfg = cfg.with_override(key, v)
        results, _ = track_detections(dets, run_cfg)
        records = io.parse_tracks(io.format_tracks(results).splitlines())
        rows.append((v, evaluate(gt, records, run_cfg)))
    return rows


def format_ablation(key: str, rows: Sequence[tuple[float, EvalReport]]) -> str:
    head = [key, "mota", "fp_pct", "miss_pct", "mismatch_pct", "ids", "ids_et", "ids_wa"]
    body = [
        [io.fmt(v), f"{r.mota:.6f}", f"{r.fp_pct:.6f}", f"{r.miss_pct:.6f}", f"{r.mismatch_pct:.6f}",
         str(r.mismatch), str(r.ids_early_termination), str(r.ids_wrong_association)]
        for v, r in rows
    ]
    widths = [max(len(row[i]) for row in [head] + body) for i in range(len(head))]
    return "".join("  ".join(c.rjust(w) for c, w in zip(row, widths)) + "\n" for row in [head] + body)


def format_plot_data(key: str, rows: Sequence[tuple[float, EvalReport]]) -> str:
    lines = [f"# {key} mismatch_pct mota"]
    lines += [f"{io.fmt(v)} {r.mismatch_pct:.6f} {r.mota:.6f}" for v, r in rows]
    return "\n".join(lines) + "\n"


def cmd_ablate(args) -> int:
    try:
        key, values = parse_sweep(args.sweep)
    except ValueError as e:
        print(f"immortrack ablate: {e}", file=sys.stderr)
        return EXIT_USAGE
    cfg = io.read_config(args.config)
    dets = io.read_detections(args.dets)
    gt = io.read_gt(args.gt)
    rows = ablate(dets, gt, cfg, key, values)
    sys.stdout.write(format_ablation(key, rows))
    if args.plot_data:
        with open(args.plot_data, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(format_plot_data(key, rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="immortrack", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("track", help="run the tracker over a detection file")
    t.add_argument("--dets", required=True)
    t.add_argument("--config")
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_track)

    e = sub.add_parser("eval", help="score a track file against ground truth")
    e.add_argument("--gt", required=True)
    e.add_argument("--tracks", required=True)
    e.add_argument("--config")
    e.add_argument("--json", help="also write the report as JSON")
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("simulate", help="generate a synthetic scenario")
    s.add_argument("--config")
    s.add_argument("--out-dets", required=True)
    s.add_argument("--out-gt", required=True)
    s.set_defaults(func=cmd_simulate)

    a = sub.add_parser("ablate", help="sweep one parameter, one eval row per value")
    a.add_argument("--dets", required=True)
    a.add_argument("--gt", required=True)
    a.add_argument("--config")
    a.add_argument("--sweep", required=True, metavar="KEY=v1,v2,...")
    a.add_argument("--plot-data", help="write 'x mismatch_pct mota' lines here")
    a.set_defaults(func=cmd_ablate)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except io.FormatError as e:
        print(f"immortrack {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (FrameOrderError, FrameRangeError) as e:
        print(f"immortrack {args.command}: {e}", file=sys.stderr)
        return EXIT_DATA
    except OSError as e:
        print(f"immortrack {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
