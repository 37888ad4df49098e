import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from immortrack.geometry import Box3D
from immortrack.metrics import (
    FrameRangeError,
    GroundTruthTrack,
    MismatchEvent,
    classify_ids,
    clear_mot,
    clear_mot_events,
)


def car(x, y=0.0):
    return Box3D(x, y, 0.8, 0.0, 4.0, 2.0, 1.6)


def gt_track(oid, frames, y=0.0, hidden=()):
    t = GroundTruthTrack(oid)
    for f in frames:
        t.add(f, car(float(f), y), f not in hidden)
    return t


def hyp_of(*assignments):
    """Each assignment is ``(gt_track, {frame: hyp_id})``; boxes copied exactly."""
    out = {}
    for track, ids in assignments:
        for f, h in ids.items():
            out.setdefault(f, []).append((h, track.boxes[f]))
    return out


FRAMES = range(1, 11)


def test_identity():
    a, b = gt_track(1, FRAMES), gt_track(2, FRAMES, y=10.0)
    hyp = hyp_of((a, {f: 7 for f in FRAMES}), (b, {f: 9 for f in FRAMES}))
    r = clear_mot([a, b], hyp)
    assert (r.fp, r.miss, r.mismatch, r.mota) == (0, 0, 0, 1.0)
    assert (r.ids_early_termination, r.ids_wrong_association) == (0, 0)


def test_split_id():
    g = gt_track(1, FRAMES)
    hyp = hyp_of((g, {f: (1 if f <= 5 else 2) for f in FRAMES}))
    r, events, _ = clear_mot_events([g], hyp)
    assert (r.fp, r.miss, r.mismatch) == (0, 0, 1)
    assert r.mota == 0.9 and r.mismatch_pct == 0.1
    assert events == [MismatchEvent(6, 1, 1, 2)]
    assert (r.ids_early_termination, r.ids_wrong_association) == (1, 0)


def test_empty_hypotheses():
    r = clear_mot([gt_track(1, FRAMES)], {})
    assert (r.miss, r.fp, r.mismatch, r.mota, r.miss_pct) == (10, 0, 0, 0.0, 1.0)


def test_id_swap():
    a, b = gt_track(1, FRAMES), gt_track(2, FRAMES, y=10.0)
    hyp = hyp_of(
        (a, {f: (1 if f <= 5 else 2) for f in FRAMES}),
        (b, {f: (2 if f <= 5 else 1) for f in FRAMES}),
    )
    r = clear_mot([a, b], hyp)
    assert r.mismatch == 2
    assert (r.ids_early_termination, r.ids_wrong_association) == (0, 2)


def test_reacquiring_same_id_is_not_a_mismatch():
    g = gt_track(1, range(1, 21), hidden=range(6, 16))
    hyp = hyp_of((g, {f: 3 for f in range(1, 21) if not 6 <= f < 16}))
    r = clear_mot([g], hyp)
    assert (r.num_gt, r.mismatch, r.miss, r.mota) == (10, 0, 0, 1.0)


def test_hidden_boxes_are_not_scored():
    g = gt_track(1, FRAMES, hidden={4, 5})
    r = clear_mot([g], hyp_of((g, {f: 1 for f in FRAMES})))
    # hypotheses on hidden frames have nothing to match
    assert (r.num_gt, r.fp, r.miss) == (8, 2, 0)


def test_persisted_correspondence_wins_over_better_iou():
    # id 5 keeps the object even when id 6 sits exactly on it
    g = gt_track(1, range(1, 4))
    hyp = {1: [(5, car(1.0))], 2: [(5, car(2.4)), (6, car(2.0))], 3: [(5, car(3.0))]}
    r = clear_mot([g], hyp)
    assert (r.mismatch, r.fp, r.matches) == (0, 1, 3)


def test_below_threshold_is_miss_and_fp():
    g = gt_track(1, [1])
    r = clear_mot([g], {1: [(1, car(3.0))]})
    assert (r.fp, r.miss, r.matches) == (1, 1, 0)


def test_negative_mota():
    g = gt_track(1, FRAMES)
    hyp = {f: [(1, car(f + 50.0)), (2, car(f + 80.0))] for f in FRAMES}
    r = clear_mot([g], hyp)
    assert r.mota == pytest.approx(1 - 30 / 10)


def test_frame_range_checked():
    g = gt_track(1, FRAMES)
    with pytest.raises(FrameRangeError):
        clear_mot([g], {11: [(1, car(11.0))]})
    with pytest.raises(FrameRangeError):
        clear_mot([], {0: [(1, car(0.0))]})


def test_no_gt_gives_nan():
    r = clear_mot([], {})
    assert r.num_gt == 0 and math.isnan(r.mota)


def test_gt_frames_must_increase():
    t = GroundTruthTrack(1)
    t.add(3, car(0))
    with pytest.raises(ValueError):
        t.add(3, car(0))


def test_report_text():
    g = gt_track(1, FRAMES)
    text = clear_mot([g], hyp_of((g, {f: (1 if f <= 5 else 2) for f in FRAMES}))).to_text()
    lines = text.splitlines()
    assert lines[:7] == [
        "mota=0.900000",
        "fp_pct=0.000000",
        "miss_pct=0.000000",
        "mismatch_pct=0.100000",
        "ids=1",
        "ids_early_termination=1",
        "ids_wrong_association=0",
    ]


def test_classify_revisit_counts_as_wrong_association():
    # b covered g1, then g2, then comes back to g1
    history = [(1, 1, 10), (2, 2, 10), (3, 1, 11), (4, 1, 10)]
    events = [MismatchEvent(3, 1, 10, 11), MismatchEvent(4, 1, 11, 10)]
    assert classify_ids(events, history) == (1, 1)
    assert classify_ids([], history) == (0, 0)


# random scenes: a few objects, hypotheses that jitter, flip ids, drop out or hallucinate
scene = st.tuples(
    st.integers(1, 4),
    st.lists(st.tuples(st.integers(0, 3), st.floats(-1.5, 1.5), st.integers(1, 6)), min_size=0, max_size=60),
)


def build(scene_args):
    n, hyp_ops = scene_args
    gt = [gt_track(k + 1, range(0, 15), y=8.0 * k) for k in range(n)]
    hyp = {}
    for k, (obj, dx, hid) in enumerate(hyp_ops):
        f = k % 15
        obj = obj % n
        taken = {h for h, _ in hyp.get(f, [])}
        if hid in taken:
            continue
        hyp.setdefault(f, []).append((hid, car(f + dx, 8.0 * obj)))
    return gt, hyp


@settings(max_examples=100, deadline=None)
@given(scene)
def test_count_identities(args):
    gt, hyp = build(args)
    r = clear_mot(gt, hyp)
    assert r.matches + r.fp == r.num_hyp == sum(len(v) for v in hyp.values())
    assert r.matches + r.miss == r.num_gt
    assert r.ids_early_termination + r.ids_wrong_association == r.mismatch
    assert r.mota == pytest.approx(1 - (r.fp + r.miss + r.mismatch) / r.num_gt)


@settings(max_examples=60, deadline=None)
@given(scene, st.permutations(range(1, 7)))
def test_relabelling_invariance(args, perm):
    gt, hyp = build(args)
    relabel = {f: [(perm[h - 1] + 100, b) for h, b in items] for f, items in hyp.items()}
    assert clear_mot(gt, hyp).as_dict() == clear_mot(gt, relabel).as_dict()
