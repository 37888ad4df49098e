import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import box_strategy
from oracles import assignment_total, brute_force_assignment
from immortrack.association import AssocConfig, Metric, associate, hungarian, similarity_matrix
from immortrack.geometry import Box3D, giou3d, iou3d


def cube(x, y=0.0):
    return Box3D(x, y, 0.0, 0.0, 1.0, 1.0, 1.0)


def check_partition(res, p, q):
    dets = [i for i, _ in res.matched] + res.unmatched_detections
    trks = [j for _, j in res.matched] + res.unmatched_tracklets
    assert sorted(dets) == list(range(p))
    assert sorted(trks) == list(range(q))
    assert len(res.matched) <= min(p, q)


class TestSimilarity:
    def test_empty(self):
        assert similarity_matrix([], [cube(0), cube(3)], AssocConfig()).shape == (0, 2)

    def test_identical(self):
        assert similarity_matrix([cube(0)], [cube(0)], AssocConfig()).tolist() == [[1.0]]

    def test_composed_from_pairwise(self):
        dets, preds = [cube(0), cube(2)], [cube(0.5), cube(2.25)]
        for metric, fn in ((Metric.IOU3D, iou3d), (Metric.GIOU3D, giou3d)):
            m = similarity_matrix(dets, preds, AssocConfig(metric=metric))
            want = [[fn(d, p) for p in preds] for d in dets]
            np.testing.assert_array_equal(m, want)
        m = similarity_matrix(dets, preds, AssocConfig())
        # analytic: offsets 0.5 -> 1/3, 0.25 -> 3/5, 1.5/1.75/2.25 -> 0
        np.testing.assert_allclose(m, [[1 / 3, 0], [0, 0.6]], atol=1e-12)

    def test_gate_defaults_and_range(self):
        assert AssocConfig().gate == 0.1
        assert AssocConfig(metric="giou3d").gate == -0.5
        with pytest.raises(ValueError):
            AssocConfig(gate=-0.2)
        with pytest.raises(ValueError):
            AssocConfig(metric="giou3d", gate=-1.5)


class TestHungarian:
    def test_diagonal(self):
        assert hungarian([[0, 1], [1, 0]]) == [(0, 0), (1, 1)]

    def test_three_by_three(self):
        cost = [[4, 1, 3], [2, 0, 5], [3, 2, 2]]
        total, _ = brute_force_assignment(cost)
        assert total == 5
        pairs = hungarian(cost)
        assert pairs == [(0, 1), (1, 0), (2, 2)]
        assert assignment_total(cost, pairs) == 5

    def test_single_row(self):
        assert hungarian([[3.0, 0.5, 2.0, 0.7]]) == [(0, 1)]

    def test_empty(self):
        assert hungarian(np.zeros((0, 3))) == []

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            hungarian([[0.0, math.inf]])

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 7), st.integers(1, 7), st.integers(0, 2**32 - 1))
    def test_matches_enumeration(self, p, q, seed):
        cost = np.random.default_rng(seed).uniform(-5, 5, size=(p, q))
        pairs = hungarian(cost)
        assert len(pairs) == min(p, q)
        assert len({i for i, _ in pairs}) == len({j for _, j in pairs}) == len(pairs)
        assert assignment_total(cost, pairs) == brute_force_assignment(cost)[0]


class TestAssociate:
    def test_nothing_overlaps(self):
        res = associate([cube(0), cube(5)], [cube(20), cube(30)], AssocConfig())
        assert res.matched == []
        assert res.unmatched_detections == [0, 1] and res.unmatched_tracklets == [0, 1]

    def test_exact_hit(self):
        res = associate([cube(5)], [cube(0), cube(5)], AssocConfig())
        assert res.matched == [(0, 1)]
        assert res.unmatched_tracklets == [0]

    def test_three_by_three_with_gate(self):
        # similarities by construction: offsets 0.25 -> 0.6, 0.5 -> 1/3, 0.75 -> 1/7
        preds = [cube(0), cube(10), cube(20)]
        dets = [cube(0.5), cube(10.75), cube(0.25), cube(20.1)]
        cfg = AssocConfig(gate=0.2)
        sim = similarity_matrix(dets, preds, cfg)
        total, best = brute_force_assignment(-sim)
        want = sorted((i, j) for i, j in best if sim[i, j] >= cfg.gate)
        res = associate(dets, preds, cfg)
        assert sorted(res.matched) == want == [(2, 0), (3, 2)]
        check_partition(res, 4, 3)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(box_strategy(), max_size=6), st.lists(box_strategy(), max_size=6),
           st.sampled_from([Metric.IOU3D, Metric.GIOU3D]))
    def test_invariants(self, dets, preds, metric):
        cfg = AssocConfig(metric=metric)
        res = associate(dets, preds, cfg)
        check_partition(res, len(dets), len(preds))
        sim = similarity_matrix(dets, preds, cfg)
        assert all(sim[i, j] >= cfg.gate for i, j in res.matched)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(box_strategy(), min_size=1, max_size=6), st.lists(box_strategy(), min_size=1, max_size=6))
    def test_raising_gate_never_adds_matches(self, dets, preds):
        counts = [len(associate(dets, preds, AssocConfig(gate=g)).matched) for g in (0.0, 0.1, 0.3, 0.5, 0.9)]
        assert counts == sorted(counts, reverse=True)

    @given(st.permutations(range(5)), st.integers(0, 1000))
    def test_detection_order_equivariance(self, perm, seed):
        # well separated predictions with one close detection each: unique optimum
        rng = np.random.default_rng(seed)
        preds = [cube(10.0 * k, rng.uniform(-1, 1)) for k in range(5)]
        dets = [cube(p.x + rng.uniform(-0.3, 0.3), p.y) for p in preds]
        base = associate(dets, preds, AssocConfig())
        shuffled = associate([dets[k] for k in perm], preds, AssocConfig())
        assert sorted((perm[i], j) for i, j in shuffled.matched) == sorted(base.matched)
        assert shuffled.unmatched_tracklets == base.unmatched_tracklets
