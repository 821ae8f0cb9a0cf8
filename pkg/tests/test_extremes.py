"""Extreme-index computation: tree shape, NN queries, descents, envelopes."""

from __future__ import annotations

import math

import numpy as np
import pytest

from hitset.extremes import (
    ABRecord,
    EmptyPointSet,
    RadiusMismatch,
    build_envelope_tree,
    build_nn_tree,
    compute_ab,
    compute_ab_unit,
    descent_path,
    disk_hits_range,
    nn_query,
)
from hitset.geom import (
    MODE_CONSTRAINED,
    Disk,
    Infeasible,
    PlanarPoint,
    normalize,
    point_in_disk,
)
from hitset.oracles import GenConfig, brute_ab, generate


def _pts(*coords):
    return [PlanarPoint(float(x), float(y)) for x, y in coords]


def test_tree_single_point_is_leaf():
    root = build_nn_tree(_pts((0, 1)))
    assert root.range == (1, 1)
    assert root.children is None


def test_tree_four_points_splits_evenly():
    root = build_nn_tree(_pts((0, 1), (1, 1), (2, 1), (3, 1)))
    assert root.range == (1, 4)
    l, r = root.children
    assert l.range == (1, 2)
    assert r.range == (3, 4)


def test_tree_five_points_left_heavy():
    root = build_nn_tree(_pts((0, 1), (1, 1), (2, 1), (3, 1), (4, 1)))
    l, r = root.children
    assert l.range == (1, 3)
    assert r.range == (4, 5)

    def count_leaves(node):
        ch = node.children
        if ch is None:
            return 1
        return count_leaves(ch[0]) + count_leaves(ch[1])

    assert count_leaves(root) == 5


def test_tree_rejects_empty_and_unsorted():
    with pytest.raises(EmptyPointSet):
        build_nn_tree([])
    with pytest.raises(ValueError):
        build_nn_tree(_pts((1, 0), (0, 0)))


def test_nn_query_basic():
    root = build_nn_tree(_pts((0, 1), (3, 1)))
    idx, d2 = nn_query(root, PlanarPoint(1, -1))
    assert idx == 1
    assert d2 == 5.0


def test_nn_query_single_point():
    root = build_nn_tree(_pts((2, 3)))
    assert nn_query(root, PlanarPoint(0, 0)) == (1, 13.0)


def test_nn_query_tie_prefers_smaller_index():
    root = build_nn_tree(_pts((0, 1), (2, 1)))
    idx, d2 = nn_query(root, PlanarPoint(1, 0))
    assert idx == 1
    assert d2 == 2.0


def test_nn_query_tie_prefers_smaller_index_kd_path():
    pts = _pts(*[(float(i), 1.0) for i in range(60)])
    root = build_nn_tree(pts)
    assert root.nn_structure is not None
    idx, d2 = nn_query(root, PlanarPoint(29.5, 0.0))
    assert idx == 30
    assert d2 == 0.25 + 1.0


def test_nn_query_matches_flat_scan_randomly():
    rng = np.random.default_rng(21)
    xs = np.sort(rng.uniform(-50, 50, 200))
    ys = rng.uniform(0, 50, 200)
    root = build_nn_tree(_pts(*zip(xs, ys)))
    for _ in range(100):
        q = PlanarPoint(float(rng.uniform(-60, 60)), float(rng.uniform(-60, 60)))
        d2 = (xs - q.x) ** 2 + (ys - q.y) ** 2
        want = int(np.argmin(d2))
        idx, got = nn_query(root, q)
        assert idx == want + 1
        assert got == float(d2[want])


def test_disk_hits_range_examples():
    one = build_nn_tree(_pts((0, 1)))
    assert disk_hits_range(one, Disk(0, -0.5, 2))
    far = build_nn_tree(_pts((10, 1)))
    assert not disk_hits_range(far, Disk(0, 0, 1))
    two = build_nn_tree(_pts((-1, 0.5), (1, 0.5)))
    assert disk_hits_range(two, Disk(0, 0, 1.3))


def test_compute_ab_tiny():
    pts = _pts((-1, 0.5), (0, 2), (1, 0.5))
    root = build_nn_tree(pts)
    table = compute_ab(root, [Disk(0, 0, 1.3)])
    assert list(table) == [ABRecord(1, 3)]


def test_compute_ab_twin_lens():
    pts = _pts((-1.2, 0.1), (0, 0.3), (1.2, 0.1))
    root = build_nn_tree(pts)
    table = compute_ab(root, [Disk(-0.5, 0, 1), Disk(0.5, 0, 1)])
    assert list(table) == [ABRecord(1, 2), ABRecord(2, 3)]


def test_compute_ab_infeasible_reports_disk_index():
    root = build_nn_tree(_pts((10, 1)))
    with pytest.raises(Infeasible) as err:
        compute_ab(root, [Disk(10, 0, 2), Disk(0, 0, 1)])
    assert err.value.disk_index == 2


def test_compute_ab_no_disks():
    root = build_nn_tree(_pts((0, 1)))
    assert list(compute_ab(root, [])) == []


@pytest.mark.parametrize("kind", ["line_constrained", "unit_separable",
                                  "separable_from_constrained"])
@pytest.mark.parametrize("seed", range(6))
def test_compute_ab_matches_oracle_small(kind, seed):
    inst = generate(GenConfig(n=40, m=25, seed=seed, kind=kind, coord_range=60.0,
                              radius_range=(6.0, 25.0)))
    root = build_nn_tree(inst.points)
    assert list(compute_ab(root, inst.disks)) == brute_ab(inst)


def test_compute_ab_matches_oracle_through_kd_descent():
    # large enough that several levels run on kd-trees before the flat finish
    for seed in (0, 1):
        inst = generate(GenConfig(n=1500, m=400, seed=seed, coord_range=500.0,
                                  radius_range=(20.0, 200.0)))
        root = build_nn_tree(inst.points)
        table = compute_ab(root, inst.disks)
        assert list(table) == brute_ab(inst)


def test_descent_picks_subtrees_that_still_contain_hits():
    inst = generate(GenConfig(n=60, m=20, seed=9, coord_range=40.0))
    root = build_nn_tree(inst.points)
    hits = [
        {i + 1 for i, p in enumerate(inst.points) if point_in_disk(p, d)}
        for d in inst.disks
    ]
    for j, d in enumerate(inst.disks):
        for leftmost in (True, False):
            path = descent_path(root, d, leftmost)
            for node in path:
                lo, hi = node.range
                assert any(lo <= i <= hi for i in hits[j])
            leaf = path[-1].range[0]
            want = min(hits[j]) if leftmost else max(hits[j])
            assert leaf == want


def test_envelope_leaf_arc_window():
    root = build_envelope_tree(_pts((0, 1)), 2.0)
    chain = root.chain
    assert chain.pieces == (None, 1, None)
    assert chain.breakpoints == (-math.sqrt(3), math.sqrt(3))
    assert root.height(0.0) == -1.0
    assert root.height(5.0) == 0.0
    assert root.height(-1.9) == 0.0


def test_envelope_tangent_circle_collapses_to_axis():
    root = build_envelope_tree(_pts((0, 1)), 1.0)
    assert root.chain.pieces == (None,)
    assert root.chain.breakpoints == ()
    assert root.height(0.0) == 0.0


def test_envelope_merge_identical_inputs_is_idempotent():
    root = build_envelope_tree(_pts((-0.5, 0.2), (0.5, 0.4)), 1.0)
    chain = root.chain
    again = root.tree._merge(chain, chain)
    assert again == chain


def test_envelope_height_matches_direct_minimum():
    rng = np.random.default_rng(31)
    for trial in range(12):
        n = int(rng.integers(1, 24))
        xs = np.sort(rng.uniform(-10, 10, n))
        xs += np.arange(n) * 1e-9  # break exact ties
        ys = rng.uniform(0, 3, n)
        radius = float(rng.uniform(0.5, 4))
        root = build_envelope_tree(_pts(*zip(xs, ys)), radius)

        def direct(lo, hi, x):
            best = 0.0
            for q in range(lo, hi + 1):
                dx = x - xs[q - 1]
                h2 = radius * radius - dx * dx
                if h2 <= 0:
                    continue
                best = min(best, ys[q - 1] - math.sqrt(h2))
            return best

        stack = [root]
        while stack:
            node = stack.pop()
            lo, hi = node.range
            for x in rng.uniform(-12, 12, 40):
                assert node.height(float(x)) == pytest.approx(
                    direct(lo, hi, float(x)), abs=1e-9
                )
            if node.children:
                stack.extend(node.children)


def test_envelope_chain_is_canonical():
    # no two adjacent pieces equal; breakpoints strictly ascending
    rng = np.random.default_rng(41)
    for trial in range(10):
        n = int(rng.integers(2, 40))
        xs = np.sort(rng.uniform(-20, 20, n))
        ys = rng.uniform(0, 2, n)
        root = build_envelope_tree(_pts(*zip(xs, ys)), 2.5)
        stack = [root]
        while stack:
            node = stack.pop()
            chain = node.chain
            assert len(chain.pieces) == len(chain.breakpoints) + 1
            assert chain.pieces[0] is None and chain.pieces[-1] is None
            for p, q in zip(chain.pieces, chain.pieces[1:]):
                assert p != q
            for u, v in zip(chain.breakpoints, chain.breakpoints[1:]):
                assert u < v
            if node.children:
                stack.extend(node.children)


def test_compute_ab_unit_single_point_hit():
    root = build_envelope_tree(_pts((0, 1)), 2.0)
    table = compute_ab_unit(root, [Disk(0, -0.5, 2.0)], 2.0)
    assert list(table) == [ABRecord(1, 1)]


def test_compute_ab_unit_single_point_miss():
    root = build_envelope_tree(_pts((0, 1)), 1.0)
    with pytest.raises(Infeasible) as err:
        compute_ab_unit(root, [Disk(0, -0.5, 1.0)], 1.0)
    assert err.value.disk_index == 1


def test_compute_ab_unit_twin_lens():
    pts = _pts((-1.2, 0.1), (0, 0.3), (1.2, 0.1))
    root = build_envelope_tree(pts, 1.0)
    table = compute_ab_unit(root, [Disk(-0.5, 0, 1), Disk(0.5, 0, 1)], 1.0)
    assert list(table) == [ABRecord(1, 2), ABRecord(2, 3)]


def test_compute_ab_unit_radius_mismatch():
    root = build_envelope_tree(_pts((0, 1)), 2.0)
    with pytest.raises(RadiusMismatch):
        compute_ab_unit(root, [Disk(0, -0.5, 1.0)], 2.0)


@pytest.mark.parametrize("seed", range(8))
def test_compute_ab_unit_equals_general_path(seed):
    inst = generate(GenConfig(n=60, m=30, seed=seed, kind="unit_separable",
                              coord_range=40.0, radius_range=(8.0, 8.0)))
    radius = float(inst.r[0])
    env = build_envelope_tree(inst.points, radius)
    nn = build_nn_tree(inst.points)
    assert list(compute_ab_unit(env, inst.disks, radius)) == list(
        compute_ab(nn, inst.disks)
    )
    assert list(compute_ab(nn, inst.disks)) == brute_ab(inst)


def test_envelope_tree_rejects_empty_and_bad_radius():
    with pytest.raises(EmptyPointSet):
        build_envelope_tree([], 1.0)
    with pytest.raises(ValueError):
        build_envelope_tree(_pts((0, 1)), 0.0)
