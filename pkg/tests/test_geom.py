"""Geometric core: predicates, normalization, containment filter, validator."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hitset.geom import (
    DEFAULT_EPS,
    MODE_CONSTRAINED,
    MODE_SEPARABLE,
    DegenerateDisk,
    Disk,
    DiskSpan,
    DuplicateX,
    NotSeparable,
    PlanarPoint,
    disk_span,
    normalize,
    point_in_disk,
    remove_contained,
    validate_single_intersection,
)


def test_point_in_disk_center():
    assert point_in_disk(PlanarPoint(0, 0), Disk(0, 0, 1))


def test_point_in_disk_outside():
    assert not point_in_disk(PlanarPoint(2, 0), Disk(0, 0, 1))


def test_point_in_disk_interior_off_axis():
    # squared distance 1.25 against squared radius 1.69
    assert point_in_disk(PlanarPoint(-1, 0.5), Disk(0, 0, 1.3))


def test_point_in_disk_boundary_counts_as_hit():
    assert point_in_disk(PlanarPoint(1.0, 0.0), Disk(0, 0, 1.0))


def test_point_in_disk_eps_slack_is_relative():
    r = 1e6
    p = PlanarPoint(r * math.sqrt(1.0 + 0.5e-12), 0.0)
    assert point_in_disk(p, Disk(0, 0, r))
    assert not point_in_disk(p, Disk(0, 0, r), eps=1e-16)


def test_disk_span_axis_center():
    sp = disk_span(Disk(0, 0, 1.3))
    assert sp == DiskSpan(-1.3, 1.3)


def test_disk_span_translated_unit():
    assert disk_span(Disk(2, 0, 1)) == DiskSpan(1.0, 3.0)


def test_disk_span_submerged_center():
    sp = disk_span(Disk(0, -3, 4.5))
    assert sp.xl == -math.sqrt(11.25)
    assert sp.xr == math.sqrt(11.25)
    assert sp.xr == pytest.approx(3.3541, abs=1e-4)


@pytest.mark.parametrize(
    "disk",
    [Disk(0, -1, 1), Disk(0, -2, 1), Disk(5, -1.0000001, 1)],
)
def test_disk_span_degenerate_when_axis_missed(disk):
    with pytest.raises(DegenerateDisk):
        disk_span(disk)


@pytest.mark.parametrize("r", [0.0, -1.0])
def test_disk_span_degenerate_radius(r):
    with pytest.raises(DegenerateDisk):
        disk_span(Disk(0, 0, r))


def test_normalize_reflects_below_axis_points():
    inst = normalize([PlanarPoint(0.5, -1)], [Disk(0, 0, 2)], MODE_CONSTRAINED)
    assert inst.point(1) == PlanarPoint(0.5, 1.0)


def test_normalize_sorts_points_by_x():
    inst = normalize(
        [PlanarPoint(1, 2), PlanarPoint(0, 3)], [Disk(0, 0, 2)], MODE_CONSTRAINED
    )
    assert inst.points == (PlanarPoint(0, 3), PlanarPoint(1, 2))
    assert list(inst.point_source) == [1, 0]


def test_normalize_separable_rejects_below_axis_point():
    with pytest.raises(NotSeparable):
        normalize([PlanarPoint(0.5, -1)], [Disk(0, 0, 2)], MODE_SEPARABLE)


def test_normalize_separable_rejects_center_above_axis():
    with pytest.raises(NotSeparable):
        normalize([PlanarPoint(0.5, 1)], [Disk(0, 0.5, 2)], MODE_SEPARABLE)


def test_normalize_constrained_snaps_near_axis_center():
    inst = normalize(
        [PlanarPoint(0, 1)], [Disk(0, 1e-13 * 2, 2)], MODE_CONSTRAINED
    )
    assert inst.disk(1).cy == 0.0


def test_normalize_constrained_rejects_off_axis_center():
    with pytest.raises(NotSeparable):
        normalize([PlanarPoint(0, 1)], [Disk(0, 0.1, 2)], MODE_CONSTRAINED)


def test_normalize_rejects_duplicate_point_x():
    with pytest.raises(DuplicateX):
        normalize(
            [PlanarPoint(1, 2), PlanarPoint(1, 3)], [Disk(0, 0, 2)], MODE_CONSTRAINED
        )


def test_normalize_rejects_duplicate_span_endpoints():
    # chords [-1, 1] and [-1, 5] share the left endpoint
    with pytest.raises(DuplicateX):
        normalize(
            [PlanarPoint(0, 0.5)],
            [Disk(0, 0, 1), Disk(2, 0, 3)],
            MODE_CONSTRAINED,
        )


def test_normalize_sorts_disks_by_chord_left_endpoint():
    inst = normalize(
        [PlanarPoint(0, 0.5)],
        [Disk(3, 0, 1), Disk(0, 0, 1)],
        MODE_CONSTRAINED,
    )
    assert inst.span(1) == DiskSpan(-1.0, 1.0)
    assert inst.span(2) == DiskSpan(2.0, 4.0)
    assert list(inst.disk_source) == [1, 0]


def test_normalize_rejects_degenerate_disk():
    with pytest.raises(DegenerateDisk):
        normalize([PlanarPoint(0, 1)], [Disk(0, -2, 1)], MODE_SEPARABLE)


def test_normalize_idempotent():
    raw_pts = [PlanarPoint(1.5, -2), PlanarPoint(-0.5, 1), PlanarPoint(0.25, -0.125)]
    raw_dks = [Disk(1, 0, 2), Disk(-0.5, 0, 1.25)]
    once = normalize(raw_pts, raw_dks, MODE_CONSTRAINED)
    twice = normalize(once.points, once.disks, MODE_CONSTRAINED)
    for field in ("px", "py", "cx", "cy", "r", "xl", "xr"):
        assert np.array_equal(getattr(once, field), getattr(twice, field))


def test_reflection_invariance_of_membership():
    rng = np.random.default_rng(11)
    for _ in range(200):
        p = PlanarPoint(rng.uniform(-5, 5), rng.uniform(-5, 5))
        s = Disk(rng.uniform(-5, 5), 0.0, rng.uniform(0.1, 5))
        mirrored = PlanarPoint(p.x, -p.y)
        assert point_in_disk(p, s) == point_in_disk(mirrored, s)


def _disk_for_span(xl: float, xr: float) -> Disk:
    return Disk((xl + xr) / 2.0, 0.0, (xr - xl) / 2.0)


def test_remove_contained_strict_nesting():
    kept, removed = remove_contained(
        [_disk_for_span(-2, 2), _disk_for_span(-0.4, 0.6)]
    )
    assert [disk_span(d) for d in kept] == [DiskSpan(-0.4, 0.6)]
    assert removed == {1: 2}


def test_remove_contained_crossing_spans_all_kept():
    kept, removed = remove_contained(
        [_disk_for_span(-1.5, 0.5), _disk_for_span(-0.5, 1.5)]
    )
    assert len(kept) == 2
    assert removed == {}


def test_remove_contained_middle_chain():
    kept, removed = remove_contained(
        [_disk_for_span(0, 4), _disk_for_span(1, 3), _disk_for_span(2, 5)]
    )
    assert [disk_span(d) for d in kept] == [DiskSpan(1, 3), DiskSpan(2, 5)]
    assert removed == {1: 2}


def test_remove_contained_duplicate_chords_keep_smallest_index():
    kept, removed = remove_contained(
        [_disk_for_span(0, 2), _disk_for_span(0, 2), _disk_for_span(0, 2)]
    )
    assert len(kept) == 1
    assert removed == {2: 1, 3: 1}


def test_remove_contained_duplicate_leader_itself_removed():
    # duplicates of [0, 4] point at disk 1, which falls to the inner [1, 3]
    kept, removed = remove_contained(
        [_disk_for_span(0, 4), _disk_for_span(0, 4), _disk_for_span(1, 3)]
    )
    assert [disk_span(d) for d in kept] == [DiskSpan(1, 3)]
    assert removed == {1: 3, 2: 3}


def test_remove_contained_kept_order_is_strictly_increasing_in_both_endpoints():
    rng = np.random.default_rng(7)
    for _ in range(100):
        m = int(rng.integers(1, 30))
        xl = rng.uniform(-100, 100, m)
        xr = xl + rng.uniform(0.1, 50, m)
        order = np.argsort(xl)
        disks = [_disk_for_span(float(xl[i]), float(xr[i])) for i in order]
        kept, _ = remove_contained(disks)
        spans = [disk_span(d) for d in kept]
        for a, b in zip(spans, spans[1:]):
            assert a.xl < b.xl
            assert a.xr < b.xr


def test_remove_contained_witness_soundness_by_sampling():
    rng = np.random.default_rng(19)
    for _ in range(50):
        m = int(rng.integers(2, 20))
        xl = rng.uniform(-50, 50, m)
        xr = xl + rng.uniform(0.1, 40, m)
        order = np.argsort(xl)
        disks = [_disk_for_span(float(xl[i]), float(xr[i])) for i in order]
        kept, removed = remove_contained(disks)
        kept_set = {disk_span(d) for d in kept}
        for gone, wit in removed.items():
            outer = disk_span(disks[gone - 1])
            inner = disk_span(disks[wit - 1])
            assert inner in kept_set
            assert outer.xl <= inner.xl and inner.xr <= outer.xr
            # any point of the witness disk lies in the removed disk
            wdisk = disks[wit - 1]
            for _ in range(20):
                ang = rng.uniform(0, math.pi)
                rad = wdisk.r * math.sqrt(rng.uniform())
                p = PlanarPoint(wdisk.cx + rad * math.cos(ang), rad * math.sin(ang))
                assert point_in_disk(p, disks[gone - 1])


@st.composite
def _span_family(draw):
    raw = draw(
        st.lists(
            st.tuples(st.integers(-20, 20), st.integers(1, 10)),
            min_size=1,
            max_size=12,
        )
    )
    spans = sorted((xl, xl + w) for xl, w in raw)
    return spans


@given(_span_family())
@settings(max_examples=300, deadline=None)
def test_remove_contained_matches_quadratic_reference(spans):
    disks = [_disk_for_span(float(a), float(b)) for a, b in spans]
    kept, removed = remove_contained(disks)

    def is_removed(d):
        for j, sp in enumerate(spans):
            if j == d:
                continue
            same = sp == spans[d]
            nested = spans[d][0] <= sp[0] and sp[1] <= spans[d][1]
            if nested and (not same or j < d):
                return True
        return False

    expect_removed = {i + 1 for i in range(len(spans)) if is_removed(i)}
    assert set(removed) == expect_removed
    assert len(kept) + len(removed) == len(spans)
    kept_spans = {disk_span(d) for d in kept}
    for gone, wit in removed.items():
        assert disk_span(disks[wit - 1]) in kept_spans
        assert spans[gone - 1][0] <= spans[wit - 1][0]
        assert spans[wit - 1][1] <= spans[gone - 1][1]


def test_validator_passes_axis_centered_family():
    disks = [Disk(0, 0, 1), Disk(1, 0, 2), Disk(-3, 0, 0.5)]
    assert validate_single_intersection(disks) is True


def test_validator_passes_single_disk():
    assert validate_single_intersection([Disk(0, -1, 3)]) is True


def test_validator_flags_double_crossing_pair():
    # boundaries meet at y ~ 1.2517, x ~ +/- 1.474: twice above the axis
    bad = [Disk(0, -0.1, 2), Disk(0, -3, 4.5)]
    assert validate_single_intersection(bad) == (1, 2)


def test_validator_reports_first_offending_pair():
    disks = [Disk(40, 0, 1), Disk(0, -0.1, 2), Disk(0, -3, 4.5)]
    assert validate_single_intersection(disks) == (2, 3)


def test_validator_accepts_equal_radius_family():
    rng = np.random.default_rng(3)
    disks = [
        Disk(float(rng.uniform(-10, 10)), float(-rng.uniform(0, 0.9)), 1.0)
        for _ in range(12)
    ]
    assert validate_single_intersection(disks) is True
