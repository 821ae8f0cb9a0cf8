"""Full pipeline: filter, extreme indices, pruning, 1D reduction, greedy.

Surviving points project onto the axis; each kept disk becomes the segment
between its extreme hit points' x-coordinates. Stabbing those segments with
the projected points is equivalent to hitting the disks, and the classical
rightmost-feasible greedy solves the 1D problem optimally.
"""

from __future__ import annotations

from dataclasses import dataclass
from time import perf_counter_ns
from typing import Sequence

import numpy as np

from .extremes import (
    ABRecord,
    ABTable,
    EnvelopeTreeNode,
    RadiusMismatch,
    _EnvelopeTree,
    _NNTree,
    _compute_ab_arrays,
    compute_ab_unit,
)
from .geom import (
    DEFAULT_EPS,
    MODE_CONSTRAINED,
    Disk,
    HittingSet,
    Infeasible,
    Instance,
    PlanarPoint,
    PrereqViolated,
    _contained_filter,
    point_in_disk,
    validate_single_intersection,
)
from .pruning import _build_index, _prunable_array

__all__ = [
    "Infeasible1D",
    "OneDInstance",
    "reduce_to_1d",
    "solve",
    "solve_1d",
    "solve_detailed",
    "verify_solution",
]


class Infeasible1D(RuntimeError):
    """A 1D segment contains no candidate: an internal pipeline error.

    A genuinely unhittable disk is caught earlier, at the extreme-index
    stage, so this firing means the stages disagree.
    """

    def __init__(self, segment: tuple[float, float, int]):
        left, right, disk_index = segment
        super().__init__(
            f"segment [{left!r}, {right!r}] of disk {disk_index} "
            "contains no candidate")
        self.segment = segment


@dataclass(frozen=True, slots=True)
class OneDInstance:
    """Projection of the pruned instance onto the axis.

    candidates are the surviving points' x-coordinates, ascending; indices
    holds each candidate's 1-based point index. segments has one
    (left, right, disk index) triple per disk, endpoints taken from the
    disk's extreme hit points in the full point order.
    """

    candidates: tuple[float, ...]
    indices: tuple[int, ...]
    segments: tuple[tuple[float, float, int], ...]


def _ab_arrays(ab: Sequence[ABRecord] | ABTable) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(ab, ABTable):
        return ab.a, ab.b
    a = np.fromiter((rec.a for rec in ab), np.int64, len(ab))
    b = np.fromiter((rec.b for rec in ab), np.int64, len(ab))
    return a, b


def reduce_to_1d(
    instance: Instance,
    ab: Sequence[ABRecord] | ABTable,
    prunable: set[int],
) -> OneDInstance:
    """Project points not in `prunable` and turn every disk into a segment.

    ab[j] must be disk j's extreme hit range over this instance's points.
    Segment endpoints use the original point coordinates even when those
    extreme points are themselves pruned.
    """
    a, b = _ab_arrays(ab)
    keep = np.ones(instance.n, dtype=bool)
    if prunable:
        keep[np.fromiter(prunable, np.int64, len(prunable)) - 1] = False
    rows = np.nonzero(keep)[0]
    lefts = instance.px[a - 1]
    rights = instance.px[b - 1]
    return OneDInstance(
        candidates=tuple(instance.px[rows].tolist()),
        indices=tuple(int(i) + 1 for i in rows),
        segments=tuple(
            (float(l), float(r), j + 1)
            for j, (l, r) in enumerate(zip(lefts.tolist(), rights.tolist()))
        ),
    )


def solve_1d(oned: OneDInstance) -> HittingSet:
    """Minimum stabbing set for the segments, as point indices.

    Segments are processed by ascending right endpoint; a segment already
    containing the last chosen candidate is skipped, otherwise the largest
    candidate not past its right endpoint is chosen. Raises Infeasible1D
    if a segment contains no candidate at all.
    """
    if not oned.segments:
        return HittingSet(())
    cand = np.asarray(oned.candidates, dtype=np.float64)
    lefts, rights, disk_ids = zip(*oned.segments)
    lefts = np.asarray(lefts, dtype=np.float64)
    rights = np.asarray(rights, dtype=np.float64)
    order = np.argsort(rights, kind="stable")
    # rightmost candidate not past each right endpoint, -1 when none
    pick = np.searchsorted(cand, rights, side="right") - 1
    chosen: list[int] = []
    last_x = -np.inf
    have_last = False
    for j in order.tolist():
        left = lefts[j]
        if have_last and left <= last_x:
            continue
        p = int(pick[j])
        if p < 0 or cand[p] < left:
            raise Infeasible1D((float(left), float(rights[j]), int(disk_ids[j])))
        chosen.append(p)
        last_x = float(cand[p])
        have_last = True
    chosen.sort()
    return HittingSet(tuple(oned.indices[p] for p in chosen))


def _solve_stages(
    instance: Instance,
    unit_radius: float | None,
    validate: bool,
    eps: float,
) -> tuple[HittingSet, dict[str, int]]:
    times: dict[str, int] = {}
    t0 = perf_counter_ns()

    if validate:
        verdict = validate_single_intersection(instance.disks, eps)
        if verdict is not True:
            raise PrereqViolated(
                "disk boundaries cross twice above the axis", pair=verdict)

    if instance.n == 0:
        if instance.m > 0:
            raise Infeasible(1)
        for key in ("filter", "ab", "prune", "reduce", "one_d"):
            times[key] = 0
        times["total"] = perf_counter_ns() - t0
        return HittingSet(()), times

    t = perf_counter_ns()
    kept_mask, _ = _contained_filter(instance.xl, instance.xr)
    kept_rows = np.nonzero(kept_mask)[0]
    times["filter"] = perf_counter_ns() - t

    cx = instance.cx[kept_rows]
    cy = instance.cy[kept_rows]
    r = instance.r[kept_rows]

    t = perf_counter_ns()
    if unit_radius is None:
        tree = _NNTree(instance.px, instance.py)
        try:
            ab = _compute_ab_arrays(tree, 0, cx, cy, r, eps)
        except Infeasible as exc:
            raise Infeasible(int(kept_rows[exc.disk_index - 1]) + 1) from None
    else:
        bad = np.nonzero(np.abs(instance.r - unit_radius) > eps * unit_radius)[0]
        if bad.size:
            raise RadiusMismatch(
                f"disk {int(bad[0]) + 1} has radius {float(instance.r[bad[0]])!r}, "
                f"family radius is {float(unit_radius)!r}")
        etree = _EnvelopeTree(instance.px, instance.py, float(unit_radius))
        kept_disks = [
            Disk(float(a_), float(b_), float(c_)) for a_, b_, c_ in zip(cx, cy, r)
        ]
        try:
            ab = compute_ab_unit(
                EnvelopeTreeNode(etree, 0), kept_disks, float(unit_radius), eps)
        except Infeasible as exc:
            raise Infeasible(int(kept_rows[exc.disk_index - 1]) + 1) from None
    times["ab"] = perf_counter_ns() - t

    t = perf_counter_ns()
    xl = instance.xl[kept_rows]
    xr = instance.xr[kept_rows]
    try:
        index = _build_index(instance.n, ab.a, ab.b, cx, cy, r, xl, xr, None, eps)
    except PrereqViolated as exc:
        if exc.pair is not None:
            i, j = exc.pair
            raise PrereqViolated(
                str(exc),
                pair=(int(kept_rows[i - 1]) + 1, int(kept_rows[j - 1]) + 1),
            ) from None
        raise
    mask = _prunable_array(index, instance.px, instance.py)
    prunable = {int(k) + 1 for k in np.nonzero(mask)[0]}
    times["prune"] = perf_counter_ns() - t

    t = perf_counter_ns()
    # rebuild ab over instance indexing only for the reduction's segment ids
    oned = reduce_to_1d(instance, ab, prunable)
    times["reduce"] = perf_counter_ns() - t

    t = perf_counter_ns()
    try:
        solution = solve_1d(oned)
    except Infeasible1D as exc:
        left, right, pos = exc.segment
        raise Infeasible1D((left, right, int(kept_rows[pos - 1]) + 1)) from None
    times["one_d"] = perf_counter_ns() - t

    times["total"] = perf_counter_ns() - t0
    return solution, times


def solve(
    instance: Instance,
    unit_radius: float | None = None,
    validate: bool = False,
    eps: float = DEFAULT_EPS,
) -> HittingSet:
    """Minimum hitting set of a normalized instance, as 1-based point indices.

    With unit_radius the congruent-disk envelope path computes the extreme
    indices (every disk's radius must match); otherwise the general
    nearest-neighbor path does. validate=True first runs the quadratic
    single-intersection check and raises PrereqViolated on a violation.
    Raises Infeasible with the first unhittable disk's index.
    """
    solution, _ = _solve_stages(instance, unit_radius, validate, eps)
    return solution


def solve_detailed(
    instance: Instance,
    unit_radius: float | None = None,
    validate: bool = False,
    eps: float = DEFAULT_EPS,
) -> tuple[HittingSet, dict[str, int]]:
    """solve plus wall-clock nanoseconds per stage.

    Keys: filter, ab, prune, reduce, one_d, total.
    """
    return _solve_stages(instance, unit_radius, validate, eps)


def verify_solution(
    raw_points: Sequence[PlanarPoint],
    raw_disks: Sequence[Disk],
    mode: str,
    solution: HittingSet | Sequence[int],
    eps: float = DEFAULT_EPS,
) -> tuple[bool, int | None]:
    """Direct check that every disk contains a chosen point.

    Indices in `solution` are 1-based positions in raw_points. In
    line-constrained mode chosen points reflect to the upper half-plane
    first, mirroring input normalization. Returns (True, None) or
    (False, first unhit disk's 1-based position).
    """
    pts = list(raw_points)
    chosen = []
    for i in solution:
        if not 1 <= i <= len(pts):
            raise ValueError(f"solution index {i} out of range")
        p = pts[i - 1]
        if mode == MODE_CONSTRAINED and p.y < 0:
            p = PlanarPoint(p.x, -p.y)
        chosen.append(p)
    for j, d in enumerate(raw_disks, start=1):
        if not any(point_in_disk(p, d, eps) for p in chosen):
            return False, j
    return True, None
