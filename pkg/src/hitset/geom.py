"""Geometric core: planar types, disk predicates, input normalization.

The separating line is always the x-axis. A normalized instance keeps its
points on or above the axis in strictly increasing x-order, and its disks
(centers on or below the axis) sorted by the left endpoint of the chord each
disk cuts on the axis. Everything downstream leans on those two orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

DEFAULT_EPS = 1e-12

MODE_CONSTRAINED = "line_constrained"
MODE_SEPARABLE = "line_separable"
MODES = (MODE_CONSTRAINED, MODE_SEPARABLE)


class DegenerateDisk(RuntimeError):
    """Disk has nonpositive radius or its closure does not cross the axis."""


class NotSeparable(RuntimeError):
    """Input violates the points-above / centers-below layout for its mode."""


class DuplicateX(RuntimeError):
    """Exact x-coordinate tie among points or among chord endpoints."""


class PrereqViolated(RuntimeError):
    """A structural prerequisite (single-intersection family) failed at runtime."""

    def __init__(self, detail: str, pair: tuple[int, int] | None = None):
        super().__init__(detail)
        self.pair = pair


class Infeasible(RuntimeError):
    """Some disk is hit by no point; carries the 1-based disk index."""

    def __init__(self, disk_index: int):
        super().__init__(f"disk {disk_index} is hit by no point")
        self.disk_index = disk_index


@dataclass(frozen=True, slots=True)
class PlanarPoint:
    x: float
    y: float


@dataclass(frozen=True, slots=True)
class Disk:
    cx: float
    cy: float
    r: float


@dataclass(frozen=True, slots=True)
class DiskSpan:
    """Chord [xl, xr] that a disk cuts on the axis."""

    xl: float
    xr: float


@dataclass(frozen=True, slots=True)
class HittingSet:
    """Chosen points as ascending 1-based indices into Instance.points."""

    indices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)


def point_in_disk(p: PlanarPoint, s: Disk, eps: float = DEFAULT_EPS) -> bool:
    """Closed-disk membership with relative slack eps on the squared radius."""
    dx = p.x - s.cx
    dy = p.y - s.cy
    return dx * dx + dy * dy <= s.r * s.r * (1.0 + eps)


def disk_span(s: Disk) -> DiskSpan:
    """Chord of the disk on the x-axis, half-width sqrt(r^2 - cy^2).

    A disk that merely touches the axis, or misses it, has no usable chord.
    """
    if s.r <= 0.0:
        raise DegenerateDisk(f"nonpositive radius {s.r!r}")
    h2 = s.r * s.r - s.cy * s.cy
    if h2 <= 0.0:
        raise DegenerateDisk(f"disk does not cross the axis (r^2 - cy^2 = {h2!r})")
    w = math.sqrt(h2)
    return DiskSpan(s.cx - w, s.cx + w)


class Instance:
    """Normalized problem input backed by flat float64 arrays.

    point_source / disk_source record each row's 0-based position in the raw
    input that produced it, so results can be reported in input order.
    """

    __slots__ = (
        "mode", "px", "py", "cx", "cy", "r", "xl", "xr",
        "point_source", "disk_source", "_points", "_disks",
    )

    def __init__(
        self,
        mode: str,
        px: np.ndarray,
        py: np.ndarray,
        cx: np.ndarray,
        cy: np.ndarray,
        r: np.ndarray,
        xl: np.ndarray,
        xr: np.ndarray,
        point_source: np.ndarray | None = None,
        disk_source: np.ndarray | None = None,
    ):
        self.mode = mode
        self.px = np.ascontiguousarray(px, dtype=np.float64)
        self.py = np.ascontiguousarray(py, dtype=np.float64)
        self.cx = np.ascontiguousarray(cx, dtype=np.float64)
        self.cy = np.ascontiguousarray(cy, dtype=np.float64)
        self.r = np.ascontiguousarray(r, dtype=np.float64)
        self.xl = np.ascontiguousarray(xl, dtype=np.float64)
        self.xr = np.ascontiguousarray(xr, dtype=np.float64)
        if point_source is None:
            point_source = np.arange(self.px.shape[0])
        if disk_source is None:
            disk_source = np.arange(self.cx.shape[0])
        self.point_source = np.ascontiguousarray(point_source, dtype=np.int64)
        self.disk_source = np.ascontiguousarray(disk_source, dtype=np.int64)
        self._points: tuple[PlanarPoint, ...] | None = None
        self._disks: tuple[Disk, ...] | None = None

    @property
    def n(self) -> int:
        return self.px.shape[0]

    @property
    def m(self) -> int:
        return self.cx.shape[0]

    @property
    def points(self) -> tuple[PlanarPoint, ...]:
        if self._points is None:
            self._points = tuple(
                PlanarPoint(float(x), float(y)) for x, y in zip(self.px, self.py)
            )
        return self._points

    @property
    def disks(self) -> tuple[Disk, ...]:
        if self._disks is None:
            self._disks = tuple(
                Disk(float(a), float(b), float(c))
                for a, b, c in zip(self.cx, self.cy, self.r)
            )
        return self._disks

    def point(self, i: int) -> PlanarPoint:
        """1-based point accessor."""
        return PlanarPoint(float(self.px[i - 1]), float(self.py[i - 1]))

    def disk(self, j: int) -> Disk:
        """1-based disk accessor."""
        return Disk(float(self.cx[j - 1]), float(self.cy[j - 1]), float(self.r[j - 1]))

    def span(self, j: int) -> DiskSpan:
        """1-based chord accessor."""
        return DiskSpan(float(self.xl[j - 1]), float(self.xr[j - 1]))

    def __repr__(self) -> str:
        return f"Instance(mode={self.mode!r}, n={self.n}, m={self.m})"


def normalize(
    raw_points: Iterable[PlanarPoint],
    raw_disks: Iterable[Disk],
    mode: str,
    eps: float = DEFAULT_EPS,
) -> Instance:
    """Validate raw input and build the canonical sorted Instance.

    line_constrained: points below the axis reflect to (x, -y); centers must
    sit on the axis within eps*r and snap to exactly 0. line_separable:
    points must already be on/above the axis and centers on/below it.

    Exact duplicate x among points, or among chord endpoints, is rejected:
    the solver's order arguments need strict sequences.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")

    pts = list(raw_points)
    dks = list(raw_disks)
    n = len(pts)
    m = len(dks)

    px = np.empty(n)
    py = np.empty(n)
    for i, p in enumerate(pts):
        x = float(p.x)
        y = float(p.y)
        if y < 0.0:
            if mode == MODE_CONSTRAINED:
                y = -y
            else:
                raise NotSeparable(f"point {i + 1} lies below the axis (y={y!r})")
        px[i] = x
        py[i] = y

    cx = np.empty(m)
    cy = np.empty(m)
    rr = np.empty(m)
    for j, d in enumerate(dks):
        c_x = float(d.cx)
        c_y = float(d.cy)
        rad = float(d.r)
        if rad <= 0.0:
            raise DegenerateDisk(f"disk {j + 1}: nonpositive radius {rad!r}")
        if mode == MODE_CONSTRAINED:
            if abs(c_y) <= eps * rad:
                c_y = 0.0
            else:
                raise NotSeparable(
                    f"disk {j + 1}: center off the axis (cy={c_y!r}) in {mode} mode"
                )
        elif c_y > 0.0:
            raise NotSeparable(f"disk {j + 1}: center above the axis (cy={c_y!r})")
        if rad * rad - c_y * c_y <= 0.0:
            raise DegenerateDisk(f"disk {j + 1}: does not cross the axis")
        cx[j] = c_x
        cy[j] = c_y
        rr[j] = rad

    half = np.sqrt(rr * rr - cy * cy)
    xl = cx - half
    xr = cx + half

    porder = np.argsort(px, kind="stable")
    px = px[porder]
    py = py[porder]
    if n > 1:
        tie = np.nonzero(np.diff(px) == 0.0)[0]
        if tie.size:
            raise DuplicateX(f"two points share x = {px[tie[0]]!r}")

    ends = np.concatenate([xl, xr])
    sorted_ends = np.sort(ends)
    if sorted_ends.size > 1:
        tie = np.nonzero(np.diff(sorted_ends) == 0.0)[0]
        if tie.size:
            raise DuplicateX(f"two chord endpoints share x = {sorted_ends[tie[0]]!r}")

    dorder = np.argsort(xl, kind="stable")
    return Instance(
        mode,
        px,
        py,
        cx[dorder],
        cy[dorder],
        rr[dorder],
        xl[dorder],
        xr[dorder],
        point_source=porder,
        disk_source=dorder,
    )


def _contained_filter(xl: np.ndarray, xr: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mark chords that contain another chord (vectorized, O(m log m)).

    Returns (kept mask, witness) over 0-based rows; witness[d] is a kept row
    whose chord is contained in row d's chord, valid wherever kept[d] is
    False, and -1 elsewhere. Exact duplicate chords keep the smallest row.
    """
    m = int(xl.shape[0])
    kept = np.ones(m, dtype=bool)
    witness = np.full(m, -1, dtype=np.int64)
    if m <= 1:
        return kept, witness

    idx = np.arange(m)

    # collapse exact duplicate chords onto the smallest participating row
    order_dup = np.lexsort((idx, xr, xl))
    sl = xl[order_dup]
    sr = xr[order_dup]
    same_as_prev = np.zeros(m, dtype=bool)
    same_as_prev[1:] = (np.diff(sl) == 0.0) & (np.diff(sr) == 0.0)
    # leader index of each run of identical chords
    leader_pos = np.maximum.accumulate(np.where(~same_as_prev, np.arange(m), -1))
    dup_rows = order_dup[same_as_prev]
    dup_leaders = order_dup[leader_pos[same_as_prev]]
    kept[dup_rows] = False
    witness[dup_rows] = dup_leaders

    reps = np.nonzero(kept)[0]
    if reps.shape[0] > 1:
        # order reps by (xl asc, xr desc, row asc): any later rep whose xr is
        # <= this one's xr has a chord contained in this one's chord
        ro = reps[np.lexsort((reps, -xr[reps], xl[reps]))]
        vals = xr[ro]
        length = vals.shape[0]
        rev = vals[::-1]
        accmin = np.minimum.accumulate(rev)
        newmin = np.empty(length, dtype=bool)
        newmin[0] = True
        newmin[1:] = rev[1:] < accmin[:-1]
        # strict-min tracking keeps, among equal minima, the latest forward
        # position, which is itself never a container and hence stays kept
        arg_rev = np.maximum.accumulate(np.where(newmin, np.arange(length), -1))
        ks = np.arange(length - 1)
        sufmin = accmin[length - 2 - ks]
        sufarg = (length - 1) - arg_rev[length - 2 - ks]
        is_container = sufmin <= vals[: length - 1]
        removed_pos = ks[is_container]
        kept[ro[removed_pos]] = False
        witness[ro[removed_pos]] = ro[sufarg[is_container]]

    # duplicate runs may point at a leader that was itself removed as a
    # container; hop to that leader's own kept witness
    for row in np.nonzero(~kept)[0]:
        w = witness[row]
        while not kept[w]:
            w = witness[w]
        witness[row] = w

    return kept, witness


def remove_contained(disks: Sequence[Disk]) -> tuple[list[Disk], dict[int, int]]:
    """Drop every disk whose chord contains another disk's chord.

    Any point hitting the inner disk hits the outer one too (given the
    single-intersection prerequisite), so outer disks are redundant. Exact
    duplicate chords keep only the smallest-index disk. Returns the kept
    disks (input order preserved) and a map from each removed disk's 1-based
    input index to a kept disk it contains.
    """
    disks = list(disks)
    spans = [disk_span(s) for s in disks]
    xl = np.array([sp.xl for sp in spans], dtype=np.float64)
    xr = np.array([sp.xr for sp in spans], dtype=np.float64)
    kept_mask, witness = _contained_filter(xl, xr)
    kept = [disks[i] for i in np.nonzero(kept_mask)[0]]
    removed = {
        int(i) + 1: int(witness[i]) + 1 for i in np.nonzero(~kept_mask)[0]
    }
    return kept, removed


def _circle_intersections(a: Disk, b: Disk) -> list[tuple[float, float]]:
    """Boundary intersection points of two circles (0, 1, or 2 of them)."""
    dx = b.cx - a.cx
    dy = b.cy - a.cy
    d2 = dx * dx + dy * dy
    if d2 == 0.0:
        return []
    t = (d2 + a.r * a.r - b.r * b.r) / 2.0
    h2 = a.r * a.r - t * t / d2
    if h2 < 0.0:
        return []
    mx = a.cx + dx * t / d2
    my = a.cy + dy * t / d2
    if h2 == 0.0:
        return [(mx, my)]
    h = math.sqrt(h2)
    inv = 1.0 / math.sqrt(d2)
    ox = -dy * h * inv
    oy = dx * h * inv
    return [(mx + ox, my + oy), (mx - ox, my - oy)]


def validate_single_intersection(
    disks: Sequence[Disk], eps: float = DEFAULT_EPS
) -> bool | tuple[int, int]:
    """Check that every two disk boundaries cross at most once above the axis.

    O(m^2) pairwise scan meant for validation and oracle use. Returns True,
    or the first offending pair as 1-based indices (i, j).
    """
    ds = list(disks)
    for i in range(len(ds)):
        a = ds[i]
        for j in range(i + 1, len(ds)):
            b = ds[j]
            pts = _circle_intersections(a, b)
            if len(pts) < 2:
                continue
            tol = eps * max(a.r, b.r)
            above = sum(1 for _, y in pts if y > tol)
            if above == 2:
                return (i + 1, j + 1)
    return True
