"""Brute-force oracles and seeded instance generators.

Everything here is deliberately naive: O(nm) scans and subset enumeration
serve as ground truth for the fast pipeline. The generators enforce the
general-position gap and the every-disk-hit guarantee that the solver's
contracts assume, and are bit-deterministic per seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.spatial import cKDTree

from .extremes import ABRecord
from .geom import (
    DEFAULT_EPS,
    MODE_CONSTRAINED,
    MODE_SEPARABLE,
    Disk,
    HittingSet,
    Infeasible,
    Instance,
    PlanarPoint,
    normalize,
)

BRUTE_GUARD = 20

KIND_CONSTRAINED = "line_constrained"
KIND_UNIT = "unit_separable"
KIND_FROM_CONSTRAINED = "separable_from_constrained"
KINDS = (KIND_CONSTRAINED, KIND_UNIT, KIND_FROM_CONSTRAINED)

_MAX_ROUNDS = 200
_MAX_PLACE_TRIES = 200


class TooLarge(RuntimeError):
    """Instance exceeds the brute-force enumeration guard."""

    def __init__(self, n: int, guard: int = BRUTE_GUARD):
        super().__init__(f"brute-force enumeration limited to {guard} points, got {n}")
        self.n = n


class GenerationFailure(RuntimeError):
    """Generator could not satisfy its constraints within the round budget."""


def _hit_matrix(instance: Instance, eps: float = DEFAULT_EPS) -> np.ndarray:
    """bool[m, n]: disk row contains point column, same arithmetic as point_in_disk."""
    dx = instance.px[None, :] - instance.cx[:, None]
    dy = instance.py[None, :] - instance.cy[:, None]
    bound = instance.r * instance.r * (1.0 + eps)
    return dx * dx + dy * dy <= bound[:, None]


def brute_optimum(
    instance: Instance, eps: float = DEFAULT_EPS
) -> tuple[int, HittingSet]:
    """Exact minimum hitting set by increasing-cardinality subset enumeration.

    Returns (size, the lexicographically first optimal set). Guarded to
    n <= 20 points; raises Infeasible if even the full point set leaves
    some disk unhit.
    """
    n = instance.n
    m = instance.m
    if n > BRUTE_GUARD:
        raise TooLarge(n)
    if m == 0:
        return 0, HittingSet(())
    hits = _hit_matrix(instance, eps)
    disk_masks = []
    for j in range(m):
        mask = 0
        for i in np.nonzero(hits[j])[0]:
            mask |= 1 << int(i)
        if mask == 0:
            raise Infeasible(j + 1)
        disk_masks.append(mask)
    for k in range(1, n + 1):
        for combo in combinations(range(n), k):
            chosen = 0
            for i in combo:
                chosen |= 1 << i
            if all(chosen & dm for dm in disk_masks):
                return k, HittingSet(tuple(i + 1 for i in combo))
    raise AssertionError("unreachable: full point set hits every nonempty disk")


def brute_ab(instance: Instance, eps: float = DEFAULT_EPS) -> list[ABRecord]:
    """Extreme hit indices per disk by direct O(nm) scan."""
    hits = _hit_matrix(instance, eps)
    out = []
    for j in range(instance.m):
        row = np.nonzero(hits[j])[0]
        if row.size == 0:
            raise Infeasible(j + 1)
        out.append(ABRecord(int(row[0]) + 1, int(row[-1]) + 1))
    return out


def brute_prunable(
    instance: Instance, ab: list[ABRecord], eps: float = DEFAULT_EPS
) -> set[int]:
    """Points droppable by the literal rule: some disk misses p_k while both
    of its extreme hits strictly straddle k."""
    hits = _hit_matrix(instance, eps)
    out: set[int] = set()
    for k in range(1, instance.n + 1):
        for j, rec in enumerate(ab):
            if rec.a < k < rec.b and not hits[j, k - 1]:
                out.add(k)
                break
    return out


def brute_prunable_closed(
    instance: Instance, ab: list[ABRecord], eps: float = DEFAULT_EPS
) -> set[int]:
    """Closed-interval variant of brute_prunable (a <= k <= b).

    Equivalent to the strict rule: a disk always contains its own extreme
    hit points, so k = a or k = b never triggers. Kept as an independent
    cross-check of that equivalence.
    """
    hits = _hit_matrix(instance, eps)
    out: set[int] = set()
    for k in range(1, instance.n + 1):
        for j, rec in enumerate(ab):
            if rec.a <= k <= rec.b and not hits[j, k - 1]:
                out.add(k)
                break
    return out


def hit_sets(
    instance: Instance, eps: float = DEFAULT_EPS
) -> tuple[list[set[int]], list[set[int]]]:
    """Per-point set of disks hit, and per-disk set of points contained (1-based)."""
    hits = _hit_matrix(instance, eps)
    per_point = [
        set(int(j) + 1 for j in np.nonzero(hits[:, i])[0]) for i in range(instance.n)
    ]
    per_disk = [
        set(int(i) + 1 for i in np.nonzero(hits[j, :])[0]) for j in range(instance.m)
    ]
    return per_point, per_disk


@dataclass(frozen=True, slots=True)
class GenConfig:
    """Seeded random-instance recipe.

    coord_range is the half-width of the coordinate box: x in
    [-coord_range, coord_range]. min_x_gap defaults to 1e-6 * coord_range;
    every pair of x-coordinates (points and chord endpoints together) ends
    up at least that far apart. unit_separable uses radius_range[0] as the
    common radius.
    """

    n: int
    m: int
    seed: int
    kind: str = KIND_CONSTRAINED
    coord_range: float = 100.0
    radius_range: tuple[float, float] = (5.0, 40.0)
    min_x_gap: float | None = None

    @property
    def gap(self) -> float:
        if self.min_x_gap is None:
            return 1e-6 * self.coord_range
        return self.min_x_gap


def _check_config(config: GenConfig) -> None:
    if config.n < 0 or config.m < 0:
        raise ValueError("negative counts")
    if config.kind not in KINDS:
        raise ValueError(f"unknown kind {config.kind!r}")
    if config.coord_range <= 0.0:
        raise ValueError("coord_range must be positive")
    rlo, rhi = config.radius_range
    if not (0.0 < rlo <= rhi):
        raise ValueError("radius_range must be positive and ordered")
    if config.gap <= 0.0:
        raise ValueError("min_x_gap must be positive")


def _gaps_ok(xs: np.ndarray, gap: float) -> bool:
    if xs.shape[0] < 2:
        return True
    xs = np.sort(xs)
    return bool(np.min(np.diff(xs)) >= gap)


def _sample_in_upper_half_disk(
    rng: np.random.Generator, cx: float, cy: float, r: float
) -> tuple[float, float]:
    """Uniform point in the part of the disk on/above the axis (cy <= 0)."""
    if cy == 0.0:
        rad = r * math.sqrt(rng.uniform())
        ang = rng.uniform(0.0, math.pi)
        return cx + rad * math.cos(ang), rad * math.sin(ang)
    half = math.sqrt(r * r - cy * cy)
    top = cy + r
    for _ in range(_MAX_PLACE_TRIES):
        x = rng.uniform(cx - half, cx + half)
        y = rng.uniform(0.0, top)
        ddx = x - cx
        ddy = y - cy
        if ddx * ddx + ddy * ddy <= r * r:
            return x, y
    raise GenerationFailure("could not place a repair point inside a disk")


def _generate_rejection(
    config: GenConfig, gap: float
) -> tuple[list[PlanarPoint], list[Disk], str]:
    rng = np.random.default_rng(config.seed)
    n, m = config.n, config.m
    box = config.coord_range
    rlo, rhi = config.radius_range

    for _ in range(_MAX_ROUNDS):
        px = rng.uniform(-box, box, n)
        if config.kind == KIND_UNIT:
            py = rng.uniform(0.0, box, n)
            r = np.full(m, float(rlo))
            cx = rng.uniform(-box, box, m)
            cy = -rng.uniform(0.0, 0.9, m) * rlo
        else:
            py = rng.uniform(-box, box, n)
            if config.kind == KIND_FROM_CONSTRAINED:
                py = np.abs(py)
            cx = rng.uniform(-box, box, m)
            r = rng.uniform(rlo, rhi, m)
            cy = np.zeros(m)
        half = np.sqrt(r * r - cy * cy)
        xl = cx - half
        xr = cx + half

        # repair: every disk must contain at least one point (reflection
        # applied for membership in the constrained kind)
        test_py = np.abs(py) if config.kind == KIND_CONSTRAINED else py
        if n:
            d2 = (px[None, :] - cx[:, None]) ** 2 + (test_py[None, :] - cy[:, None]) ** 2
            unhit = np.nonzero(~(d2 <= (r * r)[:, None]).any(axis=1))[0]
        else:
            unhit = np.arange(m)
        add_x: list[float] = []
        add_y: list[float] = []
        for j in unhit:
            x, y = _sample_in_upper_half_disk(rng, float(cx[j]), float(cy[j]), float(r[j]))
            add_x.append(x)
            add_y.append(y)

        all_x = np.concatenate([px, np.asarray(add_x), xl, xr])
        if not _gaps_ok(all_x, gap):
            continue
        points = [PlanarPoint(float(x), float(y)) for x, y in zip(px, py)]
        points += [PlanarPoint(x, y) for x, y in zip(add_x, add_y)]
        disks = [Disk(float(a), float(b), float(c)) for a, b, c in zip(cx, cy, r)]
        mode = MODE_CONSTRAINED if config.kind == KIND_CONSTRAINED else MODE_SEPARABLE
        return points, disks, mode

    raise GenerationFailure(
        f"no round of {_MAX_ROUNDS} satisfied the min-gap constraint "
        f"(n={n}, m={m}, gap={gap!r})"
    )


def _generate_dense(
    config: GenConfig, gap: float
) -> tuple[list[PlanarPoint], list[Disk], str]:
    """Constructive draw for densities where rejection sampling cannot win.

    All x-coordinates (point x's and chord endpoints together) are laid out
    on a jittered grid with consecutive spacing >= gap, then assigned to the
    continuously drawn coordinates by rank, which preserves every order
    relation the solver cares about. Radii are recomputed from the remapped
    endpoints, so radius_range only steers them approximately here.
    """
    rng = np.random.default_rng(config.seed)
    n, m = config.n, config.m
    box = config.coord_range
    rlo, rhi = config.radius_range
    count = n + 2 * m
    margin = gap * 1.125
    slack = 2.0 * box - (count - 1) * margin
    if slack <= 0.0:
        raise GenerationFailure(
            f"min_x_gap {gap!r} cannot fit {count} x-values in a box of width {2 * box!r}"
        )

    base = np.sort(rng.uniform(0.0, slack, count))
    grid = -box + base + margin * np.arange(count)

    px_driver = rng.uniform(-box, box, n)
    cx_driver = rng.uniform(-box, box, m)
    r_driver = rng.uniform(rlo, rhi, m)
    drivers = np.concatenate([px_driver, cx_driver - r_driver, cx_driver + r_driver])
    order = np.argsort(drivers, kind="stable")
    ranks = np.empty(count, dtype=np.int64)
    ranks[order] = np.arange(count)
    mapped = grid[ranks]

    px = mapped[:n]
    xl = mapped[n : n + m]
    xr = mapped[n + m :]
    r = (xr - xl) / 2.0
    cx = (xl + xr) / 2.0

    py = rng.uniform(-box, box, n)
    if config.kind == KIND_FROM_CONSTRAINED:
        py = np.abs(py)

    # repair pass on the remapped coordinates; a disk is empty iff the
    # nearest point to its center (here on the axis) is farther than r
    test_py = np.abs(py) if config.kind == KIND_CONSTRAINED else py
    if n:
        kd = cKDTree(np.column_stack([px, test_py]))
        dist, _ = kd.query(np.column_stack([cx, np.zeros(m)]))
        unhit = np.nonzero(dist * dist > r * r)[0]
    else:
        unhit = np.arange(m)

    add_x: list[float] = []
    add_y: list[float] = []
    if unhit.size:
        occupied = np.sort(mapped)
        for j in unhit:
            lo = np.searchsorted(occupied, xl[j], side="left")
            hi = np.searchsorted(occupied, xr[j], side="right")
            window = occupied[lo:hi]
            if window.shape[0] < 2:
                raise GenerationFailure("degenerate chord window during repair")
            diffs = np.diff(window)
            t = int(np.argmax(diffs))
            if diffs[t] < 2.0 * gap:
                raise GenerationFailure("no room for a repair point inside a chord")
            x = float((window[t] + window[t + 1]) / 2.0)
            ymax = math.sqrt(max(r[j] * r[j] - (x - cx[j]) ** 2, 0.0))
            y = rng.uniform(0.0, ymax)
            add_x.append(x)
            add_y.append(y)
            occupied = np.insert(occupied, lo + t + 1, x)

    all_x = np.concatenate([px, np.asarray(add_x), xl, xr])
    if not _gaps_ok(all_x, gap):
        raise GenerationFailure("constructive layout lost the min-gap guarantee")

    points = [PlanarPoint(float(x), float(y)) for x, y in zip(px, py)]
    points += [PlanarPoint(x, y) for x, y in zip(add_x, add_y)]
    disks = [Disk(float(a), 0.0, float(c)) for a, c in zip(cx, r)]
    mode = MODE_CONSTRAINED if config.kind == KIND_CONSTRAINED else MODE_SEPARABLE
    return points, disks, mode


def generate_raw(config: GenConfig) -> tuple[list[PlanarPoint], list[Disk], str]:
    """Raw (unnormalized) points, disks, and mode for the config."""
    _check_config(config)
    gap = config.gap
    count = config.n + 2 * config.m
    # expected rejection acceptance ~ exp(-count^2 gap / width): switch to the
    # constructive layout once that exponent passes ~3
    if count > 1 and count * count * gap > 3.0 * (2.0 * config.coord_range):
        if config.kind == KIND_UNIT:
            raise GenerationFailure(
                "unit_separable cannot be generated at this density: the "
                "fixed radius does not survive rank remapping"
            )
        return _generate_dense(config, gap)
    return _generate_rejection(config, gap)


def generate(config: GenConfig) -> Instance:
    """Normalized instance for the config; identical config gives identical output."""
    points, disks, mode = generate_raw(config)
    return normalize(points, disks, mode)
