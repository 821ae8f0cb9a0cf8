"""Prunable-point elimination over a segment tree of extreme-index intervals.

Each disk hits a contiguous index range [a, b] of the x-sorted points. The
range is split into O(log n) canonical segment-tree nodes; each node stores
the common intersection of its disks' boundaries as a chain of upper arcs.
A point whose root-to-leaf path meets a node with a nonempty disk list whose
chain it falls outside is prunable: every disk through that node misses it,
yet the disks' ranges strictly straddle it, so some surviving point covers
whatever it covers.

Chains assume the disk family is sorted by center x, pairwise non-contained,
and single-intersection; build_chains flags violations and the wrappers
raise PrereqViolated.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._kernels import build_chains, prunable_mask
from .extremes import ABRecord, ABTable, _tree_shape
from .geom import DEFAULT_EPS, Disk, PlanarPoint, PrereqViolated, point_in_disk

__all__ = [
    "ArcChain",
    "SegTreeNode",
    "build_segment_tree",
    "common_intersection",
    "find_prunable",
    "point_in_chain",
]


@dataclass(frozen=True, slots=True)
class ArcChain:
    """Common intersection of a disk family, seen from above.

    The region is bounded below by the axis and above by a left-to-right
    chain of upper arcs over [x_lo, x_hi]. arcs[c] is the 1-based position
    in `family` of the disk whose arc bounds cell c; breakpoints holds the
    x where consecutive cells meet (one fewer than cells). An empty
    intersection has x_lo > x_hi and no cells.
    """

    x_lo: float
    x_hi: float
    breakpoints: tuple[float, ...]
    arcs: tuple[int, ...]
    family: tuple[Disk, ...]

    @property
    def is_empty(self) -> bool:
        return not self.arcs


def _disk_arrays(disks: Sequence[Disk]):
    m = len(disks)
    cx = np.fromiter((d.cx for d in disks), np.float64, m)
    cy = np.fromiter((d.cy for d in disks), np.float64, m)
    r = np.fromiter((d.r for d in disks), np.float64, m)
    w2 = r * r - cy * cy
    if np.any(r <= 0.0) or np.any(w2 <= 0.0):
        raise PrereqViolated("disk without an axis chord in chain family")
    w = np.sqrt(w2)
    return cx, cy, r, cx - w, cx + w


def _run_build(off, ent_cx, ent_cy, ent_r, ent_xl, ent_xr, eps):
    e = ent_cx.shape[0]
    num_nodes = off.shape[0] - 1
    cell_rank = np.zeros(e, dtype=np.int64)
    cell_bpx = np.zeros(e, dtype=np.float64)
    cnt = np.zeros(num_nodes, dtype=np.int64)
    x_lo = np.zeros(num_nodes, dtype=np.float64)
    x_hi = np.zeros(num_nodes, dtype=np.float64)
    state = np.zeros(num_nodes, dtype=np.int8)
    viol = np.zeros(3, dtype=np.int64)
    build_chains(off, ent_cx, ent_cy, ent_r, ent_xl, ent_xr, float(eps),
                 cell_rank, cell_bpx, cnt, x_lo, x_hi, state, viol)
    return cell_rank, cell_bpx, cnt, x_lo, x_hi, state, viol


def common_intersection(disks: Sequence[Disk], eps: float = DEFAULT_EPS) -> ArcChain:
    """Chain of the common intersection of `disks`, sorted by center x.

    Pre: nonempty, pairwise non-contained, single-intersection family.
    Raises PrereqViolated when the stack scan detects otherwise.
    """
    if not disks:
        raise ValueError("common_intersection needs at least one disk")
    cx, cy, r, xl, xr = _disk_arrays(disks)
    if np.any(np.diff(cx) < 0.0):
        raise ValueError("disks must be sorted by center x")
    off = np.array([0, len(disks)], dtype=np.int64)
    cell_rank, cell_bpx, cnt, x_lo, x_hi, state, viol = _run_build(
        off, cx, cy, r, xl, xr, eps)
    if viol[0]:
        raise PrereqViolated(
            "disk family is not single-intersection or not containment-free",
            pair=(int(viol[1]) + 1, int(viol[2]) + 1))
    s = int(cnt[0])
    return ArcChain(
        x_lo=float(x_lo[0]),
        x_hi=float(x_hi[0]),
        breakpoints=tuple(float(v) for v in cell_bpx[:max(s - 1, 0)]),
        arcs=tuple(int(v) + 1 for v in cell_rank[:s]),
        family=tuple(disks),
    )


def point_in_chain(chain: ArcChain, q: PlanarPoint, eps: float = DEFAULT_EPS) -> bool:
    """Whether q lies in the region the chain bounds (closed, above the axis)."""
    if chain.is_empty:
        return False
    if q.x < chain.x_lo or q.x > chain.x_hi:
        return False
    cell = bisect_right(chain.breakpoints, q.x)
    return point_in_disk(q, chain.family[chain.arcs[cell] - 1], eps)


def _canonical_pairs(n: int, lo, hi, left, right, a, b):
    """Canonical segment-tree decomposition of every [a_i, b_i].

    Returns (ent_node, ent_disk) sorted by node then by disk rank, so each
    node's disk list keeps center-x order.
    """
    m = a.shape[0]
    nodes = np.zeros(m, dtype=np.int64)
    ranks = np.arange(m, dtype=np.int64)
    out_nodes = []
    out_ranks = []
    while nodes.size:
        nlo = lo[nodes]
        nhi = hi[nodes]
        covered = (a[ranks] <= nlo) & (nhi <= b[ranks])
        if covered.any():
            out_nodes.append(nodes[covered])
            out_ranks.append(ranks[covered])
        rest = ~covered
        nodes_r = nodes[rest]
        ranks_r = ranks[rest]
        lc = left[nodes_r]
        rc = right[nodes_r]
        split = hi[lc]
        go_l = a[ranks_r] <= split
        go_r = b[ranks_r] > split
        nodes = np.concatenate([lc[go_l], rc[go_r]])
        ranks = np.concatenate([ranks_r[go_l], ranks_r[go_r]])
    if not out_nodes:
        return (np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))
    all_nodes = np.concatenate(out_nodes)
    all_ranks = np.concatenate(out_ranks)
    order = np.lexsort((all_ranks, all_nodes))
    return all_nodes[order], all_ranks[order]


class _SegTreeIndex:
    """Backing arrays for a built segment tree; nodes are views into this."""

    __slots__ = ("n", "eps", "lo", "hi", "left", "right", "off", "ent_disk",
                 "ent_cx", "ent_cy", "ent_r", "cell_rank", "cell_bpx", "cnt",
                 "x_lo", "x_hi", "state", "disks")

    def __init__(self, n, eps, shape, off, ent_disk, ent_geom, built, disks):
        self.n = n
        self.eps = eps
        self.lo, self.hi, self.left, self.right = shape
        self.off = off
        self.ent_disk = ent_disk
        self.ent_cx, self.ent_cy, self.ent_r = ent_geom
        (self.cell_rank, self.cell_bpx, self.cnt,
         self.x_lo, self.x_hi, self.state) = built
        self.disks = disks


class SegTreeNode:
    """View of one segment-tree node: index interval, disk list, chain."""

    __slots__ = ("_index", "node_id")

    def __init__(self, index: _SegTreeIndex, node_id: int):
        self._index = index
        self.node_id = node_id

    @property
    def interval(self) -> tuple[int, int]:
        ix = self._index
        return (int(ix.lo[self.node_id]), int(ix.hi[self.node_id]))

    @property
    def children(self) -> tuple["SegTreeNode", ...]:
        ix = self._index
        l = int(ix.left[self.node_id])
        if l < 0:
            return ()
        return (SegTreeNode(ix, l), SegTreeNode(ix, int(ix.right[self.node_id])))

    @property
    def disk_ids(self) -> tuple[int, ...]:
        """1-based positions, in the build's disk list, of disks stored here."""
        ix = self._index
        s0, s1 = int(ix.off[self.node_id]), int(ix.off[self.node_id + 1])
        return tuple(int(d) + 1 for d in ix.ent_disk[s0:s1])

    @property
    def chain(self) -> ArcChain:
        """Common intersection of the disks stored at this node."""
        ix = self._index
        v = self.node_id
        s0, s1 = int(ix.off[v]), int(ix.off[v + 1])
        family = tuple(ix.disks[int(d)] for d in ix.ent_disk[s0:s1])
        if s1 == s0:
            return ArcChain(x_lo=np.inf, x_hi=-np.inf, breakpoints=(),
                            arcs=(), family=family)
        s = int(ix.cnt[v])
        return ArcChain(
            x_lo=float(ix.x_lo[v]),
            x_hi=float(ix.x_hi[v]),
            breakpoints=tuple(float(b) for b in ix.cell_bpx[s0:s0 + max(s - 1, 0)]),
            arcs=tuple(int(r) + 1 for r in ix.cell_rank[s0:s0 + s]),
            family=family,
        )


def _build_index(n, a, b, cx, cy, r, xl, xr, disks, eps) -> _SegTreeIndex:
    shape = _tree_shape(n)
    lo, hi, left, right = shape
    ent_node, ent_disk = _canonical_pairs(n, lo, hi, left, right, a, b)
    num_nodes = lo.shape[0]
    counts = np.bincount(ent_node, minlength=num_nodes)
    off = np.zeros(num_nodes + 1, dtype=np.int64)
    np.cumsum(counts, out=off[1:])
    ent_geom = (cx[ent_disk], cy[ent_disk], r[ent_disk])
    built = _run_build(off, ent_geom[0], ent_geom[1], ent_geom[2],
                       xl[ent_disk], xr[ent_disk], eps)
    viol = built[6]
    if viol[0]:
        raise PrereqViolated(
            "disk family is not single-intersection or not containment-free",
            pair=(int(ent_disk[viol[1]]) + 1, int(ent_disk[viol[2]]) + 1))
    return _SegTreeIndex(n, eps, shape, off, ent_disk, ent_geom, built[:6], disks)


def build_segment_tree(
    n: int,
    ab: Sequence[ABRecord] | ABTable,
    disks: Sequence[Disk],
    eps: float = DEFAULT_EPS,
) -> SegTreeNode:
    """Segment tree over point indices 1..n with per-node intersection chains.

    ab[j] is the extreme hit range of disks[j]; disks must be sorted by
    center x and containment-free. Returns the root node view.
    """
    if n < 1:
        raise ValueError("segment tree needs at least one point index")
    if len(ab) != len(disks):
        raise ValueError("ab and disks must have equal length")
    if isinstance(ab, ABTable):
        a, b = ab.a, ab.b
    else:
        a = np.fromiter((rec.a for rec in ab), np.int64, len(ab))
        b = np.fromiter((rec.b for rec in ab), np.int64, len(ab))
    if len(ab) and (a.min() < 1 or b.max() > n or np.any(a > b)):
        raise ValueError("ab records out of range")
    cx, cy, r, xl, xr = _disk_arrays(disks)
    if np.any(np.diff(cx) < 0.0):
        raise ValueError("disks must be sorted by center x")
    index = _build_index(n, a, b, cx, cy, r, xl, xr, tuple(disks), eps)
    return SegTreeNode(index, 0)


def _prunable_array(index: _SegTreeIndex, px, py, root_id: int = 0):
    out = np.zeros(px.shape[0], dtype=np.bool_)
    prunable_mask(px, py, root_id, index.hi, index.left, index.right,
                  index.off, index.cnt, index.x_lo, index.x_hi, index.state,
                  index.cell_rank, index.cell_bpx, index.ent_cx, index.ent_cy,
                  index.ent_r, float(index.eps), out)
    return out


def find_prunable(root: SegTreeNode, points: Sequence[PlanarPoint]) -> set[int]:
    """1-based indices of points pruned by the chains along their paths.

    points[k-1] must be the point with index k in the ab ranges the tree
    was built from (x-sorted order).
    """
    index = root._index
    if len(points) != index.n:
        raise ValueError("points length must match the tree's index range")
    n = len(points)
    px = np.fromiter((p.x for p in points), np.float64, n)
    py = np.fromiter((p.y for p in points), np.float64, n)
    mask = _prunable_array(index, px, py, root.node_id)
    return {int(k) + 1 for k in np.nonzero(mask)[0]}
