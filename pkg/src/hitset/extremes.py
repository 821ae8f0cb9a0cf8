"""Extreme hit indices per disk: the leftmost and rightmost points each disk contains.

The general path descends a balanced tree over the x-sorted points; each node
answers "does this disk contain any point of my range" through an exact
nearest-neighbor query (the disk contains a range point iff it contains the
range's closest point to the disk center). Large nodes carry a kd-tree, small
ones are scanned flat; the kd-tree only nominates the candidate point and the
membership verdict is always recomputed with the same squared-distance
arithmetic as point_in_disk.

The congruent-disk path replaces nearest-neighbor queries with point location
in per-node lower envelopes of the axis and the radius-r arcs hanging from the
node's points: a center hits the range iff it lies within r of the envelope's
arc at the center's x.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .geom import DEFAULT_EPS, Disk, Infeasible, PlanarPoint

__all__ = [
    "ABRecord",
    "ABTable",
    "EmptyPointSet",
    "EnvelopeChain",
    "EnvelopeTreeNode",
    "Infeasible",
    "NNTreeNode",
    "RadiusMismatch",
    "build_envelope_tree",
    "build_nn_tree",
    "compute_ab",
    "compute_ab_unit",
    "descent_path",
    "disk_hits_range",
    "nn_query",
]

# nodes with at least this many points get a kd-tree; smaller ones scan flat
_KD_MIN = 48
# descents finish with one vectorized scan once the range is this small
_FLAT_FINISH = 96


class EmptyPointSet(RuntimeError):
    """Tree construction requires at least one point."""


class RadiusMismatch(RuntimeError):
    """A disk's radius differs from the congruent-family radius beyond eps."""


@dataclass(frozen=True, slots=True)
class ABRecord:
    """Extreme 1-based point indices hit by one disk: a = leftmost, b = rightmost."""

    a: int
    b: int


class ABTable(Sequence):
    """Array-backed sequence of ABRecord, one per disk in input order."""

    __slots__ = ("a", "b")

    def __init__(self, a: np.ndarray, b: np.ndarray):
        self.a = np.ascontiguousarray(a, dtype=np.int64)
        self.b = np.ascontiguousarray(b, dtype=np.int64)

    def __len__(self) -> int:
        return self.a.shape[0]

    def __getitem__(self, j):
        if isinstance(j, slice):
            return [ABRecord(int(x), int(y)) for x, y in zip(self.a[j], self.b[j])]
        return ABRecord(int(self.a[j]), int(self.b[j]))

    def __iter__(self) -> Iterator[ABRecord]:
        for x, y in zip(self.a, self.b):
            yield ABRecord(int(x), int(y))

    def __repr__(self) -> str:
        return f"ABTable(m={len(self)})"


def _tree_shape(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """BFS arrays of the balanced split tree over leaf indices 1..n.

    Node 0 is the root; a node with k leaves gives ceil(k/2) to its left
    child. Returns (lo, hi, left, right): 1-based inclusive leaf ranges and
    child node ids (-1 for leaves). Exactly 2n-1 nodes.
    """
    total = 2 * n - 1
    lo = np.empty(total, dtype=np.int64)
    hi = np.empty(total, dtype=np.int64)
    left = np.full(total, -1, dtype=np.int64)
    right = np.full(total, -1, dtype=np.int64)
    lo[0] = 1
    hi[0] = n
    start, count, next_id = 0, 1, 1
    while count:
        ids = np.arange(start, start + count)
        internal = lo[ids] < hi[ids]
        k = int(internal.sum())
        if k == 0:
            break
        parents = ids[internal]
        sizes = hi[parents] - lo[parents] + 1
        mids = lo[parents] + (sizes + 1) // 2 - 1
        lchild = next_id + 2 * np.arange(k)
        rchild = lchild + 1
        left[parents] = lchild
        right[parents] = rchild
        lo[lchild] = lo[parents]
        hi[lchild] = mids
        lo[rchild] = mids + 1
        hi[rchild] = hi[parents]
        start, count, next_id = next_id, 2 * k, next_id + 2 * k
    return lo, hi, left, right


class _NNTree:
    """Arrays-based balanced tree with per-node nearest-neighbor structures."""

    __slots__ = ("px", "py", "lo", "hi", "left", "right", "kd")

    def __init__(self, px: np.ndarray, py: np.ndarray):
        n = px.shape[0]
        if n == 0:
            raise EmptyPointSet("cannot build a point tree over zero points")
        self.px = px
        self.py = py
        self.lo, self.hi, self.left, self.right = _tree_shape(n)
        self.kd: list[cKDTree | None] = [None] * self.lo.shape[0]
        coords = np.column_stack([px, py])
        for v in range(self.lo.shape[0]):
            if self.hi[v] - self.lo[v] + 1 >= _KD_MIN:
                self.kd[v] = cKDTree(coords[self.lo[v] - 1 : self.hi[v]])


class NNTreeNode:
    """View of one node: point-index range, children, and its NN structure."""

    __slots__ = ("tree", "node_id")

    def __init__(self, tree: _NNTree, node_id: int):
        self.tree = tree
        self.node_id = node_id

    @property
    def range(self) -> tuple[int, int]:
        """1-based inclusive point-index interval covered by this node."""
        return int(self.tree.lo[self.node_id]), int(self.tree.hi[self.node_id])

    @property
    def children(self) -> tuple["NNTreeNode", "NNTreeNode"] | None:
        l = self.tree.left[self.node_id]
        if l < 0:
            return None
        return (
            NNTreeNode(self.tree, int(l)),
            NNTreeNode(self.tree, int(self.tree.right[self.node_id])),
        )

    @property
    def nn_structure(self) -> cKDTree | None:
        """kd-tree over the range, or None when the range is scanned flat."""
        return self.tree.kd[self.node_id]

    def __repr__(self) -> str:
        lo, hi = self.range
        return f"NNTreeNode([{lo},{hi}])"


def build_nn_tree(points: Sequence[PlanarPoint]) -> NNTreeNode:
    """Balanced tree over x-sorted points; each node can answer exact NN queries."""
    px = np.asarray([p.x for p in points], dtype=np.float64)
    py = np.asarray([p.y for p in points], dtype=np.float64)
    if px.shape[0] == 0:
        raise EmptyPointSet("cannot build a point tree over zero points")
    if np.any(np.diff(px) < 0):
        raise ValueError("points must be sorted by x")
    return NNTreeNode(_NNTree(px, py), 0)


def nn_query(node: NNTreeNode, q: PlanarPoint) -> tuple[int, float]:
    """Exact nearest point of the node's range to q; ties go to the smaller index.

    Returns (1-based point index, exact squared distance).
    """
    tree = node.tree
    v = node.node_id
    lo = int(tree.lo[v])
    hi = int(tree.hi[v])
    kd = tree.kd[v]
    if kd is None:
        dx = tree.px[lo - 1 : hi] - q.x
        dy = tree.py[lo - 1 : hi] - q.y
        d2 = dx * dx + dy * dy
        k = int(np.argmin(d2))  # argmin returns the first minimum: smallest index
        return lo + k, float(d2[k])
    dist, _ = kd.query([(q.x, q.y)], k=1)
    # the kd distance only bounds the search; candidates within a whisker are
    # re-ranked by exact squared distance, first by distance then by index
    ball = kd.query_ball_point([q.x, q.y], float(dist[0]) * (1.0 + 1e-9))
    best_idx = -1
    best_d2 = math.inf
    for local in sorted(ball):
        gx = tree.px[lo - 1 + local] - q.x
        gy = tree.py[lo - 1 + local] - q.y
        d2 = gx * gx + gy * gy
        if d2 < best_d2:
            best_d2 = d2
            best_idx = local
    return lo + best_idx, best_d2


def disk_hits_range(node: NNTreeNode, s: Disk, eps: float = DEFAULT_EPS) -> bool:
    """True iff the disk contains some point of the node's range.

    Containment of the range's closest point to the center is equivalent.
    """
    _, d2 = nn_query(node, PlanarPoint(s.cx, s.cy))
    return d2 <= s.r * s.r * (1.0 + eps)


def _flat_extreme(
    tree: _NNTree,
    nodes: np.ndarray,
    cx: np.ndarray,
    cy: np.ndarray,
    r2eps: np.ndarray,
    first: bool,
) -> np.ndarray:
    """First (or last) hit index within each row's whole node range.

    Only valid when each range is known to contain a hit. Ranges are padded
    to a common width and scanned as one matrix.
    """
    lo = tree.lo[nodes]
    hi = tree.hi[nodes]
    width = int((hi - lo).max()) + 1
    cols = np.arange(width)
    offs = lo[:, None] - 1 + cols[None, :]
    valid = offs <= (hi[:, None] - 1)
    offs = np.minimum(offs, hi[:, None] - 1)
    dx = tree.px[offs] - cx[:, None]
    dy = tree.py[offs] - cy[:, None]
    hit = (dx * dx + dy * dy <= r2eps[:, None]) & valid
    if first:
        col = hit.argmax(axis=1)
    else:
        col = (width - 1) - hit[:, ::-1].argmax(axis=1)
    return lo + col


def _batch_nn_hits(
    tree: _NNTree,
    child: np.ndarray,
    rows: np.ndarray,
    cx: np.ndarray,
    cy: np.ndarray,
    r2eps: np.ndarray,
) -> np.ndarray:
    """hit[t]: does disk rows[t] contain a point of node child[t]'s range.

    Rows are grouped per node so each group is one vectorized kd query. The
    kd-tree nominates the nearest point; membership is recomputed exactly.
    """
    out = np.empty(rows.shape[0], dtype=bool)
    order = np.argsort(child, kind="stable")
    sc = child[order]
    starts = np.nonzero(np.r_[True, sc[1:] != sc[:-1]])[0]
    ends = np.r_[starts[1:], sc.shape[0]]
    for s, e in zip(starts, ends):
        grp = order[s:e]
        v = int(sc[s])
        rsel = rows[grp]
        kd = tree.kd[v]
        lo = int(tree.lo[v])
        if kd is None:
            hi = int(tree.hi[v])
            dx = tree.px[None, lo - 1 : hi] - cx[rsel, None]
            dy = tree.py[None, lo - 1 : hi] - cy[rsel, None]
            best = (dx * dx + dy * dy).min(axis=1)
            out[grp] = best <= r2eps[rsel]
        else:
            _, li = kd.query(np.column_stack([cx[rsel], cy[rsel]]))
            gi = lo - 1 + li
            dx = tree.px[gi] - cx[rsel]
            dy = tree.py[gi] - cy[rsel]
            out[grp] = dx * dx + dy * dy <= r2eps[rsel]
    return out


def _descend(
    tree: _NNTree,
    root_id: int,
    cx: np.ndarray,
    cy: np.ndarray,
    r2eps: np.ndarray,
    leftmost: bool,
) -> np.ndarray:
    """Extreme hit index per disk (all disks known feasible from root_id)."""
    m = cx.shape[0]
    answer = np.empty(m, dtype=np.int64)
    cur = np.full(m, root_id, dtype=np.int64)
    pending = np.arange(m)
    while pending.size:
        nodes = cur[pending]
        sizes = tree.hi[nodes] - tree.lo[nodes] + 1

        small = sizes <= _FLAT_FINISH
        if small.any():
            rows = pending[small]
            answer[rows] = _flat_extreme(
                tree, cur[rows], cx[rows], cy[rows], r2eps[rows], first=leftmost
            )
            pending = pending[~small]
            if pending.size == 0:
                break
            nodes = cur[pending]

        # one step down: test the preferred child, fall back to the other
        prefer = tree.left[nodes] if leftmost else tree.right[nodes]
        other = tree.right[nodes] if leftmost else tree.left[nodes]
        hit = _batch_nn_hits(tree, prefer, pending, cx, cy, r2eps)
        cur[pending] = np.where(hit, prefer, other)
    return answer


def _compute_ab_arrays(
    tree: _NNTree,
    root_id: int,
    cx: np.ndarray,
    cy: np.ndarray,
    r: np.ndarray,
    eps: float,
) -> ABTable:
    m = cx.shape[0]
    if m == 0:
        return ABTable(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))
    r2eps = r * r * (1.0 + eps)
    rows = np.arange(m)
    roots = np.full(m, root_id, dtype=np.int64)
    feasible = _batch_nn_hits(tree, roots, rows, cx, cy, r2eps)
    if not feasible.all():
        raise Infeasible(int(np.nonzero(~feasible)[0][0]) + 1)
    a = _descend(tree, root_id, cx, cy, r2eps, leftmost=True)
    b = _descend(tree, root_id, cx, cy, r2eps, leftmost=False)
    return ABTable(a, b)


def compute_ab(
    root: NNTreeNode, disks: Sequence[Disk], eps: float = DEFAULT_EPS
) -> ABTable:
    """Extreme hit indices for every disk by root-to-leaf descent.

    The leftmost hit prefers the left child whenever it contains a hit point
    (the rightmost symmetrically); a disk whose root test misses has no hit
    anywhere and raises Infeasible with its 1-based position in `disks`.
    """
    cx = np.asarray([d.cx for d in disks], dtype=np.float64)
    cy = np.asarray([d.cy for d in disks], dtype=np.float64)
    r = np.asarray([d.r for d in disks], dtype=np.float64)
    return _compute_ab_arrays(root.tree, root.node_id, cx, cy, r, eps)


def descent_path(
    root: NNTreeNode, s: Disk, leftmost: bool, eps: float = DEFAULT_EPS
) -> list[NNTreeNode]:
    """Nodes visited while locating one extreme of one disk (introspection).

    Follows the same rule as compute_ab one node at a time via nn_query, so
    tests can assert that every visited subtree still contains a hit.
    """
    node = root
    path = [node]
    if not disk_hits_range(node, s, eps):
        raise Infeasible(1)
    while node.children is not None:
        first, second = node.children
        prefer = first if leftmost else second
        other = second if leftmost else first
        node = prefer if disk_hits_range(prefer, s, eps) else other
        path.append(node)
    return path


# ---------------------------------------------------------------------------
# congruent-disk path: lower envelopes of equal-radius arcs


@dataclass(frozen=True, slots=True)
class EnvelopeChain:
    """Lower envelope of the axis and equal-radius arcs hanging from points.

    pieces[i] spans breakpoints[i-1]..breakpoints[i] (unbounded at the ends);
    None means the axis (height 0), an int is the 1-based index of the point
    whose arc realizes the envelope there. First and last pieces are always
    the axis. len(pieces) == len(breakpoints) + 1.
    """

    radius: float
    breakpoints: tuple[float, ...]
    pieces: tuple[int | None, ...]


class _EnvelopeTree:
    __slots__ = ("px", "py", "radius", "lo", "hi", "left", "right", "chains")

    def __init__(self, px: np.ndarray, py: np.ndarray, radius: float):
        n = px.shape[0]
        if n == 0:
            raise EmptyPointSet("cannot build an envelope tree over zero points")
        self.px = px
        self.py = py
        self.radius = float(radius)
        self.lo, self.hi, self.left, self.right = _tree_shape(n)
        total = self.lo.shape[0]
        self.chains: list[EnvelopeChain | None] = [None] * total
        # children precede nothing in BFS order, so fill bottom-up by id
        for v in range(total - 1, -1, -1):
            if self.left[v] < 0:
                self.chains[v] = self._leaf_chain(int(self.lo[v]))
            else:
                self.chains[v] = self._merge(
                    self.chains[int(self.left[v])],
                    self.chains[int(self.right[v])],
                )

    def _leaf_chain(self, q: int) -> EnvelopeChain:
        y = self.py[q - 1]
        w2 = self.radius * self.radius - y * y
        if w2 <= 0.0:
            # arc never gets below the axis (tangency collapses to the axis)
            return EnvelopeChain(self.radius, (), (None,))
        w = math.sqrt(w2)
        x = self.px[q - 1]
        return EnvelopeChain(self.radius, (x - w, x + w), (None, q, None))

    def _arc_value(self, q: int, x: float) -> float:
        dx = x - self.px[q - 1]
        h2 = self.radius * self.radius - dx * dx
        if h2 < 0.0:
            h2 = 0.0
        return self.py[q - 1] - math.sqrt(h2)

    def _below_axis_crossing(self, p: int, q: int) -> float | None:
        """x where the arcs of p and q cross below the axis, if they do.

        Equal radii make the two circle intersections symmetric about the
        midpoint of the centers, which lies on/above the axis; at most one
        intersection can be below it.
        """
        ax, ay = self.px[p - 1], self.py[p - 1]
        bx, by = self.px[q - 1], self.py[q - 1]
        dx = bx - ax
        dy = by - ay
        d2 = dx * dx + dy * dy
        if d2 == 0.0:
            return None
        r2 = self.radius * self.radius
        h2 = r2 - d2 / 4.0
        if h2 <= 0.0:
            return None
        h = math.sqrt(h2)
        inv = 1.0 / math.sqrt(d2)
        mx = ax + dx / 2.0
        my = ay + dy / 2.0
        # the two intersections are mid +- h * perp
        y1 = my + dx * inv * h
        y2 = my - dx * inv * h
        x1 = mx - dy * inv * h
        x2 = mx + dy * inv * h
        if y1 < y2:
            xlow, ylow = x1, y1
        else:
            xlow, ylow = x2, y2
        if ylow >= 0.0:
            return None
        return float(xlow)

    def _merge(self, a: EnvelopeChain, b: EnvelopeChain) -> EnvelopeChain:
        """Sweep-merge two envelopes over their combined breakpoints."""
        events: list[float] = []
        ia = ib = 0
        abp, bbp = a.breakpoints, b.breakpoints
        while ia < len(abp) or ib < len(bbp):
            if ib >= len(bbp) or (ia < len(abp) and abp[ia] <= bbp[ib]):
                x = abp[ia]
                ia += 1
            else:
                x = bbp[ib]
                ib += 1
            if not events or x > events[-1]:
                events.append(x)

        pieces: list[int | None] = []
        rights: list[float] = []  # right boundary of each emitted cell

        def push(piece: int | None, right: float) -> None:
            if pieces and pieces[-1] == piece:
                rights[-1] = right
            else:
                pieces.append(piece)
                rights.append(right)

        ia = ib = 0
        for ci in range(len(events) + 1):
            lo = -math.inf if ci == 0 else events[ci - 1]
            hi = math.inf if ci == len(events) else events[ci]
            pa = a.pieces[ia]
            pb = b.pieces[ib]
            if pa is None and pb is None:
                push(None, hi)
            elif pa is None or pb is None:
                push(pa if pb is None else pb, hi)
            else:
                # two arcs: at most one sub-axis crossing can split the cell
                cross = self._below_axis_crossing(pa, pb)
                if cross is not None and lo < cross < hi:
                    mid = (lo + cross) / 2.0
                    first_w = self._cell_winner(pa, pb, mid)
                    push(first_w, cross)
                    push(pa if first_w == pb else pb, hi)
                else:
                    midlo = lo if lo != -math.inf else hi - 1.0
                    midhi = hi if hi != math.inf else lo + 1.0
                    push(self._cell_winner(pa, pb, (midlo + midhi) / 2.0), hi)
            if ci < len(events):
                if ia < len(abp) and abp[ia] == events[ci]:
                    ia += 1
                if ib < len(bbp) and bbp[ib] == events[ci]:
                    ib += 1
        return EnvelopeChain(self.radius, tuple(rights[:-1]), tuple(pieces))

    def _cell_winner(self, p: int, q: int, x: float) -> int:
        vp = self._arc_value(p, x)
        vq = self._arc_value(q, x)
        if vp < vq:
            return p
        if vq < vp:
            return q
        return min(p, q)


class EnvelopeTreeNode:
    """View of one envelope-tree node: range, children, and its chain."""

    __slots__ = ("tree", "node_id")

    def __init__(self, tree: _EnvelopeTree, node_id: int):
        self.tree = tree
        self.node_id = node_id

    @property
    def range(self) -> tuple[int, int]:
        return int(self.tree.lo[self.node_id]), int(self.tree.hi[self.node_id])

    @property
    def children(self) -> tuple["EnvelopeTreeNode", "EnvelopeTreeNode"] | None:
        l = self.tree.left[self.node_id]
        if l < 0:
            return None
        return (
            EnvelopeTreeNode(self.tree, int(l)),
            EnvelopeTreeNode(self.tree, int(self.tree.right[self.node_id])),
        )

    @property
    def chain(self) -> EnvelopeChain:
        return self.tree.chains[self.node_id]

    def height(self, x: float) -> float:
        """Envelope height at x (0 on axis pieces, arc height on arc pieces)."""
        chain = self.chain
        i = bisect_right(chain.breakpoints, x)
        piece = chain.pieces[i]
        if piece is None:
            return 0.0
        return self.tree._arc_value(piece, x)

    def __repr__(self) -> str:
        lo, hi = self.range
        return f"EnvelopeTreeNode([{lo},{hi}])"


def build_envelope_tree(
    points: Sequence[PlanarPoint], radius: float
) -> EnvelopeTreeNode:
    """Balanced tree (same shape as build_nn_tree) of lower envelopes.

    Each node's chain is the lower envelope of the axis and the radius-r
    lower arcs of disks centered at the node's points; parents merge their
    children with a linear sweep.
    """
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    px = np.asarray([p.x for p in points], dtype=np.float64)
    py = np.asarray([p.y for p in points], dtype=np.float64)
    if px.shape[0] == 0:
        raise EmptyPointSet("cannot build an envelope tree over zero points")
    if np.any(np.diff(px) < 0):
        raise ValueError("points must be sorted by x")
    return EnvelopeTreeNode(_EnvelopeTree(px, py, float(radius)), 0)


def _chain_hit(
    tree: _EnvelopeTree, node_id: int, ccx: float, ccy: float, r2eps: float
) -> bool:
    """Does a disk centered at (ccx, ccy) contain a point of the node's range.

    Equivalent to the center lying on/above the node's lower envelope: the
    envelope piece at the center's x names the range point nearest in the
    only direction that matters, and the verdict reuses the point_in_disk
    arithmetic.
    """
    chain = tree.chains[node_id]
    i = bisect_right(chain.breakpoints, ccx)
    piece = chain.pieces[i]
    if piece is None:
        return False
    dx = ccx - tree.px[piece - 1]
    dy = ccy - tree.py[piece - 1]
    return dx * dx + dy * dy <= r2eps


def compute_ab_unit(
    envelope_root: EnvelopeTreeNode,
    disks: Sequence[Disk],
    radius: float,
    eps: float = DEFAULT_EPS,
) -> ABTable:
    """compute_ab for a congruent-disk family via envelope point location.

    Every disk must carry the family radius (within eps, relative); the
    descent and error contract match compute_ab exactly.
    """
    tree = envelope_root.tree
    root_id = envelope_root.node_id
    r2eps = radius * radius * (1.0 + eps)
    m = len(disks)
    a = np.empty(m, dtype=np.int64)
    b = np.empty(m, dtype=np.int64)
    for j, d in enumerate(disks):
        if abs(d.r - radius) > eps * radius:
            raise RadiusMismatch(
                f"disk {j + 1} has radius {d.r!r}, family radius is {radius!r}"
            )
        if not _chain_hit(tree, root_id, d.cx, d.cy, r2eps):
            raise Infeasible(j + 1)
        for leftmost, out in ((True, a), (False, b)):
            v = root_id
            while tree.left[v] >= 0:
                prefer = int(tree.left[v]) if leftmost else int(tree.right[v])
                other = int(tree.right[v]) if leftmost else int(tree.left[v])
                if _chain_hit(tree, prefer, d.cx, d.cy, r2eps):
                    v = prefer
                else:
                    v = other
            out[j] = tree.lo[v]
    return ABTable(a, b)
