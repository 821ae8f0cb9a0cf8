"""Compiled hot loops for the pruning stage.

Two kernels: building the per-node common-intersection chains of the segment
tree, and walking every point's root-to-leaf path against those chains. Both
are straight translations of the pure-Python logic in pruning.py; tests pin
the two paths together. All membership arithmetic matches point_in_disk:
squared distance against r^2 * (1 + eps).
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def build_chains(
    off,        # int64[num_nodes + 1]: entry range per node
    ent_cx,     # float64[E]: disk geometry per entry, node-major, center-x order
    ent_cy,
    ent_r,
    ent_xl,
    ent_xr,
    eps,        # float64
    cell_rank,  # int64[E] out: per chain cell, entry rank within its node
    cell_bpx,   # float64[E] out: right boundary of each cell but the last
    cnt,        # int64[num_nodes] out: cells per node
    x_lo,       # float64[num_nodes] out
    x_hi,       # float64[num_nodes] out
    state,      # int8[num_nodes] out: 0 no disks, 1 chain, 2 empty intersection
    viol,       # int64[3] out: flag, entry slot a, entry slot b
):
    num_nodes = off.shape[0] - 1
    max_len = 0
    for v in range(num_nodes):
        ln = off[v + 1] - off[v]
        if ln > max_len:
            max_len = ln
    st_rank = np.empty(max_len, dtype=np.int64)
    st_bpx = np.empty(max_len, dtype=np.float64)
    st_bpy = np.empty(max_len, dtype=np.float64)

    for v in range(num_nodes):
        s0 = off[v]
        ln = off[v + 1] - s0
        if ln == 0:
            state[v] = 0
            cnt[v] = 0
            continue
        xlo = ent_xl[s0]
        xhi = ent_xr[s0]
        for t in range(1, ln):
            if ent_xl[s0 + t] > xlo:
                xlo = ent_xl[s0 + t]
            if ent_xr[s0 + t] < xhi:
                xhi = ent_xr[s0 + t]
        x_lo[v] = xlo
        x_hi[v] = xhi
        if xlo > xhi:
            state[v] = 2
            cnt[v] = 0
            continue

        # stack scan over upper arcs in center-x order; entry 0's breakpoint
        # is its chord's right end on the axis
        st_rank[0] = 0
        st_bpx[0] = ent_xr[s0]
        st_bpy[0] = 0.0
        sp = 1
        for t in range(1, ln):
            cxt = ent_cx[s0 + t]
            cyt = ent_cy[s0 + t]
            rt = ent_r[s0 + t]
            r2t = rt * rt * (1.0 + eps)
            while sp > 0:
                dx = st_bpx[sp - 1] - cxt
                dy = st_bpy[sp - 1] - cyt
                if dx * dx + dy * dy <= r2t:
                    break  # breakpoint inside the new disk: top arc survives
                sp -= 1
            if sp == 0:
                # the bottom arc popping means the running intersection went
                # empty despite a nonempty x-range: broken preconditions
                viol[0] = 1
                viol[1] = s0
                viol[2] = s0 + t
                return
            u = st_rank[sp - 1]
            ax = ent_cx[s0 + u]
            ay = ent_cy[s0 + u]
            ar = ent_r[s0 + u]
            dx = cxt - ax
            dy = cyt - ay
            d2 = dx * dx + dy * dy
            tol = eps * (ar if ar > rt else rt)
            if d2 <= 0.0:
                viol[0] = 1
                viol[1] = s0 + u
                viol[2] = s0 + t
                return
            tt = (d2 + ar * ar - rt * rt) * 0.5
            h2 = ar * ar - tt * tt / d2
            if h2 < 0.0:
                if h2 > -4.0 * eps * ar * ar:
                    h2 = 0.0
                else:
                    viol[0] = 1
                    viol[1] = s0 + u
                    viol[2] = s0 + t
                    return
            h = np.sqrt(h2)
            inv = 1.0 / np.sqrt(d2)
            mx = ax + dx * tt / d2
            my = ay + dy * tt / d2
            ox = -dy * inv * h
            oy = dx * inv * h
            y_plus = my + oy
            y_minus = my - oy
            if y_plus >= y_minus:
                bx = mx + ox
                by = y_plus
                ylow = y_minus
            else:
                bx = mx - ox
                by = y_minus
                ylow = y_plus
            if ylow > tol or by < -tol:
                # two crossings above the axis (or none): not a
                # single-intersection family
                viol[0] = 1
                viol[1] = s0 + u
                viol[2] = s0 + t
                return
            st_rank[sp] = t
            st_bpx[sp] = bx
            st_bpy[sp] = by
            sp += 1

        state[v] = 1
        cnt[v] = sp
        # cells left to right are the stack top down
        for c in range(sp):
            j = sp - 1 - c
            cell_rank[s0 + c] = st_rank[j]
            if c < sp - 1:
                cell_bpx[s0 + c] = st_bpx[j]


@njit(cache=True)
def prunable_mask(
    px,         # float64[n]: query points, index order
    py,
    root_id,    # int64
    hi,         # int64[num_nodes]: tree shape
    left,
    right,
    off,        # int64[num_nodes + 1]
    cnt,
    x_lo,
    x_hi,
    state,
    cell_rank,
    cell_bpx,
    ent_cx,
    ent_cy,
    ent_r,
    eps,
    out,        # bool_[n] out
):
    n = px.shape[0]
    for k in range(n):
        x = px[k]
        y = py[k]
        idx = k + 1
        v = root_id
        pruned = False
        while True:
            st = state[v]
            if st == 2:
                pruned = True
                break
            if st == 1:
                if x < x_lo[v] or x > x_hi[v]:
                    pruned = True
                    break
                s0 = off[v]
                c = cnt[v]
                loi = 0
                hii = c - 1
                while loi < hii:
                    mid = (loi + hii) // 2
                    if x < cell_bpx[s0 + mid]:
                        hii = mid
                    else:
                        loi = mid + 1
                slot = s0 + cell_rank[s0 + loi]
                dx = x - ent_cx[slot]
                dy = y - ent_cy[slot]
                rr = ent_r[slot]
                if dx * dx + dy * dy > rr * rr * (1.0 + eps):
                    pruned = True
                    break
            l = left[v]
            if l < 0:
                break
            v = l if idx <= hi[l] else right[v]
        out[k] = pruned
