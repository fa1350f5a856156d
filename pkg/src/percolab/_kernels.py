"""Compiled kernels shared by the cluster engine and the Monte Carlo driver.

Forest layout for a box of radius N in dimension d (V = (2N+1)**d vertices):

    parent  int32[V]      root pointer; fully compressed after a build
    size    int32[V]      vertex count, valid at roots
    emin    int[V, d]     per-root coordinate minima
    emax    int[V, d]     per-root coordinate maxima
    touch   bool[V]       per-root flag: cluster meets the box boundary
"""
import numba as nb
import numpy as np

from .percolation import fold, splitmix, to_unit


@nb.njit(cache=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@nb.njit(cache=True)
def init_forest(parent, size, emin, emax, touch, N, d):
    S = 2 * N + 1
    coords = np.full(d, -N, dtype=np.int64)
    V = parent.shape[0]
    for idx in range(V):
        parent[idx] = idx
        size[idx] = 1
        on_bd = False
        for i in range(d):
            emin[idx, i] = coords[i]
            emax[idx, i] = coords[i]
            if coords[i] == N or coords[i] == -N:
                on_bd = True
        touch[idx] = on_bd
        k = d - 1
        while k >= 0:
            coords[k] += 1
            if coords[k] <= N:
                break
            coords[k] = -N
            k -= 1
    return S


@nb.njit(cache=True)
def compress(parent):
    for x in range(parent.shape[0]):
        parent[x] = _find(parent, x)


@nb.njit(cache=True)
def union_edges(parent, size, emin, emax, touch, seed, p, N, d, R, mask, use_mask):
    """Union every open bond of B_N in canonical order, then compress.

    Bond states come from the hash of (seed, base, axis) at threshold p, or
    from mask[v, axis] when use_mask is set.  With R >= 0 only bonds inside
    B_R may be open.
    """
    S = 2 * N + 1
    strides = np.ones(d, dtype=np.int64)
    for i in range(d - 2, -1, -1):
        strides[i] = strides[i + 1] * S
    coords = np.full(d, -N, dtype=np.int64)
    prefix = np.empty(d + 1, dtype=np.uint64)
    prefix[0] = splitmix(seed)
    for i in range(d):
        prefix[i + 1] = fold(prefix[i], coords[i])
    V = parent.shape[0]
    for idx in range(V):
        h = prefix[d]
        inside = True
        if R >= 0:
            for i in range(d):
                if coords[i] > R or coords[i] < -R:
                    inside = False
        if inside:
            for a in range(d):
                if coords[a] >= N or (R >= 0 and coords[a] >= R):
                    continue
                if use_mask:
                    if not mask[idx, a]:
                        continue
                elif not to_unit(fold(h, np.int64(a))) < p:
                    continue
                # union body kept inline: a helper call costs more than the work
                ra = idx
                while parent[ra] != ra:
                    parent[ra] = parent[parent[ra]]
                    ra = parent[ra]
                rb = idx + strides[a]
                while parent[rb] != rb:
                    parent[rb] = parent[parent[rb]]
                    rb = parent[rb]
                if ra == rb:
                    continue
                # larger cluster wins; ties go to the smaller index
                if size[ra] < size[rb] or (size[ra] == size[rb] and rb < ra):
                    ra, rb = rb, ra
                parent[rb] = ra
                size[ra] += size[rb]
                for i in range(d):
                    if emin[rb, i] < emin[ra, i]:
                        emin[ra, i] = emin[rb, i]
                    if emax[rb, i] > emax[ra, i]:
                        emax[ra, i] = emax[rb, i]
                touch[ra] = touch[ra] or touch[rb]
        k = d - 1
        while k >= 0:
            coords[k] += 1
            if coords[k] <= N:
                break
            coords[k] = -N
            k -= 1
        if k < 0:
            break
        if not use_mask:
            for i in range(k, d):
                prefix[i + 1] = fold(prefix[i], coords[i])
    compress(parent)


@nb.njit(cache=True, inline="always")
def diam(emin, emax, r, d):
    best = 0
    for i in range(d):
        w = emax[r, i] - emin[r, i]
        if w > best:
            best = w
    return best


@nb.njit(cache=True)
def inner_scan(parent, emin, emax, touch, N, n, d, thr, filter_finite):
    """One pass over B_n inside a forest on B_N.

    Returns (max finite diameter, #vertices with finite diameter > thr,
    #distinct boundary-touching clusters meeting B_n, capped at 2).
    """
    S = 2 * N + 1
    strides = np.ones(d, dtype=np.int64)
    for i in range(d - 2, -1, -1):
        strides[i] = strides[i + 1] * S
    coords = np.full(d, -n, dtype=np.int64)
    best = 0
    count = 0
    seen0 = -1
    seen1 = -1
    while True:
        idx = 0
        for i in range(d):
            idx += (coords[i] + N) * strides[i]
        r = parent[idx]
        if filter_finite and touch[r]:
            if seen0 < 0:
                seen0 = r
            elif r != seen0 and seen1 < 0:
                seen1 = r
        else:
            dm = diam(emin, emax, r, d)
            if dm > best:
                best = dm
            if dm > thr:
                count += 1
        k = d - 1
        while k >= 0:
            coords[k] += 1
            if coords[k] <= n:
                break
            coords[k] = -n
            k -= 1
        if k < 0:
            break
    ntouch = 0
    if seen0 >= 0:
        ntouch = 1
    if seen1 >= 0:
        ntouch = 2
    return best, count, ntouch


@nb.njit(cache=True)
def zb_scan(parent_o, touch_o, N, parent_i, emin_i, emax_i, n, d):
    """Max zero-boundary diameter over x in B_n whose outer cluster avoids the boundary of B_N."""
    So = 2 * N + 1
    Si = 2 * n + 1
    so = np.ones(d, dtype=np.int64)
    si = np.ones(d, dtype=np.int64)
    for i in range(d - 2, -1, -1):
        so[i] = so[i + 1] * So
        si[i] = si[i + 1] * Si
    coords = np.full(d, -n, dtype=np.int64)
    best = 0
    while True:
        io = 0
        ii = 0
        for i in range(d):
            io += (coords[i] + N) * so[i]
            ii += (coords[i] + n) * si[i]
        if not touch_o[parent_o[io]]:
            dm = diam(emin_i, emax_i, parent_i[ii], d)
            if dm > best:
                best = dm
        k = d - 1
        while k >= 0:
            coords[k] += 1
            if coords[k] <= n:
                break
            coords[k] = -n
            k -= 1
        if k < 0:
            break
    return best


@nb.njit(cache=True)
def explore_origin(seed, p, N, d, stamp, mark, stack, cmin, cmax):
    """Depth-first search of the origin's open cluster inside B_N.

    `mark` is a reusable int64[V] visit table keyed by `stamp`; `stack` an
    int64[V] work array.  Fills cmin/cmax with the cluster extents and
    returns (size, touches boundary of B_N).
    """
    S = 2 * N + 1
    strides = np.ones(d, dtype=np.int64)
    for i in range(d - 2, -1, -1):
        strides[i] = strides[i + 1] * S
    origin = 0
    for i in range(d):
        origin += N * strides[i]
        cmin[i] = 0
        cmax[i] = 0
    h0 = splitmix(seed)
    coords = np.empty(d, dtype=np.int64)
    mark[origin] = stamp
    stack[0] = origin
    top = 1
    size = 0
    touches = N == 0
    while top > 0:
        top -= 1
        v = stack[top]
        size += 1
        rem = v
        for i in range(d - 1, -1, -1):
            coords[i] = rem % S - N
            rem //= S
        for i in range(d):
            c = coords[i]
            if c < cmin[i]:
                cmin[i] = c
            if c > cmax[i]:
                cmax[i] = c
            if c == N or c == -N:
                touches = True
        for a in range(d):
            for step in range(2):
                c = coords[a]
                if step == 0:
                    if c >= N:
                        continue
                    w = v + strides[a]
                else:
                    if c <= -N:
                        continue
                    w = v - strides[a]
                if mark[w] == stamp:
                    continue
                # bond base is the endpoint with the smaller axis coordinate
                h = h0
                for i in range(d):
                    ci = coords[i]
                    if i == a and step == 1:
                        ci -= 1
                    h = fold(h, ci)
                if to_unit(fold(h, np.int64(a))) < p:
                    mark[w] = stamp
                    stack[top] = w
                    top += 1
    return size, touches
