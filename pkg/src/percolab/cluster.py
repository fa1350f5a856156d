"""Cluster labelling with per-cluster extents, and the diameter observables.

A forest is built over the vertices of one box.  A cluster counts as finite
when it does not touch the boundary of the simulation (outer) box; the
outer box is the inner box padded by a margin, see `SimFrame`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import _kernels as K
from .lattice import BoxSpec, EdgeId, index_vertex, interior_edges, vertex_index
from .percolation import EdgeSampler, RestrictedConfig

States = Union[EdgeSampler, RestrictedConfig, Callable[[EdgeId], bool], np.ndarray]

CENSORED = -1

_NO_MASK = np.zeros((1, 1), dtype=np.bool_)


@dataclass(frozen=True)
class SimFrame:
    """Inner box B_n observed inside the simulation box B_N (N >= n)."""

    inner: BoxSpec
    outer: BoxSpec
    margin_policy: str = "fixed"

    def __post_init__(self):
        if self.inner.d != self.outer.d:
            raise ValueError("inner and outer boxes must share the dimension")
        if self.outer.n < self.inner.n:
            raise ValueError(f"outer radius {self.outer.n} < inner radius {self.inner.n}")

    @classmethod
    def with_margin(cls, d: int, n: int, margin: int, policy: str = "fixed") -> "SimFrame":
        return cls(BoxSpec(d, n), BoxSpec(d, n + margin), policy)

    @property
    def d(self) -> int:
        return self.inner.d

    @property
    def margin(self) -> int:
        return self.outer.n - self.inner.n


def _ext_dtype(n: int):
    return np.int16 if n < 2 ** 15 - 1 else np.int32


def forest_bytes(box: BoxSpec) -> int:
    """Working-set size of one forest on `box`."""
    e = np.dtype(_ext_dtype(box.n)).itemsize
    return box.num_vertices * (4 + 4 + 1 + 2 * box.d * e)


def alloc_forest(box: BoxSpec):
    V, d = box.num_vertices, box.d
    if V >= 2 ** 31:
        raise MemoryError(f"box B_{box.n} in d={d} has too many vertices ({V})")
    et = _ext_dtype(box.n)
    return (np.empty(V, np.int32), np.empty(V, np.int32),
            np.empty((V, d), et), np.empty((V, d), et), np.empty(V, np.bool_))


class ClusterForest:
    """Union-find over the vertices of `box`, fully path-compressed.

    `parent[v]` is the root of vertex index v.  At roots, `size`, `ext_min`,
    `ext_max` and `touches_outer` describe the whole cluster.
    """

    def __init__(self, box, parent, size, ext_min, ext_max, touches_outer):
        self.box = box
        self.parent = parent
        self.size = size
        self.ext_min = ext_min
        self.ext_max = ext_max
        self.touches_outer = touches_outer

    @classmethod
    def empty(cls, box: BoxSpec) -> "ClusterForest":
        arrays = alloc_forest(box)
        K.init_forest(*arrays, box.n, box.d)
        return cls(box, *arrays)

    def find(self, v) -> int:
        idx = v if isinstance(v, (int, np.integer)) else vertex_index(self.box, v)
        return int(self.parent[idx])

    def roots(self) -> np.ndarray:
        return np.flatnonzero(self.parent == np.arange(self.parent.size))

    def is_root(self, r: int) -> bool:
        return 0 <= r < self.parent.size and self.parent[r] == r

    def extents(self, r: int) -> list:
        """[(min, max)] per axis for the cluster rooted at r."""
        self._check_root(r)
        return [(int(a), int(b)) for a, b in zip(self.ext_min[r], self.ext_max[r])]

    def members(self, r: int) -> list:
        self._check_root(r)
        return [index_vertex(self.box, int(i)) for i in np.flatnonzero(self.parent == r)]

    def _check_root(self, r):
        if not self.is_root(r):
            raise ValueError(f"{r} is not a root of this forest")


def _edge_mask(box: BoxSpec, states) -> np.ndarray:
    if isinstance(states, np.ndarray):
        mask = np.asarray(states, dtype=np.bool_)
        if mask.shape != (box.num_vertices, box.d):
            raise ValueError(f"edge mask must have shape {(box.num_vertices, box.d)}")
        return mask
    state = states.state if hasattr(states, "state") else states
    mask = np.zeros((box.num_vertices, box.d), dtype=np.bool_)
    for e in interior_edges(box):
        if state(e):
            mask[vertex_index(box, e.base), e.axis] = True
    return mask


def build(box: Union[BoxSpec, SimFrame], states: States) -> ClusterForest:
    """Label the open clusters of `box` (the outer box when given a frame).

    `states` may be an EdgeSampler or RestrictedConfig (compiled path), a
    callable EdgeId -> bool, or a boolean mask of shape (V, d) where
    mask[v, axis] is the state of the bond based at vertex index v.
    """
    if isinstance(box, SimFrame):
        box = box.outer
    f = ClusterForest.empty(box)
    arrays = (f.parent, f.size, f.ext_min, f.ext_max, f.touches_outer)
    if isinstance(states, EdgeSampler):
        K.union_edges(*arrays, states.key, float(states.p), box.n, box.d, -1, _NO_MASK, False)
    elif isinstance(states, RestrictedConfig):
        if states.box.d != box.d:
            raise ValueError("restriction box has the wrong dimension")
        s = states.sampler
        K.union_edges(*arrays, s.key, float(s.p), box.n, box.d, min(states.box.n, box.n),
                      _NO_MASK, False)
    else:
        K.union_edges(*arrays, np.uint64(0), 0.0, box.n, box.d, -1, _edge_mask(box, states), True)
    return f


def diameter(f: ClusterForest, root: int) -> int:
    """max over axes of the cluster's coordinate width."""
    f._check_root(root)
    return int(K.diam(f.ext_min, f.ext_max, root, f.box.d))


def _scan(frame: SimFrame, f: ClusterForest, thr: float, filter_finite: bool = True):
    if f.box != frame.outer:
        raise ValueError("forest was not built on the frame's outer box")
    return K.inner_scan(f.parent, f.ext_min, f.ext_max, f.touches_outer,
                        frame.outer.n, frame.inner.n, frame.d, float(thr), filter_finite)


def r_fb(frame: SimFrame, f: ClusterForest) -> int:
    """Max diameter of finite clusters meeting B_n (0 if there are none)."""
    return int(_scan(frame, f, math.inf)[0])


def r_world(box: BoxSpec, f: ClusterForest) -> int:
    """Max diameter over every cluster of a forest, with no finiteness filter."""
    frame = SimFrame(box, box)
    return int(_scan(frame, f, math.inf, filter_finite=False)[0])


def r_zb(frame: SimFrame, f_outer: ClusterForest, f_inner: ClusterForest) -> int:
    if f_outer.box != frame.outer or f_inner.box != frame.inner:
        raise ValueError("forests do not match the frame")
    return int(K.zb_scan(f_outer.parent, f_outer.touches_outer, frame.outer.n,
                         f_inner.parent, f_inner.ext_min, f_inner.ext_max,
                         frame.inner.n, frame.d))


def _origin_root(frame: SimFrame, f: ClusterForest) -> int:
    return f.find((0,) * frame.d)


def one_arm_indicator(frame: SimFrame, f: ClusterForest, finite_only: bool = False) -> int:
    r = _origin_root(frame, f)
    reach = max(max(abs(int(a)), abs(int(b))) for a, b in zip(f.ext_min[r], f.ext_max[r]))
    hit = reach >= frame.inner.n
    if finite_only and f.touches_outer[r]:
        hit = False
    return int(hit)


def diam_tail_indicator(frame: SimFrame, f: ClusterForest, t: float) -> int:
    """1 / 0 for a finite origin cluster with diameter >= t / < t, CENSORED if it touches B_N's boundary."""
    r = _origin_root(frame, f)
    if f.touches_outer[r]:
        return CENSORED
    return int(diameter(f, r) >= t)


def s_threshold(n: int, rho: float) -> float:
    return rho * math.log(n)


def s_n(frame: SimFrame, f: ClusterForest, rho: float) -> int:
    """Number of x in B_n whose finite cluster has diameter > rho * log n."""
    n = frame.inner.n
    if n < 2:
        raise ValueError("S_n needs n >= 2")
    return int(_scan(frame, f, s_threshold(n, rho))[1])
