"""Integer-lattice geometry for hypercubic boxes B_n = {x : ||x||_inf <= n}.

Vertices are indexed lexicographically in shifted coordinates (x + n),
first coordinate most significant.  A bond is identified by its base vertex
and an axis: ``EdgeId(base, axis)`` is the bond {base, base + e_axis}.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np


@dataclass(frozen=True)
class BoxSpec:
    d: int
    n: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if self.n < 0:
            raise ValueError(f"radius must be >= 0, got {self.n}")

    @property
    def side(self) -> int:
        return 2 * self.n + 1

    @property
    def num_vertices(self) -> int:
        return self.side ** self.d

    @property
    def num_edges(self) -> int:
        return self.d * (2 * self.n) * self.side ** (self.d - 1)

    def contains(self, v: Sequence[int]) -> bool:
        return len(v) == self.d and linf_norm(v) <= self.n

    def on_boundary(self, v: Sequence[int]) -> bool:
        return len(v) == self.d and linf_norm(v) == self.n


class EdgeId(NamedTuple):
    base: tuple
    axis: int

    @property
    def head(self) -> tuple:
        h = list(self.base)
        h[self.axis] += 1
        return tuple(h)

    @classmethod
    def between(cls, u: Sequence[int], v: Sequence[int]) -> "EdgeId":
        """Canonical id of the bond joining two nearest neighbours."""
        diff = [b - a for a, b in zip(u, v)]
        nz = [i for i, x in enumerate(diff) if x != 0]
        if len(u) != len(v) or len(nz) != 1 or abs(diff[nz[0]]) != 1:
            raise ValueError(f"{tuple(u)} and {tuple(v)} are not nearest neighbours")
        axis = nz[0]
        base = tuple(u) if diff[axis] == 1 else tuple(v)
        return cls(base, axis)


def linf_norm(v: Sequence[int]) -> int:
    return max((abs(int(x)) for x in v), default=0)


def vertex_index(box: BoxSpec, v: Sequence[int]) -> int:
    if not box.contains(v):
        raise ValueError(f"vertex {tuple(v)} is not in B_{box.n} (d={box.d})")
    idx = 0
    for x in v:
        idx = idx * box.side + (int(x) + box.n)
    return idx


def index_vertex(box: BoxSpec, idx: int) -> tuple:
    if not 0 <= idx < box.num_vertices:
        raise ValueError(f"index {idx} out of range for B_{box.n} (d={box.d})")
    coords = []
    for _ in range(box.d):
        idx, r = divmod(idx, box.side)
        coords.append(r - box.n)
    return tuple(reversed(coords))


def vertex_coords(box: BoxSpec) -> np.ndarray:
    """All vertices of the box as a (num_vertices, d) array in index order."""
    axes = [np.arange(-box.n, box.n + 1)] * box.d
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grid], axis=1)


def is_interior(box: BoxSpec, e: EdgeId) -> bool:
    return box.contains(e.base) and box.contains(e.head)


def interior_edges(box: BoxSpec) -> Iterator[EdgeId]:
    """Every bond with both endpoints in the box, ordered by base index then axis."""
    for idx in range(box.num_vertices):
        v = index_vertex(box, idx)
        for axis in range(box.d):
            if v[axis] < box.n:
                yield EdgeId(v, axis)


def boundary_size(box: BoxSpec) -> int:
    if box.n == 0:
        return 1
    return box.side ** box.d - (box.side - 2) ** box.d
