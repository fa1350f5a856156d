"""Exact distributions by enumerating every zero-boundary configuration of a small box.

Configurations are tallied by (number of open bonds, observable value); the
probability of a value is then the exact polynomial
sum_k count[k, value] * p**k * (1-p)**(E-k), evaluated in rationals.

Connectivity here is a plain breadth-first search and shares no code with
the union-find engine it is meant to check.  Every cluster of the
enumerated box is treated as finite.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numba as nb
import numpy as np

from .errors import EdgeBudgetExceeded
from .lattice import BoxSpec, index_vertex, interior_edges, vertex_index

EDGE_BUDGET = 24

R_ZB_WORLD = "R_ZB_WORLD"
ONE_ARM = "ONE_ARM"
DIAM_ORIGIN = "DIAM_ORIGIN"
S_COUNT = "S_COUNT"
OBSERVABLES = (R_ZB_WORLD, ONE_ARM, DIAM_ORIGIN, S_COUNT)
_OBS_CODE = {R_ZB_WORLD: 0, ONE_ARM: 1, DIAM_ORIGIN: 2, S_COUNT: 3}


def as_rational(p) -> Fraction:
    """Exact probability from a Fraction, int or decimal/'a/b' string; floats are refused."""
    if isinstance(p, bool) or isinstance(p, float):
        raise TypeError(f"p must be exact (Fraction, int or string), got {p!r}")
    if isinstance(p, (Fraction, int)):
        q = Fraction(p)
    elif isinstance(p, str):
        try:
            q = Fraction(p.strip())
        except ValueError as exc:
            raise ValueError(f"cannot read {p!r} as a rational") from exc
    else:
        raise TypeError(f"p must be exact (Fraction, int or string), got {p!r}")
    if not 0 <= q <= 1:
        raise ValueError(f"p must lie in [0, 1], got {q}")
    return q


@dataclass
class ExactDistribution:
    observable: str
    d: int
    n: int
    p: Fraction
    support: list  # [(value, Fraction)], sorted by value
    rho: Optional[float] = None
    extra: dict = field(default_factory=dict)

    def prob(self, value: int) -> Fraction:
        for v, q in self.support:
            if v == value:
                return q
        return Fraction(0)

    def tail(self, t: int) -> Fraction:
        """P(value >= t)."""
        return sum((q for v, q in self.support if v >= t), Fraction(0))

    def mean(self) -> Fraction:
        return sum((v * q for v, q in self.support), Fraction(0))

    def total(self) -> Fraction:
        return sum((q for _, q in self.support), Fraction(0))

    def to_dict(self) -> dict:
        out = {
            "observable": self.observable,
            "d": self.d,
            "n": self.n,
            "p": str(self.p),
            "support": [{"value": v, "probability": str(q)} for v, q in self.support],
        }
        if self.rho is not None:
            out["rho"] = self.rho
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, obj: dict) -> "ExactDistribution":
        return cls(obj["observable"], obj["d"], obj["n"], Fraction(obj["p"]),
                   [(s["value"], Fraction(s["probability"])) for s in obj["support"]],
                   obj.get("rho"))


def _geometry(box: BoxSpec):
    edges = list(interior_edges(box))
    ends = np.array([[vertex_index(box, e.base), vertex_index(box, e.head)] for e in edges],
                    dtype=np.int64).reshape(-1, 2)
    V = box.num_vertices
    incident = [[] for _ in range(V)]
    for k in range(len(ends)):
        incident[ends[k, 0]].append(k)
        incident[ends[k, 1]].append(k)
    deg = max((len(x) for x in incident), default=0)
    inc = np.full((V, max(deg, 1)), -1, dtype=np.int64)
    for v in range(V):
        inc[v, :len(incident[v])] = incident[v]
    coords = np.array([index_vertex(box, v) for v in range(V)], dtype=np.int64).reshape(V, box.d)
    return ends, inc, coords


@nb.njit(cache=True)
def _tally(lo, hi, E, ends, inc, coords, n, origin, obs, thr, nvals):
    V, d = coords.shape
    table = np.zeros((E + 1, nvals), dtype=np.int64)
    comp = np.empty(V, dtype=np.int64)
    queue = np.empty(V, dtype=np.int64)
    lo_c = np.empty(d, dtype=np.int64)
    hi_c = np.empty(d, dtype=np.int64)
    for cfg in range(lo, hi):
        k = 0
        x = cfg
        while x:
            x &= x - 1
            k += 1
        comp[:] = -1
        best = 0
        scount = 0
        origin_diam = 0
        origin_reach = 0
        for s in range(V):
            if comp[s] >= 0:
                continue
            comp[s] = s
            queue[0] = s
            head = 0
            tail = 1
            for i in range(d):
                lo_c[i] = coords[s, i]
                hi_c[i] = coords[s, i]
            reach = 0
            while head < tail:
                v = queue[head]
                head += 1
                for i in range(d):
                    c = coords[v, i]
                    if c < lo_c[i]:
                        lo_c[i] = c
                    if c > hi_c[i]:
                        hi_c[i] = c
                    if abs(c) > reach:
                        reach = abs(c)
                for j in range(inc.shape[1]):
                    e = inc[v, j]
                    if e < 0:
                        break
                    if (cfg >> e) & 1:
                        w = ends[e, 0] if ends[e, 1] == v else ends[e, 1]
                        if comp[w] < 0:
                            comp[w] = s
                            queue[tail] = w
                            tail += 1
            dm = 0
            for i in range(d):
                if hi_c[i] - lo_c[i] > dm:
                    dm = hi_c[i] - lo_c[i]
            if dm > best:
                best = dm
            if dm > thr:
                scount += tail
            if comp[origin] == s:
                origin_diam = dm
                origin_reach = reach
        if obs == 0:
            val = best
        elif obs == 1:
            val = 1 if origin_reach >= n else 0
        elif obs == 2:
            val = origin_diam
        else:
            val = scount
        table[k, val] += 1
    return table


def count_table(box: BoxSpec, observable: str, rho: Optional[float] = None,
                chunks: int = 1) -> np.ndarray:
    """Integer tally table[k, value] over all 2**E configurations.

    The index range is split into `chunks` parts whose tables add up; the
    result does not depend on the split.
    """
    if observable not in _OBS_CODE:
        raise ValueError(f"unknown observable {observable!r}; choose from {OBSERVABLES}")
    E = box.num_edges
    if E > EDGE_BUDGET:
        raise EdgeBudgetExceeded(E, EDGE_BUDGET)
    thr = math.inf
    if observable == S_COUNT:
        if rho is None:
            raise ValueError("S_COUNT needs rho")
        thr = rho * math.log(box.n) if box.n > 0 else 0.0
    ends, inc, coords = _geometry(box)
    nvals = box.num_vertices + 1 if observable == S_COUNT else 2 * box.n + 2
    origin = vertex_index(box, (0,) * box.d)
    total = 1 << E
    bounds = np.linspace(0, total, max(1, chunks) + 1).astype(np.int64)
    table = np.zeros((E + 1, nvals), dtype=np.int64)
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        table += _tally(int(lo), int(hi), E, ends, inc, coords, box.n, origin,
                        _OBS_CODE[observable], float(thr), nvals)
    return table


def enumerate(box: BoxSpec, p, observable: str, rho: Optional[float] = None) -> ExactDistribution:
    """Exact law of `observable` under the zero-boundary measure on `box`."""
    q = as_rational(p)
    table = count_table(box, observable, rho)
    E = box.num_edges
    weights = [q ** k * (1 - q) ** (E - k) for k in range(E + 1)]
    support = []
    for val in range(table.shape[1]):
        col = table[:, val]
        if not col.any():
            continue
        prob = sum((int(c) * w for c, w in zip(col, weights) if c), Fraction(0))
        if prob:
            support.append((val, prob))
    return ExactDistribution(observable, box.d, box.n, q, support, rho)


def exact_one_arm(box: BoxSpec, p) -> Fraction:
    return enumerate(box, p, ONE_ARM).prob(1)
