"""Seeded Bernoulli bond configurations on Z^d.

Each bond gets a uniform in [0, 1) from a counter-style hash of
(seed, base coordinates, axis), so its state does not depend on which box
is being scanned, and a bond open at p stays open at every p' >= p.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba as nb
import numpy as np

from .lattice import BoxSpec, EdgeId, is_interior

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_COORD_OFFSET = np.int64(1 << 31)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53

_MASK64 = (1 << 64) - 1


@nb.njit(cache=True, inline="always")
def splitmix(z):
    z = z + _GOLDEN
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@nb.njit(cache=True, inline="always")
def fold(h, value):
    # coordinates are offset so the cast to uint64 never sees a negative
    return splitmix(h ^ np.uint64(value + _COORD_OFFSET))


@nb.njit(cache=True, inline="always")
def to_unit(h):
    return np.float64(h >> _S11) * _INV53


@nb.njit(cache=True)
def _edge_uniform(seed, base, axis):
    h = splitmix(seed)
    for c in base:
        h = fold(h, np.int64(c))
    return to_unit(fold(h, np.int64(axis)))


@nb.njit(cache=True)
def _edge_uniforms(seed, bases, axes):
    out = np.empty(bases.shape[0])
    for k in range(bases.shape[0]):
        out[k] = _edge_uniform(seed, bases[k], axes[k])
    return out


@nb.njit(cache=True)
def _mix3(seed, a, b):
    return fold(fold(splitmix(seed), np.int64(a)), np.int64(b))


def as_seed(seed: int) -> np.uint64:
    return np.uint64(int(seed) & _MASK64)


def trial_seed(seed: int, n: int, trial: int) -> int:
    """Per-trial seed derived from the run seed, the box radius and the trial index."""
    return int(_mix3(as_seed(seed), np.int64(n), np.int64(trial)))


@dataclass(frozen=True)
class EdgeSampler:
    seed: int
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")

    @property
    def key(self) -> np.uint64:
        return as_seed(self.seed)

    def uniform(self, e: EdgeId) -> float:
        return float(_edge_uniform(self.key, np.asarray(e.base, dtype=np.int64), e.axis))

    def state(self, e: EdgeId) -> bool:
        return self.uniform(e) < self.p

    def uniforms(self, bases, axes) -> np.ndarray:
        """Vectorised `uniform` over a (k, d) array of bases and k axes."""
        bases = np.ascontiguousarray(bases, dtype=np.int64)
        axes = np.ascontiguousarray(axes, dtype=np.int64)
        return _edge_uniforms(self.key, bases, axes)


@dataclass(frozen=True)
class RestrictedConfig:
    """The configuration with every bond not contained in `box` forced closed."""

    sampler: EdgeSampler
    box: BoxSpec

    def state(self, e: EdgeId) -> bool:
        return is_interior(self.box, e) and self.sampler.state(e)


def edge_uniform(s: EdgeSampler, e: EdgeId) -> float:
    return s.uniform(e)


def edge_state(s: EdgeSampler, e: EdgeId) -> bool:
    """True when the bond is open."""
    return s.state(e)


def restricted_state(c: RestrictedConfig, e: EdgeId) -> bool:
    return c.state(e)
