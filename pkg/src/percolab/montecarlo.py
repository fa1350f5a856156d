"""Experiment driver: trial scheduling, simulation margins and run manifests.

Trials are cut into fixed blocks of `BLOCK` consecutive indices.  Each block
is evaluated by a compiled kernel that returns one integer record per trial;
blocks are concatenated in index order and every statistic is reduced from
that array, so results do not depend on how many workers ran the blocks.
"""
from __future__ import annotations

import json
import math
import os
import time
from importlib import resources
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

import numba as nb
import numpy as np

from . import __version__
from . import _kernels as K
from .cluster import alloc_forest, forest_bytes
from .errors import MemoryBudgetExceeded
from .estimate import (P_C, SUBCRITICAL, BinomialEstimate, StreamStats, regime_for,
                       tree_reduce)
from .lattice import BoxSpec
from .percolation import _mix3, as_seed

ONE_ARM = "ONE_ARM"
DIAM_TAIL = "DIAM_TAIL"
RN_SCAN = "RN_SCAN"
RN_COMPARE = "RN_COMPARE"
SN = "SN"
KINDS = (ONE_ARM, DIAM_TAIL, RN_SCAN, RN_COMPARE, SN)

SCHEMA_VERSION = "1"
BLOCK = 64
PILOT_TRIALS = 100
PILOT_N = 64
PILOT_MARGIN = 16
MARGIN_FLOOR = 16
MARGIN_FACTOR = 3.0
DEFAULT_MEMORY_BUDGET = 8 * 2 ** 30
Z_REPORT = 1.96


def margin_for(n: int, d: int, xi_guess: float) -> int:
    """Width of the padding around B_n that makes B_N's boundary a finiteness test."""
    if not xi_guess > 0:
        raise ValueError(f"xi_guess must be positive, got {xi_guess}")
    return max(math.ceil(MARGIN_FACTOR * (d / xi_guess) * math.log(max(n, 2))), MARGIN_FLOOR)


@dataclass
class ExperimentSpec:
    kind: str
    d: int
    p: float
    seed: int
    n: list
    trials: int
    rho: Optional[float] = None
    boundary: str = "fb"
    finite_only: Optional[bool] = None
    margin: Optional[int] = None
    xi_guess: Optional[float] = None
    regime: Optional[str] = None
    memory_budget: int = DEFAULT_MEMORY_BUDGET

    def __post_init__(self):
        self.n = [int(k) for k in (self.n if isinstance(self.n, (list, tuple)) else [self.n])]
        if self.finite_only is None:
            self.finite_only = self.kind != ONE_ARM

    @property
    def needs_finiteness(self) -> bool:
        if self.kind in (DIAM_TAIL, RN_COMPARE, SN):
            return True
        return bool(self.finite_only)

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; choose from {KINDS}")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.n:
            raise ValueError("at least one n is required")
        lo = 2 if self.kind == SN else 1
        if min(self.n) < lo:
            raise ValueError(f"{self.kind} needs every n >= {lo}")
        if len(set(self.n)) != len(self.n):
            raise ValueError("n values must be distinct")
        if self.boundary not in ("fb", "zb"):
            raise ValueError(f"boundary must be 'fb' or 'zb', got {self.boundary!r}")
        if self.kind == SN and self.rho is None:
            raise ValueError("SN needs rho")
        if self.rho is not None and not self.rho > 0:
            raise ValueError("rho must be positive")
        if self.margin is not None and self.margin < 0:
            raise ValueError("margin must be >= 0")
        if self.xi_guess is not None and not self.xi_guess > 0:
            raise ValueError("xi_guess must be positive")
        if self.needs_finiteness:
            # also refuses p = p_c(d)
            regime_for(self.p, self.d, self.regime)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RunManifest:
    spec: dict
    results: list
    xi_guess: Optional[float]
    pilot: Optional[dict]
    wall_time: float = 0.0
    version: str = __version__
    schema_version: str = SCHEMA_VERSION
    workers: int = 1

    @property
    def seed(self) -> int:
        return self.spec["seed"]

    def payload(self) -> dict:
        """Everything that must reproduce exactly across runs and worker counts."""
        return {"spec": self.spec, "xi_guess": self.xi_guess, "pilot": self.pilot,
                "results": self.results}

    def payload_json(self) -> str:
        return json.dumps(self.payload(), sort_keys=True)

    def to_dict(self) -> dict:
        out = self.payload()
        out.update(schema_version=self.schema_version, version=self.version,
                   seed=self.seed, wall_time=self.wall_time, workers=self.workers)
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)

    def table(self) -> list:
        """Rows (n, estimate, ci_low, ci_high, censored, trials)."""
        return [(r["n"], *r["summary"]) for r in self.results]

    def to_csv(self) -> str:
        lines = ["n,estimate,ci_low,ci_high,censored,trials"]
        for row in self.table():
            lines.append(",".join(repr(x) for x in row))
        return "\n".join(lines) + "\n"

    def result(self, n: int) -> dict:
        for r in self.results:
            if r["n"] == n:
                return r
        raise KeyError(n)


def manifest_schema() -> dict:
    """JSON Schema (draft 2020-12) that every manifest written by `run` satisfies."""
    text = resources.files("percolab").joinpath("schemas/run_manifest.schema.json").read_text()
    return json.loads(text)


# ---------------------------------------------------------------- kernels

@nb.njit(cache=True)
def _origin_block(run_seed, nkey, t0, t1, p, N, d):
    V = (2 * N + 1) ** d
    mark = np.zeros(V, dtype=np.int64)
    stack = np.empty(V, dtype=np.int64)
    cmin = np.empty(d, dtype=np.int64)
    cmax = np.empty(d, dtype=np.int64)
    out = np.empty((t1 - t0, 3), dtype=np.int64)
    for t in range(t0, t1):
        seed = _mix3(run_seed, nkey, t)
        size, touches = K.explore_origin(seed, p, N, d, t - t0 + 1, mark, stack, cmin, cmax)
        dm = 0
        reach = 0
        for i in range(d):
            if cmax[i] - cmin[i] > dm:
                dm = cmax[i] - cmin[i]
            if cmax[i] > reach:
                reach = cmax[i]
            if -cmin[i] > reach:
                reach = -cmin[i]
        out[t - t0, 0] = dm
        out[t - t0, 1] = reach
        out[t - t0, 2] = 1 if touches else 0
    return out


_FB, _WORLD, _PAIR = 0, 1, 2


@nb.njit(cache=True)
def _forest_block(run_seed, nkey, t0, t1, p, N, n, d, thr, mode, fo, fi, no_mask):
    """Per trial: (R_fb or R_world, R_zb, S count, #touching clusters meeting B_n)."""
    out = np.zeros((t1 - t0, 4), dtype=np.int64)
    for t in range(t0, t1):
        seed = _mix3(run_seed, nkey, t)
        if mode == _WORLD:
            K.init_forest(fi[0], fi[1], fi[2], fi[3], fi[4], n, d)
            K.union_edges(fi[0], fi[1], fi[2], fi[3], fi[4], seed, p, n, d, -1, no_mask, False)
            best, cnt, ntouch = K.inner_scan(fi[0], fi[2], fi[3], fi[4], n, n, d, thr, False)
            out[t - t0, 0] = best
            out[t - t0, 1] = best
            out[t - t0, 2] = cnt
            continue
        K.init_forest(fo[0], fo[1], fo[2], fo[3], fo[4], N, d)
        K.union_edges(fo[0], fo[1], fo[2], fo[3], fo[4], seed, p, N, d, -1, no_mask, False)
        best, cnt, ntouch = K.inner_scan(fo[0], fo[2], fo[3], fo[4], N, n, d, thr, True)
        out[t - t0, 0] = best
        out[t - t0, 2] = cnt
        out[t - t0, 3] = ntouch
        if mode == _PAIR:
            K.init_forest(fi[0], fi[1], fi[2], fi[3], fi[4], n, d)
            K.union_edges(fi[0], fi[1], fi[2], fi[3], fi[4], seed, p, n, d, -1, no_mask, False)
            out[t - t0, 1] = K.zb_scan(fo[0], fo[4], N, fi[0], fi[2], fi[3], n, d)
    return out


_NO_MASK = np.zeros((1, 1), dtype=np.bool_)


def _run_block(job):
    kind, run_seed, nkey, t0, t1, p, N, n, d, thr, mode = job
    seed = as_seed(run_seed)
    if kind == "origin":
        return _origin_block(seed, nkey, t0, t1, p, N, d)
    if mode == _WORLD:
        fo = alloc_forest(BoxSpec(d, 0))
    else:
        fo = alloc_forest(BoxSpec(d, N))
    fi = alloc_forest(BoxSpec(d, n)) if mode != _FB else alloc_forest(BoxSpec(d, 0))
    return _forest_block(seed, nkey, t0, t1, p, N, n, d, thr, mode, fo, fi, _NO_MASK)


# ---------------------------------------------------------------- driver

def _plan(spec: ExperimentSpec, n: int, xi_guess):
    """(outer radius, block kind, forest mode, threshold) for one n."""
    if spec.kind in (ONE_ARM, DIAM_TAIL):
        N = n + _margin(spec, n, xi_guess) if spec.needs_finiteness else n
        return N, "origin", None, 0.0
    thr = spec.rho * math.log(n) if spec.rho is not None else math.inf
    if spec.kind == RN_SCAN and not spec.finite_only:
        if spec.boundary != "zb":
            raise ValueError("RN_SCAN without the finiteness filter is only defined for boundary=zb")
        return n, "forest", _WORLD, thr
    N = n + _margin(spec, n, xi_guess)
    mode = _PAIR if spec.kind == RN_COMPARE or spec.boundary == "zb" else _FB
    return N, "forest", mode, thr


def _margin(spec, n, xi_guess):
    if spec.margin is not None:
        return spec.margin
    return margin_for(n, spec.d, xi_guess)


def bytes_per_worker(spec: ExperimentSpec, n: int, N: int, block_kind: str, mode) -> int:
    if block_kind == "origin":
        return 16 * BoxSpec(spec.d, N).num_vertices
    total = 0 if mode == _WORLD else forest_bytes(BoxSpec(spec.d, N))
    if mode != _FB:
        total += forest_bytes(BoxSpec(spec.d, n))
    return total


def pilot_xi(d: int, p: float, seed: int, trials: int = PILOT_TRIALS) -> tuple:
    """Rough decay rate from max finite diameters in B_64 padded by 16.

    Uses xi ~ d log n / mean(R_n); finite-size bias makes this an
    underestimate, which only widens the margin.
    """
    job = ("forest", seed, -1, 0, trials, p, PILOT_N + PILOT_MARGIN, PILOT_N, d, math.inf, _FB)
    rows = _run_block(job)
    mean_r = float(rows[:, 0].mean())
    xi = math.inf if mean_r == 0 else d * math.log(PILOT_N) / mean_r
    return xi, {"n": PILOT_N, "margin": PILOT_MARGIN, "trials": trials, "mean_r": mean_r}


def default_workers() -> int:
    env = os.environ.get("PERCOLAB_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _execute(jobs, workers):
    if workers <= 1 or len(jobs) <= 1:
        return [_run_block(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(_run_block, jobs))


def _binomial_summary(b: BinomialEstimate):
    return [b.point, b.ci_low, b.ci_high, b.censored, b.trials]


def _mean_summary(s: StreamStats, censored: int):
    half = Z_REPORT * s.std / math.sqrt(s.count) if s.count > 1 else 0.0
    return [s.mean, s.mean - half, s.mean + half, censored, s.count]


def _block_stats(values: np.ndarray) -> StreamStats:
    blocks = [StreamStats.from_values(values[i:i + BLOCK]) for i in range(0, len(values), BLOCK)]
    return tree_reduce(blocks)


def _histogram(values: np.ndarray) -> list:
    vals, counts = np.unique(values, return_counts=True)
    return [[int(v), int(c)] for v, c in zip(vals, counts)]


def _summarise(spec: ExperimentSpec, n: int, N: int, rows: np.ndarray, allowed_touch: int) -> dict:
    res = {"n": n, "N": N, "margin": N - n, "trials": spec.trials}
    if spec.kind in (ONE_ARM, DIAM_TAIL):
        diam, reach, touch = rows[:, 0], rows[:, 1], rows[:, 2].astype(bool)
        censored = int(touch.sum()) if spec.needs_finiteness else 0
        if spec.kind == ONE_ARM:
            hit = reach >= n
            if spec.finite_only:
                hit &= ~touch
        else:
            hit = (diam >= n) & ~touch
            res["threshold"] = n
        b = BinomialEstimate.from_counts(int(hit.sum()), spec.trials, censored)
        res["binomial"] = b.to_dict()
        res["summary"] = _binomial_summary(b)
    else:
        r_fb, r_zb, scount, ntouch = rows.T
        censored = int((ntouch > allowed_touch).sum())
        logn = math.log(n) if n > 1 else math.nan
        if spec.kind == RN_SCAN:
            r = r_zb if spec.boundary == "zb" else r_fb
            st = _block_stats(r)
            res["stats"] = st.to_dict()
            res["histogram"] = _histogram(r)
            res["r_over_log_n"] = st.mean / logn if n > 1 else None
            summary = _mean_summary(st, censored)
            if spec.rho is not None:
                b = BinomialEstimate.from_counts(int((r > spec.rho * logn).sum()), spec.trials,
                                                 censored)
                res["exceed"] = b.to_dict()
                summary = _binomial_summary(b)
            res["summary"] = summary
        elif spec.kind == RN_COMPARE:
            b = BinomialEstimate.from_counts(int((r_fb != r_zb).sum()), spec.trials, censored)
            res["differ"] = b.to_dict()
            res["fb_stats"] = _block_stats(r_fb).to_dict()
            res["zb_stats"] = _block_stats(r_zb).to_dict()
            res["violations"] = int((r_zb > r_fb).sum())
            res["summary"] = _binomial_summary(b)
        else:
            st = _block_stats(scount)
            res["stats"] = st.to_dict()
            res["threshold"] = spec.rho * logn
            res["relative_std"] = st.std / st.mean if st.count > 1 and st.mean > 0 else None
            res["log_mean_over_log_n"] = math.log(st.mean) / logn if st.mean > 0 else None
            res["summary"] = _mean_summary(st, censored)
    res["censored"] = censored
    res["censor_rate"] = censored / spec.trials
    res["unreliable"] = censored / spec.trials > 0.01
    return res


def run(spec: ExperimentSpec, workers: Optional[int] = None) -> RunManifest:
    """Run every n of `spec` and return the manifest."""
    spec.validate()
    workers = default_workers() if workers is None else max(1, int(workers))
    t_start = time.perf_counter()

    xi_guess, pilot = spec.xi_guess, None
    uses_margin = spec.needs_finiteness and spec.margin is None
    if uses_margin and xi_guess is None:
        xi_guess, pilot = pilot_xi(spec.d, spec.p, spec.seed)

    plans = {}
    for n in spec.n:
        N, block_kind, mode, thr = _plan(spec, n, xi_guess)
        need = bytes_per_worker(spec, n, N, block_kind, mode) * min(workers, max(1, math.ceil(spec.trials / BLOCK)))
        if need > spec.memory_budget:
            raise MemoryBudgetExceeded(
                need, spec.memory_budget,
                f"n={n} with outer radius {N}: lower n, the margin, or the worker count")
        plans[n] = (N, block_kind, mode, thr)

    allowed_touch = 0
    if spec.needs_finiteness:
        allowed_touch = 0 if regime_for(spec.p, spec.d, spec.regime) == SUBCRITICAL else 1

    results = []
    for n in spec.n:
        N, block_kind, mode, thr = plans[n]
        jobs = [(block_kind, spec.seed, n, t0, min(t0 + BLOCK, spec.trials), float(spec.p),
                 N, n, spec.d, float(thr), mode)
                for t0 in range(0, spec.trials, BLOCK)]
        rows = np.concatenate(_execute(jobs, workers))
        results.append(_summarise(spec, n, N, rows, allowed_touch))

    return RunManifest(spec.to_dict(), results,
                       None if xi_guess is None or math.isinf(xi_guess) else xi_guess, pilot,
                       time.perf_counter() - t_start, workers=workers)


def trial_rows(spec: ExperimentSpec, n: int, xi_guess: Optional[float] = None) -> np.ndarray:
    """Raw per-trial records for one n (diagnostics and tests)."""
    spec.validate()
    if spec.needs_finiteness and spec.margin is None and xi_guess is None:
        xi_guess = spec.xi_guess or pilot_xi(spec.d, spec.p, spec.seed)[0]
    N, block_kind, mode, thr = _plan(spec, n, xi_guess)
    jobs = [(block_kind, spec.seed, n, t0, min(t0 + BLOCK, spec.trials), float(spec.p),
             N, n, spec.d, float(thr), mode) for t0 in range(0, spec.trials, BLOCK)]
    return np.concatenate(_execute(jobs, 1))


__all__ = ["ExperimentSpec", "RunManifest", "run", "trial_rows", "margin_for", "pilot_xi",
           "manifest_schema", "KINDS", "P_C"]
