"""Summary statistics, binomial intervals and the decay-rate fits.

Two regressions share the same weighted least-squares core:

* `fit_decay`: -log P(n) = xi * n - c  [- alpha * log n], giving the
  exponential decay rate xi of the finite-cluster diameter tail;
* `ldp_exponent_fit`: -log P(n) = varsigma * log n - c, the power-law
  exponent of P(R_n > rho log n).

Weights are inverse delta-method variances of log p_hat,
trials * p_hat / (1 - p_hat).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import EstimationError

# Only exactly known thresholds; other dimensions need a declared regime.
P_C = {2: 0.5}

SUBCRITICAL = "subcritical"
SUPERCRITICAL = "supercritical"

CENSOR_LIMIT = 0.01


class RegimeWarning(UserWarning):
    pass


def regime_for(p: float, d: int, declared: Optional[str] = None) -> str:
    """Subcritical/supercritical label for (p, d); refuses p = p_c."""
    if d in P_C:
        pc = P_C[d]
        if p == pc:
            raise ValueError(f"p = {p} is the critical point p_c({d}); estimators need p != p_c")
        regime = SUBCRITICAL if p < pc else SUPERCRITICAL
        if declared is not None and declared != regime:
            raise ValueError(f"declared regime {declared!r} contradicts p_c({d}) = {pc}")
        return regime
    if declared not in (SUBCRITICAL, SUPERCRITICAL):
        raise ValueError(f"p_c({d}) is not known; declare the regime "
                         f"({SUBCRITICAL!r} or {SUPERCRITICAL!r})")
    return declared


@dataclass
class StreamStats:
    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @classmethod
    def from_values(cls, values) -> "StreamStats":
        x = np.asarray(values, dtype=np.float64)
        if x.size == 0:
            return cls()
        mu = float(x.mean())
        return cls(int(x.size), mu, float(((x - mu) ** 2).sum()))

    def push(self, x: float) -> None:
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (x - self.mean)

    def merge(self, other: "StreamStats") -> "StreamStats":
        if other.count == 0:
            return StreamStats(self.count, self.mean, self.m2)
        if self.count == 0:
            return StreamStats(other.count, other.mean, other.m2)
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return StreamStats(n, mean, m2)

    __add__ = merge

    @property
    def variance(self) -> float:
        """Sample variance (n - 1 denominator); nan below two observations."""
        return self.m2 / (self.count - 1) if self.count > 1 else math.nan

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    def to_dict(self) -> dict:
        return {"count": self.count, "mean": self.mean, "m2": self.m2}


def merge(a: StreamStats, b: StreamStats) -> StreamStats:
    return a.merge(b)


def tree_reduce(items: Sequence, combine=merge):
    """Pairwise reduction in index order, so float results depend only on the order of items."""
    items = list(items)
    if not items:
        raise ValueError("nothing to reduce")
    while len(items) > 1:
        nxt = [combine(items[i], items[i + 1]) for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return items[0]


def wilson_ci(successes: int, trials: int, z: float = 1.96) -> tuple:
    if trials < 1:
        raise ValueError("Wilson interval needs at least one trial")
    if not 0 <= successes <= trials:
        raise ValueError(f"successes must lie in [0, {trials}], got {successes}")
    ph = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (ph + z2 / (2 * trials)) / denom
    half = z / denom * math.sqrt(ph * (1 - ph) / trials + z2 / (4 * trials * trials))
    low = 0.0 if successes == 0 else max(0.0, min(ph, center - half))
    high = 1.0 if successes == trials else min(1.0, max(ph, center + half))
    return low, high


@dataclass
class BinomialEstimate:
    successes: int
    trials: int
    censored: int = 0
    point: float = math.nan
    ci_low: float = math.nan
    ci_high: float = math.nan
    z: float = 1.96

    @classmethod
    def from_counts(cls, successes: int, trials: int, censored: int = 0,
                    z: float = 1.96) -> "BinomialEstimate":
        """Censored trials stay in the denominator and never count as successes."""
        lo, hi = wilson_ci(successes, trials, z)
        return cls(int(successes), int(trials), int(censored), successes / trials, lo, hi, z)

    @classmethod
    def exact(cls, point: float, trials: int = 10 ** 12) -> "BinomialEstimate":
        """Synthetic estimate carrying an exact point value, for noiseless fits."""
        s = int(round(point * trials))
        lo, hi = wilson_ci(s, trials)
        return cls(s, trials, 0, float(point), min(lo, point), max(hi, point))

    def merge(self, other: "BinomialEstimate") -> "BinomialEstimate":
        return BinomialEstimate.from_counts(self.successes + other.successes,
                                            self.trials + other.trials,
                                            self.censored + other.censored, self.z)

    @property
    def censor_rate(self) -> float:
        return self.censored / self.trials if self.trials else 0.0

    @property
    def unreliable(self) -> bool:
        return self.censor_rate > CENSOR_LIMIT

    def to_dict(self) -> dict:
        return {"successes": self.successes, "trials": self.trials, "censored": self.censored,
                "estimate": self.point, "ci_low": self.ci_low, "ci_high": self.ci_high,
                "z": self.z}


@dataclass
class XiEstimate:
    xi_hat: float
    stderr: float
    regime: Optional[str]
    poly_corrected: bool
    n_min: int
    n_max: int
    intercept: float = 0.0
    log_coef: Optional[float] = None
    dropped: list = field(default_factory=list)
    flagged: bool = False

    def to_dict(self) -> dict:
        return dict(self.__dict__)


class Derived(NamedTuple):
    value: float
    stderr: float


class RegressionFit(NamedTuple):
    slope: float
    intercept: float
    stderr: float
    n_used: tuple
    dropped: tuple


def _usable(points, min_successes):
    keep, dropped = [], []
    for n, est in points:
        ok = est.successes >= min_successes and 0.0 < est.point < 1.0
        (keep if ok else dropped).append((n, est))
    ns = [n for n, _ in points]
    if len(set(ns)) != len(ns):
        raise ValueError("n values must be distinct")
    return sorted(keep, key=lambda t: t[0]), sorted(n for n, _ in dropped)


def _wls(X: np.ndarray, y: np.ndarray, w: np.ndarray):
    sw = np.sqrt(w)
    beta, *_ = np.linalg.lstsq(X * sw[:, None], y * sw, rcond=None)
    # weights are inverse variances, so the covariance is not rescaled by the residuals
    cov = np.linalg.pinv(X.T @ (X * w[:, None]))
    return beta, cov


def _design(points):
    n = np.array([float(k) for k, _ in points])
    ph = np.array([e.point for _, e in points])
    tr = np.array([float(e.trials) for _, e in points])
    return n, -np.log(ph), tr * ph / (1.0 - ph)


def select_window(points: Iterable, n_floor: int = 5, min_successes: int = 10) -> list:
    """Default fit window: from the smallest n >= n_floor with p_hat < 0.5 to the
    largest n with at least `min_successes` successes."""
    pts = sorted(points, key=lambda t: t[0])
    lows = [n for n, e in pts if n >= n_floor and e.point < 0.5]
    highs = [n for n, e in pts if e.successes >= min_successes]
    if not lows or not highs:
        return []
    return [(n, e) for n, e in pts if min(lows) <= n <= max(highs)]


def fit_decay(points: Sequence, poly_corrected: bool = False, regime: Optional[str] = None,
              min_successes: int = 10) -> XiEstimate:
    """Fit the exponential decay rate of P(n) over (n, BinomialEstimate) points.

    With `poly_corrected` the model carries a free log n term, absorbing a
    polynomial prefactor n**alpha.  A slope within two standard errors of zero
    (or below it) is flagged with a warning, not raised.
    """
    keep, dropped = _usable(points, min_successes)
    if len(keep) < 3:
        raise EstimationError(f"need >= 3 points with >= {min_successes} successes, "
                              f"have {len(keep)}")
    n, y, w = _design(keep)
    cols = [n, -np.ones_like(n)]
    if poly_corrected:
        cols.append(-np.log(n))
    beta, cov = _wls(np.column_stack(cols), y, w)
    xi = float(beta[0])
    se = float(math.sqrt(max(cov[0, 0], 0.0)))
    est = XiEstimate(xi, se, regime, poly_corrected, int(n[0]), int(n[-1]), float(beta[1]),
                     float(beta[2]) if poly_corrected else None, dropped, xi <= 2 * se)
    if est.flagged:
        warnings.warn(f"fitted decay rate {xi:.3g} +/- {se:.2g} is not significantly positive",
                      RegimeWarning, stacklevel=2)
    return est


def _xi_value(xi) -> tuple:
    if isinstance(xi, XiEstimate):
        return xi.xi_hat, xi.stderr
    return float(xi), 0.0


def kappa(xi, d: int) -> Derived:
    """d / xi with a delta-method standard error."""
    x, se = _xi_value(xi)
    if not x > 0:
        raise EstimationError(f"kappa needs a positive decay rate, got {x}")
    return Derived(d / x, d * se / (x * x))


def varsigma(xi, rho: float, d: int) -> float:
    """Large-deviation exponent xi * rho - d; warns outside rho > d / xi."""
    x, _ = _xi_value(xi)
    if x <= 0 or rho <= d / x:
        warnings.warn(f"rho = {rho} is not above kappa = d / xi; the exponent formula "
                      f"only holds for rho > kappa", RegimeWarning, stacklevel=2)
    return x * rho - d


def ldp_exponent_fit(points: Sequence, min_successes: int = 5) -> RegressionFit:
    """Slope of -log p_hat against log n over (n, BinomialEstimate) points."""
    keep, dropped = _usable(points, min_successes)
    if len(keep) < 3:
        raise EstimationError(f"need >= 3 points with >= {min_successes} successes, "
                              f"have {len(keep)}")
    n, y, w = _design(keep)
    beta, cov = _wls(np.column_stack([np.log(n), -np.ones_like(n)]), y, w)
    return RegressionFit(float(beta[0]), float(beta[1]), float(math.sqrt(max(cov[0, 0], 0.0))),
                         tuple(int(k) for k in n), tuple(dropped))
