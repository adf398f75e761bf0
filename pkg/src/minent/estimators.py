"""Min-entropy estimators: solve each test's near-uniform key equation, or
use the closed form available for the collision statistic."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import log2, sqrt

import numpy as np

from .blocks import distance_stream
from .stats import (
    TestStatistic,
    confidence_lower_bound,
    corrective_factor,
    coron_test,
    kim_test,
    maurer_test,
)

__all__ = [
    "BisectionConfig",
    "MinEntropyEstimate",
    "bisect_monotone",
    "log2_distance_expectation",
    "near_uniform_shannon",
    "near_uniform_power_sum",
    "collision_theta",
    "collision_statistic",
    "compression_estimate",
    "coron_estimate",
    "kim_estimate",
    "collision_estimate",
    "estimate_sequence",
    "default_initialisation",
]


@dataclass(frozen=True)
class BisectionConfig:
    max_iterations: int = 60
    theta_tolerance: float = 1e-10


DEFAULT_BISECTION = BisectionConfig()


@dataclass(frozen=True)
class MinEntropyEstimate:
    """Solved most-likely-symbol bound and the min-entropy it implies."""

    estimator: str  # "compression" | "coron" | "kim" | "collision"
    theta: float
    per_block: float
    per_bit: float
    solved: bool
    ci_applied: bool
    alpha: float | None = None


def bisect_monotone(func, target: float, lo: float, hi: float, *, increasing: bool,
                    cfg: BisectionConfig = DEFAULT_BISECTION) -> float | None:
    """Solve func(x) = target on [lo, hi] for a strictly monotone func.

    Returns None when target lies outside the endpoint values; callers turn
    that into their no-solution fallback.
    """
    sign = 1.0 if increasing else -1.0
    f_lo = sign * func(lo)
    f_hi = sign * func(hi)
    t = sign * target
    if t < f_lo or t > f_hi:
        return None
    if t == f_lo:
        return lo
    if t == f_hi:
        return hi
    for _ in range(cfg.max_iterations):
        mid = 0.5 * (lo + hi)
        if sign * func(mid) < t:
            lo = mid
        else:
            hi = mid
        if hi - lo <= cfg.theta_tolerance:
            break
    return 0.5 * (lo + hi)


@lru_cache(maxsize=4)
def _log2_indices(n: int) -> np.ndarray:
    arr = np.log2(np.arange(1, n + 1, dtype=np.float64))
    arr.setflags(write=False)
    return arr


def log2_distance_expectation(z: float, q: int, k: int) -> float:
    """Share of the expected mean log2 distance carried by one symbol.

    For an IID source over a window of q initialisation and k test blocks, a
    symbol of probability z contributes this amount to the expected test
    value; summing over all symbols gives the exact expectation.  Uses the
    O(q + k) prefix rearrangement of the defining double sum.
    """
    if not 0.0 < z <= 1.0:
        raise ValueError(f"symbol probability must lie in (0, 1], got {z}")
    if q < 1 or k < 1:
        raise ValueError("window counts must be positive")
    if z == 1.0:
        return 0.0
    n = q + k
    log2_i = _log2_indices(n)
    powers = np.arange(n, dtype=np.float64)
    weights = np.exp(powers * np.log1p(-z))  # (1-z)^(i-1) for i = 1..n
    weighted = weights * log2_i
    prefix = np.cumsum(weighted)
    interior = float(prefix[q - 1 : q + k - 1].sum())
    boundary = float(weighted[q : q + k].sum())
    return (z * z * interior + z * boundary) / k


def near_uniform_shannon(theta: float, b: int) -> float:
    """Shannon entropy of a near-uniform distribution with top mass theta.

    Strictly decreasing from log2(b) at theta = 1/b down to 0 at theta = 1;
    it is the sharp (Fano) upper bound on the Shannon entropy of any b-ary
    distribution whose largest mass is theta.
    """
    if not 1.0 / b <= theta <= 1.0:
        raise ValueError(f"theta must lie in [1/{b}, 1], got {theta}")
    h = 0.0
    if 0.0 < theta < 1.0:
        h = -theta * log2(theta) - (1.0 - theta) * log2(1.0 - theta)
    return h + (1.0 - theta) * log2(b - 1)


def near_uniform_power_sum(theta: float, alpha: float, b: int) -> float:
    """Order-alpha power sum of a near-uniform distribution with top mass
    theta; strictly increasing from b^(1-alpha) at theta = 1/b up to 1."""
    if alpha <= 1:
        raise ValueError(f"order must be > 1, got {alpha}")
    if not 1.0 / b <= theta <= 1.0:
        raise ValueError(f"theta must lie in [1/{b}, 1], got {theta}")
    return theta**alpha + (1.0 - theta) ** alpha / (b - 1) ** (alpha - 1)


def collision_theta(f: float, b: int) -> float:
    """Closed-form top-mass bound from a collision frequency f."""
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"collision frequency must lie in [0, 1], got {f}")
    if f <= 1.0 / b:
        return 1.0 / b
    return (1.0 + sqrt((b - 1) * (b * f - 1.0))) / b


def _finish(estimator: str, l: int, theta: float | None, solved: bool,
            ci_applied: bool, alpha: float | None = None) -> MinEntropyEstimate:
    b = 1 << l
    if theta is None:
        return MinEntropyEstimate(estimator, 1.0 / b, float(l), 1.0, False, ci_applied, alpha)
    theta = min(max(theta, 1.0 / b), 1.0)
    per_block = -log2(theta)
    per_bit = min(max(per_block / l, 0.0), 1.0)
    return MinEntropyEstimate(estimator, theta, per_block, per_bit, solved, ci_applied, alpha)


def _solve_decreasing(curve, target: float, b: int, cfg: BisectionConfig) -> float | None:
    if target >= curve(1.0 / b):
        return None  # beyond the uniform end: no solution, full-entropy fallback
    if target <= curve(1.0):
        return 1.0  # at or below the degenerate end: clamp to zero entropy
    return bisect_monotone(curve, target, 1.0 / b, 1.0, increasing=False, cfg=cfg)


def _solve_increasing(curve, target: float, b: int, cfg: BisectionConfig) -> float | None:
    if target < curve(1.0 / b):
        return None
    if target >= curve(1.0):
        return 1.0
    return bisect_monotone(curve, target, 1.0 / b, 1.0, increasing=True, cfg=cfg)


def compression_estimate(stat: TestStatistic, l: int, *, apply_ci: bool = True,
                         c: float | None = None,
                         cfg: BisectionConfig = DEFAULT_BISECTION) -> MinEntropyEstimate:
    """Invert the mean-log2-distance statistic through its near-uniform
    expectation curve (the standard compression estimator)."""
    if stat.kind != "maurer":
        raise ValueError(f"expected a maurer statistic, got {stat.kind!r}")
    b = 1 << l
    factor = corrective_factor("maurer", l=l, k=stat.k, override=c)
    x = confidence_lower_bound(stat, factor) if apply_ci else stat.mean
    q, k = stat.q, stat.k

    def curve(theta: float) -> float:
        value = log2_distance_expectation(theta, q, k)
        phi = (1.0 - theta) / (b - 1)
        if phi > 0.0:
            value += (b - 1) * log2_distance_expectation(phi, q, k)
        return value

    theta = _solve_decreasing(curve, x, b, cfg)
    return _finish("compression", l, theta, theta is not None, apply_ci)


def coron_estimate(stat: TestStatistic, l: int, *, apply_ci: bool = True,
                   c: float | None = None,
                   cfg: BisectionConfig = DEFAULT_BISECTION) -> MinEntropyEstimate:
    """Invert the Shannon-entropy statistic through the Fano bound."""
    if stat.kind != "coron":
        raise ValueError(f"expected a coron statistic, got {stat.kind!r}")
    b = 1 << l
    factor = corrective_factor("coron", l=l, k=stat.k, override=c)
    x = confidence_lower_bound(stat, factor) if apply_ci else stat.mean
    theta = _solve_decreasing(lambda t: near_uniform_shannon(t, b), x, b, cfg)
    return _finish("coron", l, theta, theta is not None, apply_ci)


def kim_estimate(stat: TestStatistic, l: int, *, apply_ci: bool = True,
                 c: float | None = None,
                 cfg: BisectionConfig = DEFAULT_BISECTION) -> MinEntropyEstimate:
    """Invert the order-alpha power-sum statistic through its near-uniform
    value; at alpha = 2 this agrees with the closed form collision_theta."""
    if stat.kind != "kim" or stat.alpha is None:
        raise ValueError("expected a kim statistic with an order attached")
    alpha = stat.alpha
    b = 1 << l
    factor = corrective_factor("kim", l=l, k=stat.k, alpha=alpha, override=c)
    x = confidence_lower_bound(stat, factor) if apply_ci else stat.mean
    theta = _solve_increasing(lambda t: near_uniform_power_sum(t, alpha, b), x, b, cfg)
    return _finish("kim", l, theta, theta is not None, apply_ci, alpha=alpha)


def collision_estimate(stat: TestStatistic, l: int, *, apply_ci: bool = True,
                       c: float | None = None) -> MinEntropyEstimate:
    """Closed-form estimate from the collision (order-2) statistic."""
    if stat.kind != "kim" or stat.alpha != 2.0:
        raise ValueError("expected an order-2 kim statistic")
    b = 1 << l
    factor = corrective_factor("kim", l=l, k=stat.k, alpha=2.0, override=c)
    x = confidence_lower_bound(stat, factor) if apply_ci else stat.mean
    theta = collision_theta(min(max(x, 0.0), 1.0), b)
    return _finish("collision", l, theta, True, apply_ci, alpha=2.0)


def collision_statistic(blocks) -> TestStatistic:
    """Adjacent-collision frequency over the k - 1 consecutive pairs.

    Initialisation-free single pass; equal to the order-2 kim test with one
    initialisation block.
    """
    arr = np.asarray(blocks)
    if arr.size < 2:
        raise ValueError("need at least two blocks to count collisions")
    k = arr.size - 1
    hits = int(np.count_nonzero(arr[1:] == arr[:-1]))
    f = hits / k
    variance = k * f * (1.0 - f) / (k - 1) if k > 1 else 0.0
    return TestStatistic(kind="kim", mean=f, per_term_variance=variance, k=k, q=1, alpha=2.0)


def default_initialisation(method: str, l: int) -> int:
    """Initialisation block counts: ten alphabets' worth (at least 1000) for
    the maurer and coron paths, a single block for the kim/collision path."""
    if method in ("compression", "coron"):
        return max(10 * (1 << l), 1000)
    return 1


def estimate_sequence(blocks, method: str, l: int = 6, *, alpha: float = 2.0,
                      q: int | None = None, apply_ci: bool = True,
                      c: float | None = None,
                      cfg: BisectionConfig = DEFAULT_BISECTION) -> MinEntropyEstimate:
    """End-to-end estimate from a block sequence: distance statistic, the
    99% lower confidence bound, and the key-equation solve."""
    arr = np.asarray(blocks, dtype=np.int64)
    b = 1 << l
    if arr.size and (int(arr.min()) < 0 or int(arr.max()) >= b):
        raise ValueError(f"block values must lie in [0, {b})")
    if method == "collision":
        return collision_estimate(collision_statistic(arr), l, apply_ci=apply_ci, c=c)
    if q is None:
        q = default_initialisation(method, l)
    stream = distance_stream(arr, q, arr.size - q)
    if method == "compression":
        return compression_estimate(maurer_test(stream), l, apply_ci=apply_ci, c=c, cfg=cfg)
    if method == "coron":
        return coron_estimate(coron_test(stream), l, apply_ci=apply_ci, c=c, cfg=cfg)
    if method == "kim":
        return kim_estimate(kim_test(stream, alpha), l, apply_ci=apply_ci, c=c, cfg=cfg)
    raise ValueError(f"unknown estimator {method!r}")
