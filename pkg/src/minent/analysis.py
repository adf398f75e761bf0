"""Exact entropy computations on explicit distributions, joint-range and
gap curves, and bias-variance diagnostics for the power-sum estimators."""

from __future__ import annotations

from dataclasses import dataclass
from math import log

import numpy as np

from .stats import EULER_GAMMA, LN2, kim_g_table

__all__ = [
    "validate_pmf",
    "shannon_entropy",
    "renyi_entropy",
    "collision_entropy",
    "min_entropy",
    "collision_probability",
    "near_uniform_pmf",
    "inverted_near_uniform_pmf",
    "distance_law",
    "maurer_expectation",
    "JointRangePoint",
    "joint_range_curve",
    "z_slope",
    "z_ratio_approx",
    "variance_of_g",
    "variance_crossover_threshold",
]


def validate_pmf(p, tol: float = 1e-12) -> np.ndarray:
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError("distribution must be a non-empty vector")
    if float(arr.min()) < 0.0:
        raise ValueError("probabilities must be nonnegative")
    if abs(float(arr.sum()) - 1.0) > tol:
        raise ValueError(f"probabilities must sum to 1, got {float(arr.sum())!r}")
    return arr


def shannon_entropy(p) -> float:
    """Per-block Shannon entropy in bits; zero-probability atoms contribute 0."""
    arr = validate_pmf(p)
    nz = arr[arr > 0]
    return float(-(nz * np.log2(nz)).sum())


def renyi_entropy(p, alpha: float) -> float:
    """Per-block Renyi entropy of order alpha (alpha > 0, alpha != 1)."""
    if alpha <= 0 or alpha == 1:
        raise ValueError(f"order must be positive and different from 1, got {alpha}")
    arr = validate_pmf(p)
    nz = arr[arr > 0]
    return float(np.log2((nz**alpha).sum()) / (1.0 - alpha))


def collision_entropy(p) -> float:
    """Order-2 Renyi entropy, -log2 of the collision probability."""
    return float(-np.log2(collision_probability(p)))


def min_entropy(p) -> float:
    """Per-block min-entropy, -log2 of the largest mass."""
    return float(-np.log2(validate_pmf(p).max()))


def collision_probability(p) -> float:
    return float((validate_pmf(p) ** 2).sum())


def near_uniform_pmf(theta: float, b: int) -> np.ndarray:
    """One atom of mass theta with the remaining mass spread evenly."""
    if not 1.0 / b <= theta <= 1.0:
        raise ValueError(f"theta must lie in [1/{b}, 1], got {theta}")
    pmf = np.full(b, (1.0 - theta) / (b - 1))
    pmf[0] = theta
    return pmf


def inverted_near_uniform_pmf(psi: float, b: int) -> np.ndarray:
    """floor(1/psi) atoms of mass psi plus the remainder atom 1 - floor(1/psi)*psi."""
    if not 1.0 / b <= psi <= 1.0:
        raise ValueError(f"psi must lie in [1/{b}, 1], got {psi}")
    m = min(int(np.floor(1.0 / psi)), b)
    remainder = 1.0 - m * psi
    if remainder < 0.0:  # floating floor overshot by one
        m -= 1
        remainder = 1.0 - m * psi
    pmf = np.zeros(b)
    pmf[:m] = psi
    if remainder > 1e-15 and m < b:
        pmf[m] = remainder
    return pmf


def distance_law(p, i_max: int) -> np.ndarray:
    """P(D = i) for i = 1..i_max under the long-run IID distance law."""
    arr = validate_pmf(p)
    nz = arr[arr > 0][:, None]
    powers = np.arange(i_max, dtype=np.float64)
    return (nz * nz * (1.0 - nz) ** powers).sum(axis=0)


# Below this atom probability the geometric mean-log switches to its
# continuous limit; the atom-weighted contribution error is below 1e-9.
_GEOMETRIC_SERIES_MIN_P = 1e-5


def _geometric_log2_mean(p: float) -> float:
    """E[log2 X] for X geometric on {1, 2, ...} with success probability p."""
    if p >= 1.0:
        return 0.0
    lam = -log(1.0 - p)
    if p < _GEOMETRIC_SERIES_MIN_P:
        return (-EULER_GAMMA - log(lam)) / LN2
    i_max = int(np.ceil(27.64 / lam)) + 1  # (1-p)^i_max < 1e-12
    i = np.arange(1, i_max + 1, dtype=np.float64)
    weights = np.exp((i - 1.0) * np.log1p(-p))
    return float(p * (weights * np.log2(i)).sum())


def maurer_expectation(p) -> float:
    """Expected mean log2 distance for an IID source under the long-run law."""
    arr = validate_pmf(p)
    return float(sum(pb * _geometric_log2_mean(float(pb)) for pb in arr if pb > 0))


@dataclass(frozen=True)
class JointRangePoint:
    """Per-block min-entropy envelope at one statistic value x."""

    x: float
    h_lower: float
    h_upper: float
    gap: float


_STATISTICS = ("shannon", "renyi", "maurer_expectation")


def joint_range_curve(statistic: str, b: int, grid, alpha: float | None = None) -> list[JointRangePoint]:
    """Lower and upper min-entropy envelopes at equal statistic value.

    Sweeps the near-uniform family (lower envelope) and the inverted
    near-uniform family (upper envelope) over ``grid`` (top-mass values in
    [1/b, 1]) and pairs them at equal x by monotone interpolation.  The gap
    column is the largest possible bias of a near-uniform-based estimator at
    that statistic value.
    """
    if statistic not in _STATISTICS:
        raise ValueError(f"statistic must be one of {_STATISTICS}, got {statistic!r}")
    if statistic == "renyi" and (alpha is None or alpha <= 0 or alpha == 1):
        raise ValueError("renyi statistic needs an order alpha > 0, alpha != 1")
    grid = np.asarray(grid, dtype=np.float64)
    if grid.size < 2 or float(grid.min()) < 1.0 / b or float(grid.max()) > 1.0:
        raise ValueError(f"grid must hold at least two values in [1/{b}, 1]")

    def stat_of(pmf: np.ndarray) -> float:
        if statistic == "shannon":
            return shannon_entropy(pmf)
        if statistic == "renyi":
            return renyi_entropy(pmf, alpha)
        return maurer_expectation(pmf)

    x_lower = np.array([stat_of(near_uniform_pmf(t, b)) for t in grid])
    x_upper = np.array([stat_of(inverted_near_uniform_pmf(t, b)) for t in grid])
    h = -np.log2(grid)
    order = np.argsort(x_upper)
    h_upper = np.interp(x_lower, x_upper[order], h[order])
    return [
        JointRangePoint(float(x), float(lo), float(hi), float(hi - lo))
        for x, lo, hi in zip(x_lower, h, h_upper)
    ]


def z_slope(theta: float, alpha: float, b: int) -> float:
    """Sensitivity d(theta)/d(power sum) of the near-uniform inversion.

    Defined on 1/b < theta <= 1; it diverges as theta approaches 1/b, which
    is reported as an error.
    """
    if alpha <= 1:
        raise ValueError(f"order must be > 1, got {alpha}")
    if not 1.0 / b < theta <= 1.0:
        raise ValueError(f"slope diverges as theta -> 1/{b}; need 1/{b} < theta <= 1")
    denom = alpha * (theta ** (alpha - 1.0) - ((1.0 - theta) / (b - 1)) ** (alpha - 1.0))
    return 1.0 / denom


def z_ratio_approx(delta: float, alpha: float, b: int) -> tuple[float, float]:
    """Small-delta approximations near the uniform corner theta = 1/b + delta.

    Returns (approximate slope, approximate ratio of the order alpha+1 slope
    to the order alpha slope).
    """
    if alpha <= 1:
        raise ValueError(f"order must be > 1, got {alpha}")
    if not 0.0 < delta < 1.0 / b:
        raise ValueError(f"approximation regime needs 0 < delta < 1/{b}, got {delta}")
    z = b ** (alpha - 3.0) / (alpha * (alpha - 1.0)) * (b - 1) / delta
    xi = (alpha - 1.0) / (alpha + 1.0) * b
    return z, xi


def _weight_second_moment_atom(prob: float, alpha: float) -> float:
    """sum_i g(i, alpha)^2 prob^2 (1-prob)^(i-1), chunked so tiny atoms do
    not allocate the whole truncated series at once."""
    if prob >= 1.0:
        return 1.0
    lam = -np.log1p(-prob)
    i_cap = int(np.ceil(30.0 / lam)) + 1
    total, g_carry, start = 0.0, 1.0, 1
    chunk = 1 << 20
    while start <= i_cap:
        stop = min(start + chunk - 1, i_cap)
        idx = np.arange(start, stop + 1, dtype=np.float64)
        if start == 1:
            g = np.empty(idx.size)
            g[0] = 1.0
            if idx.size > 1:
                g[1:] = np.cumprod((idx[:-1] + 1.0 - alpha) / idx[:-1])
        else:
            # continue the recurrence g(i) = g(i-1) (i - alpha)/(i - 1)
            g = g_carry * np.cumprod((idx - alpha) / (idx - 1.0))
        g_carry = float(g[-1])
        weights = np.exp((idx - 1.0) * np.log1p(-prob))
        total += float((g * g * weights).sum())
        start = stop + 1
    return prob * prob * total


def variance_of_g(p, alpha: float) -> float:
    """Population variance of the per-distance weight of order alpha under
    the long-run IID distance law.

    Integer orders have finite weight support (alpha - 1 terms) and are
    summed exactly; other orders truncate each atom's geometric series at
    residual mass 1e-12.
    """
    arr = validate_pmf(p)
    if alpha <= 1:
        raise ValueError(f"order must be > 1, got {alpha}")
    if float(alpha).is_integer():
        support = max(int(alpha) - 1, 1)
        law = distance_law(arr, support)
        g = kim_g_table(support, alpha)[1:]
        mean = float((g * law).sum())
        second = float((g * g * law).sum())
        return second - mean * mean
    # the mean is the power sum exactly, by the binomial-series identity
    mean = float((arr[arr > 0] ** alpha).sum())
    second = float(sum(_weight_second_moment_atom(float(pb), alpha)
                       for pb in arr if pb > 0))
    return second - mean * mean


def variance_crossover_threshold(b: int) -> float:
    """Top-mass threshold below which the order-2 inversion has smaller
    variance than the order-3 inversion: 2/3 - 1/(3(b-2))."""
    if b <= 3:
        raise ValueError(f"threshold needs an alphabet larger than 3, got {b}")
    return 2.0 / 3.0 - 1.0 / (3.0 * (b - 2))
