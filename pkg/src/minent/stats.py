"""Distance-based test statistics: the universal (Maurer) test and its
Shannon-entropy (Coron) and power-sum (Kim) variants."""

from __future__ import annotations

from dataclasses import dataclass
from math import log, sqrt

import numpy as np

from .blocks import DistanceStream

__all__ = [
    "TestStatistic",
    "CorrectiveFactor",
    "maurer_test",
    "coron_g",
    "coron_test",
    "kim_g",
    "kim_g_table",
    "kim_test",
    "confidence_lower_bound",
    "corrective_factor",
]

LN2 = log(2.0)
EULER_GAMMA = 0.5772156649015329
Z_99 = 2.576  # one-sided 99% normal quantile used by the lower confidence bound

# Harmonic partial sums are evaluated exactly below this distance and by the
# four-term asymptotic from it on; the two agree to better than 1e-6 there.
CORON_ASYMPTOTIC_FROM = 23


@dataclass(frozen=True)
class TestStatistic:
    """Sample mean and per-term sample variance of one distance test run."""

    __test__ = False  # keep pytest from collecting this despite the name

    kind: str  # "maurer" | "coron" | "kim"
    mean: float
    per_term_variance: float
    k: int
    q: int
    alpha: float | None = None


@dataclass(frozen=True)
class CorrectiveFactor:
    """Multiplier on the per-term standard deviation compensating for the
    dependence among distance observations."""

    value: float
    provenance: str  # "default" | "override"


def _stat(kind: str, terms: np.ndarray, q: int, alpha: float | None = None) -> TestStatistic:
    k = int(terms.size)
    mean = float(terms.mean())
    variance = float(terms.var(ddof=1)) if k > 1 else 0.0
    return TestStatistic(kind=kind, mean=mean, per_term_variance=variance, k=k, q=q, alpha=alpha)


def _require_nonempty(stream: DistanceStream) -> None:
    if stream.k < 1:
        raise ValueError("distance stream is empty")


def maurer_test(stream: DistanceStream) -> TestStatistic:
    """Mean log2 match distance over the test positions."""
    _require_nonempty(stream)
    return _stat("maurer", np.log2(stream.values.astype(np.float64)), stream.q)


def coron_g(i: int) -> float:
    """Per-distance weight whose test mean estimates the Shannon entropy.

    Exact harmonic partial sum (scaled to bits) for small i, four-term
    asymptotic with Euler's constant for i >= 23.
    """
    if i < 1:
        raise ValueError(f"distance must be >= 1, got {i}")
    if i == 1:
        return 0.0
    if i < CORON_ASYMPTOTIC_FROM:
        return float(np.sum(1.0 / np.arange(1, i, dtype=np.float64))) / LN2
    m = i - 1.0
    return (log(m) + EULER_GAMMA + 1.0 / (2.0 * m) - 1.0 / (12.0 * m * m)) / LN2


def coron_g_table(max_i: int) -> np.ndarray:
    """Vectorised coron_g lookup; entry i holds g(i), entry 0 is unused."""
    table = np.zeros(max_i + 1)
    top = min(max_i, CORON_ASYMPTOTIC_FROM - 1)
    if top >= 2:
        table[2 : top + 1] = np.cumsum(1.0 / np.arange(1, top, dtype=np.float64)) / LN2
    if max_i >= CORON_ASYMPTOTIC_FROM:
        m = np.arange(CORON_ASYMPTOTIC_FROM, max_i + 1, dtype=np.float64) - 1.0
        table[CORON_ASYMPTOTIC_FROM:] = (
            np.log(m) + EULER_GAMMA + 1.0 / (2.0 * m) - 1.0 / (12.0 * m * m)
        ) / LN2
    return table


def coron_test(stream: DistanceStream) -> TestStatistic:
    """Shannon-entropy estimate: mean of harmonic-sum weights of distances."""
    _require_nonempty(stream)
    table = coron_g_table(int(stream.values.max()))
    return _stat("coron", table[stream.values], stream.q)


def kim_g(i: int, alpha: float) -> float:
    """Per-distance weight whose test mean estimates the order-alpha power sum.

    The weights are the coefficients of the binomial series
    (1 - q)^(alpha - 2) = sum_{i>=1} g(i) q^(i-1): g(1) = 1 and
    g(i+1) = g(i) * (i + 1 - alpha) / i.  For integer alpha this gives
    sign-alternating binomial coefficients with finite support, matching the
    collision special case (1, 0, 0, ...) at alpha = 2 and (1, -1, 0, ...)
    at alpha = 3.
    """
    if i < 1:
        raise ValueError(f"distance must be >= 1, got {i}")
    if alpha <= 1:
        raise ValueError(f"order must be > 1, got {alpha}")
    g = 1.0
    for j in range(1, i):
        g *= (j + 1 - alpha) / j
    return g


def kim_g_table(max_i: int, alpha: float) -> np.ndarray:
    """Vectorised kim_g lookup; entry i holds g(i, alpha), entry 0 is unused."""
    if max_i < 1:
        raise ValueError(f"table size must be >= 1, got {max_i}")
    if alpha <= 1:
        raise ValueError(f"order must be > 1, got {alpha}")
    table = np.empty(max_i + 1)
    table[0] = 0.0
    table[1] = 1.0
    if max_i >= 2:
        j = np.arange(1, max_i, dtype=np.float64)
        table[2:] = np.cumprod((j + 1 - alpha) / j)
    return table


def kim_test(stream: DistanceStream, alpha: float) -> TestStatistic:
    """Power-sum estimate of order alpha; at alpha = 2 the mean is the
    fraction of test positions whose distance is 1 (adjacent collisions)."""
    _require_nonempty(stream)
    if alpha <= 1:
        raise ValueError(f"order must be > 1, got {alpha}")
    table = kim_g_table(int(stream.values.max()), alpha)
    return _stat("kim", table[stream.values], stream.q, alpha=float(alpha))


def confidence_lower_bound(stat: TestStatistic, c) -> float:
    """99% lower confidence bound on the test value under the Gaussian
    assumption, with corrective factor c on the per-term deviation."""
    if stat.k < 2:
        raise ValueError("confidence bound needs at least two test terms")
    value = c.value if isinstance(c, CorrectiveFactor) else float(c)
    return stat.mean - Z_99 * value * sqrt(stat.per_term_variance) / sqrt(stat.k)


_KIM_DEFAULTS = {2.0: 1.0, 3.0: 1.008, 4.0: 1.008, 5.0: 1.008}


def corrective_factor(
    kind: str,
    l: int = 6,
    k: int | None = None,
    alpha: float | None = None,
    override: float | None = None,
) -> CorrectiveFactor:
    """Default corrective factors for l = 6 and k >> 2^l, or a user override.

    maurer: 0.5907; coron: 0.6131; kim: 1 at order 2 and 1.008 at orders
    3 to 5.  Other kim orders require an override.
    """
    if override is not None:
        if override <= 0:
            raise ValueError(f"corrective factor must be positive, got {override}")
        return CorrectiveFactor(float(override), "override")
    if kind in ("maurer", "compression"):
        return CorrectiveFactor(0.5907, "default")
    if kind == "coron":
        return CorrectiveFactor(0.6131, "default")
    if kind in ("kim", "collision"):
        a = 2.0 if alpha is None else float(alpha)
        if a in _KIM_DEFAULTS:
            return CorrectiveFactor(_KIM_DEFAULTS[a], "default")
        raise ValueError(
            f"no default corrective factor for order {a}; pass an override"
        )
    raise ValueError(f"unknown test kind: {kind!r}")
