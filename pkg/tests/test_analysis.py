from math import log2

import numpy as np
import pytest

from minent.analysis import (
    collision_entropy,
    collision_probability,
    distance_law,
    inverted_near_uniform_pmf,
    joint_range_curve,
    maurer_expectation,
    min_entropy,
    near_uniform_pmf,
    renyi_entropy,
    shannon_entropy,
    variance_crossover_threshold,
    validate_pmf,
    variance_of_g,
    z_ratio_approx,
    z_slope,
)
from minent.estimators import (
    estimate_sequence,
    near_uniform_power_sum,
    near_uniform_shannon,
)

import oracles

B = 64
UNIFORM = np.full(B, 1.0 / B)


# ------------------------------------------------------------- entropies


def test_uniform_entropies_all_six_bits():
    assert shannon_entropy(UNIFORM) == pytest.approx(6.0, abs=1e-12)
    assert renyi_entropy(UNIFORM, 2) == pytest.approx(6.0, abs=1e-12)
    assert min_entropy(UNIFORM) == pytest.approx(6.0, abs=1e-12)


def test_point_mass_entropies_zero():
    pmf = np.zeros(B)
    pmf[0] = 1.0
    assert shannon_entropy(pmf) == 0.0
    assert renyi_entropy(pmf, 3) == 0.0
    assert min_entropy(pmf) == 0.0


def test_collision_entropy_near_uniform_half():
    pmf = near_uniform_pmf(0.5, B)
    assert collision_probability(pmf) == pytest.approx(0.2539683, abs=1e-7)
    assert collision_entropy(pmf) == pytest.approx(-log2(0.2539683), abs=1e-6)
    assert collision_entropy(pmf) == pytest.approx(1.9773, abs=1e-4)


def test_pmf_validation():
    with pytest.raises(ValueError):
        validate_pmf([0.5, 0.6])
    with pytest.raises(ValueError):
        validate_pmf([1.5, -0.5])
    with pytest.raises(ValueError):
        renyi_entropy(UNIFORM, 1.0)


def test_renyi_nonincreasing_in_order_and_min_entropy_smallest():
    rng = np.random.default_rng(11)
    orders = [1.5, 2, 3, 5, 10, 50]
    for _ in range(100):
        pmf = oracles.random_pmf(rng, B)
        values = [renyi_entropy(pmf, a) for a in orders]
        assert all(x >= y - 1e-12 for x, y in zip(values, values[1:]))
        h_inf = min_entropy(pmf)
        assert all(h_inf <= v + 1e-12 for v in values)


def test_renyi_order_ratio_bound():
    # H^(a) <= a^2/(a^2-1) H^(a+1)
    rng = np.random.default_rng(12)
    for _ in range(100):
        pmf = oracles.random_pmf(rng, B)
        for a in (2, 3, 4):
            lhs = renyi_entropy(pmf, a)
            rhs = a * a / (a * a - 1.0) * renyi_entropy(pmf, a + 1)
            assert lhs <= rhs + 1e-9


# ------------------------------------------------------ achiever families


def test_near_uniform_pmf_shapes():
    assert np.allclose(near_uniform_pmf(1.0 / B, B), UNIFORM)
    pmf = near_uniform_pmf(0.5, B)
    assert pmf[0] == 0.5 and np.allclose(pmf[1:], 0.5 / 63)


def test_inverted_near_uniform_pmf_shapes():
    pmf = inverted_near_uniform_pmf(0.5, B)
    assert pmf[0] == pmf[1] == 0.5 and (pmf[2:] == 0).all()
    pmf = inverted_near_uniform_pmf(0.4, B)
    assert np.allclose(pmf[:3], [0.4, 0.4, 0.2]) and (pmf[3:] == 0).all()
    assert np.allclose(inverted_near_uniform_pmf(1.0 / B, B), UNIFORM)
    validate_pmf(inverted_near_uniform_pmf(0.1, B))


def test_achiever_domain_validation():
    for bad in (0.5 / B, 1.01):
        with pytest.raises(ValueError):
            near_uniform_pmf(bad, B)
        with pytest.raises(ValueError):
            inverted_near_uniform_pmf(bad, B)


def test_fano_tightness_on_near_uniform():
    for theta in (0.05, 0.3, 0.7, 0.99):
        pmf = near_uniform_pmf(theta, B)
        assert shannon_entropy(pmf) == pytest.approx(
            near_uniform_shannon(theta, B), abs=1e-9
        )
        for alpha in (2, 3, 5):
            bound = log2(near_uniform_power_sum(theta, alpha, B)) / (1 - alpha)
            assert renyi_entropy(pmf, alpha) == pytest.approx(bound, abs=1e-9)


# ------------------------------------------------------- distance law


def test_distance_law_matches_oracle_and_sums_to_one():
    rng = np.random.default_rng(13)
    pmf = oracles.random_pmf(rng, 8)
    i_max = int(np.ceil(27.64 / -np.log1p(-float(pmf.min())))) + 1
    law = distance_law(pmf, i_max)
    assert np.allclose(law, oracles.distance_pmf(pmf, i_max), atol=1e-15)
    assert law.sum() == pytest.approx(1.0, abs=1e-9)


def test_maurer_expectation_uniform_is_universal_constant():
    assert maurer_expectation(UNIFORM) == pytest.approx(5.2177052, abs=1e-6)


def test_maurer_expectation_small_atom_branch():
    # atoms below the series cutoff use the continuous limit; the p-weighted
    # contribution error must stay below ~1e-9
    from minent.analysis import _geometric_log2_mean

    p = 5e-6
    i_max = int(np.ceil(30.0 / p))
    total, start, chunk = 0.0, 1, 1 << 22
    while start <= i_max:
        stop = min(start + chunk - 1, i_max)
        i = np.arange(start, stop + 1, dtype=np.float64)
        total += float((np.exp((i - 1.0) * np.log1p(-p)) * np.log2(i)).sum())
        start = stop + 1
    direct_contribution = p * p * total
    assert p * _geometric_log2_mean(p) == pytest.approx(direct_contribution, abs=2e-9)


# ------------------------------------------------------- joint range


def test_joint_range_endpoints_have_zero_gap():
    grid = np.linspace(1.0 / B, 1.0, 200)
    for statistic, alpha in (("shannon", None), ("renyi", 2.0)):
        points = joint_range_curve(statistic, B, grid, alpha=alpha)
        xs = [p.x for p in points]
        assert min(xs) == pytest.approx(0.0, abs=1e-12)
        assert max(xs) == pytest.approx(6.0, abs=1e-9)
        by_x = sorted(points, key=lambda p: p.x)
        assert by_x[0].gap == pytest.approx(0.0, abs=1e-9)
        assert by_x[-1].gap == pytest.approx(0.0, abs=1e-9)
        assert all(p.gap >= -1e-9 for p in points)


def test_joint_range_gap_shrinks_with_order():
    grid = np.linspace(1.0 / B, 1.0, 400)
    low = joint_range_curve("renyi", B, grid, alpha=2.0)
    high = joint_range_curve("renyi", B, grid, alpha=10.0)

    def gap_at(points, x0):
        return min(points, key=lambda p: abs(p.x - x0)).gap

    for x0 in (2.0, 3.0, 4.0):
        assert gap_at(high, x0) < gap_at(low, x0)


def test_joint_range_maurer_statistic_runs():
    grid = np.linspace(1.0 / B, 1.0, 60)
    points = joint_range_curve("maurer_expectation", B, grid)
    assert all(p.gap >= -1e-9 for p in points)
    assert max(p.x for p in points) == pytest.approx(5.2177052, abs=1e-5)


def test_joint_range_validation():
    with pytest.raises(ValueError):
        joint_range_curve("nope", B, [0.5, 1.0])
    with pytest.raises(ValueError):
        joint_range_curve("renyi", B, [0.5, 1.0])  # missing order
    with pytest.raises(ValueError):
        joint_range_curve("shannon", B, [0.001, 0.5])


# --------------------------------------------------------------- slopes


def test_z_slope_hand_values():
    assert z_slope(0.5, 2, B) == pytest.approx(1.01613, abs=1e-5)
    assert z_slope(1.0, 2, 2) == pytest.approx(0.5, rel=1e-12)


def test_z_slope_divergence_signal_at_uniform_corner():
    with pytest.raises(ValueError):
        z_slope(1.0 / B, 2, B)
    with pytest.raises(ValueError):
        z_slope(0.5, 1.0, B)


def test_z_ratio_approximation():
    _, xi = z_ratio_approx(1e-6, 2, B)
    assert xi == pytest.approx(B / 3.0, rel=1e-12)
    _, xi_boundary = z_ratio_approx(1e-6, 65.0 / 63.0, B)
    assert xi_boundary == pytest.approx(1.0, abs=0.05)
    with pytest.raises(ValueError):
        z_ratio_approx(1.0 / B, 2, B)


def test_z_ratio_matches_exact_slope_ratio():
    delta = 1e-6
    for alpha in (2.0, 3.0, 4.0):
        exact = z_slope(1.0 / B + delta, alpha + 1, B) / z_slope(1.0 / B + delta, alpha, B)
        _, xi = z_ratio_approx(delta, alpha, B)
        assert xi == pytest.approx(exact, rel=0.01)


def test_z_slope_matches_numerical_inversion_derivative():
    # finite difference of theta(f) through the power-sum curve
    for alpha in (2.0, 3.0):
        for theta in np.linspace(0.1, 0.99, 25):
            f = near_uniform_power_sum(float(theta), alpha, B)
            df = 1e-9
            from minent.estimators import bisect_monotone, BisectionConfig

            cfg = BisectionConfig(max_iterations=80, theta_tolerance=1e-14)
            up = bisect_monotone(lambda t: near_uniform_power_sum(t, alpha, B),
                                 f + df, 1.0 / B, 1.0, increasing=True, cfg=cfg)
            dn = bisect_monotone(lambda t: near_uniform_power_sum(t, alpha, B),
                                 f - df, 1.0 / B, 1.0, increasing=True, cfg=cfg)
            numeric = (up - dn) / (2 * df)
            assert numeric == pytest.approx(z_slope(float(theta), alpha, B), rel=1e-4)


# ---------------------------------------------------- per-term variance


def test_variance_of_g_uniform_matches_published_table():
    assert variance_of_g(UNIFORM, 2) == pytest.approx(63.0 / 4096.0, abs=1e-15)
    assert variance_of_g(UNIFORM, 3) == pytest.approx(0.0310, abs=5e-5)
    assert variance_of_g(UNIFORM, 4) == pytest.approx(0.0923, abs=5e-5)
    assert variance_of_g(UNIFORM, 5) == pytest.approx(0.3052, abs=5e-5)


def test_variance_of_g_closed_forms():
    rng = np.random.default_rng(14)
    for _ in range(50):
        pmf = oracles.random_pmf(rng, B)
        p1 = float((pmf**2).sum())
        p2 = float((pmf**2 * (1 - pmf)).sum())
        assert variance_of_g(pmf, 2) == pytest.approx(p1 - p1 * p1, abs=1e-12)
        expect3 = p1 + p2 - (p1 - p2) ** 2
        assert variance_of_g(pmf, 3) == pytest.approx(expect3, abs=1e-12)
        assert variance_of_g(pmf, 2) <= variance_of_g(pmf, 3) + 1e-15


def test_variance_of_g_non_integer_order():
    got = variance_of_g(UNIFORM, 2.5)
    law = oracles.distance_pmf(UNIFORM, 5000)
    from minent.stats import kim_g_table

    g = kim_g_table(5000, 2.5)[1:]
    want = float((g * g * law).sum()) - float((g * law).sum()) ** 2
    assert got == pytest.approx(want, abs=1e-9)


def test_variance_crossover_threshold_values():
    assert variance_crossover_threshold(B) == pytest.approx(123.0 / 186.0, abs=1e-15)
    assert variance_crossover_threshold(4) == pytest.approx(0.5, abs=1e-15)
    assert variance_crossover_threshold(10**9) == pytest.approx(2.0 / 3.0, abs=1e-6)
    with pytest.raises(ValueError):
        variance_crossover_threshold(3)


def test_slope_ordering_flips_at_threshold():
    # below the threshold the order-2 slope is smaller, above it is larger
    thr = variance_crossover_threshold(B)
    for theta in (0.3, 0.5, thr - 0.01):
        assert z_slope(theta, 2, B) < z_slope(theta, 3, B)
    for theta in (thr + 0.01, 0.9, 0.99):
        assert z_slope(theta, 2, B) > z_slope(theta, 3, B)


def test_variance_ordering_monte_carlo_below_threshold():
    # sampled estimator variance: order 2 beats order 3 for theta under the
    # threshold (the regime the crossover bound covers)
    rng = np.random.default_rng(15)
    k = 100_000
    for theta in (0.3, 0.5):
        pmf = near_uniform_pmf(theta, B)
        t2, t3 = [], []
        for _ in range(200):
            blocks = rng.choice(B, size=k, p=pmf)
            t2.append(estimate_sequence(blocks, "kim", 6, alpha=2.0, apply_ci=False).theta)
            t3.append(estimate_sequence(blocks, "kim", 6, alpha=3.0, apply_ci=False).theta)
        assert np.var(t2, ddof=1) < np.var(t3, ddof=1)
