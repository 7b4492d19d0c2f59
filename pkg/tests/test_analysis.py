import itertools
import math

import numpy as np
import pytest

from specgames import analysis as an


def db(x):
    return 10 * math.log10(x)


def test_rate_ratio_examples():
    assert an.rate_ratio(7.0, 7.0) == 1.0
    assert an.rate_ratio(3.0, 1.0) == pytest.approx(0.5)
    assert an.rate_ratio(100.0, 1.0) == pytest.approx(1 / math.log2(101))


def test_rate_ratio_domain():
    with pytest.raises(ValueError):
        an.rate_ratio(0.0, 1.0)


def test_stability_threshold_large_k():
    R, g_db = an.equal_load_stability_threshold(math.inf)
    assert R == 0.5
    assert g_db == pytest.approx(db(3.0))
    assert g_db == pytest.approx(4.77, abs=0.01)
    # finite K approaches the limit
    R_big, _ = an.equal_load_stability_threshold(1e6)
    assert R_big == pytest.approx(0.5, abs=1e-6)


def test_stability_threshold_k2():
    R, g_db = an.equal_load_stability_threshold(2)
    assert R == pytest.approx(0.618, abs=1e-3)
    assert 2 ** (1 / R) - 1 == pytest.approx(2.07, abs=0.01)
    assert g_db == pytest.approx(3.15, abs=0.01)


@pytest.mark.parametrize("K", [2, 3, 4, 8, 16, 100])
def test_stability_root_residual(K):
    R, _ = an.equal_load_stability_threshold(K)
    assert abs(2 * R * (R - 1) / K + 2 * R - 1) < 1e-9
    # just below the root the orthogonal split is stable
    sc = an.AnalyticScenario(K, 10, 10, 1.0, 1.0, 1.0, 1.0)
    below = (1 + 2 * (R - 0.01) / K) * (1 + 2 * (R - 0.01 - 1) / K)
    assert below < 1


def test_transfer_conditions():
    full = an.AnalyticScenario(8, 25, 5, 100.0, 100.0, 100.0, 100.0)
    assert an.coop_transfer_condition(full, "to_high_load")
    assert an.coop_transfer_condition(full, "to_low_load")
    hi = an.AnalyticScenario(8, 25, 5, 10.0, 10.0, 1.0, 1.0)
    assert an.coop_transfer_condition(hi, an.Direction.TO_HIGH_LOAD)
    assert not an.coop_transfer_condition(hi, an.Direction.TO_LOW_LOAD)
    # at 20 dB SNR a shared carrier keeps too little of the rate for a to gain
    very_hi = an.AnalyticScenario(8, 25, 5, 100.0, 100.0, 1.0, 1.0)
    assert not an.coop_transfer_condition(very_hi, an.Direction.TO_HIGH_LOAD)
    eq = an.AnalyticScenario(1000, 10, 10, 100.0, 100.0, 1.0, 1.0)
    assert not an.coop_transfer_condition(eq, "to_high_load")
    assert not an.coop_transfer_condition(eq, "to_low_load")


def test_transfer_condition_matches_product_form():
    rng = np.random.default_rng(0)
    for _ in range(500):
        K = int(rng.integers(2, 20))
        Na, Nb = rng.uniform(1, 30, 2)
        g, gp = sorted(10 ** rng.uniform(-1, 3, 2))[::-1]
        sc = an.AnalyticScenario(K, Na, Nb, g, g, gp, gp)
        R = an.rate_ratio(g, gp)
        prod = (1 + 2 * R / K) ** Na * (1 + 2 * (R - 1) / K) ** Nb
        if abs(prod - 1) > 1e-9:
            assert an.coop_transfer_condition(sc, "to_high_load") == (prod > 1)


def test_full_spread_condition_independent_of_load():
    for Na, Nb in itertools.product([1, 5, 25, 200], repeat=2):
        sc = an.AnalyticScenario(8, Na, Nb, 10.0, 10.0, 10.0, 10.0)
        assert an.coop_transfer_condition(sc, "to_high_load")
        assert an.coop_transfer_condition(sc, "to_low_load")


def test_delta_k_limit_reference_value():
    assert an.delta_k_limit(8, 25, 5) == pytest.approx(2.667, abs=1e-3)
    assert round(an.delta_k_limit(8, 25, 5), 1) == 2.7


def grid_oracle(K, Na, Nb, step=1e-4):
    dk = np.arange(step, K / 2, step)
    return dk[np.argmax(an.transfer_objective(dk, K, Na, Nb))]


@pytest.mark.parametrize("K,Na,Nb", [(8, 25, 5), (8, 10, 9), (4, 3, 1), (16, 40, 2), (6, 7, 3)])
def test_delta_k_limit_grid_oracle(K, Na, Nb):
    dk = an.delta_k_limit(K, Na, Nb)
    assert dk == pytest.approx(grid_oracle(K, Na, Nb), abs=1e-3)
    u = 2 * dk / K
    assert abs(Na * (1 - u) - Nb * (1 + u)) < 1e-9


def test_delta_k_limit_no_transfer():
    assert an.delta_k_limit(8, 5, 5) == 0.0
    assert an.delta_k_limit(8, 5, 25) == 0.0


def test_pricing_feasible_examples():
    assert an.pricing_feasible(7, 0.8, 8, 25, 5, 2.7)
    assert not an.pricing_feasible(-1, 0.8, 8, 25, 5, 2.7)
    assert not an.pricing_feasible(7, 0, 8, 25, 5, 2.7)


def test_pricing_feasible_by_hand():
    # both inequalities evaluated independently with the log10 right-hand side
    p1, p2, K, Nh, Nl, dk = 7, 0.8, 8, 25, 5, 2.7
    u = 2 * dk / K
    c = math.exp(p2 / 2 * (1 + u)) - math.exp(p2 / 2) < Nh / p1 * math.log10(1 + u)
    d = math.exp(p2 / 2 * (1 - u)) - math.exp(p2 / 2) < Nl / p1 * math.log10(1 - u)
    assert c and d


def test_pricing_feasible_under_natural_log_differs():
    # the low-load condition fails with ln on the right-hand side
    assert not an.pricing_feasible(7, 0.8, 8, 25, 5, 2.7, log=math.log)


def test_pricing_region_p1_direction():
    """Sample the implication 'feasible at p1 => feasible at smaller p1' instead of assuming it."""
    p1s = np.arange(0.5, 20.01, 0.5)
    p2s = [x for x in np.arange(0.1, 2.01, 0.1)]
    violations = 0
    for p2 in p2s:
        ok = [an.pricing_feasible(p1, p2, 8, 25, 5, 2.7) for p1 in p1s]
        for i in range(1, len(p1s)):
            if ok[i] and not ok[i - 1]:
                violations += 1
    # the low-load right-hand side is negative, so shrinking p1 makes it stricter;
    # the implication therefore does not hold in general
    assert violations > 0


def test_feasibility_grid_contains_reference_point():
    grid = an.feasibility_grid([6.5, 7.0, 7.5], [0.7, 0.8, 0.9], 8, 25, 5, 2.7)
    assert (7.0, 0.8, True) in grid


def test_immediate_gain_loss():
    assert an.immediate_gain(25, 4, 5) == pytest.approx(2.423, abs=1e-3)
    assert an.immediate_loss(5, 4, 3) == pytest.approx(0.624, abs=1e-3)
    assert an.immediate_gain(7, 3, 3) == 0.0
    assert an.immediate_loss(5, 4, 0) == math.inf
    with pytest.raises(ValueError):
        an.immediate_gain(5, 4, 3)


def test_gain_exceeds_loss_for_high_load():
    # holds up to x ~ 3.864; beyond that the loss diverges as b runs out of carriers
    x_star = 3.8638
    for x in np.arange(0.01, 3.86, 0.01):
        assert an.immediate_gain(25, 4, 4 + x) > an.immediate_loss(5, 4, 4 - x)
    for x in np.arange(3.87, 4.0, 0.01):
        assert an.immediate_gain(25, 4, 4 + x) < an.immediate_loss(5, 4, 4 - x)
    g = an.immediate_gain(25, 4, 4 + x_star) - an.immediate_loss(5, 4, 4 - x_star)
    assert abs(g) < 1e-3


def test_reversal_case_one_impossible():
    for x, y in itertools.product(np.arange(0, 3.5, 0.25), np.arange(0.25, 4, 0.25)):
        if x + y >= 4:
            continue
        r = an.reversal_case_check(8, x, y, 5, 25, 0.3, 2, 25, 5)
        assert not r.case_one_necessary
        assert not r.case_one


def test_reversal_case_two_on_grid():
    hits = [an.reversal_case_check(8, x, 1, 5, 25, 0.3, 1, 25, 5).case_two for x in (1, 2)]
    assert any(hits)


def test_reversal_symmetric_at_zero_transfer():
    for y in (0.5, 1, 2, 3):
        r = an.reversal_case_check(8, 0, y, 10, 10, 0.3, 3, 10, 10)
        assert r.case_one == r.case_two
        assert r.gain_a == r.gain_b and r.loss_a == r.loss_b


def test_reversal_domain():
    with pytest.raises(ValueError):
        an.reversal_case_check(8, 2, 2, 5, 25, 0.3, 1, 25, 5)
    with pytest.raises(ValueError):
        an.reversal_case_check(8, 1, 0, 5, 25, 0.3, 1, 25, 5)
