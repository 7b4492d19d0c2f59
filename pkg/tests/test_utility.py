import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from specgames.channel import CarrierAllocation
from specgames.utility import (PF, Fairness, FairnessCriterion, PricingConstants,
                               carrier_utilization, fairness_utility, priced_utility,
                               virtual_price)

rates = st.lists(st.floats(1e3, 1e9), min_size=1, max_size=12)


def test_pf_base10():
    assert fairness_utility([10, 10], PF) == pytest.approx(2.0)


def test_pf_gain_example():
    # 25 users each moving from 4 to 5 equal carriers
    before = fairness_utility([4.0] * 25)
    after = fairness_utility([5.0] * 25)
    assert after - before == pytest.approx(2.423, abs=1e-3)


def test_pf_zero_rate_sentinel():
    assert fairness_utility([5.0, 0.0]) == -math.inf


def test_negative_rate_rejected():
    with pytest.raises(ValueError):
        fairness_utility([1.0, -1.0])


def test_max_throughput():
    assert fairness_utility([1, 2, 3], FairnessCriterion(Fairness.MAX_THROUGHPUT)) == 6.0


def test_mmf_is_lexicographic():
    mmf = FairnessCriterion(Fairness.MAX_MIN_FAIR)
    assert fairness_utility([3, 1, 2], mmf) == (1.0, 2.0, 3.0)
    assert fairness_utility([2, 2, 9], mmf) > fairness_utility([1, 5, 9], mmf)


def test_alpha_one_routes_to_pf():
    assert FairnessCriterion.alpha_fair(1.0) == PF


def test_alpha_must_be_positive():
    with pytest.raises(ValueError):
        FairnessCriterion(Fairness.WEIGHTED_ALPHA_FAIR, alpha=0.0)


@settings(max_examples=100, deadline=None)
@given(rates)
def test_alpha_near_zero_is_throughput(x):
    c = FairnessCriterion.alpha_fair(1e-9)
    assert fairness_utility(x, c) == pytest.approx(sum(x), rel=1e-6)


@settings(max_examples=100, deadline=None)
@given(rates, st.randoms())
def test_pf_permutation_invariant(x, rnd):
    y = list(x)
    rnd.shuffle(y)
    assert fairness_utility(y) == pytest.approx(fairness_utility(x), rel=1e-12)


def test_price_examples():
    pc = PricingConstants(7, 0.8)
    none = CarrierAllocation.of([], range(8))
    full = CarrierAllocation.of(range(8), [])
    ortho = CarrierAllocation.of(range(4), range(4, 8))
    assert virtual_price(none, 0, 8, pc) == 0.0
    assert virtual_price(full, 0, 8, pc) == pytest.approx(8.5788, abs=1e-4)
    assert virtual_price(ortho, 0, 8, pc) == pytest.approx(7 * (math.exp(0.4) - 1))
    assert priced_utility(10.0, 0.0) == 10.0
    assert priced_utility(10.0, virtual_price(full, 0, 8, pc)) == pytest.approx(1.4212, abs=1e-4)


def test_shared_carrier_counts_half():
    alloc = CarrierAllocation.of({0, 1, 2}, {2, 7})
    assert carrier_utilization(alloc, 0) == 2.5
    assert carrier_utilization(alloc, 1) == 1.5


@settings(max_examples=100, deadline=None)
@given(st.sets(st.integers(0, 7)), st.sets(st.integers(0, 7)), st.integers(0, 7))
def test_price_strictly_increasing(a, b, k):
    pc = PricingConstants(7, 0.8)
    alloc = CarrierAllocation.of(a, b)
    if k in a:
        return
    # adding k raises c_k from 0 to 0.5 or 1
    assert virtual_price(alloc.toggled(0, k, True), 0, 8, pc) > virtual_price(alloc, 0, 8, pc)
    assert (virtual_price(alloc, 0, 8, pc) == 0) == (not a)


def test_pricing_constants_validated():
    with pytest.raises(ValueError):
        PricingConstants(0.0, 0.8)
    with pytest.raises(ValueError):
        PricingConstants(7.0, 0.0)
