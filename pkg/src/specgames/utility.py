"""Fairness-based operator utilities and the virtual carrier price.

All logarithms in utilities are base 10; ``log2`` only appears inside the
rate formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .channel import CarrierAllocation


class Fairness(str, Enum):
    MAX_THROUGHPUT = "max_throughput"
    PROPORTIONAL_FAIR = "proportional_fair"
    MAX_MIN_FAIR = "max_min_fair"
    WEIGHTED_ALPHA_FAIR = "weighted_alpha_fair"


@dataclass(frozen=True)
class FairnessCriterion:
    kind: Fairness = Fairness.PROPORTIONAL_FAIR
    alpha: float = 1.0
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind is Fairness.WEIGHTED_ALPHA_FAIR:
            if not self.alpha > 0:
                raise ValueError("alpha must be > 0")
            if self.weights is not None and any(w < 0 for w in self.weights):
                raise ValueError("alpha-fair weights must be >= 0")

    @classmethod
    def alpha_fair(cls, alpha: float, weights=None) -> "FairnessCriterion":
        if alpha == 1.0:
            # the alpha-fair form is undefined at 1; its limit is PF
            return cls(Fairness.PROPORTIONAL_FAIR)
        return cls(Fairness.WEIGHTED_ALPHA_FAIR, alpha,
                   None if weights is None else tuple(weights))


PF = FairnessCriterion()


def fairness_utility(rates: Sequence[float], criterion: FairnessCriterion = PF):
    """Utility of a rate vector under ``criterion``.

    Max-min fairness returns the ascending-sorted rate tuple: comparing two
    such tuples orders allocations lexicographically by their worst rates.
    PF with a zero rate returns ``-inf``.
    """
    x = np.asarray(rates, dtype=float)
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise ValueError("rates must be finite and non-negative")
    kind = criterion.kind
    if kind is Fairness.MAX_THROUGHPUT:
        return float(x.sum())
    if kind is Fairness.PROPORTIONAL_FAIR:
        if np.any(x == 0):
            return -math.inf
        return float(np.log10(x).sum())
    if kind is Fairness.MAX_MIN_FAIR:
        return tuple(np.sort(x).tolist())
    w = np.ones_like(x) if criterion.weights is None else np.asarray(criterion.weights, float)
    if w.shape != x.shape:
        raise ValueError("alpha-fair weights must match the number of rates")
    a = criterion.alpha
    return float(np.sum(w / (1.0 - a) * x ** (1.0 - a)))


@dataclass(frozen=True)
class PricingConstants:
    p1: float = 7.0
    p2: float = 0.8

    def __post_init__(self):
        if not self.p1 > 0:
            raise ValueError("p1 must be > 0")
        if self.p2 == 0:
            raise ValueError("p2 must be non-zero")


def carrier_utilization(alloc: CarrierAllocation, op: int) -> float:
    """Sum of per-carrier utilisation: 1 exclusive, 0.5 shared, 0 unused."""
    mine = alloc[op]
    shared = len(mine & alloc[1 - op])
    return (len(mine) - shared) + 0.5 * shared


def virtual_price(alloc: CarrierAllocation, op: int, num_carriers: int,
                  pc: PricingConstants) -> float:
    """``p1 * (exp(p2 * sum_k c_k / K) - 1)``, normalised by the total carrier count."""
    return pc.p1 * math.expm1(pc.p2 * carrier_utilization(alloc, op) / num_carriers)


def priced_utility(throughput_utility: float, price: float) -> float:
    return throughput_utility - price
