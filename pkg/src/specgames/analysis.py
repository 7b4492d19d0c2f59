"""Closed-form results for the idealised two-operator model.

Every operator's users see one SNR ``gamma`` on an unshared carrier and one
SINR ``gamma'`` on a shared carrier, with equal scheduling weights. Utility
is PF in base 10, so one carrier more or less changes an operator's utility
by ``N * log10`` of the carrier-count ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


@dataclass(frozen=True)
class AnalyticScenario:
    K: int
    N_a: float
    N_b: float
    gamma_a: float
    gamma_b: float
    gamma_a_shared: float
    gamma_b_shared: float

    def __post_init__(self):
        if self.K < 2:
            raise ValueError("K must be >= 2")
        for name in ("N_a", "N_b", "gamma_a", "gamma_b", "gamma_a_shared", "gamma_b_shared"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")

    @property
    def R_a(self) -> float:
        return rate_ratio(self.gamma_a, self.gamma_a_shared)

    @property
    def R_b(self) -> float:
        return rate_ratio(self.gamma_b, self.gamma_b_shared)


class Direction(str, Enum):
    TO_HIGH_LOAD = "to_high_load"
    TO_LOW_LOAD = "to_low_load"


def rate_ratio(gamma: float, gamma_prime: float) -> float:
    """Fraction of the interference-free rate kept on a shared carrier."""
    if not (gamma > 0 and gamma_prime > 0):
        raise ValueError("gamma and gamma_prime must be > 0")
    return math.log2(1.0 + gamma_prime) / math.log2(1.0 + gamma)


def coop_transfer_condition(sc: AnalyticScenario, direction: Direction | str) -> bool:
    """Does switching on one extra shared carrier raise the sum utility?

    ``to_high_load`` lets operator a add the carrier,
    ``to_low_load`` lets operator b add it. Evaluated in log form so large
    loads do not overflow.
    """
    direction = Direction(direction)
    K, Ra, Rb = sc.K, sc.R_a, sc.R_b
    if direction is Direction.TO_HIGH_LOAD:
        lhs = sc.N_a * math.log1p(2 * Ra / K) + sc.N_b * math.log1p(2 * (Rb - 1) / K)
    else:
        lhs = sc.N_a * math.log1p(2 * (Ra - 1) / K) + sc.N_b * math.log1p(2 * Rb / K)
    return lhs > 0.0


def equal_load_stability_threshold(K: float) -> tuple[float, float]:
    """Boundary ``2R(R-1)/K + 2R - 1 = 0`` for equal loads.

    Returns ``(R, gamma_db)``: below R (above gamma, with gamma' = 1) the
    equal orthogonal split is stable. ``K = inf`` gives the large-K limit.
    """
    if not K >= 2:
        raise ValueError("K must be >= 2")
    if math.isinf(K):
        R = 0.5
    else:
        a, b = 2.0 / K, 2.0 - 2.0 / K
        R = (-b + math.sqrt(b * b + 4 * a)) / (2 * a)
    gamma = 2.0 ** (1.0 / R) - 1.0
    return R, 10.0 * math.log10(gamma)


def transfer_objective(dk, K: float, N_a: float, N_b: float):
    """``(1 + 2dK/K)^Na (1 - 2dK/K)^Nb - 1``."""
    u = 2.0 * np.asarray(dk, dtype=float) / K
    return (1 + u) ** N_a * (1 - u) ** N_b - 1


def delta_k_limit(K: float, N_a: float, N_b: float) -> float:
    """Sum-utility-optimal carriers moved from the low- to the high-load operator.

    Stationary point ``(K/2)(Na-Nb)/(Na+Nb)`` of the transfer objective;
    zero when ``N_a <= N_b``.
    """
    if K <= 0 or N_a < 0 or N_b < 0:
        raise ValueError("K must be > 0 and loads >= 0")
    if N_a <= N_b:
        return 0.0
    dk = 0.5 * K * (N_a - N_b) / (N_a + N_b)
    dk = min(max(dk, 0.0), 0.5 * K)
    if not transfer_objective(dk, K, N_a, N_b) > 0:
        return 0.0
    return float(dk)


def pricing_feasible(p1: float, p2: float, K: float, N_high: float, N_low: float,
                     delta_k: float, log=math.log10) -> bool:
    """Whether ``(p1, p2)`` lets both operators accept a ``delta_k`` transfer.

    ``log`` is the logarithm on the right-hand sides (base 10 by default).
    """
    if not p1 > 0 or p2 == 0:
        return False
    if not (K > 0 and N_high > 0 and N_low > 0 and 0 < delta_k < K / 2):
        return False
    u = 2.0 * delta_k / K
    base = math.exp(p2 / 2)
    high = math.exp(p2 / 2 * (1 + u)) - base < N_high / p1 * log(1 + u)
    low = math.exp(p2 / 2 * (1 - u)) - base < N_low / p1 * log(1 - u)
    return high and low


def feasibility_grid(p1_values, p2_values, K: float, N_high: float, N_low: float,
                     delta_k: float, log=math.log10) -> list[tuple[float, float, bool]]:
    return [(float(p1), float(p2), pricing_feasible(p1, p2, K, N_high, N_low, delta_k, log))
            for p1 in p1_values for p2 in p2_values]


def immediate_gain(N: float, k_old: float, k_new: float) -> float:
    """``N * log10(k_new / k_old)`` for a carrier count that grows."""
    if k_old <= 0 or k_new < 0:
        raise ValueError("carrier counts must be positive")
    if k_new < k_old:
        raise ValueError("a gain needs k_new >= k_old")
    return N * math.log10(k_new / k_old)


def immediate_loss(N: float, k_old: float, k_new: float) -> float:
    """``N * log10(k_old / k_new)``; dropping to zero carriers is an infinite loss."""
    if k_old <= 0 or k_new < 0:
        raise ValueError("carrier counts must be positive")
    if k_new > k_old:
        raise ValueError("a loss needs k_new <= k_old")
    if k_new == 0:
        return math.inf
    return N * math.log10(k_old / k_new)


@dataclass(frozen=True)
class ReversalCheck:
    """Loads swapped after ``x`` carriers moved to operator a; both ask for ``y`` more.

    ``case_one``: the new low-load operator a still receives favors.
    ``case_two``: the new high-load operator b receives favors.
    ``case_one_necessary`` is the delta-free form ``G_a > L_b`` that case
    one implies.
    """

    case_one: bool
    case_two: bool
    case_one_necessary: bool
    gain_a: float
    loss_b: float
    gain_b: float
    loss_a: float
    exp_loss_a: float
    exp_gain_b: float
    exp_gain_a: float
    exp_loss_b: float


def reversal_case_check(K: float, x: float, y: float, N_a: float, N_b: float,
                        delta: float, h_a: int, N_a_prev: float, N_b_prev: float) -> ReversalCheck:
    """Evaluate both game-reversal cases.

    ``N_a_prev``/``N_b_prev`` are the loads before the swap, ``h_a`` the
    number of favors a received while the history was seeded with
    ``delta``. With ``x = 0`` nothing was transferred yet, so all expected
    values stay at ``delta``.
    """
    half = K / 2
    if not (x >= 0 and y > 0 and x + y < half):
        raise ValueError("need x >= 0, y > 0 and x + y < K/2")
    if h_a < 0 or delta < 0:
        raise ValueError("h_a and delta must be >= 0")
    if min(N_a, N_b, N_a_prev, N_b_prev) < 0:
        raise ValueError("loads must be >= 0")
    exp_loss_a = exp_gain_b = delta
    if x > 0:
        exp_gain_a = (h_a * delta + immediate_gain(N_a_prev, half, half + x)) / (h_a + 1)
        exp_loss_b = (h_a * delta + immediate_loss(N_b_prev, half, half - x)) / (h_a + 1)
    else:
        exp_gain_a = exp_loss_b = delta
    gain_a = immediate_gain(N_a, half + x, half + x + y)
    loss_b = immediate_loss(N_b, half - x, half - x - y)
    gain_b = immediate_gain(N_b, half - x, half - x + y)
    loss_a = immediate_loss(N_a, half + x, half + x - y)
    return ReversalCheck(
        case_one=gain_a > exp_loss_a and loss_b < exp_gain_b,
        case_two=gain_b > exp_loss_b and loss_a < exp_gain_a,
        case_one_necessary=gain_a > loss_b,
        gain_a=gain_a, loss_b=loss_b, gain_b=gain_b, loss_a=loss_a,
        exp_loss_a=exp_loss_a, exp_gain_b=exp_gain_b,
        exp_gain_a=exp_gain_a, exp_loss_b=exp_loss_b,
    )
