"""Physical layer: path loss, channel gains, SINR, user rates and throughput.

Two evaluation routes exist. ``sinr``/``user_rate``/``operator_throughput``
walk the full gain table carrier by carrier and are the reference. The
``LinkArrays`` path exploits frequency-flat gains (a user's SINR only depends
on whether the opponent also uses the carrier) and feeds the compiled
kernels used by the game engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .config import NUM_OPERATORS, ScenarioConfig
from .geometry import Deployment, wall_segments, walls_crossed


def path_loss_db(distance_m, walls_crossed: int | np.ndarray, cfg: ScenarioConfig):
    """Power-law path loss ``A*10*log10(d) + 10*log10(1/C) + walls*W`` in dB.

    Distances below ``cfg.min_distance_m`` are clamped to it.
    """
    d = np.asarray(distance_m, dtype=float)
    if not np.all(np.isfinite(d)) or np.any(d < 0):
        raise ValueError("distance must be finite and non-negative")
    w = np.asarray(walls_crossed)
    if np.any(w < 0):
        raise ValueError("walls_crossed must be >= 0")
    d = np.maximum(d, cfg.min_distance_m)
    pl = (cfg.pathloss_exponent * 10.0 * np.log10(d)
          + 10.0 * math.log10(1.0 / cfg.attenuation_constant)
          + w * cfg.wall_loss_db)
    return float(pl) if pl.ndim == 0 else pl


@dataclass(frozen=True)
class CarrierAllocation:
    """Active carrier sets (0-based indices) of operators a and b."""

    active: tuple[frozenset, frozenset]

    @classmethod
    def of(cls, a, b) -> "CarrierAllocation":
        return cls((frozenset(a), frozenset(b)))

    def __getitem__(self, op: int) -> frozenset:
        return self.active[op]

    def count(self, op: int) -> int:
        return len(self.active[op])

    def shared(self) -> frozenset:
        return self.active[0] & self.active[1]

    def uses(self, op: int, k: int) -> bool:
        return k in self.active[op]

    def toggled(self, op: int, k: int, on: bool) -> "CarrierAllocation":
        sets = list(self.active)
        sets[op] = sets[op] | {k} if on else sets[op] - {k}
        return CarrierAllocation((sets[0], sets[1]))

    def scc_count(self, op: int, cfg: ScenarioConfig) -> int:
        return len(self.active[op] - set(cfg.pcc(op)))

    def validate(self, cfg: ScenarioConfig) -> None:
        K = cfg.num_carriers
        for op in range(NUM_OPERATORS):
            own = set(cfg.pcc(op))
            other = set(cfg.pcc(1 - op))
            if not all(0 <= k < K for k in self.active[op]):
                raise ValueError(f"operator {op} uses a carrier outside 0..{K - 1}")
            if not own <= self.active[op]:
                raise ValueError(f"operator {op} dropped one of its PCCs")
            if self.active[op] & other:
                raise ValueError(f"operator {op} uses an opponent PCC")

    def as_tuple(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return tuple(sorted(self.active[0])), tuple(sorted(self.active[1]))


@dataclass(frozen=True)
class ChannelGainTable:
    """Linear power gains from every BS (rows) to every user (columns)."""

    gains: np.ndarray
    user_operator: np.ndarray
    serving_bs: np.ndarray
    bs_operator: np.ndarray

    @property
    def num_users(self) -> int:
        return self.gains.shape[1]

    def users_of(self, op: int) -> np.ndarray:
        return np.flatnonzero(self.user_operator == op)

    def bs_loads(self) -> np.ndarray:
        return np.bincount(self.serving_bs, minlength=self.gains.shape[0])


def gain_table(dep: Deployment, cfg: ScenarioConfig) -> ChannelGainTable:
    """Gains for a deployment; each user attaches to its strongest own-operator BS."""
    floor = cfg.floor
    pos = np.concatenate([np.reshape(p, (-1, 2)) for p in dep.positions], axis=0).astype(float)
    user_op = np.concatenate([np.full(len(p), op, dtype=np.int64)
                              for op, p in enumerate(dep.positions)])
    walls = wall_segments(floor)
    n_bs = len(floor.base_stations)
    bs_op = np.array([floor.bs_operator(b) for b in range(n_bs)], dtype=np.int64)
    g = np.empty((n_bs, len(pos)))
    for b, bs in enumerate(floor.base_stations):
        d = np.hypot(pos[:, 0] - bs.x, pos[:, 1] - bs.y)
        n_walls = walls_crossed((bs.x, bs.y), pos, walls)
        g[b] = 10.0 ** (-path_loss_db(d, n_walls, cfg) / 10.0)
    serving = np.empty(len(pos), dtype=np.int64)
    for op in range(NUM_OPERATORS):
        own = np.flatnonzero(bs_op == op)
        idx = np.flatnonzero(user_op == op)
        if len(idx):
            serving[idx] = own[np.argmax(g[np.ix_(own, idx)], axis=0)]
    return ChannelGainTable(g, user_op, serving, bs_op)


def equal_share_weights(load: int, active, num_carriers: int) -> np.ndarray:
    """Equal time shares ``1/load`` on every active carrier, as a (load, K) array."""
    if load < 0:
        raise ValueError("load must be >= 0")
    w = np.zeros((load, num_carriers))
    if load:
        w[:, sorted(active)] = 1.0 / load
    return w


def schedule_weights(table: ChannelGainTable, alloc: CarrierAllocation,
                     cfg: ScenarioConfig) -> np.ndarray:
    """Per-user, per-carrier weights, each BS sharing time equally among its users."""
    w = np.zeros((table.num_users, cfg.num_carriers))
    loads = table.bs_loads()
    for b in range(table.gains.shape[0]):
        users = np.flatnonzero(table.serving_bs == b)
        if len(users):
            op = table.bs_operator[b]
            w[users] = equal_share_weights(loads[b], alloc[op], cfg.num_carriers)
    return w


def _check_simplex(weights: np.ndarray, table: ChannelGainTable, user: int,
                   alloc: CarrierAllocation) -> None:
    if np.any(weights < 0):
        raise ValueError("scheduling weights must be non-negative")
    peers = table.serving_bs == table.serving_bs[user]
    op = table.user_operator[user]
    for k in alloc[op]:
        if abs(weights[peers, k].sum() - 1.0) > 1e-9:
            raise ValueError(f"weights on carrier {k} do not sum to 1 for the serving BS")


def sinr(user: int, carrier: int, alloc: CarrierAllocation, table: ChannelGainTable,
         cfg: ScenarioConfig) -> float:
    op = table.user_operator[user]
    if carrier not in alloc[op]:
        raise ValueError(f"carrier {carrier} is not active for operator {op}")
    p = cfg.tx_power_mw
    signal = p / alloc.count(op) * table.gains[table.serving_bs[user], user]
    interference = 0.0
    for b in range(table.gains.shape[0]):
        q = table.bs_operator[b]
        if q != op and carrier in alloc[q]:
            interference += p / alloc.count(q) * table.gains[b, user]
    return signal / (interference + cfg.noise_mw)


def user_rate(user: int, alloc: CarrierAllocation, weights: np.ndarray,
              table: ChannelGainTable, cfg: ScenarioConfig) -> float:
    """``BW_eff * BW * sum_k w_k log2(1 + SINR_k)`` in bits/s."""
    _check_simplex(weights, table, user, alloc)
    op = table.user_operator[user]
    total = 0.0
    for k in sorted(alloc[op]):
        if weights[user, k]:
            total += weights[user, k] * math.log2(1.0 + sinr(user, k, alloc, table, cfg))
    return cfg.bw_efficiency * cfg.carrier_bandwidth_hz * total


def operator_throughput(op: int, alloc: CarrierAllocation, weights: np.ndarray,
                        table: ChannelGainTable, cfg: ScenarioConfig) -> float:
    return sum(user_rate(int(u), alloc, weights, table, cfg) for u in table.users_of(op))


@dataclass(frozen=True)
class LinkArrays:
    """Per-operator compact inputs for the rate kernels.

    ``sig``: gain from the serving BS; ``intf``: summed gain from all
    opponent BSs; ``w``: equal time share of the serving BS.
    """

    sig: tuple[np.ndarray, np.ndarray]
    intf: tuple[np.ndarray, np.ndarray]
    w: tuple[np.ndarray, np.ndarray]
    p_mw: float
    noise_mw: float
    bw_scale: float

    @classmethod
    def build(cls, table: ChannelGainTable, cfg: ScenarioConfig) -> "LinkArrays":
        loads = table.bs_loads()
        sig, intf, w = [], [], []
        for op in range(NUM_OPERATORS):
            users = table.users_of(op)
            opp_bs = np.flatnonzero(table.bs_operator != op)
            serving = table.serving_bs[users]
            sig.append(np.ascontiguousarray(table.gains[serving, users]))
            intf.append(np.ascontiguousarray(table.gains[np.ix_(opp_bs, users)].sum(axis=0)))
            w.append(np.ascontiguousarray(1.0 / loads[serving], dtype=float))
        return cls(tuple(sig), tuple(intf), tuple(w), cfg.tx_power_mw, cfg.noise_mw,
                   cfg.bw_efficiency * cfg.carrier_bandwidth_hz)

    def load(self, op: int) -> int:
        return len(self.sig[op])

    def _args(self, op: int, alloc: CarrierAllocation):
        return (self.sig[op], self.intf[op], self.w[op], alloc.count(op),
                len(alloc.shared()), alloc.count(1 - op),
                self.p_mw, self.noise_mw, self.bw_scale)

    def rates(self, op: int, alloc: CarrierAllocation) -> np.ndarray:
        return kernels.user_rates(*self._args(op, alloc))

    def pf(self, op: int, alloc: CarrierAllocation) -> float:
        return kernels.pf_utility(*self._args(op, alloc))
