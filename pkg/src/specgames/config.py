"""Scenario configuration: radio parameters, floor layout and game constants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

NUM_OPERATORS = 2
OPERATOR_NAMES = ("a", "b")


class Scheme(str, Enum):
    ORTHOGONAL = "orthogonal"
    FULLSPREAD = "fullspread"
    COOPERATIVE = "cooperative"
    GAME_PRICE = "game_price"
    GAME_HISTORY = "game_history"

    @property
    def code(self) -> int:
        # stable integer used to derive RNG substreams; never reorder
        return _SCHEME_CODES[self]

    @property
    def is_static(self) -> bool:
        return self in (Scheme.ORTHOGONAL, Scheme.FULLSPREAD)


_SCHEME_CODES = {s: i for i, s in enumerate(Scheme)}


class ConfigError(ValueError):
    """Raised when a configuration value is missing, unknown or out of range."""


@dataclass(frozen=True)
class Room:
    x0: float
    y0: float
    x1: float
    y1: float
    owner: int

    def contains(self, x: float, y: float) -> bool:
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)


@dataclass(frozen=True)
class BaseStation:
    x: float
    y: float


@dataclass(frozen=True)
class FloorLayout:
    rooms: tuple[Room, ...]
    base_stations: tuple[BaseStation, ...]

    def room_of(self, x: float, y: float) -> int:
        hits = [i for i, r in enumerate(self.rooms) if r.contains(x, y)]
        if len(hits) != 1:
            raise ConfigError(f"point ({x}, {y}) lies in {len(hits)} rooms, expected 1")
        return hits[0]

    def bs_operator(self, bs: int) -> int:
        b = self.base_stations[bs]
        return self.rooms[self.room_of(b.x, b.y)].owner

    def operator_bs(self, operator: int) -> list[int]:
        return [i for i in range(len(self.base_stations)) if self.bs_operator(i) == operator]

    def operator_rooms(self, operator: int) -> list[int]:
        return [i for i, r in enumerate(self.rooms) if r.owner == operator]

    def validate(self) -> None:
        if not self.rooms:
            raise ConfigError("floor layout has no rooms")
        for i, r in enumerate(self.rooms):
            if not (r.x1 > r.x0 and r.y1 > r.y0):
                raise ConfigError(f"room.{i} has non-positive extent")
            if r.owner not in range(NUM_OPERATORS):
                raise ConfigError(f"room.{i}.owner must be 0 or 1")
        for i, b in enumerate(self.base_stations):
            # BS strictly inside one room (not on a shared wall)
            inside = [r for r in self.rooms if r.x0 < b.x < r.x1 and r.y0 < b.y < r.y1]
            if len(inside) != 1:
                raise ConfigError(f"bs.{i} must lie strictly inside exactly one room")
        for op in range(NUM_OPERATORS):
            if not self.operator_bs(op):
                raise ConfigError(f"operator {OPERATOR_NAMES[op]} has no base station")
            if not self.operator_rooms(op):
                raise ConfigError(f"operator {OPERATOR_NAMES[op]} owns no room")


def default_floor(room_size: float = 30.0) -> FloorLayout:
    """2x2 grid of square rooms, one BS per room centre, operators on the diagonals."""
    s = room_size
    rooms = (
        Room(0.0, 0.0, s, s, 0),
        Room(s, 0.0, 2 * s, s, 1),
        Room(0.0, s, s, 2 * s, 1),
        Room(s, s, 2 * s, 2 * s, 0),
    )
    bss = tuple(BaseStation((r.x0 + r.x1) / 2, (r.y0 + r.y1) / 2) for r in rooms)
    return FloorLayout(rooms, bss)


@dataclass(frozen=True)
class ScenarioConfig:
    carrier_freq_hz: float = 2.6e9
    carrier_bandwidth_hz: float = 12.5e6
    num_carriers: int = 8
    num_pcc: int = 1
    bs_tx_power_dbm: float = 30.0
    noise_figure_db: float = 15.0
    thermal_noise_dbm_per_hz: float = -174.0
    pathloss_exponent: float = 3.6
    attenuation_constant: float = 1e-4
    wall_loss_db: float = 0.0
    bw_efficiency: float = 0.56
    min_distance_m: float = 1.0
    floor: FloorLayout = field(default_factory=default_floor)
    mean_loads: tuple[float, float] = (25.0, 5.0)
    truncate_zero_load: bool = True
    scheme: Scheme = Scheme.ORTHOGONAL
    p1: float = 7.0
    p2: float = 0.8
    surplus: int = 2
    delta_init: float = 0.3
    delta_seed_count: int = 1
    warmup_slots: int = 100
    rounds_per_deployment: int = 30
    num_deployments: int = 1000
    carry_allocation: bool = True
    rng_seed: int = 1

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.num_carriers < 2:
            raise ConfigError("num_carriers must be >= 2")
        if self.num_pcc < 1:
            raise ConfigError("num_pcc must be >= 1")
        if 2 * self.num_pcc > self.num_carriers:
            raise ConfigError("num_pcc: 2*num_pcc must not exceed num_carriers")
        if not 0.0 < self.bw_efficiency <= 1.0:
            raise ConfigError("bw_efficiency must lie in (0, 1]")
        if self.pathloss_exponent <= 0:
            raise ConfigError("pathloss_exponent must be > 0")
        if self.attenuation_constant <= 0:
            raise ConfigError("attenuation_constant must be > 0")
        if self.wall_loss_db < 0:
            raise ConfigError("wall_loss_db must be >= 0")
        if self.carrier_bandwidth_hz <= 0:
            raise ConfigError("carrier_bandwidth_hz must be > 0")
        if self.min_distance_m <= 0:
            raise ConfigError("min_distance_m must be > 0")
        if self.surplus < 0:
            raise ConfigError("surplus must be >= 0")
        if self.p1 <= 0:
            raise ConfigError("p1 must be > 0")
        if self.p2 == 0:
            raise ConfigError("p2 must be non-zero")
        if self.delta_init < 0:
            raise ConfigError("delta_init must be >= 0")
        if self.delta_seed_count < 0:
            raise ConfigError("delta_seed_count must be >= 0")
        for name in ("warmup_slots", "rounds_per_deployment", "num_deployments"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if len(self.mean_loads) != NUM_OPERATORS or any(m < 0 for m in self.mean_loads):
            raise ConfigError("mean_loads must be two non-negative values")
        self.floor.validate()

    @property
    def num_scc(self) -> int:
        return self.num_carriers - NUM_OPERATORS * self.num_pcc

    def pcc(self, operator: int) -> tuple[int, ...]:
        """Carrier indices (0-based) reserved for ``operator``.

        Operator a holds the lowest ``num_pcc`` carriers and operator b the
        highest, so each operator's PCCs fall inside its half of the
        orthogonal split.
        """
        K, p = self.num_carriers, self.num_pcc
        return tuple(range(p)) if operator == 0 else tuple(range(K - p, K))

    def scc(self) -> tuple[int, ...]:
        reserved = set(self.pcc(0)) | set(self.pcc(1))
        return tuple(k for k in range(self.num_carriers) if k not in reserved)

    @property
    def tx_power_mw(self) -> float:
        return 10.0 ** (self.bs_tx_power_dbm / 10.0)

    @property
    def noise_dbm(self) -> float:
        return (self.thermal_noise_dbm_per_hz + self.noise_figure_db
                + 10.0 * math.log10(self.carrier_bandwidth_hz))

    @property
    def noise_mw(self) -> float:
        return 10.0 ** (self.noise_dbm / 10.0)

    def with_(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)
