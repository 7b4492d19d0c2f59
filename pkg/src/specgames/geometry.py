"""Floor geometry: wall crossings and user placement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import NUM_OPERATORS, FloorLayout, ScenarioConfig


def wall_segments(floor: FloorLayout) -> np.ndarray:
    """Unique room-boundary segments as an (n, 4) array of x0, y0, x1, y1.

    Walls shared by two adjacent rooms appear once.
    """
    seen = set()
    for r in floor.rooms:
        corners = [(r.x0, r.y0), (r.x1, r.y0), (r.x1, r.y1), (r.x0, r.y1)]
        for p, q in zip(corners, corners[1:] + corners[:1]):
            seen.add(tuple(sorted((p, q))))
    segs = sorted(seen)
    return np.array([[p[0], p[1], q[0], q[1]] for p, q in segs], dtype=float)


def walls_crossed(src: tuple[float, float], dst: np.ndarray, walls: np.ndarray) -> np.ndarray:
    """Number of wall segments crossed by the straight line from ``src`` to each row of ``dst``.

    ``dst`` is an (n, 2) array. A crossing needs the line parameter strictly
    inside (0, 1) and the wall parameter in [0, 1), so a path through a
    corner where walls meet counts each wall direction once.
    """
    dst = np.atleast_2d(np.asarray(dst, dtype=float))
    ax, ay = src
    dx = dst[:, 0] - ax
    dy = dst[:, 1] - ay
    counts = np.zeros(len(dst), dtype=np.int64)
    for cx, cy, ex, ey in walls:
        wx, wy = ex - cx, ey - cy
        denom = dx * wy - dy * wx
        ok = np.abs(denom) > 1e-12
        safe = np.where(ok, denom, 1.0)
        t = ((cx - ax) * wy - (cy - ay) * wx) / safe
        s = ((cx - ax) * dy - (cy - ay) * dx) / safe
        eps = 1e-12
        hit = ok & (t > eps) & (t < 1 - eps) & (s >= -eps) & (s < 1 - eps)
        counts += hit
    return counts


@dataclass(frozen=True)
class Deployment:
    """One Monte-Carlo realisation: user positions per operator."""

    positions: tuple[np.ndarray, ...]

    @property
    def loads(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.positions)


def sample_positions(floor: FloorLayout, operator: int, n: int, rng: np.random.Generator) -> np.ndarray:
    rooms = [floor.rooms[i] for i in floor.operator_rooms(operator)]
    area = np.array([r.area for r in rooms])
    pick = rng.choice(len(rooms), size=n, p=area / area.sum())
    u = rng.random((n, 2))
    lo = np.array([[rooms[i].x0, rooms[i].y0] for i in pick]).reshape(n, 2)
    hi = np.array([[rooms[i].x1, rooms[i].y1] for i in pick]).reshape(n, 2)
    return lo + u * (hi - lo)


def make_deployment(cfg: ScenarioConfig, loads, rng: np.random.Generator) -> Deployment:
    return Deployment(tuple(sample_positions(cfg.floor, op, int(loads[op]), rng)
                            for op in range(NUM_OPERATORS)))
