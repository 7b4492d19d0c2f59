"""Deployment generation, experiment orchestration and result statistics."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import ks_2samp

from .channel import CarrierAllocation, LinkArrays, gain_table
from .config import NUM_OPERATORS, ScenarioConfig, Scheme
from .game import (allocate_fullspread, allocate_orthogonal, new_state, play_deployment,
                   warm_start)
from .geometry import Deployment, make_deployment

log = logging.getLogger(__name__)

# first element of every RNG spawn key; keeps the streams disjoint
_DEPLOY, _GAME, _WARMUP = 0, 1, 2


def stream(master_seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=key))


def sample_loads(mean_loads, rng: np.random.Generator, truncate: bool = True) -> tuple[int, ...]:
    """Poisson loads; with ``truncate`` zero draws are redrawn (zero-truncated Poisson)."""
    loads = []
    for m in mean_loads:
        n = int(rng.poisson(m))
        while truncate and n == 0 and m > 0:
            n = int(rng.poisson(m))
        loads.append(n)
    return tuple(loads)


def generate_deployment(cfg: ScenarioConfig, rng: np.random.Generator,
                        mean_loads=None) -> Deployment:
    means = cfg.mean_loads if mean_loads is None else mean_loads
    return make_deployment(cfg, sample_loads(means, rng, cfg.truncate_zero_load), rng)


@dataclass(frozen=True)
class ExperimentPlan:
    base: ScenarioConfig
    schemes: tuple[Scheme, ...] = tuple(Scheme)
    surplus_values: tuple[int, ...] = ()
    num_deployments: int | None = None
    load_reversal_at: int | None = None
    master_seed: int | None = None

    def __post_init__(self):
        n = self.deployments
        if self.load_reversal_at is not None and not 0 <= self.load_reversal_at < n:
            raise ValueError("load_reversal_at must be < num_deployments")

    @property
    def deployments(self) -> int:
        return self.base.num_deployments if self.num_deployments is None else self.num_deployments

    @property
    def seed(self) -> int:
        return self.base.rng_seed if self.master_seed is None else self.master_seed

    def surpluses(self) -> tuple[int, ...]:
        return self.surplus_values or (self.base.surplus,)

    def runs(self) -> list[tuple[Scheme, int]]:
        """(scheme, surplus) pairs; the surplus only matters for the game schemes."""
        out = []
        for s in self.schemes:
            if s in (Scheme.GAME_PRICE, Scheme.GAME_HISTORY):
                out.extend((s, v) for v in self.surpluses())
            else:
                out.append((s, self.base.surplus))
        return out

    def means_at(self, d: int) -> tuple[float, float]:
        m = self.base.mean_loads
        if self.load_reversal_at is not None and d >= self.load_reversal_at:
            return (m[1], m[0])
        return tuple(m)


@dataclass
class SchemeResult:
    scheme: Scheme
    surplus: int
    # rates[phase][op] -> per-user rates (bits/s) pooled over that phase
    rates: list[list[np.ndarray]]
    scc_counts: np.ndarray            # (deployments, 2) active SCCs at end of deployment
    allocations: list[tuple]          # end-of-deployment allocation snapshots
    ledger: dict
    rounds: np.ndarray                # rounds played per deployment
    converged: np.ndarray             # cooperative fixpoint reached per deployment
    loads: np.ndarray                 # (deployments, 2) realised loads

    def rate_samples(self, op: int, phase: int | None = None) -> np.ndarray:
        phases = range(len(self.rates)) if phase is None else [phase]
        return np.concatenate([self.rates[p][op] for p in phases])

    def mean_scc(self) -> tuple[float, float]:
        return tuple(float(x) for x in self.scc_counts.mean(axis=0))


@dataclass
class ExperimentResult:
    plan: ExperimentPlan
    runs: dict = field(default_factory=dict)   # (scheme, surplus) -> SchemeResult

    def __getitem__(self, key) -> SchemeResult:
        if isinstance(key, Scheme):
            matches = [r for (s, _), r in self.runs.items() if s is key]
            if len(matches) != 1:
                raise KeyError(f"{key.value} has {len(matches)} runs; index by (scheme, surplus)")
            return matches[0]
        return self.runs[key]


def run_scheme(plan: ExperimentPlan, scheme: Scheme, surplus: int) -> SchemeResult:
    cfg = plan.base.with_(scheme=scheme, surplus=surplus)
    seed = plan.seed
    n = plan.deployments
    static = {Scheme.ORTHOGONAL: allocate_orthogonal, Scheme.FULLSPREAD: allocate_fullspread}
    state = new_state(cfg, stream(seed, _GAME, scheme.code), scheme=scheme)
    if scheme is Scheme.GAME_HISTORY and cfg.warmup_slots:
        state.rng = stream(seed, _WARMUP, scheme.code)
        warm_start(state, cfg, state.rng)

    n_phases = 1 if plan.load_reversal_at is None else 2
    rates: list[list[list[np.ndarray]]] = [[[] for _ in range(NUM_OPERATORS)] for _ in range(n_phases)]
    scc = np.zeros((n, NUM_OPERATORS))
    loads = np.zeros((n, NUM_OPERATORS), dtype=np.int64)
    rounds = np.zeros(n, dtype=np.int64)
    converged = np.zeros(n, dtype=bool)
    allocs = []
    for d in range(n):
        # deployments come from a stream shared by all schemes (common random numbers)
        dep = generate_deployment(cfg, stream(seed, _DEPLOY, d), plan.means_at(d))
        links = LinkArrays.build(gain_table(dep, cfg), cfg)
        state.rng = stream(seed, _GAME, scheme.code, d)
        state.first_mover = int(state.rng.integers(2))
        state.rounds = 0
        if scheme in static:
            state.alloc = static[scheme](cfg)
        elif scheme is Scheme.COOPERATIVE or not cfg.carry_allocation:
            state.alloc = allocate_orthogonal(cfg)
        play_deployment(state, links, cfg, scheme)
        phase = 0 if plan.load_reversal_at is None or d < plan.load_reversal_at else 1
        for op in range(NUM_OPERATORS):
            rates[phase][op].append(links.rates(op, state.alloc))
            scc[d, op] = state.alloc.scc_count(op, cfg)
        loads[d] = dep.loads
        rounds[d] = state.rounds
        converged[d] = state.converged
        allocs.append(state.alloc.as_tuple())
    pooled = [[np.concatenate(r) if r else np.zeros(0) for r in ph] for ph in rates]
    log.debug("%s S=%d mean SCC %s", scheme.value, surplus, scc.mean(axis=0))
    return SchemeResult(scheme, surplus, pooled, scc, allocs, state.ledger.snapshot(),
                        rounds, converged, loads)


def _run_one(args):
    return run_scheme(*args)


def run_experiment(plan: ExperimentPlan, jobs: int = 1) -> ExperimentResult:
    """Run every (scheme, surplus) pair of the plan.

    Runs are independent, so ``jobs > 1`` fans them out to worker processes;
    results are keyed, so the output does not depend on completion order.
    """
    keys = plan.runs()
    result = ExperimentResult(plan)
    if jobs > 1 and len(keys) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            outs = list(ex.map(_run_one, [(plan, s, v) for s, v in keys]))
    else:
        outs = [run_scheme(plan, s, v) for s, v in keys]
    for key, out in zip(keys, outs):
        result.runs[key] = out
    return result


def rate_cdf(samples, grid) -> np.ndarray:
    """Empirical CDF of ``samples`` evaluated at each point of ``grid``."""
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise ValueError("rate_cdf needs at least one sample")
    return np.searchsorted(x, np.asarray(grid, dtype=float), side="right") / x.size


def mean_scc_utilization(allocations, cfg: ScenarioConfig) -> tuple[float, float]:
    """Average active-SCC count per operator over end-of-deployment snapshots."""
    if not allocations:
        raise ValueError("need at least one allocation")
    counts = np.zeros(NUM_OPERATORS)
    for a in allocations:
        alloc = a if isinstance(a, CarrierAllocation) else CarrierAllocation.of(*a)
        counts += [alloc.scc_count(op, cfg) for op in range(NUM_OPERATORS)]
    return tuple(float(c) for c in counts / len(allocations))


def ks_distance(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic."""
    return float(ks_2samp(np.asarray(a, float), np.asarray(b, float)).statistic)
