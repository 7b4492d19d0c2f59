"""Carrier-allocation schemes: static splits, cooperative sharing and the two
noncooperative repeated games (virtual carrier price, mutual gain/loss history).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import CarrierAllocation, LinkArrays, gain_table
from .config import NUM_OPERATORS, ScenarioConfig, Scheme
from .geometry import make_deployment
from .utility import PricingConstants, priced_utility, virtual_price


def allocate_orthogonal(cfg: ScenarioConfig) -> CarrierAllocation:
    """Disjoint halves; operator a takes the extra carrier when K is odd."""
    K = cfg.num_carriers
    half = (K + 1) // 2
    return CarrierAllocation.of(range(half), range(half, K))


def allocate_fullspread(cfg: ScenarioConfig) -> CarrierAllocation:
    """Both operators on every carrier except the opponent's PCCs."""
    K = cfg.num_carriers
    return CarrierAllocation.of(set(range(K)) - set(cfg.pcc(1)),
                                set(range(K)) - set(cfg.pcc(0)))


class FavorLedger:
    """Favour bookkeeping shared by both operators.

    ``granted[i]`` counts consent-requiring proposals operator i accepted.
    ``losses[i]`` / ``gains[i]`` hold the utility losses i incurred while
    granting and the gains it collected while receiving; both start with
    ``seed_count`` copies of ``delta``. Counts exclude the seeds.
    """

    def __init__(self, delta: float = 0.0, seed_count: int = 0):
        self.delta = delta
        self.seed_count = seed_count
        self.granted = [0, 0]
        self.received = [0, 0]
        self.losses: list[list[float]] = [[delta] * seed_count for _ in range(NUM_OPERATORS)]
        self.gains: list[list[float]] = [[delta] * seed_count for _ in range(NUM_OPERATORS)]
        self._loss_sum = [delta * seed_count] * NUM_OPERATORS
        self._gain_sum = [delta * seed_count] * NUM_OPERATORS

    def outstanding(self, grantor: int) -> int:
        """Favours ``grantor`` has granted beyond those it received."""
        return self.granted[grantor] - self.granted[1 - grantor]

    def may_grant(self, grantor: int, surplus: int) -> bool:
        return self.outstanding(grantor) <= surplus

    def record(self, grantor: int, gain: float | None = None, loss: float | None = None) -> None:
        receiver = 1 - grantor
        self.granted[grantor] += 1
        self.received[receiver] += 1
        if gain is not None:
            self.gains[receiver].append(gain)
            self._gain_sum[receiver] += gain
        if loss is not None:
            self.losses[grantor].append(loss)
            self._loss_sum[grantor] += loss

    def expected_loss(self, op: int) -> float:
        n = len(self.losses[op])
        return self._loss_sum[op] / n if n else self.delta

    def expected_gain(self, op: int) -> float:
        n = len(self.gains[op])
        return self._gain_sum[op] / n if n else self.delta

    def snapshot(self) -> dict:
        return {
            "granted": tuple(self.granted),
            "received": tuple(self.received),
            "expected_loss": tuple(self.expected_loss(i) for i in range(NUM_OPERATORS)),
            "expected_gain": tuple(self.expected_gain(i) for i in range(NUM_OPERATORS)),
        }


def expected_loss(ledger: FavorLedger, op: int) -> float:
    return ledger.expected_loss(op)


def expected_gain(ledger: FavorLedger, op: int) -> float:
    return ledger.expected_gain(op)


class Action(str, Enum):
    SWITCH_ON_OWN = "switch_on_own"
    REQUEST_OPPONENT_OFF = "request_opponent_off"


@dataclass(frozen=True)
class StrategyProposal:
    proposer: int
    carrier: int
    action: Action
    needs_consent: bool
    result: CarrierAllocation


@dataclass(frozen=True)
class Decision:
    """Decision-time values of an accepted transition, kept for auditing."""

    scheme: Scheme
    proposal: StrategyProposal
    before: CarrierAllocation
    proposer_old: float
    proposer_new: float
    grantor_old: float
    grantor_new: float
    threshold_proposer: float = 0.0
    threshold_grantor: float = 0.0


@dataclass
class GameState:
    alloc: CarrierAllocation
    ledger: FavorLedger
    rng: np.random.Generator
    rounds: int = 0
    first_mover: int = 0
    converged: bool = False
    decisions: list[Decision] | None = None

    def accept(self, decision: Decision) -> None:
        self.alloc = decision.proposal.result
        if self.decisions is not None:
            self.decisions.append(decision)


def new_state(cfg: ScenarioConfig, rng: np.random.Generator, alloc: CarrierAllocation | None = None,
              record: bool = False, scheme: Scheme | None = None) -> GameState:
    seeded = (scheme or cfg.scheme) is Scheme.GAME_HISTORY
    ledger = FavorLedger(cfg.delta_init, cfg.delta_seed_count if seeded else 0)
    return GameState(alloc or allocate_orthogonal(cfg), ledger, rng,
                     decisions=[] if record else None)


def propose_strategy(state: GameState, proposer: int, links: LinkArrays,
                     cfg: ScenarioConfig) -> StrategyProposal | None:
    """Random single-carrier strategy for ``proposer`` over the SCC pool.

    Returns None when the proposer has no users or the drawn carrier offers
    no legal action (only the proposer uses it).
    """
    if links.load(proposer) == 0:
        return None
    scc = cfg.scc()
    if not scc:
        return None
    k = scc[int(state.rng.integers(len(scc)))]
    alloc = state.alloc
    mine, theirs = alloc.uses(proposer, k), alloc.uses(1 - proposer, k)
    if not mine:
        return StrategyProposal(proposer, k, Action.SWITCH_ON_OWN, theirs,
                                alloc.toggled(proposer, k, True))
    if theirs:
        return StrategyProposal(proposer, k, Action.REQUEST_OPPONENT_OFF, True,
                                alloc.toggled(1 - proposer, k, False))
    return None


def _pf(links: LinkArrays, op: int, alloc: CarrierAllocation) -> float:
    if links.load(op) == 0:
        return 0.0
    return links.pf(op, alloc)


def _priced(links: LinkArrays, op: int, alloc: CarrierAllocation, cfg: ScenarioConfig,
            pc: PricingConstants) -> float:
    if links.load(op) == 0:
        return 0.0
    return priced_utility(links.pf(op, alloc), virtual_price(alloc, op, cfg.num_carriers, pc))


def _proposal_order(state: GameState) -> tuple[int, int]:
    return (state.first_mover, 1 - state.first_mover)


def algo1_round(state: GameState, links: LinkArrays, cfg: ScenarioConfig,
                pc: PricingConstants | None = None) -> GameState:
    """One round of the virtual-carrier-price game: each operator proposes once."""
    pc = pc or PricingConstants(cfg.p1, cfg.p2)
    for i in _proposal_order(state):
        prop = propose_strategy(state, i, links, cfg)
        if prop is None:
            continue
        g = 1 - i
        old, new = state.alloc, prop.result
        u_old, u_new = _priced(links, i, old, cfg, pc), _priced(links, i, new, cfg, pc)
        if not u_new > u_old:
            continue
        if not prop.needs_consent:
            state.accept(Decision(Scheme.GAME_PRICE, prop, old, u_old, u_new, 0.0, 0.0))
            continue
        if links.load(g) == 0 or not state.ledger.may_grant(g, cfg.surplus):
            continue
        v_old, v_new = _priced(links, g, old, cfg, pc), _priced(links, g, new, cfg, pc)
        if v_new > v_old:
            state.accept(Decision(Scheme.GAME_PRICE, prop, old, u_old, u_new, v_old, v_new))
            state.ledger.record(g)
    state.rounds += 1
    return state


def algo2_round(state: GameState, links: LinkArrays, cfg: ScenarioConfig) -> GameState:
    """One round of the mutual-history game: each operator proposes once."""
    ledger = state.ledger
    for i in _proposal_order(state):
        prop = propose_strategy(state, i, links, cfg)
        if prop is None:
            continue
        g = 1 - i
        old, new = state.alloc, prop.result
        u_old, u_new = _pf(links, i, old), _pf(links, i, new)
        gain = u_new - u_old
        if not prop.needs_consent:
            if gain > 0:
                state.accept(Decision(Scheme.GAME_HISTORY, prop, old, u_old, u_new, 0.0, 0.0))
            continue
        l_hat = ledger.expected_loss(i)
        if not gain > l_hat:
            continue
        if links.load(g) == 0 or not ledger.may_grant(g, cfg.surplus):
            continue
        v_old, v_new = _pf(links, g, old), _pf(links, g, new)
        loss = v_old - v_new
        g_hat = ledger.expected_gain(g)
        if loss < g_hat:
            state.accept(Decision(Scheme.GAME_HISTORY, prop, old, u_old, u_new, v_old, v_new,
                                  l_hat, g_hat))
            # a grantor that ends up better off is recorded as a zero loss
            ledger.record(g, gain=gain, loss=max(loss, 0.0))
    state.rounds += 1
    return state


def cooperative_round(state: GameState, links: LinkArrays, cfg: ScenarioConfig,
                      max_passes: int = 100) -> GameState:
    """Sum-utility toggling with exact gain/loss exchange, run to a fixpoint.

    Each pass visits every (operator, SCC) pair in random order; the loop
    stops after a pass without change (``state.converged``) or
    ``max_passes``.
    """
    pairs = [(op, k) for op in range(NUM_OPERATORS) for k in cfg.scc()]
    state.converged = False
    for _ in range(max_passes):
        changed = False
        for idx in state.rng.permutation(len(pairs)):
            i, k = pairs[idx]
            o = 1 - i
            old = state.alloc
            using = old.uses(i, k)
            new = old.toggled(i, k, not using)
            d_own = _pf(links, i, new) - _pf(links, i, old)
            d_opp = _pf(links, o, new) - _pf(links, o, old)
            # add iff G_i > L_o ; drop iff L_i < G_o ; both mean the sum grows
            if (d_own > -d_opp) if not using else (-d_own < d_opp):
                action = Action.REQUEST_OPPONENT_OFF if using else Action.SWITCH_ON_OWN
                prop = StrategyProposal(i, k, action, False, new)
                state.accept(Decision(Scheme.COOPERATIVE, prop, old, 0.0, d_own, 0.0, d_opp))
                changed = True
        state.rounds += 1
        if not changed:
            state.converged = True
            break
    return state


def warm_start(state: GameState, cfg: ScenarioConfig, rng: np.random.Generator) -> GameState:
    """Seed the gain/loss history with single-user games.

    Plays ``cfg.warmup_slots`` rounds, each on a fresh deployment with one
    user per operator, then returns the allocation to the orthogonal start
    while keeping the ledger.
    """
    for _ in range(cfg.warmup_slots):
        dep = make_deployment(cfg, (1, 1), rng)
        links = LinkArrays.build(gain_table(dep, cfg), cfg)
        algo2_round(state, links, cfg)
    state.alloc = allocate_orthogonal(cfg)
    state.rounds = 0
    return state


def play_deployment(state: GameState, links: LinkArrays, cfg: ScenarioConfig,
                    scheme: Scheme) -> GameState:
    if scheme is Scheme.COOPERATIVE:
        return cooperative_round(state, links, cfg)
    if scheme is Scheme.GAME_PRICE:
        pc = PricingConstants(cfg.p1, cfg.p2)
        for _ in range(cfg.rounds_per_deployment):
            algo1_round(state, links, cfg, pc)
    elif scheme is Scheme.GAME_HISTORY:
        for _ in range(cfg.rounds_per_deployment):
            algo2_round(state, links, cfg)
    return state
