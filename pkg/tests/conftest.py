import itertools

import numpy as np
import pytest

from specgames.channel import CarrierAllocation, LinkArrays, gain_table
from specgames.config import ScenarioConfig
from specgames.geometry import make_deployment


def build_links(cfg, loads, seed):
    rng = np.random.default_rng(seed)
    dep = make_deployment(cfg, loads, rng)
    table = gain_table(dep, cfg)
    return table, LinkArrays.build(table, cfg)


def all_allocations(cfg):
    """Every allocation pair over the SCC pool, PCCs always on."""
    scc = cfg.scc()
    subsets = [s for r in range(len(scc) + 1) for s in itertools.combinations(scc, r)]
    for sa in subsets:
        for sb in subsets:
            yield CarrierAllocation.of(set(cfg.pcc(0)) | set(sa), set(cfg.pcc(1)) | set(sb))


def sum_pf(links, alloc):
    return sum(links.pf(op, alloc) for op in (0, 1) if links.load(op))


@pytest.fixture
def cfg():
    return ScenarioConfig()


# acceptance gate lines, printed as one block at the end of the session
GATE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if GATE_LINES:
        terminalreporter.section("acceptance gate")
        for line in GATE_LINES:
            terminalreporter.write_line(line)
