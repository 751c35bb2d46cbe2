from fractions import Fraction

import pytest

from oddwalk.chain import StationaryDistribution, TransitionKernel
from oddwalk.contingency import Margins, contingency_chain
from oddwalk.matchings import HostGraph, matchings_chain
from oddwalk.switch import switch_chain

F = Fraction

SWITCH_INSTANCES = [(4, 1), (5, 2), (6, 3)]
MATCHING_HOSTS = {
    "P4": HostGraph.path(4),
    "C6": HostGraph.cycle(6),
    "grid3x2": HostGraph.grid(3, 2),
}
CONTINGENCY_MARGINS = [
    ((2, 2, 2), (2, 2, 2)),
    ((2, 1, 1), (2, 1, 1)),
    ((3, 2), (2, 2, 1)),
]


def two_state(p01, p10):
    return TransitionKernel.from_matrix([[1 - F(p01), F(p01)], [F(p10), 1 - F(p10)]])


def uniform(n):
    return StationaryDistribution.uniform(n)


@pytest.fixture(scope="session")
def family_chains():
    """Every chain instance used by the acceptance criteria, built once."""
    chains = {}
    for n, d in SWITCH_INSTANCES:
        chains[f"switch n={n} d={d}"] = switch_chain(n, d)
    for name, G in MATCHING_HOSTS.items():
        chains[f"matchings {name}"] = matchings_chain(G)
    for r, c in CONTINGENCY_MARGINS:
        chains[f"contingency r={r} c={c}"] = contingency_chain(Margins(r, c))
    return chains
