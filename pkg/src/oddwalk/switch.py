"""The switch chain on labelled d-regular graphs.

From G, pick an unordered pair of non-incident edges uniformly, then one of
the three perfect matchings of their four endpoints uniformly. The result is
accepted when it is a simple graph and rejected (stay at G) otherwise.
Graphs are stored as bitmasks over the C(n, 2) vertex pairs, in the order
of ``itertools.combinations(range(n), 2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb

from .chain import DEFAULT_MAX_STATES, Chain, StationaryDistribution, assemble, bfs_closure, describe
from .errors import ChainError, InfeasibleParameters

LITERATURE_LAMBDA1 = "O(d^23 n^8)"


@lru_cache(maxsize=None)
def _pair_index(n: int) -> dict[tuple[int, int], int]:
    return {p: k for k, p in enumerate(combinations(range(n), 2))}


def _pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class RegularGraph:
    n: int
    d: int
    mask: int

    @classmethod
    def from_edges(cls, n: int, d: int, edges) -> "RegularGraph":
        idx = _pair_index(n)
        mask = 0
        for a, b in edges:
            if a == b:
                raise ChainError("loops are not allowed")
            bit = 1 << idx[_pair(a, b)]
            if mask & bit:
                raise ChainError(f"repeated edge {a}-{b}")
            mask |= bit
        g = cls(n, d, mask)
        g.validate()
        return g

    def edges(self) -> list[tuple[int, int]]:
        return [p for p, k in _pair_index(self.n).items() if self.mask >> k & 1]

    def has_edge(self, a: int, b: int) -> bool:
        return bool(self.mask >> _pair_index(self.n)[_pair(a, b)] & 1)

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for a, b in self.edges():
            deg[a] += 1
            deg[b] += 1
        return deg

    def validate(self) -> None:
        check_feasible(self.n, self.d)
        if any(k != self.d for k in self.degrees()):
            raise ChainError(f"graph is not {self.d}-regular")

    def encode(self) -> bytes:
        width = (comb(self.n, 2) + 7) // 8
        return self.mask.to_bytes(width, "big")


def check_feasible(n: int, d: int) -> None:
    if d < 1:
        raise InfeasibleParameters("degree d must be at least 1")
    if n < d + 1:
        raise InfeasibleParameters(f"need n >= d + 1, got n={n}, d={d}")
    if n * d % 2:
        raise InfeasibleParameters(f"n*d must be even, got n={n}, d={d}")


def seed_graph(n: int, d: int) -> RegularGraph:
    """Circulant seed: i ~ i +- k for k <= d // 2, plus i ~ i + n/2 if d is odd."""
    check_feasible(n, d)
    edges = set()
    for i in range(n):
        for k in range(1, d // 2 + 1):
            edges.add(_pair(i, (i + k) % n))
        if d % 2:
            edges.add(_pair(i, (i + n // 2) % n))
    return RegularGraph.from_edges(n, d, sorted(edges))


def non_incident_pair_count(n: int, d: int) -> int:
    """C(nd/2, 2) - n C(d, 2): pairs of disjoint edges in any d-regular graph."""
    return comb(n * d // 2, 2) - n * comb(d, 2)


def switch_kernel_row(G: RegularGraph) -> list[tuple[RegularGraph, Fraction]]:
    idx = _pair_index(G.n)
    edges = G.edges()
    pairs = [(e, f) for e, f in combinations(edges, 2) if not set(e) & set(f)]
    M = len(pairs)
    if M == 0:
        raise ChainError(
            f"no pair of non-incident edges in a {G.d}-regular graph on {G.n} vertices; "
            "the chain is degenerate"
        )
    if M != non_incident_pair_count(G.n, G.d):
        raise AssertionError(f"non-incident pair count {M} disagrees with the closed form")
    step = Fraction(1, 3 * M)
    row: dict[int, Fraction] = {}
    stay = Fraction(0)
    for (a, b), (c, e) in pairs:
        base = G.mask & ~(1 << idx[(a, b)]) & ~(1 << idx[(c, e)])
        stay += step  # the matching {ab, ce} reproduces G
        for (u, v), (x, y) in (((a, c), (b, e)), ((a, e), (b, c))):
            b1, b2 = 1 << idx[_pair(u, v)], 1 << idx[_pair(x, y)]
            if base & b1 or base & b2:
                stay += step
            else:
                target = base | b1 | b2
                row[target] = row.get(target, Fraction(0)) + step
    row[G.mask] = row.get(G.mask, Fraction(0)) + stay
    return sorted(((RegularGraph(G.n, G.d, m), p) for m, p in row.items()),
                  key=lambda t: t[0].mask)


def switch_chain(n: int, d: int, max_states: int = DEFAULT_MAX_STATES) -> Chain:
    seed = seed_graph(n, d)
    rows = bfs_closure(seed, lambda g: dict(switch_kernel_row(g)), max_states)
    space, kernel, _ = assemble(rows, RegularGraph.encode)
    return Chain(space, kernel, StationaryDistribution.uniform(space.N),
                 describe("switch", space.N, n=n, d=d))


def enumerate_regular(n: int, d: int, max_states: int = DEFAULT_MAX_STATES):
    """State space of all d-regular graphs reachable from the circulant seed."""
    return switch_chain(n, d, max_states).space


def decode(space, n: int, d: int) -> list[RegularGraph]:
    return [RegularGraph(n, d, int.from_bytes(s, "big")) for s in space.states]


def switch_analysis(n: int, d: int, **options) -> dict:
    """Self-loop walk set analysis; congestion is at most 3."""
    from .analysis import analyze_self_loop_family
    from .oracle import count_regular_graphs

    chain = switch_chain(n, d, options.pop("max_states", DEFAULT_MAX_STATES))
    return analyze_self_loop_family(
        chain,
        holding_floor=Fraction(1, 3),
        literature={"lambda_1_inverse_best_known": LITERATURE_LAMBDA1},
        direct_count=lambda: count_regular_graphs(n, d),
        **options,
    )
