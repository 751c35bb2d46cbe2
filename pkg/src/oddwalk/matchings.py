"""Chain on perfect and near-perfect matchings of a host graph.

A step picks an edge e of the host graph uniformly and then

* removes e if M is perfect and e is in M,
* adds e if M is near-perfect and both endpoints of e are uncovered,
* slides to (M - e') + e if M is near-perfect and exactly one endpoint of e
  is uncovered, e' being the edge of M covering the other endpoint,
* otherwise stays at M. This includes a near-perfect M with e in M.

Matchings are bitmasks over the host graph's edge list.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .chain import (
    DEFAULT_MAX_STATES,
    Chain,
    StateSpace,
    StationaryDistribution,
    TransitionKernel,
    check_ergodicity,
    describe,
)
from .errors import ChainError, InfeasibleParameters, StateCapExceeded

LITERATURE_LAMBDA1 = "O(n|E|q(n))"

PERFECT_MATCHING_HOST = (
    "the host graph is itself a perfect matching: perfect-matching states have "
    "no self-loop, so P(M,M) >= 1/|E| fails and the |E|/2 bound does not apply"
)


@dataclass(frozen=True)
class HostGraph:
    n: int
    edges: tuple[tuple[int, int], ...]  # 0-based, index = position

    def __post_init__(self):
        if self.n < 4:
            raise InfeasibleParameters(f"host graph needs at least 4 vertices, got {self.n}")
        if self.n % 2:
            raise InfeasibleParameters(f"host graph needs an even number of vertices, got {self.n}")
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ChainError(f"edge {u + 1}-{v + 1} has a vertex outside 1..{self.n}")
            if u == v:
                raise ChainError(f"loop at vertex {u + 1}")
            key = frozenset((u, v))
            if key in seen:
                raise ChainError(f"repeated edge {u + 1}-{v + 1}")
            seen.add(key)

    @property
    def m(self) -> int:
        return len(self.edges)

    def is_connected(self) -> bool:
        adj = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        seen, queue = {0}, deque([0])
        while queue:
            for y in adj[queue.popleft()]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return len(seen) == self.n

    def is_perfect_matching(self) -> bool:
        covered = [v for e in self.edges for v in e]
        return len(covered) == self.n and len(set(covered)) == self.n

    @classmethod
    def path(cls, n: int) -> "HostGraph":
        return cls(n, tuple((i, i + 1) for i in range(n - 1)))

    @classmethod
    def cycle(cls, n: int) -> "HostGraph":
        return cls(n, tuple((i, (i + 1) % n) for i in range(n)))

    @classmethod
    def grid(cls, rows: int, cols: int) -> "HostGraph":
        def v(i, j):
            return i * cols + j

        edges = []
        for i in range(rows):
            for j in range(cols):
                if j + 1 < cols:
                    edges.append((v(i, j), v(i, j + 1)))
                if i + 1 < rows:
                    edges.append((v(i, j), v(i + 1, j)))
        return cls(rows * cols, tuple(edges))


def parse_graph(text: str) -> HostGraph:
    """Parse ``n m`` followed by m lines ``u v`` (1-based); ``#`` starts a comment."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line))
    if not lines:
        raise ChainError("graph file is empty")

    def ints(lineno, line):
        parts = line.split()
        if len(parts) != 2:
            raise ChainError(f"line {lineno}: expected two integers, got {line!r}")
        try:
            return int(parts[0]), int(parts[1])
        except ValueError:
            raise ChainError(f"line {lineno}: expected two integers, got {line!r}") from None

    n, m = ints(*lines[0])
    body = lines[1:]
    if len(body) != m:
        raise ChainError(f"header announces {m} edges but the file lists {len(body)}")
    edges = []
    for lineno, line in body:
        u, v = ints(lineno, line)
        if not (1 <= u <= n and 1 <= v <= n):
            raise ChainError(f"line {lineno}: vertex labels must lie in 1..{n}")
        edges.append((u - 1, v - 1))
    return HostGraph(n, tuple(edges))


def read_graph(path: str | os.PathLike) -> HostGraph:
    with open(path) as fh:
        return parse_graph(fh.read())


@dataclass(frozen=True)
class Matching:
    mask: int

    def edge_indices(self) -> list[int]:
        return [k for k in range(self.mask.bit_length()) if self.mask >> k & 1]

    @property
    def size(self) -> int:
        return bin(self.mask).count("1")

    def encode(self, m: int) -> bytes:
        return self.mask.to_bytes((m + 7) // 8, "big")


def _matchings_of_sizes(G: HostGraph, sizes: set[int], cap: int) -> list[int]:
    found = []

    def extend(k: int, mask: int, used: int, size: int):
        if size in sizes:
            found.append(mask)
            if len(found) > cap:
                raise StateCapExceeded(cap)
        if size == max(sizes):
            return
        for j in range(k, G.m):
            u, v = G.edges[j]
            bits = 1 << u | 1 << v
            if not used & bits:
                extend(j + 1, mask | 1 << j, used | bits, size + 1)

    extend(0, 0, 0, 0)
    return found


def matchings_kernel_row(M: Matching, G: HostGraph) -> list[tuple[Matching, Fraction]]:
    half = G.n // 2
    cover = {}
    for k in M.edge_indices():
        u, v = G.edges[k]
        cover[u] = cover[v] = k
    if len(cover) != 2 * M.size or M.size not in (half, half - 1):
        raise ChainError("not a perfect or near-perfect matching of the host graph")
    perfect = M.size == half
    step = Fraction(1, G.m)
    row: dict[int, Fraction] = {}
    for k, (u, v) in enumerate(G.edges):
        in_m = bool(M.mask >> k & 1)
        target = M.mask
        if perfect:
            if in_m:
                target = M.mask & ~(1 << k)
        elif not in_m:
            cu, cv = u in cover, v in cover
            if not cu and not cv:
                target = M.mask | 1 << k
            elif cu != cv:
                other = cover[u] if cu else cover[v]
                target = (M.mask & ~(1 << other)) | 1 << k
        row[target] = row.get(target, Fraction(0)) + step
    return [(Matching(t), p) for t, p in sorted(row.items())]


def matchings_chain(G: HostGraph, max_states: int = DEFAULT_MAX_STATES) -> Chain:
    if not G.is_connected():
        raise InfeasibleParameters("host graph must be connected")
    half = G.n // 2
    masks = _matchings_of_sizes(G, {half, half - 1}, max_states)
    if not any(bin(m).count("1") == half for m in masks):
        raise InfeasibleParameters("host graph has no perfect matching")
    space = StateSpace.from_encodings(Matching(m).encode(G.m) for m in masks)
    objects = [Matching(int.from_bytes(s, "big")) for s in space.states]
    rows = []
    for M in objects:
        rows.append({space.index[t.encode(G.m)]: p for t, p in matchings_kernel_row(M, G)})
    kernel = TransitionKernel.from_rows(rows)
    erg = check_ergodicity(kernel)
    if not erg.irreducible:
        raise InfeasibleParameters("the matchings chain is not irreducible on this host graph")
    if not erg.aperiodic:
        raise InfeasibleParameters("the matchings chain is periodic on this host graph")
    return Chain(space, kernel, StationaryDistribution.uniform(space.N),
                 describe("matchings", space.N, n=G.n, m=G.m,
                          edges=" ".join(f"{u + 1}-{v + 1}" for u, v in G.edges)))


def matchings_states(G: HostGraph, max_states: int = DEFAULT_MAX_STATES) -> StateSpace:
    return matchings_chain(G, max_states).space


def matchings_analysis(G: HostGraph, **options) -> dict:
    """Self-loop walk set analysis; congestion is at most |E|."""
    from .analysis import analyze_self_loop_family
    from .oracle import count_matchings

    if G.is_perfect_matching():
        raise InfeasibleParameters(PERFECT_MATCHING_HOST)
    chain = matchings_chain(G, options.pop("max_states", DEFAULT_MAX_STATES))
    return analyze_self_loop_family(
        chain,
        holding_floor=Fraction(1, G.m),
        literature={"lambda_1_inverse_best_known": LITERATURE_LAMBDA1},
        direct_count=lambda: count_matchings(G),
        **options,
    )
