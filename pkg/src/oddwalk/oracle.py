"""Independent brute-force baselines.

Nothing here reuses the enumeration code of the chain families; the point is
to have a second route to every count and spectral value the tests check.
Randomness comes from :class:`SplitMix64` so that generated chains are
reproducible across platforms and languages.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import comb

import numpy as np

from .chain import StationaryDistribution, TransitionKernel
from .errors import ChainError, SolverError
from .spectral import symmetrize
from .walks import OddWalk, WalkSet, validate_walk

MASK64 = (1 << 64) - 1
DEFAULT_TV_CAP = 5_000
DEFAULT_TV_ITERATIONS = 10**6
BRUTE_FORCE_LIMIT = 5 * 10**6


class OracleTooLarge(ChainError):
    pass


class SplitMix64:
    """SplitMix64 generator.

    state <- state + 0x9E3779B97F4A7C15 (mod 2^64), then the output is
    z = state; z = (z ^ z>>30) * 0xBF58476D1CE4E5B9; z = (z ^ z>>27) *
    0x94D049BB133111EB; z ^ z>>31, all mod 2^64.
    """

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection of the biased tail."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - (1 << 64) % n
        while True:
            z = self.next_u64()
            if z < limit:
                return z % n

    def bernoulli(self, p: Fraction) -> bool:
        p = Fraction(p)
        return self.randbelow(p.denominator) < p.numerator

    def shuffle(self, items: list) -> list:
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]
        return items


# --------------------------------------------------------------------------
# direct counts


def count_regular_graphs(n: int, d: int, limit: int = BRUTE_FORCE_LIMIT) -> int:
    """Filter every edge set of size nd/2 on [n] for d-regularity."""
    if n * d % 2 or d < 1 or n < d + 1:
        return 0
    pairs = list(combinations(range(n), 2))
    size = n * d // 2
    if comb(len(pairs), size) > limit:
        raise OracleTooLarge(f"{comb(len(pairs), size)} candidate graphs exceed the brute-force limit")
    total = 0
    for chosen in combinations(pairs, size):
        deg = [0] * n
        for a, b in chosen:
            deg[a] += 1
            deg[b] += 1
        total += all(k == d for k in deg)
    return total


def count_matchings(graph, sizes=None, limit: int = BRUTE_FORCE_LIMIT) -> int:
    """Count edge subsets of the given sizes (default n/2 and n/2 - 1) that are matchings."""
    n, edges = graph.n, list(graph.edges)
    sizes = (n // 2, n // 2 - 1) if sizes is None else sizes
    if sum(comb(len(edges), s) for s in sizes) > limit:
        raise OracleTooLarge("too many edge subsets to filter")
    total = 0
    for s in sizes:
        for chosen in combinations(edges, s):
            verts = [v for e in chosen for v in e]
            total += len(set(verts)) == len(verts)
    return total


def count_tables(r, c, limit: int = BRUTE_FORCE_LIMIT) -> int:
    """Brute force over the free (m-1) x (n-1) block; the last row and
    column are forced by the margins."""
    r, c = list(r), list(c)
    m, n = len(r), len(c)
    if sum(r) != sum(c):
        return 0
    ranges = [range(min(r[i], c[j]) + 1) for i in range(m - 1) for j in range(n - 1)]
    if math.prod(len(x) for x in ranges) > limit:
        raise OracleTooLarge("too many candidate blocks")
    total = 0
    for block in product(*ranges):
        ok = True
        last_col = []
        for i in range(m - 1):
            v = r[i] - sum(block[i * (n - 1):(i + 1) * (n - 1)])
            if v < 0:
                ok = False
                break
            last_col.append(v)
        if not ok:
            continue
        last_row = [c[j] - sum(block[i * (n - 1) + j] for i in range(m - 1)) for j in range(n - 1)]
        corner = c[n - 1] - sum(last_col)
        if min(last_row) < 0 or corner < 0 or sum(last_row) + corner != r[m - 1]:
            continue
        total += 1
    return total


def direct_count(family: str, **params) -> int:
    if family == "switch":
        return count_regular_graphs(params["n"], params["d"])
    if family == "matchings":
        return count_matchings(params["graph"])
    if family == "contingency":
        return count_tables(params["rows"], params["cols"])
    raise ChainError(f"no direct counter for family {family!r}")


# --------------------------------------------------------------------------
# mixing time and eigenvalue cross-checks


def tv_mixing_time(kernel: TransitionKernel, pi: StationaryDistribution, epsilon: float,
                   max_states: int = DEFAULT_TV_CAP,
                   max_iterations: int = DEFAULT_TV_ITERATIONS) -> int:
    """Smallest t with max_x TV(P^t(x, .), pi) <= epsilon."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if kernel.N > max_states:
        raise OracleTooLarge(f"{kernel.N} states exceeds the mixing-time cap of {max_states}")
    P = kernel.to_dense()
    target = pi.to_array()
    dist = np.eye(kernel.N)
    for t in range(max_iterations + 1):
        diff = np.abs(dist - target)
        worst = max(math.fsum(row) for row in diff) / 2
        if worst <= epsilon:
            return t
        dist = dist @ P
    raise SolverError(f"TV distance still above {epsilon} after {max_iterations} steps")


def power_iteration_lambda1(kernel: TransitionKernel, pi: StationaryDistribution,
                            iterations: int = 200_000, tol: float = 1e-10) -> float:
    """Second-largest eigenvalue by power iteration.

    Iterates on I + S with the known top eigenvector sqrt(pi) deflated, so the
    dominant eigenvalue is 1 + lambda_1 and sign ambiguities cannot occur.
    """
    S = symmetrize(kernel, pi)
    n = kernel.N
    if n < 2:
        raise ChainError("need at least two states")
    u = np.sqrt(pi.to_array())
    u /= np.linalg.norm(u)
    A = S + np.eye(n) - 2.0 * np.outer(u, u)
    v = np.random.default_rng(0).standard_normal(n)
    v -= (u @ v) * u
    v /= np.linalg.norm(v)
    for _ in range(iterations):
        w = A @ v
        w -= (u @ w) * u
        theta = float(v @ w)
        if np.linalg.norm(w - theta * v) <= tol:
            return theta - 1.0
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return -1.0
        v = w / norm
    raise SolverError(f"power iteration did not converge in {iterations} iterations")


# --------------------------------------------------------------------------
# random chains and walk sets for the property suites


@dataclass(frozen=True)
class RandomChainSpec:
    N: int
    seed: int
    loop_mass: Fraction = Fraction(1, 5)  # chance that a given state gets a self-loop
    max_weight: int = 4

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("random chains need N >= 2")
        if not 0 < Fraction(self.loop_mass) < 1:
            raise ValueError("loop_mass must lie in (0, 1)")


def random_reversible_chain(spec: RandomChainSpec) -> tuple[TransitionKernel, StationaryDistribution]:
    """Random walk on a random connected weighted graph with at least one loop.

    P(x, y) = w(x, y) / W(x) and pi(x) = W(x) / sum W, W being weighted degree.
    """
    rng = SplitMix64(spec.seed)
    N = spec.N
    weights: dict[tuple[int, int], int] = {}

    def weight():
        return 1 + rng.randbelow(spec.max_weight)

    for v in range(1, N):
        weights[(rng.randbelow(v), v)] = weight()
    for _ in range(rng.randbelow(N + 1)):
        a, b = rng.randbelow(N), rng.randbelow(N)
        if a != b:
            weights.setdefault((min(a, b), max(a, b)), weight())
    loops = [x for x in range(N) if rng.bernoulli(spec.loop_mass)]
    if not loops:
        loops = [rng.randbelow(N)]
    for x in loops:
        weights[(x, x)] = weight()

    adj = [dict() for _ in range(N)]
    for (a, b), w in weights.items():
        adj[a][b] = w
        adj[b][a] = w
    degree = [sum(row.values()) for row in adj]
    total = sum(degree)
    kernel = TransitionKernel.from_rows(
        {y: Fraction(w, degree[x]) for y, w in adj[x].items()} for x in range(N)
    )
    pi = StationaryDistribution(tuple(Fraction(dg, total) for dg in degree))
    return kernel, pi


def shortest_odd_closed_walk(kernel: TransitionKernel, x: int, rng: SplitMix64 | None = None) -> OddWalk:
    """BFS over (state, parity) from (x, 0) to (x, 1)."""
    start, goal = (x, 0), (x, 1)
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if node == goal:
            break
        v, par = node
        nbrs = kernel.neighbours(v)
        if rng is not None:
            nbrs = rng.shuffle(list(nbrs))
        for y in nbrs:
            nxt = (y, 1 - par)
            if nxt not in parent:
                parent[nxt] = node
                queue.append(nxt)
    if goal not in parent:
        raise ChainError(f"no closed odd walk through state {x}; chain is periodic")
    path = []
    node = goal
    while node is not None:
        path.append(node[0])
        node = parent[node]
    return OddWalk(tuple(reversed(path)))


def random_odd_walkset(kernel: TransitionKernel, seed: int,
                       detour: Fraction = Fraction(1, 3)) -> WalkSet:
    """Shortest odd closed walks with random tie-breaking.

    With probability ``detour`` a walk is prefixed by a back-and-forth step
    x -> y -> x, which can push edge multiplicities up to the cap of 2.
    """
    rng = SplitMix64(seed)
    walks = {}
    for x in range(kernel.N):
        w = shortest_odd_closed_walk(kernel, x, rng)
        others = [y for y in kernel.neighbours(x) if y != x]
        if others and rng.bernoulli(detour):
            y = others[rng.randbelow(len(others))]
            longer = OddWalk((x, y) + w.vertices)
            if validate_walk(kernel, longer).ok:
                w = longer
        walks[x] = w
    return WalkSet(walks)
