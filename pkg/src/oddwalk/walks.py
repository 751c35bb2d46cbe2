"""Canonical closed odd walks and their congestion.

A walk set assigns to every state x a closed walk of odd length starting and
ending at x. Its congestion is

    eta = max_e Q(e)^-1 * sum_{x : e in w_x} r(e, w_x) pi(x) |w_x|

and any such set certifies (1 + lambda_min)^-1 <= eta / 2.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .chain import StationaryDistribution, TransitionKernel
from .errors import ChainError, MissingSelfLoop, NotATransition, WalkError

Edge = tuple[int, int]


@dataclass(frozen=True)
class OddWalk:
    vertices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(int(v) for v in self.vertices))

    @property
    def length(self) -> int:
        """Number of edges, so a self-loop walk [x, x] has length 1."""
        return len(self.vertices) - 1

    @property
    def start(self) -> int:
        return self.vertices[0]

    def edges(self) -> list[Edge]:
        v = self.vertices
        return list(zip(v[:-1], v[1:]))

    def multiplicities(self) -> Counter:
        return Counter(self.edges())


@dataclass(frozen=True)
class WalkSet:
    walks: Mapping[int, OddWalk] = field(repr=False)

    @classmethod
    def from_sequences(cls, seqs: Mapping[int, Iterable[int]] | Iterable[Iterable[int]]) -> "WalkSet":
        if not isinstance(seqs, Mapping):
            seqs = dict(enumerate(seqs))
        return cls({int(x): OddWalk(tuple(w)) for x, w in seqs.items()})

    def __getitem__(self, x: int) -> OddWalk:
        return self.walks[x]

    def __len__(self) -> int:
        return len(self.walks)

    def items(self):
        return sorted(self.walks.items())

    def length_histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(w.length for w in self.walks.values()).items()))

    def check_total(self, N: int) -> None:
        if sorted(self.walks) != list(range(N)):
            raise WalkError("walk set must assign a walk to every state")
        for x, w in self.walks.items():
            if w.start != x:
                raise WalkError(f"walk for state {x} starts at {w.start}")


@dataclass(frozen=True)
class WalkReport:
    ok: bool
    failures: tuple[str, ...] = ()


def validate_walk(kernel: TransitionKernel, walk: OddWalk) -> WalkReport:
    v = walk.vertices
    failures = []
    if len(v) < 2:
        failures.append("walk has no edges")
    else:
        if v[0] != v[-1]:
            failures.append(f"not closed: starts at {v[0]}, ends at {v[-1]}")
        if walk.length % 2 == 0:
            failures.append(f"even length {walk.length}")
    for x, y in walk.edges():
        if not kernel.has_transition(x, y):
            failures.append(f"step ({x}, {y}) has zero probability")
    for (x, y), r in sorted(walk.multiplicities().items()):
        cap = 1 if x == y else 2
        if r > cap:
            failures.append(f"edge ({x}, {y}) used {r} times (cap {cap})")
    return WalkReport(not failures, tuple(failures))


def edge_usage(walkset: WalkSet) -> dict[Edge, list[tuple[int, int]]]:
    """Inverted index: directed edge -> [(owner state x, r(e, w_x)), ...]."""
    index = defaultdict(list)
    for x, w in walkset.items():
        for e, r in sorted(w.multiplicities().items()):
            index[e].append((x, r))
    return dict(index)


def _checked_usage(kernel, walkset):
    walkset.check_total(kernel.N)
    for x, w in walkset.items():
        report = validate_walk(kernel, w)
        if not report.ok:
            for a, b in w.edges():
                if not kernel.has_transition(a, b):
                    raise NotATransition(a, b)
            raise WalkError(f"walk for state {x} is invalid: {'; '.join(report.failures)}")
    return edge_usage(walkset)


def edge_loads(kernel: TransitionKernel, pi: StationaryDistribution,
               walkset: WalkSet) -> dict[Edge, Fraction]:
    """Per-edge normalised load; congestion is the maximum of these."""
    if kernel.N != pi.N:
        raise ChainError(f"kernel has {kernel.N} states but pi has {pi.N}")
    usage = _checked_usage(kernel, walkset)
    loads = {}
    for (a, b), users in usage.items():
        total = sum((r * pi[x] * walkset[x].length for x, r in users), Fraction(0))
        loads[(a, b)] = total / (pi[a] * kernel(a, b))
    return loads


def congestion(kernel: TransitionKernel, pi: StationaryDistribution, walkset: WalkSet) -> Fraction:
    return max(edge_loads(kernel, pi, walkset).values())


def congestion_uniform(kernel: TransitionKernel, walkset: WalkSet) -> Fraction:
    """Congestion under uniform pi when no walk repeats a directed edge:
    max_e P(e)^-1 * sum_{x : e in w_x} |w_x|.
    """
    for x, y, p in kernel.edges():
        if kernel(y, x) != p:
            raise ChainError(f"kernel is not symmetric at ({x}, {y}); uniform pi is not stationary")
    usage = _checked_usage(kernel, walkset)
    best = Fraction(0)
    for (a, b), users in usage.items():
        if any(r > 1 for _, r in users):
            raise WalkError(f"edge ({a}, {b}) is used more than once by a single walk")
        load = sum(walkset[x].length for x, _ in users) / kernel(a, b)
        best = max(best, load)
    return best


@dataclass(frozen=True)
class Lemma1Bound:
    eta: Fraction
    bound_on_inverse: Fraction  # upper bound on 1 / (1 + lambda_min)
    lambda_min_lower: float  # equivalent lower bound on lambda_min

    @property
    def lambda_min_lower_exact(self) -> Fraction:
        return 2 / self.eta - 1


def lemma1_bound(eta: Fraction) -> Lemma1Bound:
    eta = Fraction(eta)
    if eta <= 0:
        raise ValueError("congestion must be positive")
    return Lemma1Bound(eta, eta / 2, float(2 / eta - 1))


def self_loop_walkset(kernel: TransitionKernel) -> WalkSet:
    """Walk set of length-one self-loops; congestion is max_x 1/P(x,x)."""
    for x in range(kernel.N):
        if not kernel.has_transition(x, x):
            raise MissingSelfLoop(x)
    return WalkSet({x: OddWalk((x, x)) for x in range(kernel.N)})
