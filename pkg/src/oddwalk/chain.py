"""Finite reversible Markov chains over enumerated state spaces.

Probabilities are kept as :class:`fractions.Fraction` so that row sums,
detailed balance and congestion can be checked exactly. Floating point only
enters in :mod:`oddwalk.spectral`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, NamedTuple

import numpy as np

from .errors import ChainError, NotATransition, StateCapExceeded

DEFAULT_MAX_STATES = 200_000

FAMILIES = ("switch", "matchings", "contingency", "custom")


@dataclass(frozen=True)
class StateSpace:
    """Lexicographically sorted byte encodings of the states."""

    states: tuple[bytes, ...]
    index: Mapping[bytes, int] = field(repr=False, compare=False)

    @classmethod
    def from_encodings(cls, encodings: Iterable[bytes]) -> "StateSpace":
        states = tuple(sorted(encodings))
        if not states:
            raise ChainError("empty state space")
        index = {s: i for i, s in enumerate(states)}
        if len(index) != len(states):
            raise ChainError("duplicate state encodings")
        return cls(states, index)

    @property
    def N(self) -> int:
        return len(self.states)

    def __len__(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class TransitionKernel:
    """Sparse row-stochastic matrix; ``rows[x]`` is sorted by target index."""

    rows: tuple[tuple[tuple[int, Fraction], ...], ...]
    _lookup: tuple[dict, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_lookup", tuple(dict(r) for r in self.rows))

    @classmethod
    def from_rows(cls, rows: Iterable[Mapping[int, Fraction]]) -> "TransitionKernel":
        packed = tuple(
            tuple(sorted((int(y), Fraction(p)) for y, p in row.items() if p != 0))
            for row in rows
        )
        kernel = cls(packed)
        kernel.validate()
        return kernel

    @classmethod
    def from_matrix(cls, matrix) -> "TransitionKernel":
        return cls.from_rows(
            {y: Fraction(p) for y, p in enumerate(row) if p != 0} for row in matrix
        )

    @property
    def N(self) -> int:
        return len(self.rows)

    def __call__(self, x: int, y: int) -> Fraction:
        return self._lookup[x].get(y, Fraction(0))

    def has_transition(self, x: int, y: int) -> bool:
        return y in self._lookup[x]

    def neighbours(self, x: int) -> list[int]:
        return [y for y, _ in self.rows[x]]

    def edges(self):
        """Directed edges (x, y, p) with p > 0, self-loops included."""
        for x, row in enumerate(self.rows):
            for y, p in row:
                yield x, y, p

    def holding(self, x: int) -> Fraction:
        return self(x, x)

    def validate(self) -> None:
        n = self.N
        if n < 1:
            raise ChainError("kernel has no states")
        for x, row in enumerate(self.rows):
            total = Fraction(0)
            for y, p in row:
                if not 0 <= y < n:
                    raise ChainError(f"row {x} targets out-of-range state {y}")
                if not 0 < p <= 1:
                    raise ChainError(f"p({x},{y}) = {p} is not in (0, 1]")
                total += p
            if total != 1:
                raise ChainError(f"row {x} sums to {total}, not 1")
            for y, _ in row:
                if x not in self._lookup[y]:
                    raise ChainError(f"support is not symmetric at ({x}, {y})")

    def to_dense(self) -> np.ndarray:
        P = np.zeros((self.N, self.N))
        for x, y, p in self.edges():
            P[x, y] = float(p)
        return P


@dataclass(frozen=True)
class StationaryDistribution:
    pi: tuple[Fraction, ...]

    def __post_init__(self):
        if any(p <= 0 for p in self.pi):
            raise ChainError("stationary distribution must be strictly positive")
        if sum(self.pi, Fraction(0)) != 1:
            raise ChainError("stationary distribution must sum to 1")

    @classmethod
    def uniform(cls, n: int) -> "StationaryDistribution":
        return cls((Fraction(1, n),) * n)

    @property
    def N(self) -> int:
        return len(self.pi)

    def __getitem__(self, x: int) -> Fraction:
        return self.pi[x]

    @property
    def minimum(self) -> Fraction:
        return min(self.pi)

    @property
    def is_uniform(self) -> bool:
        return len(set(self.pi)) == 1

    def to_array(self) -> np.ndarray:
        return np.array([float(p) for p in self.pi])


@dataclass(frozen=True)
class ChainDescriptor:
    family: str
    params: tuple[tuple[str, str], ...]
    N: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ChainError(f"unknown chain family {self.family!r}")

    def as_dict(self) -> dict:
        return {"family": self.family, "params": dict(self.params), "N": self.N}


class Chain(NamedTuple):
    space: StateSpace
    kernel: TransitionKernel
    pi: StationaryDistribution
    descriptor: ChainDescriptor


def describe(family: str, N: int, **params) -> ChainDescriptor:
    return ChainDescriptor(family, tuple((k, str(v)) for k, v in params.items()), N)


# --------------------------------------------------------------------------
# generic construction helpers used by the chain families


def bfs_closure(
    seed: Hashable,
    row: Callable[[Hashable], Mapping[Hashable, Fraction]],
    max_states: int = DEFAULT_MAX_STATES,
) -> dict:
    """All states reachable from ``seed``, mapped to their kernel rows."""
    rows = {}
    queue = deque([seed])
    seen = {seed}
    while queue:
        state = queue.popleft()
        rows[state] = r = row(state)
        for nxt in r:
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > max_states:
                    raise StateCapExceeded(max_states)
                queue.append(nxt)
    return rows


def assemble(
    rows: Mapping[Hashable, Mapping[Hashable, Fraction]],
    encode: Callable[[Hashable], bytes],
) -> tuple[StateSpace, TransitionKernel, list]:
    """Index a closed family of rows by sorted encoding.

    Returns the space, the kernel and the decoded states in index order.
    """
    enc = {s: encode(s) for s in rows}
    space = StateSpace.from_encodings(enc.values())
    objects = [None] * space.N
    for s, e in enc.items():
        objects[space.index[e]] = s
    kernel_rows = []
    for s in objects:
        kernel_rows.append({space.index[enc[t]]: p for t, p in rows[s].items()})
    return space, TransitionKernel.from_rows(kernel_rows), objects


def build_chain(family: str, max_states: int = DEFAULT_MAX_STATES, **params) -> Chain:
    """Dispatch to one of the chain families.

    ``switch`` takes ``n`` and ``d``; ``matchings`` takes ``graph`` (a
    :class:`~oddwalk.matchings.HostGraph`); ``contingency`` takes ``rows``
    and ``cols``.
    """
    if family == "switch":
        from .switch import switch_chain

        return switch_chain(params["n"], params["d"], max_states=max_states)
    if family == "matchings":
        from .matchings import matchings_chain

        return matchings_chain(params["graph"], max_states=max_states)
    if family == "contingency":
        from .contingency import Margins, contingency_chain

        margins = Margins(tuple(params["rows"]), tuple(params["cols"]))
        return contingency_chain(margins, max_states=max_states)
    raise ChainError(f"cannot build chains of family {family!r}")


# --------------------------------------------------------------------------
# structural checks


def edge_flow(kernel: TransitionKernel, pi: StationaryDistribution, x: int, y: int) -> Fraction:
    """Stationary flow Q(x, y) = pi(x) P(x, y) across a transition."""
    p = kernel(x, y)
    if p == 0:
        raise NotATransition(x, y)
    return pi[x] * p


@dataclass(frozen=True)
class BalanceReport:
    ok: bool
    worst_violation: tuple[int, int] | None = None


def check_detailed_balance(kernel: TransitionKernel, pi: StationaryDistribution) -> BalanceReport:
    """Exact check of pi(x)P(x,y) == pi(y)P(y,x) on every stored transition.

    The reported pair is the one with the largest absolute flow imbalance.
    """
    if kernel.N != pi.N:
        raise ChainError(f"kernel has {kernel.N} states but pi has {pi.N}")
    worst, worst_gap = None, Fraction(0)
    for x, y, p in kernel.edges():
        gap = abs(pi[x] * p - pi[y] * kernel(y, x))
        if gap > worst_gap:
            worst, worst_gap = (min(x, y), max(x, y)), gap
    return BalanceReport(worst is None, worst)


@dataclass(frozen=True)
class ErgodicityReport:
    irreducible: bool
    aperiodic: bool

    @property
    def ergodic(self) -> bool:
        return self.irreducible and self.aperiodic


def check_ergodicity(kernel: TransitionKernel) -> ErgodicityReport:
    n = kernel.N
    colour = [-1] * n
    bipartite = True
    components = 0
    for root in range(n):
        if colour[root] >= 0:
            continue
        components += 1
        colour[root] = 0
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in kernel.neighbours(x):
                if y == x:
                    continue
                if colour[y] < 0:
                    colour[y] = 1 - colour[x]
                    queue.append(y)
                elif colour[y] == colour[x]:
                    bipartite = False
    has_loop = any(kernel.has_transition(x, x) for x in range(n))
    return ErgodicityReport(components == 1, has_loop or not bipartite)
