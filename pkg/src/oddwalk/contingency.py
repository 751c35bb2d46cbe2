"""Heat-bath chain on contingency tables with fixed margins, and the canonical
odd walks (length 3 or 5) used to bound its smallest eigenvalue.

A step picks a 2x2 subsquare uniformly among the C(m,2) C(n,2) row-pair /
column-pair choices and replaces it with a uniformly random nonnegative
integer 2x2 matrix having the same row and column sums.

Tables are tuples of row tuples. Index tuples carried by
:class:`TableClass` are 1-based; everything else is 0-based.
"""

from __future__ import annotations

import struct
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from math import comb

from .chain import DEFAULT_MAX_STATES, Chain, StationaryDistribution, assemble, bfs_closure, describe
from .errors import ChainError, HypothesisViolation, InfeasibleParameters, StateCapExceeded
from .walks import OddWalk, WalkSet, edge_usage

Table = tuple[tuple[int, ...], ...]

LITERATURE_LAMBDA1 = "n^f(m) with f(m) >= 68m^4 (constant m)"


@dataclass(frozen=True)
class Margins:
    r: tuple[int, ...]
    c: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(int(v) for v in self.r))
        object.__setattr__(self, "c", tuple(int(v) for v in self.c))
        if len(self.r) < 2 or len(self.c) < 2:
            raise InfeasibleParameters("need at least two rows and two columns")
        if min(self.r) < 1 or min(self.c) < 1:
            raise InfeasibleParameters("all margins must be positive integers")
        if sum(self.r) != sum(self.c):
            raise InfeasibleParameters(
                f"row sums total {sum(self.r)} but column sums total {sum(self.c)}"
            )

    @property
    def m(self) -> int:
        return len(self.r)

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def subsquares(self) -> int:
        return comb(self.m, 2) * comb(self.n, 2)

    def check_walk_hypotheses(self) -> None:
        """max(r) >= 2, max(c) >= 2 and max(m, n) >= 3 (margins need not be sorted)."""
        failed = []
        if max(self.r) < 2:
            failed.append("largest row sum >= 2")
        if max(self.c) < 2:
            failed.append("largest column sum >= 2")
        if max(self.m, self.n) < 3:
            failed.append("max(m, n) >= 3")
        if failed:
            raise HypothesisViolation("hypotheses not met: " + ", ".join(failed))

    def is_table(self, X: Table) -> bool:
        return (
            len(X) == self.m
            and all(len(row) == self.n and min(row) >= 0 for row in X)
            and tuple(sum(row) for row in X) == self.r
            and tuple(sum(col) for col in zip(*X)) == self.c
        )


def encode_table(X: Table) -> bytes:
    flat = [v for row in X for v in row]
    return struct.pack(f">{len(flat)}I", *flat)


def decode_table(data: bytes, m: int, n: int) -> Table:
    flat = struct.unpack(f">{m * n}I", data)
    return tuple(flat[i * n:(i + 1) * n] for i in range(m))


def transpose(X: Table) -> Table:
    return tuple(zip(*X))


def northwest_corner(margins: Margins) -> Table:
    r, c = list(margins.r), list(margins.c)
    X = [[0] * margins.n for _ in range(margins.m)]
    for i in range(margins.m):
        for j in range(margins.n):
            X[i][j] = v = min(r[i], c[j])
            r[i] -= v
            c[j] -= v
    return tuple(map(tuple, X))


def _row_fillings(total: int, caps: list[int]):
    """Vectors summing to ``total`` with entry j at most caps[j]."""
    if len(caps) == 1:
        if total <= caps[0]:
            yield (total,)
        return
    rest = sum(caps[1:])
    for v in range(max(0, total - rest), min(total, caps[0]) + 1):
        for tail in _row_fillings(total - v, caps[1:]):
            yield (v,) + tail


def iter_tables(margins: Margins):
    """Row-by-row recursion; column capacity bounds each row."""
    m = margins.m

    def rec(i, remaining, prefix):
        if i == m - 1:
            if sum(remaining) == margins.r[i]:
                yield prefix + (tuple(remaining),)
            return
        for row in _row_fillings(margins.r[i], remaining):
            yield from rec(i + 1, [a - b for a, b in zip(remaining, row)], prefix + (row,))

    yield from rec(0, list(margins.c), ())


def enumerate_tables(margins: Margins, max_states: int = DEFAULT_MAX_STATES):
    from .chain import StateSpace

    encodings = []
    for X in iter_tables(margins):
        encodings.append(encode_table(X))
        if len(encodings) > max_states:
            raise StateCapExceeded(max_states)
    return StateSpace.from_encodings(encodings)


def subsquare_fill_count(s1: int, s2: int, t1: int, t2: int) -> int:
    """Number of nonnegative 2x2 integer matrices with row sums (s1, s2) and
    column sums (t1, t2)."""
    if s1 + s2 != t1 + t2:
        raise ValueError(f"row sums {s1}+{s2} differ from column sums {t1}+{t2}")
    if min(s1, s2, t1, t2) < 0:
        raise ValueError("margins must be nonnegative")
    return min(s1, t1) - max(0, t1 - s2) + 1


def _replace(X: Table, cells: dict[tuple[int, int], int]) -> Table:
    rows = [list(r) for r in X]
    for (i, j), v in cells.items():
        rows[i][j] = v
    return tuple(map(tuple, rows))


def heatbath_kernel_row(X: Table, margins: Margins) -> list[tuple[Table, Fraction]]:
    if not margins.is_table(X):
        raise ChainError("table does not match the margins")
    choose = Fraction(1, margins.subsquares)
    row: dict[Table, Fraction] = {}
    for i, k in combinations(range(margins.m), 2):
        for j, l in combinations(range(margins.n), 2):
            a, b, c, d = X[i][j], X[i][l], X[k][j], X[k][l]
            s1, s2, t1 = a + b, c + d, a + c
            K = subsquare_fill_count(s1, s2, t1, b + d)
            p = choose / K
            for v in range(max(0, t1 - s2), min(s1, t1) + 1):
                Y = X if v == a else _replace(
                    X, {(i, j): v, (i, l): s1 - v, (k, j): t1 - v, (k, l): s2 - t1 + v})
                row[Y] = row.get(Y, Fraction(0)) + p
    return sorted(row.items())


def contingency_chain(margins: Margins, max_states: int = DEFAULT_MAX_STATES) -> Chain:
    """Enumerate by recursion and cross-check against BFS closure from the
    north-west-corner table."""
    space = enumerate_tables(margins, max_states)
    rows = bfs_closure(northwest_corner(margins),
                       lambda X: dict(heatbath_kernel_row(X, margins)), max_states)
    if len(rows) != space.N or any(encode_table(X) not in space.index for X in rows):
        raise ChainError(
            f"heat-bath closure reached {len(rows)} of {space.N} tables; chain is not irreducible"
        )
    space, kernel, _ = assemble(rows, encode_table)
    return Chain(space, kernel, StationaryDistribution.uniform(space.N),
                 describe("contingency", space.N,
                          rows=",".join(map(str, margins.r)), cols=",".join(map(str, margins.c))))


def tables_of(chain: Chain, margins: Margins) -> list[Table]:
    return [decode_table(s, margins.m, margins.n) for s in chain.space.states]


# --------------------------------------------------------------------------
# classification and canonical walks

ROW_GOOD, COLUMN_GOOD, BAD = "row-good", "column-good", "bad"


@dataclass(frozen=True)
class TableClass:
    kind: str
    indices: tuple[int, ...]  # 1-based

    def __str__(self):
        return f"{self.kind}{self.indices}"


def _row_good_tuple(X: Table):
    m, n = len(X), len(X[0])
    for i1, i2, i3 in permutations(range(m), 3):
        for j1, j2 in permutations(range(n), 2):
            if X[i1][j1] > 0 and X[i2][j1] > 0 and X[i3][j2] > 0:
                return i1, i2, i3, j1, j2
    return None


def _column_good_tuple(X: Table):
    # least in (i1, i2, j1, j2, j3) order, with x[i1][j1], x[i1][j2], x[i2][j3] > 0
    m, n = len(X), len(X[0])
    for i1, i2 in permutations(range(m), 2):
        for j1, j2, j3 in permutations(range(n), 3):
            if X[i1][j1] > 0 and X[i1][j2] > 0 and X[i2][j3] > 0:
                return i1, i2, j1, j2, j3
    return None


def _bad_tuple(X: Table):
    m, n = len(X), len(X[0])
    for i1, i2, i3 in permutations(range(m), 3):
        for j1, j2, j3 in permutations(range(n), 3):
            if X[i1][j1] >= 2 and X[i2][j2] > 0 and X[i3][j3] > 0:
                return i1, i2, i3, j1, j2, j3
    return None


def classify_table(X: Table) -> TableClass:
    """Row-good beats column-good beats bad; each carries its lex-least tuple."""
    t = _row_good_tuple(X)
    if t is not None:
        return TableClass(ROW_GOOD, tuple(v + 1 for v in t))
    t = _column_good_tuple(X)
    if t is not None:
        return TableClass(COLUMN_GOOD, tuple(v + 1 for v in t))
    t = _bad_tuple(X)
    if t is None:
        problems = []
        if max(max(row) for row in X) < 2:
            problems.append("no entry x[i1][j1] >= 2 (needs min(r1, c1) >= 2)")
        if min(len(X), len(X[0])) < 3:
            problems.append("fewer than 3 rows or columns (needs max(m, n) >= 3)")
        raise HypothesisViolation(
            "table is neither row-good nor column-good and has no 6-tuple with "
            "x[i1][j1] >= 2: " + "; ".join(problems or ["hypotheses violated"])
        )
    return TableClass(BAD, tuple(v + 1 for v in t))


def _shift(X: Table, deltas) -> Table:
    rows = [list(r) for r in X]
    for i, j, dv in deltas:
        rows[i][j] += dv
    return tuple(map(tuple, rows))


def _row_good_walk(X: Table, i1, i2, i3, j1, j2) -> list[Table]:
    A = _shift(X, [(i1, j1, -1), (i1, j2, 1), (i3, j1, 1), (i3, j2, -1)])
    B = _shift(X, [(i2, j1, -1), (i2, j2, 1), (i3, j1, 1), (i3, j2, -1)])
    return [X, A, B, X]


# offsets into the 3x3 subtable for the four intermediate states of the
# length-5 walk on a bad table
_BAD_STEPS = (
    {(0, 0): -1, (0, 1): 1, (1, 0): 1, (1, 1): -1},
    {(0, 0): -1, (0, 1): 1, (1, 1): -1, (1, 2): 1, (2, 0): 1, (2, 2): -1},
    {(0, 0): -2, (0, 1): 1, (0, 2): 1, (1, 0): 1, (1, 1): -1, (2, 0): 1, (2, 2): -1},
    {(0, 0): -1, (0, 2): 1, (2, 0): 1, (2, 2): -1},
)


def canonical_walk_tables(X: Table, cls: TableClass | None = None) -> list[Table]:
    """The canonical closed odd walk from X, as a list of tables."""
    cls = cls or classify_table(X)
    idx = [v - 1 for v in cls.indices]
    if cls.kind == ROW_GOOD:
        return _row_good_walk(X, *idx)
    if cls.kind == COLUMN_GOOD:
        i1, i2, j1, j2, j3 = idx
        walk = _row_good_walk(transpose(X), j1, j2, j3, i1, i2)
        return [transpose(Y) for Y in walk]
    rows, cols = idx[:3], idx[3:]
    walk = [X]
    for step in _BAD_STEPS:
        walk.append(_shift(X, [(rows[a], cols[b], dv) for (a, b), dv in step.items()]))
    walk.append(X)
    return walk


def canonical_odd_walk(X: Table, space, cls: TableClass | None = None) -> OddWalk:
    return OddWalk(tuple(space.index[encode_table(Y)] for Y in canonical_walk_tables(X, cls)))


def canonical_walkset(chain: Chain, margins: Margins) -> tuple[WalkSet, dict[int, TableClass]]:
    classes, walks = {}, {}
    for x, X in enumerate(tables_of(chain, margins)):
        classes[x] = cls = classify_table(X)
        walks[x] = canonical_odd_walk(X, chain.space, cls)
    return WalkSet(walks), classes


def count_walks_through_edge(walkset: WalkSet, classes: dict[int, TableClass],
                             edge: tuple[int, int], usage=None) -> dict[str, int]:
    usage = edge_usage(walkset) if usage is None else usage
    counts = Counter({ROW_GOOD: 0, COLUMN_GOOD: 0, BAD: 0})
    for x, _ in usage.get(tuple(edge), ()):
        counts[classes[x].kind] += 1
    return dict(counts)


def class_count_limits(m: int, n: int) -> dict[str, int]:
    return {ROW_GOOD: 12 * (m - 2), COLUMN_GOOD: 12 * (n - 2), BAD: 72 * (m - 2) * (n - 2)}


def eta_bound(m: int, n: int) -> int:
    return 90 * m**3 * n**3


def inverse_gap_bound(m: int, n: int) -> int:
    return 45 * m**3 * n**3


def contingency_analysis(margins: Margins, **options) -> dict:
    from .analysis import analyze_contingency

    margins.check_walk_hypotheses()
    chain = contingency_chain(margins, options.pop("max_states", DEFAULT_MAX_STATES))
    return analyze_contingency(chain, margins, **options)
