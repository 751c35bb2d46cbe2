"""Bounds on the smallest eigenvalue of reversible Markov chains from
canonical closed odd walks, with exact checks on small state spaces."""

from .chain import (
    Chain,
    ChainDescriptor,
    StateSpace,
    StationaryDistribution,
    TransitionKernel,
    build_chain,
    check_detailed_balance,
    check_ergodicity,
    edge_flow,
)
from .errors import ChainError
from .spectral import eigenvalues, lazy_transform, mixing_time_bound, summarize, symmetrize
from .walks import (
    OddWalk,
    WalkSet,
    congestion,
    congestion_uniform,
    lemma1_bound,
    self_loop_walkset,
    validate_walk,
)

__version__ = "0.1.0"
