"""Spectra of reversible kernels, the lazy transform and the relaxation-time
mixing bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .chain import (
    DEFAULT_MAX_STATES,
    StationaryDistribution,
    TransitionKernel,
    check_detailed_balance,
)
from .errors import ChainError, DetailedBalanceError, SolverError

EIGEN_TOL = 1e-9
RESIDUAL_TOL = 1e-8
JACOBI_REL_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
# slack applied to solver eigenvalues in every bound comparison
LAMBDA_SLACK = 1e-9


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple[float, ...]  # descending
    max_residual: float

    @property
    def N(self) -> int:
        return len(self.eigenvalues)

    @property
    def lambda_min(self) -> float:
        return self.eigenvalues[-1]


@dataclass(frozen=True)
class SpectralSummary:
    lambda_1: float
    lambda_min: float
    lambda_star: float
    relaxation_time_star: float
    gap_upper_inverse: float


def symmetrize(kernel: TransitionKernel, pi: StationaryDistribution) -> np.ndarray:
    """S[x, y] = sqrt(pi(x) / pi(y)) P(x, y), symmetric when P is reversible."""
    if kernel.N != pi.N:
        raise ChainError(f"kernel has {kernel.N} states but pi has {pi.N}")
    if not check_detailed_balance(kernel, pi).ok:
        raise DetailedBalanceError("kernel is not reversible with respect to pi")
    S = np.zeros((kernel.N, kernel.N))
    uniform = pi.is_uniform
    for x, y, p in kernel.edges():
        if uniform or x == y:
            S[x, y] = float(p)
        else:
            # Q(x,y) / sqrt(pi(x) pi(y)): Q is exactly symmetric, so S is too
            S[x, y] = float(pi[x] * p) / math.sqrt(float(pi[x]) * float(pi[y]))
    return S


def jacobi_eigh(A: np.ndarray, rel_tol: float = JACOBI_REL_TOL,
                max_sweeps: int = JACOBI_MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigen-decomposition of a real symmetric matrix.

    Sweeps over (p, q) pairs in row order until the off-diagonal Frobenius
    norm is at most ``rel_tol * ||A||_F``. Returns ``(w, V)`` with
    ``A @ V[:, k] == w[k] * V[:, k]``, unsorted.
    """
    A = np.array(A, dtype=float, copy=True)
    n = A.shape[0]
    V = np.eye(n)
    target = rel_tol * np.linalg.norm(A)
    for _ in range(max_sweeps + 1):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= target:
            return np.diag(A).copy(), V
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                h = A[q, q] - A[p, p]
                if abs(h) + 100.0 * abs(apq) == abs(h):
                    t = apq / h
                else:
                    theta = h / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(1.0 + theta * theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                ap, aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap, aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                A[p, q] = A[q, p] = 0.0
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    raise SolverError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def spectrum_of_symmetric(S: np.ndarray) -> Spectrum:
    w, V = jacobi_eigh(S)
    residual = float(np.max(np.linalg.norm(S @ V - V * w, axis=0))) if len(w) else 0.0
    order = np.argsort(-w, kind="stable")
    return Spectrum(tuple(float(v) for v in w[order]), residual)


def eigenvalues(kernel: TransitionKernel, pi: StationaryDistribution,
                max_states: int = DEFAULT_MAX_STATES) -> Spectrum:
    """Full real spectrum of a reversible kernel, sorted descending."""
    if kernel.N > max_states:
        raise ChainError(f"{kernel.N} states exceeds the eigensolver cap of {max_states}")
    spec = spectrum_of_symmetric(symmetrize(kernel, pi))
    if spec.max_residual > RESIDUAL_TOL:
        raise SolverError(f"eigen-residual {spec.max_residual:.3e} exceeds {RESIDUAL_TOL}")
    ev = spec.eigenvalues
    if abs(ev[0] - 1.0) > EIGEN_TOL:
        raise SolverError(f"top eigenvalue {ev[0]!r} is not 1")
    if ev[-1] < -1.0 - EIGEN_TOL:
        raise SolverError(f"eigenvalue {ev[-1]!r} below -1")
    return spec


def summarize(spectrum: Spectrum) -> SpectralSummary:
    ev = spectrum.eigenvalues
    if len(ev) < 2:
        raise ChainError("spectral summary needs at least two states")
    lam1, lam_min = ev[1], ev[-1]
    lam_star = max(lam1, abs(lam_min))
    relax = 1.0 / (1.0 - lam_star) if lam_star < 1.0 else math.inf
    gap_inv = 1.0 / (1.0 + lam_min) if lam_min > -1.0 + 1e-12 else math.inf
    return SpectralSummary(lam1, lam_min, lam_star, relax, gap_inv)


def lazy_transform(kernel: TransitionKernel) -> TransitionKernel:
    """The lazy kernel (I + P) / 2."""
    half = Fraction(1, 2)
    rows = []
    for x, row in enumerate(kernel.rows):
        new = {y: p * half for y, p in row}
        new[x] = new.get(x, Fraction(0)) + half
        rows.append(new)
    return TransitionKernel.from_rows(rows)


def mixing_time_bound(summary: SpectralSummary, pi: StationaryDistribution,
                      epsilon: float) -> float:
    """(1 - lambda_*)^-1 ln(1 / (epsilon pi_min))."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if summary.lambda_star >= 1 - 1e-12:
        raise ChainError("lambda_* is 1; the mixing-time bound is vacuous")
    return math.log(1.0 / (epsilon * float(pi.minimum))) / (1.0 - summary.lambda_star)
