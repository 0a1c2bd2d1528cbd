"""Equality-constrained subproblem: SPD factorization plus Schur elimination.

For a free index set F the subproblem couples the restricted stationarity
equations with the sum constraint:

    [ G_FF  1 ] [ x_F ]   [ g_F ]
    [ 1^T   0 ] [ lam ] = [  s  ]

Rather than factorizing this indefinite bordered matrix, the solver runs a
Cholesky factorization of ``G_FF`` and eliminates the border through the
scalar Schur complement ``-1^T G_FF^{-1} 1``, which is strictly negative
whenever ``G_FF`` is positive definite, so the system has exactly one
solution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky

from .errors import EmptyFreeSet, RankDeficientLibrary


@dataclass(frozen=True)
class SubproblemSolution:
    """Free-set abundances and the sum-constraint multiplier of one solve."""

    free_values: np.ndarray
    multiplier: float


@dataclass(frozen=True)
class SpdFactorization:
    """Lower-triangular Cholesky factor of a restricted Gram block."""

    lower: np.ndarray

    @property
    def size(self) -> int:
        return self.lower.shape[0]

    def solve(self, rhs):
        """Solve ``G_FF z = rhs`` using the stored factor."""
        return cho_solve((self.lower, True), rhs, check_finite=False)


def _checked_indices(free, n):
    free = np.asarray(free, dtype=np.intp).ravel()
    if free.size == 0:
        raise EmptyFreeSet("subproblem requested on an empty free set")
    if free.min() < 0 or free.max() >= n:
        raise IndexError(f"free indices must lie in [0, {n}), got {free}")
    return free

def factorize(gram, free, ridge=False) -> SpdFactorization:
    """Cholesky-factorize the Gram matrix restricted to the free columns.

    Parameters
    ----------
    gram : array_like, shape (P, P)
        Symmetric positive semidefinite Gram matrix of the full library.
    free : array_like of int
        Indices of the free columns; must be nonempty.
    ridge : bool, optional
        Add a jitter of ``1e-10 * trace / |F|`` to the diagonal before
        factorizing. Off by default: regularization silently changes the
        optimizer and can mask a genuinely rank-deficient library.

    Returns
    -------
    SpdFactorization
        Factor ``L`` with ``L @ L.T`` equal to the restricted block.

    Raises
    ------
    RankDeficientLibrary
        If a pivot is nonpositive or falls at or below
        ``P * eps * max(diag)``, meaning the free columns of the library are
        not linearly independent (in particular whenever ``|F|`` exceeds the
        number of bands).
    EmptyFreeSet
        If ``free`` is empty.
    """
    gram = np.asarray(gram, dtype=float)
    n = gram.shape[0]
    free = _checked_indices(free, n)
    block = gram[np.ix_(free, free)]
    if ridge:
        block = block + (1e-10 * np.trace(block) / free.size) * np.eye(free.size)
    pivot_floor = n * np.finfo(float).eps * max(block.diagonal().max(), 0.0)
    try:
        lower = cholesky(block, lower=True, check_finite=False)
    except LinAlgError as exc:
        raise RankDeficientLibrary(
            f"restricted Gram block of size {free.size} is not positive definite "
            f"({exc}); the free columns of the library are linearly dependent"
        ) from None
    pivots = lower.diagonal() ** 2
    if pivots.min() <= pivot_floor:
        raise RankDeficientLibrary(
            f"restricted Gram block of size {free.size} has pivot {pivots.min():.3e} "
            f"at or below the rank threshold {pivot_floor:.3e}; the free columns "
            f"of the library are numerically linearly dependent"
        )
    return SpdFactorization(lower=lower)


def solve_subproblem(gram, linear, budget, free, ridge=False) -> SubproblemSolution:
    """Solve the equality-constrained subproblem on the free set.

    Parameters
    ----------
    gram : array_like, shape (P, P)
        Symmetric Gram matrix of the full library.
    linear : array_like, shape (P,)
        Linear term of the quadratic objective.
    budget : float
        Required sum of the free abundances.
    free : array_like of int
        Indices of the free variables; the remaining variables are pinned
        at zero and do not enter the system.
    ridge : bool, optional
        Forwarded to :func:`factorize`.

    Returns
    -------
    SubproblemSolution
        Values on the free set and the multiplier of the sum constraint,
        satisfying ``G_FF x_F - g_F + lam = 0`` and ``sum(x_F) = budget`` up
        to factorization roundoff.

    Notes
    -----
    With ``u = G_FF^{-1} g_F`` and ``v = G_FF^{-1} 1``, the multiplier is
    ``lam = (sum(u) - budget) / sum(v)`` and ``x_F = u - lam * v``. The
    denominator ``sum(v)`` is positive for any positive definite block, which
    is what makes the bordered system uniquely solvable.
    """
    linear = np.asarray(linear, dtype=float)
    factor = factorize(gram, free, ridge=ridge)
    free = np.asarray(free, dtype=np.intp).ravel()
    rhs = np.empty((factor.size, 2))
    rhs[:, 0] = linear[free]
    rhs[:, 1] = 1.0
    solved = factor.solve(rhs)
    schur = float(solved[:, 1].sum())
    if schur <= 0.0:
        raise RankDeficientLibrary(
            f"Schur complement {schur:.3e} is not positive; the restricted "
            "Gram block is numerically indefinite"
        )
    lam = (float(solved[:, 0].sum()) - float(budget)) / schur
    return SubproblemSolution(free_values=solved[:, 0] - lam * solved[:, 1], multiplier=lam)
