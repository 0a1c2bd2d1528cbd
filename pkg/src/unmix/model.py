"""Problem containers, input validation, and objective evaluation.

The original task is
    minimize 0.5 * ||y - A x||^2   subject to   x >= lower_bounds,  sum(x) = 1
over abundance vectors x of length P, where A is an N x P spectral library.
Substituting the slack variable (x - lower_bounds) turns it into a
nonnegativity-constrained problem whose quadratic data (Gram matrix, linear
term, budget) is held by :class:`ShiftedProblem`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InfeasibleLowerBounds, NonFiniteInput

_GRAM_SYMMETRY_RTOL = 1e-12


def _frozen_array(values, ndim, name):
    arr = np.array(values, dtype=float, order="C")
    if arr.ndim != ndim:
        raise DimensionMismatch(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SpectralLibrary:
    """Dense endmember library: one spectrum of length ``n_bands`` per column.

    All entries must be finite and both dimensions nonzero. The stored array
    is read-only so instances can be shared across concurrent solves.
    """

    entries: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.entries, 2, "library entries")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionMismatch(f"library must be at least 1x1, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise NonFiniteInput("library entries contain NaN or infinite values")
        object.__setattr__(self, "entries", arr)

    @property
    def n_bands(self) -> int:
        return self.entries.shape[0]

    @property
    def n_endmembers(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class UnmixingProblem:
    """One measured spectrum plus the library and per-endmember lower bounds.

    Construction only coerces the arrays; call :func:`validate_problem` (done
    automatically by the high-level drivers) to enforce the feasibility and
    dimension contracts.
    """

    library: SpectralLibrary
    measurement: np.ndarray
    lower_bounds: np.ndarray | None = None

    def __post_init__(self):
        lib = self.library
        if not isinstance(lib, SpectralLibrary):
            lib = SpectralLibrary(lib)
            object.__setattr__(self, "library", lib)
        object.__setattr__(self, "measurement", _frozen_array(self.measurement, 1, "measurement"))
        bounds = self.lower_bounds
        if bounds is None:
            bounds = np.zeros(lib.n_endmembers)
        object.__setattr__(self, "lower_bounds", _frozen_array(bounds, 1, "lower_bounds"))


def validate_lower_bounds(lower_bounds, n_endmembers, primal_tol=1e-10):
    """Check that the bounds leave the sum-to-one constraint satisfiable."""
    bounds = np.asarray(lower_bounds, dtype=float)
    if bounds.shape != (n_endmembers,):
        raise DimensionMismatch(
            f"lower_bounds has length {bounds.size}, expected {n_endmembers}"
        )
    if not np.isfinite(bounds).all():
        raise NonFiniteInput("lower_bounds contain NaN or infinite values")
    if bounds.min(initial=0.0) < 0.0:
        raise InfeasibleLowerBounds(f"lower_bounds must be nonnegative, min is {bounds.min()}")
    total = float(bounds.sum())
    if total > 1.0 + primal_tol:
        raise InfeasibleLowerBounds(f"sum of lower_bounds is {total}, which exceeds 1")


def validate_problem(problem: UnmixingProblem, primal_tol=1e-10) -> None:
    """Raise unless the problem satisfies all structural invariants.

    Feasibility of the bounds is tested with slack ``primal_tol`` so inputs
    produced in floating point are not rejected at the boundary.
    """
    lib = problem.library
    if problem.measurement.size != lib.n_bands:
        raise DimensionMismatch(
            f"measurement has length {problem.measurement.size}, "
            f"expected {lib.n_bands} (library rows)"
        )
    if not np.isfinite(problem.measurement).all():
        raise NonFiniteInput("measurement contains NaN or infinite values")
    validate_lower_bounds(problem.lower_bounds, lib.n_endmembers, primal_tol)


@dataclass(frozen=True)
class ShiftedProblem:
    """Quadratic form of the nonnegativity-constrained problem.

    Holds the Gram matrix ``A^T A``, the linear term ``A^T target``, and the
    remaining simplex ``budget`` (one minus the sum of the lower bounds). The
    Gram matrix is symmetrized on construction; positive semidefiniteness is
    not checked eagerly and surfaces as a factorization error instead.

    ``shifted_target`` and ``library`` are optional: they are filled in by
    :func:`unmix.shift.shift_problem` and let the test oracle evaluate
    objectives directly from residual norms, but a problem stated purely as
    (gram, linear, budget) is accepted as well.
    """

    gram: np.ndarray
    linear: np.ndarray
    budget: float
    shifted_target: np.ndarray | None = None
    const_term: float | None = None
    library: SpectralLibrary | None = None

    def __post_init__(self):
        gram = _frozen_array(self.gram, 2, "gram")
        p = gram.shape[0]
        if gram.shape != (p, p) or p < 1:
            raise DimensionMismatch(f"gram must be square and nonempty, got shape {gram.shape}")
        if not np.isfinite(gram).all():
            raise NonFiniteInput("gram contains NaN or infinite values")
        scale = max(1.0, float(np.abs(gram).max()))
        if np.abs(gram - gram.T).max() > _GRAM_SYMMETRY_RTOL * scale:
            raise ValueError("gram matrix is asymmetric beyond the 1e-12 relative tolerance")
        gram = _frozen_array(0.5 * (gram + gram.T), 2, "gram")
        object.__setattr__(self, "gram", gram)

        linear = _frozen_array(self.linear, 1, "linear")
        if linear.size != p:
            raise DimensionMismatch(f"linear has length {linear.size}, expected {p}")
        if not np.isfinite(linear).all():
            raise NonFiniteInput("linear contains NaN or infinite values")
        object.__setattr__(self, "linear", linear)

        budget = float(self.budget)
        if not np.isfinite(budget) or budget < 0.0:
            raise ValueError(f"budget must be finite and nonnegative, got {budget}")
        object.__setattr__(self, "budget", budget)

        target = self.shifted_target
        if target is not None:
            target = _frozen_array(target, 1, "shifted_target")
            if not np.isfinite(target).all():
                raise NonFiniteInput("shifted_target contains NaN or infinite values")
            object.__setattr__(self, "shifted_target", target)

        const = self.const_term
        if const is None:
            const = 0.5 * float(target @ target) if target is not None else 0.0
        else:
            const = float(const)
            if const < 0.0:
                raise ValueError(f"const_term must be nonnegative, got {const}")
            if target is not None:
                expected = 0.5 * float(target @ target)
                if abs(const - expected) > 1e-10 * max(1.0, expected):
                    raise ValueError(
                        f"const_term {const} does not match half the squared "
                        f"norm of shifted_target ({expected})"
                    )
        object.__setattr__(self, "const_term", const)

        if self.library is not None and not isinstance(self.library, SpectralLibrary):
            object.__setattr__(self, "library", SpectralLibrary(self.library))

    @property
    def size(self) -> int:
        """Number of endmembers P."""
        return self.linear.size


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and policies for the active-set solver.

    ``max_outer_iterations=None`` resolves to ``10 * P`` at solve time.
    ``tie_break`` selects how a tied blocking index is chosen: ``"smallest"``
    keeps runs reproducible, ``"random"`` draws uniformly among the tied
    minimizers using ``tie_seed``. ``ridge_regularization`` adds a jitter of
    ``1e-10 * trace / |F|`` to each restricted Gram block before factorizing;
    it is off by default because it perturbs the optimizer.
    """

    primal_tol: float = 1e-10
    dual_tol: float = 1e-10
    max_outer_iterations: int | None = None
    tie_break: str = "smallest"
    tie_seed: int = 0
    ridge_regularization: bool = False

    def __post_init__(self):
        if not self.primal_tol > 0.0:
            raise ValueError(f"primal_tol must be positive, got {self.primal_tol}")
        if not self.dual_tol > 0.0:
            raise ValueError(f"dual_tol must be positive, got {self.dual_tol}")
        if self.max_outer_iterations is not None and self.max_outer_iterations < 1:
            raise ValueError("max_outer_iterations must be at least 1")
        if self.tie_break not in ("smallest", "random"):
            raise ValueError(f"tie_break must be 'smallest' or 'random', got {self.tie_break!r}")

    def iteration_cap(self, n_endmembers: int) -> int:
        if self.max_outer_iterations is not None:
            return self.max_outer_iterations
        return 10 * n_endmembers


def objective_value(shifted: ShiftedProblem, x) -> float:
    """Evaluate ``0.5 x^T G x - g^T x + const`` at the shifted abundances.

    Equals half the squared residual norm of the shifted fit, so the result
    is nonnegative up to rounding.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (shifted.size,):
        raise DimensionMismatch(f"abundance vector has shape {x.shape}, expected ({shifted.size},)")
    quad = 0.5 * float(x @ (shifted.gram @ x))
    return quad - float(shifted.linear @ x) + shifted.const_term
