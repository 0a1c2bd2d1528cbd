"""Unmix a single measured spectrum against a small synthetic library.

Builds three smooth synthetic endmembers over 40 bands, mixes them with
known fractions plus noise, and recovers the abundances with the
fully constrained (nonnegative, sum-to-one) solver.
"""

import numpy as np

from unmix import SpectralLibrary, UnmixingProblem, shift_problem, unmix, verify_kkt

rng = np.random.default_rng(7)

# Three synthetic endmembers: smooth bumps across 40 spectral bands.
bands = np.linspace(0.0, 1.0, 40)
endmembers = np.column_stack([
    np.exp(-0.5 * ((bands - center) / 0.18) ** 2) + 0.05
    for center in (0.2, 0.5, 0.8)
])
library = SpectralLibrary(endmembers)

true_fractions = np.array([0.6, 0.1, 0.3])
measured = endmembers @ true_fractions + 0.01 * rng.standard_normal(40)

problem = UnmixingProblem(library, measured)
solution = unmix(problem)

print("true fractions:     ", np.round(true_fractions, 4))
print("estimated fractions:", np.round(solution.abundances, 4))
print("abundance sum:      ", solution.abundances.sum())
print("objective (half SSR):", solution.objective)
print("outer iterations:   ", solution.outer_iterations)
print("free endmembers:    ", solution.final_free)

# The solution comes with a full optimality certificate.
report = verify_kkt(
    shift_problem(problem),
    solution.shifted_abundances,
    solution.eq_multiplier,
    solution.ineq_multipliers,
)
print("\nKKT certificate")
print("  stationarity residual:   ", report.stationarity_residual)
print("  sum-constraint residual: ", report.primal_eq_residual)
print("  bound violation:         ", report.primal_ineq_violation)
print("  multiplier violation:    ", report.dual_violation)
print("  complementarity residual:", report.complementarity_residual)
print("  satisfied:               ", report.satisfied)
