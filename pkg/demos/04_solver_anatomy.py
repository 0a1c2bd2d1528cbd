"""Step through the active-set machinery by hand on one small instance.

Shows the three moves the solver alternates between - the equality-
constrained solve, the blocking step that pins a variable at zero, and the
multiplier check that releases one - plus the monotone objective trace and
a cross-check against the exhaustive oracle.
"""

from dataclasses import replace

import numpy as np

from unmix import (
    SpectralLibrary,
    UnmixingProblem,
    active_set_solve,
    brute_force_solve,
    initialize_state,
    lagrange_multipliers,
    max_feasible_step,
    objective_value,
    release_from_active,
    shift_problem,
    solve_subproblem,
    transfer_to_active,
)

rng = np.random.default_rng(2)

endmembers = np.abs(rng.standard_normal((15, 5)))
library = SpectralLibrary(endmembers)
# A sparse ground truth: three of the five endmembers are absent, so the
# solver has to pin variables on its way to the optimum.
measured = endmembers @ np.array([0.8, 0.0, 0.2, 0.0, 0.0]) + 0.08 * rng.standard_normal(15)
shifted = shift_problem(UnmixingProblem(library, measured))

print("budget:", shifted.budget)
state = initialize_state(shifted)
print("start: free =", state.free, " objective = %.6f"
      % objective_value(shifted, state.iterate))

for step_number in range(1, 30):
    sub = solve_subproblem(shifted.gram, shifted.linear, shifted.budget, state.free)
    print(f"\nsolve {step_number}: candidate on free set {state.free}")
    print("  candidate:", np.round(sub.free_values, 4), " lambda = %.4f" % sub.multiplier)
    if sub.free_values.min() >= -1e-10:
        iterate = np.zeros(shifted.size)
        iterate[state.free] = np.maximum(sub.free_values, 0.0)
        state = replace(state, iterate=iterate)
        mu = lagrange_multipliers(shifted, sub, state.free, state.active)
        print("  feasible; pinned-variable multipliers:", np.round(mu, 4))
        released = release_from_active(state, mu, 1e-10)
        if released is None:
            print("  all multipliers nonnegative -> optimal")
            break
        freed = np.setdiff1d(released.free, state.free)
        print("  releasing variable", freed, "back to the free set")
        state = released
    else:
        step, blocking = max_feasible_step(state, sub)
        direction = np.zeros(shifted.size)
        direction[state.free] = sub.free_values - state.iterate[state.free]
        state = transfer_to_active(state, step, direction, blocking)
        print("  infeasible; step %.4f pins variable %d" % (step, blocking))
    print("  objective now %.6f" % objective_value(shifted, state.iterate))

solution = active_set_solve(shifted)
print("\nfull solver result:", np.round(solution.shifted_abundances, 4))
print("objective trace:", np.round(solution.objective_trace, 6))

oracle = brute_force_solve(shifted)
print("exhaustive-oracle optimum:", np.round(oracle.shifted_abundances, 4))
print("objective difference:", abs(solution.objective - oracle.objective))
