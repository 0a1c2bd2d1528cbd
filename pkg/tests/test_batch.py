import numpy as np
import pytest

from unmix import (
    BatchJob,
    DimensionMismatch,
    InfeasibleLowerBounds,
    SolveStatus,
    batch_summary,
    precompute_gram,
    unmix,
    unmix_batch,
)
from unmix.model import UnmixingProblem
from instances import random_problem


def test_gram_of_identity_library():
    np.testing.assert_array_equal(precompute_gram(np.eye(3)), np.eye(3))


def test_gram_of_duplicated_columns_has_equal_rows():
    column = np.array([1.0, 2.0, 0.5])
    entries = np.column_stack([column, column, np.array([0.0, 1.0, 1.0])])
    gram = precompute_gram(entries)
    np.testing.assert_array_equal(gram[0], gram[1])
    np.testing.assert_array_equal(gram[:, 0], gram[:, 1])


def test_gram_matches_explicit_dot_products():
    rng = np.random.default_rng(51)
    entries = rng.standard_normal((6, 4))
    gram = precompute_gram(entries)
    for i in range(4):
        for j in range(4):
            assert gram[i, j] == pytest.approx(entries[:, i] @ entries[:, j], rel=1e-12)


def test_unmix_interior_point():
    problem = UnmixingProblem(np.eye(2), np.array([0.7, 0.3]))
    solution = unmix(problem)
    np.testing.assert_allclose(solution.abundances, [0.7, 0.3], atol=1e-12)


def test_unmix_respects_lower_bounds():
    problem = UnmixingProblem(np.eye(2), np.array([1.0, 0.0]), np.array([0.0, 0.4]))
    solution = unmix(problem)
    np.testing.assert_allclose(solution.abundances, [0.6, 0.4], atol=1e-12)


def test_unmix_with_saturated_bounds_returns_them():
    problem = UnmixingProblem(np.eye(2), np.array([1.0, 0.0]), np.array([0.4, 0.6]))
    solution = unmix(problem)
    np.testing.assert_array_equal(solution.abundances, [0.4, 0.6])
    assert solution.outer_iterations == 0


def test_unmix_output_satisfies_original_constraints():
    rng = np.random.default_rng(52)
    for _ in range(20):
        problem = random_problem(rng)
        solution = unmix(problem)
        p = problem.library.n_endmembers
        assert (solution.abundances >= problem.lower_bounds - 1e-10).all()
        assert solution.abundances.sum() == pytest.approx(1.0, abs=p * 1e-10)


def test_batch_of_one_equals_single_solve():
    problem = random_problem(np.random.default_rng(53))
    job = BatchJob(problem.library, problem.measurement[:, None],
                   problem.lower_bounds)
    [batched] = unmix_batch(job)
    single = unmix(problem)
    np.testing.assert_array_equal(batched.abundances, single.abundances)


def test_duplicate_pixels_get_identical_solutions():
    problem = random_problem(np.random.default_rng(54))
    pixels = np.column_stack([problem.measurement, problem.measurement])
    job = BatchJob(problem.library, pixels, problem.lower_bounds)
    first, second = unmix_batch(job)
    np.testing.assert_array_equal(first.abundances, second.abundances)


def test_batch_matches_sequential_solves():
    rng = np.random.default_rng(55)
    problem = random_problem(rng, n_endmembers=5, n_bands=20)
    pixels = np.column_stack([
        problem.library.entries @ rng.dirichlet(np.ones(5)) + 0.05 * rng.standard_normal(20)
        for _ in range(50)
    ])
    job = BatchJob(problem.library, pixels, problem.lower_bounds)
    results = unmix_batch(job)
    for column, batched in enumerate(results):
        single = unmix(UnmixingProblem(problem.library, pixels[:, column],
                                       problem.lower_bounds))
        assert np.abs(batched.abundances - single.abundances).max() <= 1e-12


def test_threaded_batch_equals_sequential_batch():
    rng = np.random.default_rng(56)
    problem = random_problem(rng, n_endmembers=4, n_bands=12)
    pixels = rng.standard_normal((12, 16)) * 0.1 + (
        problem.library.entries @ rng.dirichlet(np.ones(4), size=16).T
    )
    job = BatchJob(problem.library, pixels, problem.lower_bounds)
    sequential = unmix_batch(job, jobs=1)
    threaded = unmix_batch(job, jobs=4)
    for left, right in zip(sequential, threaded):
        np.testing.assert_array_equal(left.abundances, right.abundances)
        assert left.outer_iterations == right.outer_iterations


def test_failed_pixel_is_recorded_without_aborting():
    rng = np.random.default_rng(57)
    problem = random_problem(rng, n_endmembers=3, n_bands=8)
    pixels = np.column_stack([problem.measurement,
                              np.full(8, np.nan),
                              problem.measurement])
    job = BatchJob(problem.library, pixels, problem.lower_bounds)
    results = unmix_batch(job)
    assert results[0].status is SolveStatus.OPTIMAL
    assert results[1].status is SolveStatus.FAILED
    assert "NonFiniteInput" in results[1].message
    assert np.isnan(results[1].abundances).all()
    assert results[2].status is SolveStatus.OPTIMAL
    summary = batch_summary(results)
    assert summary == {"pixels": 3, "optimal": 2, "max_iterations": 0, "failed": 1}


def test_batch_rejects_mismatched_pixel_rows():
    problem = random_problem(np.random.default_rng(58), n_bands=10)
    with pytest.raises(DimensionMismatch):
        BatchJob(problem.library, np.ones((7, 2)), problem.lower_bounds)


def test_batch_rejects_infeasible_bounds():
    problem = random_problem(np.random.default_rng(59), n_endmembers=2)
    job = BatchJob(problem.library, problem.measurement[:, None],
                   np.array([0.7, 0.7]))
    with pytest.raises(InfeasibleLowerBounds):
        unmix_batch(job)
