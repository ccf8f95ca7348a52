import itertools

import numpy as np
import pytest

from hierot.errors import TooLarge, UnbalancedMarginals
from hierot.exact_ot import (DualPotentials, TransportPlan, permutation_oracle,
                             solve_ot, verify_optimality)
from hierot.sampling import rng_from_seed


def two_by_two():
    # cost of matching {0, 1} to {2, 3} on the line, squared distances
    return np.array([[4.0, 9.0], [1.0, 4.0]])


def test_monotone_matching_value():
    # both permutations enumerated by hand: id -> 4, swap -> 5
    c = two_by_two()
    costs = [0.5 * (c[0, p[0]] + c[1, p[1]])
             for p in itertools.permutations(range(2))]
    assert min(costs) == 4.0
    plan, duals, value = solve_ot(c, np.array([0.5, 0.5]), np.array([0.5, 0.5]))
    assert value == pytest.approx(4.0, abs=1e-12)
    assert verify_optimality(plan, duals, c)


def test_identity_plan_zero_cost():
    c = np.array([[0.0, 5.0], [5.0, 0.0]])
    a = np.array([0.3, 0.7])
    plan, duals, value = solve_ot(c, a, a)
    assert value == pytest.approx(0.0, abs=1e-15)
    assert np.allclose(plan.matrix, np.diag(a))
    assert verify_optimality(plan, duals, c)


def test_single_row_problem():
    c = np.array([[1.0, 2.0, 3.0]])
    b = np.array([0.2, 0.3, 0.5])
    plan, duals, value = solve_ot(c, np.array([1.0]), b)
    assert value == pytest.approx(float(b @ c[0]))
    assert np.allclose(plan.matrix[0], b)
    assert verify_optimality(plan, duals, c)


def test_unbalanced_marginals_rejected():
    c = np.zeros((2, 2))
    with pytest.raises(UnbalancedMarginals):
        solve_ot(c, np.array([0.5, 0.6]), np.array([0.5, 0.5]))


def test_oracle_limits_and_zero_cost():
    assert permutation_oracle(np.zeros((3, 3))) == 0.0
    with pytest.raises(TooLarge):
        permutation_oracle(np.zeros((8, 8)))


def test_oracle_matches_solver_on_random_instances():
    rng = rng_from_seed(123)
    for _ in range(200):
        n = int(rng.integers(2, 7))
        c = rng.random((n, n)) * 10
        a = np.full(n, 1.0 / n)
        plan, duals, value = solve_ot(c, a, a)
        assert verify_optimality(plan, duals, c)
        assert value == pytest.approx(permutation_oracle(c), abs=1e-10)
        # basic solution: at most 2n - 1 strictly positive entries
        assert int((plan.matrix > 0).sum()) <= 2 * n - 1


def test_general_marginals_against_lp_rounding():
    rng = rng_from_seed(77)
    for _ in range(100):
        m = int(rng.integers(1, 7))
        k = int(rng.integers(1, 7))
        c = rng.random((m, k)) * 5
        a = rng.random(m) + 0.1
        a /= a.sum()
        b = rng.random(k) + 0.1
        b /= b.sum()
        plan, duals, value = solve_ot(c, a, b)
        assert verify_optimality(plan, duals, c)
        assert np.abs(plan.matrix.sum(axis=1) - a).max() <= 1e-10
        assert np.abs(plan.matrix.sum(axis=0) - b).max() <= 1e-10
        gap = abs(value - float(a @ duals.phi + b @ duals.psi))
        assert gap <= 1e-8 * (1 + abs(value))


def test_value_invariant_under_permutation():
    rng = rng_from_seed(5)
    c = rng.random((5, 4))
    a = rng.random(5) + 0.1
    a /= a.sum()
    b = rng.random(4) + 0.1
    b /= b.sum()
    _, _, value = solve_ot(c, a, b)
    pr = rng.permutation(5)
    pc = rng.permutation(4)
    _, _, value_p = solve_ot(c[np.ix_(pr, pc)], a[pr], b[pc])
    assert value_p == pytest.approx(value, abs=1e-10)


def test_value_scales_linearly_in_cost():
    rng = rng_from_seed(6)
    c = rng.random((4, 4))
    a = np.full(4, 0.25)
    _, _, value = solve_ot(c, a, a)
    for lam in (0.5, 2.0, 7.5):
        _, _, scaled = solve_ot(lam * c, a, a)
        assert scaled == pytest.approx(lam * value, abs=1e-12 * (1 + lam))


def test_verify_optimality_rejects_swapped_plan():
    c = two_by_two()
    a = np.array([0.5, 0.5])
    plan, duals, value = solve_ot(c, a, a)
    # move all mass to the off-optimal permutation: cost 5 vs optimum 4
    swapped = TransportPlan(matrix=np.array([[0.0, 0.5], [0.5, 0.0]]),
                            row_marginal=a, col_marginal=a)
    assert float((swapped.matrix * c).sum()) == pytest.approx(5.0)
    assert not verify_optimality(swapped, duals, c)


def test_verify_optimality_zero_cost_any_plan():
    c = np.zeros((2, 2))
    a = np.array([0.5, 0.5])
    plan = TransportPlan(matrix=np.array([[0.25, 0.25], [0.25, 0.25]]),
                         row_marginal=a, col_marginal=a)
    duals = DualPotentials(phi=np.zeros(2), psi=np.zeros(2))
    assert verify_optimality(plan, duals, c)


def test_tiny_weights_are_dropped():
    c = np.array([[1.0, 2.0], [3.0, 0.5]])
    a = np.array([1.0 - 1e-16, 1e-16])
    b = np.array([0.5, 0.5])
    plan, duals, value, info = solve_ot(c, a, b, return_info=True)
    assert info.dropped_rows == (1,)
    assert plan.matrix[1].sum() == 0.0
    assert verify_optimality(plan, duals, c)


def test_degenerate_marginals_do_not_cycle():
    # many exact ties force degenerate pivots
    rng = rng_from_seed(42)
    for _ in range(50):
        n = int(rng.integers(2, 6))
        c = np.round(rng.random((n, n)) * 4) / 4.0
        a = np.full(n, 1.0 / n)
        plan, duals, value = solve_ot(c, a, a)
        assert verify_optimality(plan, duals, c)
        assert value == pytest.approx(permutation_oracle(c), abs=1e-10)
