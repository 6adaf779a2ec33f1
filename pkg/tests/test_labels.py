import numpy as np
import pytest

from predsearch.errors import EmptyPoolError
from predsearch.learning.labels import (
    collect_sample,
    exact_marginals,
    make_labeled_sample,
    marginals,
    pool_digest,
    softmax_weights,
    solution_weights,
)
from predsearch.models.solve_model import PoolEntry, SolutionPool, SolveParams


def pool_of(*entries):
    return SolutionPool(entries=[PoolEntry(x=list(x), objective=obj) for x, obj in entries])


class TestWeights:
    def test_two_objectives(self):
        w = softmax_weights([1.0, 2.0])
        np.testing.assert_allclose(w, [0.7310585786300049, 0.2689414213699951], rtol=1e-12)

    def test_equal_objectives(self):
        np.testing.assert_array_equal(softmax_weights([5.0, 5.0]), [0.5, 0.5])

    def test_single_solution(self):
        np.testing.assert_array_equal(solution_weights(pool_of(([1, 0], 3.0))), [1.0])

    def test_shift_invariant_and_stable(self):
        w = softmax_weights([1.0, 2.0, 4.0])
        np.testing.assert_allclose(softmax_weights([1001.0, 1002.0, 1004.0]), w, rtol=1e-12)
        assert np.all(np.isfinite(softmax_weights([-5000.0, 0.0])))

    def test_temperature(self):
        hot = softmax_weights([1.0, 2.0], temperature=100.0)
        assert abs(hot[0] - hot[1]) < 0.01

    def test_empty(self):
        with pytest.raises(EmptyPoolError):
            softmax_weights([])


class TestMarginals:
    def test_weighted_sum(self):
        pool = pool_of(([1, 0], 1.0), ([0, 0], 2.0))
        p = marginals(pool, [0.73106, 0.26894])
        np.testing.assert_allclose(p, [0.73106, 0.0])

    def test_all_ones(self):
        pool = pool_of(([1, 1, 1], -3.0))
        np.testing.assert_array_equal(marginals(pool, [1.0]), [1.0, 1.0, 1.0])

    def test_three_vars(self):
        pool = pool_of(([1, 0, 1], 0.0), ([0, 0, 1], 0.0))
        np.testing.assert_allclose(marginals(pool, [0.5, 0.5]), [0.5, 0.0, 1.0])

    def test_binary_prefix_only(self):
        pool = pool_of(([1, 0, 2.75], -1.0))
        np.testing.assert_array_equal(marginals(pool, [1.0], q=2), [1.0, 0.0])

    def test_exact_marginals_triangle(self, triangle):
        # feasible sets: {} (obj 0) and three singletons (obj -1)
        p = exact_marginals(triangle)
        e = np.exp(1.0)
        np.testing.assert_allclose(p, np.full(3, e / (1.0 + 3.0 * e)))


class TestSamples:
    def test_make_labeled_sample(self, two_var):
        pool = pool_of(([1, 0], -1.0), ([0, 1], -1.0), ([0, 0], 0.0))
        s = make_labeled_sample(two_var, pool)
        assert s.instance_name == "two_var"
        assert s.bks_objective == -1.0
        assert sum(s.weights) == pytest.approx(1.0)
        assert s.marginals[0] == pytest.approx(s.marginals[1])
        assert s.pool_digest == pool_digest(pool, 2)

    def test_digest_changes_with_pool(self):
        a = pool_of(([1, 0], -1.0))
        b = pool_of(([0, 1], -1.0))
        assert pool_digest(a, 2) != pool_digest(b, 2)

    def test_collect_from_solver(self, triangle):
        s = collect_sample(triangle, SolveParams(time_limit=None, rel_gap_tol=1e-9))
        assert s.bks_objective == -1.0
        assert len(s.marginals) == 3
        assert all(0.0 <= p <= 1.0 for p in s.marginals)
