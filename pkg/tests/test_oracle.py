"""Tests for the exact branch-and-bound oracle."""

import pytest

from conftest import brute_force_optimum
from distiller.baselines import minset_weighted
from distiller.errors import OracleLimitError
from distiller.models import CoverageMatrix, WeightScheme
from distiller.oracle import exact_minset, optimum_value
from distiller.solver import SolverConfig, moonlight_distill
from distiller.utils.synthetic import random_dense


class TestExactMinset:
    """Tests for exact_minset."""

    def test_a0_unweighted(self, a0):
        selection = exact_minset(a0)
        assert selection.chosen == frozenset({0, 4})
        assert optimum_value(a0) == 2

    def test_a0_weighted(self, a0w):
        selection = exact_minset(a0w, WeightScheme.SIZE)
        assert selection.chosen == frozenset({0, 1, 2, 3})
        assert optimum_value(a0w, WeightScheme.SIZE) == 15

    def test_row_limit(self):
        matrix = CoverageMatrix.from_dense([[1] * 8] * 21)
        with pytest.raises(OracleLimitError):
            exact_minset(matrix)

    def test_all_singular(self):
        matrix = CoverageMatrix.from_dense([[0, 0], [0, 0]])
        assert exact_minset(matrix).chosen == frozenset()

    def test_lexicographic_tie_break(self):
        # {0, 3} and {1, 2} both cover everything with two rows
        matrix = CoverageMatrix.from_dense([[1, 1, 0, 0], [1, 0, 1, 0],
                                            [0, 1, 0, 1], [0, 0, 1, 1]])
        assert exact_minset(matrix).chosen == frozenset({0, 3})

    @pytest.mark.parametrize('weighted', [False, True])
    def test_matches_brute_force(self, rng, weighted):
        for _ in range(150):
            n_rows, n_cols = int(rng.integers(1, 11)), int(rng.integers(1, 13))
            dense = random_dense(n_rows, n_cols, float(rng.uniform(0.1, 0.6)), rng)
            weights = rng.integers(1, 20, size=n_rows).tolist() if weighted else None
            scheme = WeightScheme.SIZE if weighted else WeightScheme.UNWEIGHTED
            matrix = CoverageMatrix.from_dense(dense, weights, scheme)

            best_weight, best_ids = brute_force_optimum(dense, weights)
            selection = exact_minset(matrix, scheme)
            if weighted:
                assert selection.total_weight == best_weight
            else:
                assert selection.size == best_weight
            assert tuple(sorted(selection.chosen)) == best_ids

    @pytest.mark.parametrize('scheme', [WeightScheme.UNWEIGHTED, WeightScheme.SIZE])
    def test_lower_bound_for_distillers(self, rng, scheme):
        for _ in range(200):
            n_rows = int(rng.integers(1, 13))
            dense = random_dense(n_rows, int(rng.integers(1, 17)), float(rng.uniform(0.1, 0.6)), rng)
            weights = rng.integers(1, 20, size=n_rows).tolist() if scheme.weighted else None
            matrix = CoverageMatrix.from_dense(dense, weights, scheme)

            optimum = optimum_value(matrix, scheme)
            for selection in (moonlight_distill(matrix, SolverConfig(scheme=scheme)),
                              minset_weighted(matrix, scheme)):
                value = selection.total_weight if scheme.weighted else selection.size
                assert optimum <= value, selection.algo
