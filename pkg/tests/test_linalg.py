import random
from fractions import Fraction

import pytest

from grossone.arith import ArithConfig, GROSSONE, ONE, make
from grossone.linalg import (
    GrossMatrix,
    GrossVector,
    SingularMatrixError,
    matvec,
    rational_rank,
    solve_linear,
    solve_rational_columns,
    solve_rational_vector,
)

from helpers import random_fraction, random_gross

F = Fraction
G = GROSSONE


class TestMatvec:
    def test_identity(self):
        v = GrossVector([G, 1 - G, make([(-2, 3)])])
        assert matvec(GrossMatrix.identity(3), v) == v

    def test_diagonal_on_infinitesimals(self):
        v = GrossVector([make([(-1, 1)]), make([(-2, 1)])])
        assert matvec(GrossMatrix.identity(2), v) == v

    def test_perturbation_expansion(self):
        # Hand expansion of a 2x2 rational matrix against (G^-1, G^-2).
        matrix = GrossMatrix([[1, 2], [3, 4]])
        stack = GrossVector([make([(-1, 1)]), make([(-2, 1)])])
        expected = GrossVector([
            make([(-1, 1), (-2, 2)]),
            make([(-1, 3), (-2, 4)]),
        ])
        assert matvec(matrix, stack) == expected

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            matvec(GrossMatrix.identity(2), GrossVector([1, 2, 3]))

    def test_distributes_over_addition(self):
        rng = random.Random(23)
        for _ in range(15):
            matrix = GrossMatrix(
                [[random_gross(rng, max_terms=2) for _ in range(3)] for _ in range(2)]
            )
            u = GrossVector([random_gross(rng, max_terms=2) for _ in range(3)])
            v = GrossVector([random_gross(rng, max_terms=2) for _ in range(3)])
            assert matvec(matrix, u + v) == matvec(matrix, u) + matvec(matrix, v)


class TestSolveLinear:
    def test_identity_system(self):
        rhs = GrossVector([G, 1 - G, make([(-3, 5)])])
        assert solve_linear(GrossMatrix.identity(3), rhs) == rhs

    def test_series_solution_and_residual(self):
        matrix = GrossMatrix([[ONE + G, 0], [0, 1]])
        rhs = GrossVector([G, ONE])
        k = 8
        solution = solve_linear(matrix, rhs, ArithConfig(truncation_order=k))
        assert solution[0].coefficient(0) == 1
        assert solution[0].coefficient(-1) == -1
        assert solution[0].coefficient(-2) == 1
        assert solution[1] == ONE
        residual = matvec(matrix, solution) - rhs
        for entry, rhs_entry in zip(residual, rhs):
            if not entry.is_zero():
                assert entry.leading_power <= rhs_entry.leading_power - k

    def test_exact_for_rational_matrices(self):
        rng = random.Random(41)
        for _ in range(20):
            n = rng.randint(1, 4)
            rows = [[random_fraction(rng, 9) for _ in range(n)] for _ in range(n)]
            rhs = [random_fraction(rng, 9) for _ in range(n)]
            try:
                expected = solve_rational_vector(rows, rhs)
            except SingularMatrixError:
                continue
            solution = solve_linear(GrossMatrix(rows), GrossVector(rhs))
            assert [e.finite_part() for e in solution] == expected
            assert all(len(e.terms) <= 1 for e in solution)

    def test_pivots_on_largest_order(self):
        # Column one holds an infinitesimal and a finite entry; the finite row
        # must be chosen as the pivot, and the answer checks out exactly at
        # the leading orders.
        matrix = GrossMatrix([[make([(-1, 1)]), 1], [1, 1]])
        rhs = GrossVector([ONE, 2 * ONE])
        solution = solve_linear(matrix, rhs)
        assert solution[0].coefficient(0) == 1
        assert solution[0].coefficient(-1) == 1
        assert solution[1].coefficient(0) == 1
        assert solution[1].coefficient(-1) == -1

    def test_singular_raises(self):
        matrix = GrossMatrix([[1, 2], [2, 4]])
        with pytest.raises(SingularMatrixError):
            solve_linear(matrix, GrossVector([1, 1]))

    def test_requires_square(self):
        with pytest.raises(ValueError):
            solve_linear(GrossMatrix([[1, 2]]), GrossVector([1]))


class TestRationalSolvers:
    def test_round_trip(self):
        rng = random.Random(5)
        for _ in range(25):
            n = rng.randint(1, 5)
            rows = [[random_fraction(rng, 9) for _ in range(n)] for _ in range(n)]
            rhs = [random_fraction(rng, 9) for _ in range(n)]
            try:
                solution = solve_rational_vector(rows, rhs)
            except SingularMatrixError:
                assert rational_rank(rows) < n
                continue
            recovered = [
                sum(rows[i][j] * solution[j] for j in range(n)) for i in range(n)
            ]
            assert recovered == rhs

    def test_multi_rhs_matches_single(self):
        rows = [[F(2), F(1)], [F(1), F(3)]]
        cols = [[F(1), F(0)], [F(0), F(1)], [F(5), F(-7)]]
        stacked = solve_rational_columns(rows, cols)
        for col, solution in zip(cols, stacked):
            assert solve_rational_vector(rows, col) == solution

    def test_rank(self):
        assert rational_rank([[F(1), F(2)], [F(2), F(4)]]) == 1
        assert rational_rank([[F(1), F(0)], [F(0), F(1)]]) == 2
        assert rational_rank([[F(0), F(0)]]) == 0
        assert rational_rank([[F(1), F(2), F(3)]]) == 1


class TestContainers:
    def test_matrix_must_be_rectangular(self):
        with pytest.raises(ValueError):
            GrossMatrix([[1, 2], [3]])

    def test_matrix_must_be_nonempty(self):
        with pytest.raises(ValueError):
            GrossMatrix([])

    def test_vector_length_mismatch_on_add(self):
        with pytest.raises(ValueError):
            GrossVector([1]) + GrossVector([1, 2])

    def test_finite_parts(self):
        v = GrossVector([3 * G + 5, make([(-1, 7)])])
        assert v.finite_parts() == (F(5), F(0))
