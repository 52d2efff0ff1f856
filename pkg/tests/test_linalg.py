from fractions import Fraction

import pytest

from core.errors import NoSolution, ShapeMismatch, Singular
from core.linalg import (
    RationalMatrix,
    determinant,
    format_rational,
    hstack,
    inverse,
    is_invertible,
    nullspace,
    parse_rational,
    rank,
    rref,
    solve_right,
    vstack,
)


def M(*rows):
    return RationalMatrix(rows)


class TestRationals:
    def test_parse_and_format(self):
        assert parse_rational("3/6") == Fraction(1, 2)
        assert parse_rational(" -4 ") == Fraction(-4)
        assert format_rational(Fraction(6, 3)) == "2"
        assert format_rational(Fraction(-3, 9)) == "-1/3"

    @pytest.mark.parametrize("text", ["", "1/0", "a/b", "1.5"])
    def test_parse_rejects(self, text):
        with pytest.raises(ValueError):
            parse_rational(text)

    def test_floats_refused(self):
        with pytest.raises(TypeError):
            RationalMatrix([[0.5]])


class TestMatrix:
    def test_shape_and_access(self):
        m = M([1, 2, 3], ["1/2", 0, -1])
        assert m.shape == (2, 3)
        assert m[1, 0] == Fraction(1, 2)
        assert m.T.shape == (3, 2)
        assert m.columns(1, 3) == M([2, 3], [0, -1])

    def test_ragged_rows(self):
        with pytest.raises(ShapeMismatch):
            M([1, 2], [3])

    def test_empty_needs_width(self):
        with pytest.raises(ShapeMismatch):
            RationalMatrix([])
        assert RationalMatrix.empty(4).shape == (0, 4)

    def test_arithmetic(self):
        a = M([1, 2], [3, 4])
        b = M([0, 1], [1, 0])
        assert a @ b == M([2, 1], [4, 3])
        assert a + b - b == a
        assert (-a) + a == RationalMatrix.zeros(2, 2)
        assert a * Fraction(1, 2) == M(["1/2", 1], ["3/2", 2])
        assert (a - a).is_zero()

    def test_matmul_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            M([1, 2]) @ M([1, 2])

    def test_stacking(self):
        assert vstack(M([1, 2]), M([3, 4])) == M([1, 2], [3, 4])
        assert hstack(M([1], [2]), M([3], [4])) == M([1, 3], [2, 4])

    def test_text_rows_round_trip(self):
        m = M(["1/3", -2], [0, "7/5"])
        assert RationalMatrix.from_text_rows(m.to_text_rows(), ncols=2) == m


class TestElimination:
    def test_rank(self):
        assert rank(M([1, 2, 3], [2, 4, 6])) == 1
        assert rank(RationalMatrix.identity(4)) == 4
        assert rank(RationalMatrix.empty(3)) == 0

    def test_rref_pivots(self):
        rows, pivots = rref(M([0, 2, 4], [1, 1, 1]))
        assert pivots == [0, 1]
        assert rows[1] == [0, 1, 2]

    def test_determinant(self):
        assert determinant(M([2, 1], [1, 1])) == 1
        assert determinant(M(["1/2", 0], [0, 3])) == Fraction(3, 2)
        assert determinant(M([0, 1], [1, 0])) == -1
        assert determinant(M([1, 2], [2, 4])) == 0

    def test_inverse(self):
        m = M([2, 1], [7, 4])
        assert m @ inverse(m) == RationalMatrix.identity(2)
        assert inverse(m) @ m == RationalMatrix.identity(2)

    def test_singular_inverse(self):
        with pytest.raises(Singular):
            inverse(M([1, 2], [2, 4]))
        assert not is_invertible(M([1, 2], [2, 4]))

    def test_singular_is_zero_division(self):
        with pytest.raises(ZeroDivisionError):
            inverse(RationalMatrix.zeros(2, 2))

    def test_nullspace(self):
        m = M([1, 1, 0], [0, 1, 1])
        kernel = nullspace(m)
        assert kernel.nrows == 1
        assert (m @ kernel.T).is_zero()

    def test_trivial_nullspace(self):
        assert nullspace(RationalMatrix.identity(3)).shape == (0, 3)

    def test_solve_right(self):
        a = M([1, 0, 0], [0, 1, 0])
        b = M([3, -2, 0])
        x = solve_right(a, b)
        assert x @ a == b

    def test_solve_right_inconsistent(self):
        with pytest.raises(NoSolution):
            solve_right(M([1, 0, 0]), M([0, 1, 0]))

    def test_solve_right_needs_rows(self):
        with pytest.raises(ShapeMismatch):
            solve_right(RationalMatrix.empty(2), M([1, 0]))
