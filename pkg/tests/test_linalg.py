import random
from fractions import Fraction as F

import pytest

from conftest import random_matrix
from partreg import (
    QMatrix,
    QVector,
    nullspace_basis,
    rational,
    residual_functionals,
    rref,
    span_membership,
)


def test_rational_refuses_floats():
    with pytest.raises(TypeError):
        rational(0.5)
    assert rational("1/2") == F(1, 2)


def test_rref_proportional_rows():
    R, pivots, rank = rref(QMatrix.of([[2, 4], [1, 2]]))
    assert R == QMatrix.of([[1, 2], [0, 0]])
    assert pivots == (0,)
    assert rank == 1


def test_rref_identity_fixed_point():
    I3 = QMatrix.identity(3)
    R, pivots, rank = rref(I3)
    assert R == I3 and pivots == (0, 1, 2) and rank == 3


def test_rref_two_by_three():
    # hand reduction: rows (4,-4,2), (5,-5,3) leave pivots in columns 0 and 2
    R, pivots, rank = rref(QMatrix.of([[4, -4, 2], [5, -5, 3]]))
    assert rank == 2
    assert pivots == (0, 2)
    assert R == QMatrix.of([[1, -1, 0], [0, 0, 1]])


def test_rref_idempotent_on_random_matrices():
    rng = random.Random(7)
    for _ in range(25):
        M = random_matrix(rng, rng.randint(1, 4), rng.randint(1, 5))
        R, pivots, rank = rref(M)
        R2, pivots2, rank2 = rref(R)
        assert (R2, pivots2, rank2) == (R, pivots, rank)


def test_span_membership_full_plane():
    coeffs = span_membership(
        [QVector.of([4, 5]), QVector.of([2, 3])], QVector.of([F(-1, 2), 0])
    )
    assert coeffs is not None
    recombined = QVector.of([4, 5]).scale(coeffs[0]) + QVector.of([2, 3]).scale(coeffs[1])
    assert recombined == QVector.of([F(-1, 2), 0])


def test_span_membership_empty_basis():
    assert span_membership([], QVector.zero(3)) == []
    assert span_membership([], QVector.of([0, 1, 0])) is None


def test_span_membership_proportional():
    assert span_membership([QVector.of([4, 5])], QVector.of([2, F(5, 2)])) == [F(1, 2)]
    assert span_membership([QVector.of([4, 5])], QVector.of([2, 3])) is None


def test_span_membership_rejects_dimension_mismatch():
    with pytest.raises(ValueError):
        span_membership([QVector.of([1, 2])], QVector.of([1, 2, 3]))


def test_span_membership_recombines_exactly_on_random_input():
    rng = random.Random(11)
    for _ in range(40):
        dim = rng.randint(1, 4)
        basis = [
            QVector.of([F(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(dim)])
            for _ in range(rng.randint(0, 3))
        ]
        target = QVector.of([F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(dim)])
        coeffs = span_membership(basis, target)
        if coeffs is not None:
            got = QVector.zero(dim)
            for c, b in zip(coeffs, basis):
                got = got + b.scale(c)
            assert got == target


def test_residual_functionals_known_cases():
    full = residual_functionals([QVector.of([1, 0]), QVector.of([0, 1])])
    assert full.rows == 0 and full.cols == 2

    nothing = residual_functionals([], dim=2)
    assert nothing == QMatrix.identity(2)

    line = residual_functionals([QVector.of([4, 5])])
    assert line.rows == 1
    assert line.matvec(QVector.of([4, 5])).is_zero()
    assert line.matvec(QVector.of([2, F(5, 2)])).is_zero()
    assert not line.matvec(QVector.of([2, 3])).is_zero()


def test_residual_functionals_requires_dim_for_empty_set():
    with pytest.raises(ValueError):
        residual_functionals([])


def test_residual_matches_span_membership_on_random_input():
    rng = random.Random(13)
    for _ in range(60):
        dim = rng.randint(1, 3)
        vectors = [
            QVector.of([rng.randint(-2, 2) for _ in range(dim)])
            for _ in range(rng.randint(0, 3))
        ]
        R = residual_functionals(vectors, dim=dim)
        probe = QVector.of([F(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(dim)])
        annihilated = R.rows == 0 or R.matvec(probe).is_zero()
        in_span = span_membership(vectors, probe) is not None
        assert annihilated == in_span


def test_nullspace_known_cases():
    schur_kernel = nullspace_basis(QMatrix.of([[1, 1, -1]]))
    assert len(schur_kernel) == 2
    assert nullspace_basis(QMatrix.identity(3)) == []
    assert len(nullspace_basis(QMatrix.of([[0, 0]]))) == 2


def test_nullspace_vectors_are_exact_and_independent():
    rng = random.Random(17)
    for _ in range(30):
        M = random_matrix(rng, rng.randint(1, 3), rng.randint(1, 5))
        basis = nullspace_basis(M)
        _, _, rank = rref(M)
        assert len(basis) == M.cols - rank
        for vec in basis:
            assert M.matvec(vec).is_zero()
        if basis:
            stacked = QMatrix(len(basis), M.cols, tuple(v.entries for v in basis))
            assert rref(stacked)[2] == len(basis)
