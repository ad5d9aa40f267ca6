"""Exact rational vectors, matrices and the elimination kernel.

Everything is built on fractions.Fraction, so results are exact and
canonical (lowest terms, positive denominator).  Floats are refused at
construction time.  Matrices here are small and dense, which keeps plain
Gauss-Jordan elimination the right tool.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Q = Fraction

Scalar = int | str | Fraction


def rational(value: Scalar) -> Fraction:
    """Coerce to an exact Fraction; floats are refused."""
    if isinstance(value, float):
        raise TypeError(f"exact arithmetic only, got float {value!r}")
    return Fraction(value)


@dataclass(frozen=True)
class QVector:
    """Dense vector of exact rationals."""

    entries: tuple[Fraction, ...]

    @staticmethod
    def of(values: Iterable[Scalar]) -> "QVector":
        return QVector(tuple(rational(v) for v in values))

    @staticmethod
    def zero(dim: int) -> "QVector":
        return QVector((Q(0),) * dim)

    @property
    def dim(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)

    def __add__(self, other: "QVector") -> "QVector":
        self._check_dim(other)
        return QVector(tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "QVector") -> "QVector":
        self._check_dim(other)
        return QVector(tuple(a - b for a, b in zip(self.entries, other.entries)))

    def scale(self, c: Scalar) -> "QVector":
        c = rational(c)
        return QVector(tuple(c * a for a in self.entries))

    def dot(self, other: "QVector") -> Fraction:
        self._check_dim(other)
        return sum((a * b for a, b in zip(self.entries, other.entries)), Q(0))

    def _check_dim(self, other: "QVector") -> None:
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")


@dataclass(frozen=True)
class QMatrix:
    """Dense row-major matrix of exact rationals.

    Zero-row matrices are allowed; they arise naturally as annihilators of
    full spans.  Column count is always at least one.
    """

    rows: int
    cols: int
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        if self.cols < 1:
            raise ValueError("matrix needs at least one column")
        if self.rows < 0 or len(self.entries) != self.rows:
            raise ValueError("row count does not match entries")
        if any(len(row) != self.cols for row in self.entries):
            raise ValueError("ragged rows")

    @staticmethod
    def of(rows: Iterable[Iterable[Scalar]]) -> "QMatrix":
        grid = tuple(tuple(rational(v) for v in row) for row in rows)
        if not grid:
            raise ValueError("use QMatrix.empty for matrices without rows")
        return QMatrix(len(grid), len(grid[0]), grid)

    @staticmethod
    def empty(cols: int) -> "QMatrix":
        return QMatrix(0, cols, ())

    @staticmethod
    def identity(n: int) -> "QMatrix":
        return QMatrix(
            n, n,
            tuple(tuple(Q(1) if i == j else Q(0) for j in range(n)) for i in range(n)),
        )

    @staticmethod
    def from_columns(columns: Sequence[QVector]) -> "QMatrix":
        if not columns:
            raise ValueError("need at least one column")
        dim = columns[0].dim
        if any(c.dim != dim for c in columns):
            raise ValueError("columns differ in dimension")
        return QMatrix(
            dim, len(columns),
            tuple(tuple(c.entries[i] for c in columns) for i in range(dim)),
        )

    @staticmethod
    def hstack(parts: Sequence["QMatrix"]) -> "QMatrix":
        if not parts:
            raise ValueError("nothing to stack")
        rows = parts[0].rows
        if any(p.rows != rows for p in parts):
            raise ValueError("row counts differ")
        grid = tuple(
            tuple(x for p in parts for x in p.entries[i]) for i in range(rows)
        )
        return QMatrix(rows, sum(p.cols for p in parts), grid)

    def row(self, i: int) -> QVector:
        return QVector(self.entries[i])

    def column(self, j: int) -> QVector:
        return QVector(tuple(row[j] for row in self.entries))

    def columns(self) -> list[QVector]:
        return [self.column(j) for j in range(self.cols)]

    def matvec(self, x: QVector) -> QVector:
        if x.dim != self.cols:
            raise ValueError("dimension mismatch in matvec")
        return QVector(
            tuple(sum((a * b for a, b in zip(row, x.entries)), Q(0)) for row in self.entries)
        )

    def matmul(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in matmul")
        cols = [other.column(j).entries for j in range(other.cols)]
        grid = tuple(
            tuple(sum((a * b for a, b in zip(row, col)), Q(0)) for col in cols)
            for row in self.entries
        )
        return QMatrix(self.rows, other.cols, grid)

    def transpose(self) -> "QMatrix":
        if self.rows == 0:
            raise ValueError("cannot transpose a zero-row matrix")
        return QMatrix(
            self.cols, self.rows,
            tuple(tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)),
        )

    def scale(self, c: Scalar) -> "QMatrix":
        c = rational(c)
        return QMatrix(
            self.rows, self.cols,
            tuple(tuple(c * x for x in row) for row in self.entries),
        )

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for row in self.entries for x in row)

    def to_lines(self) -> str:
        return "\n".join(" ".join(str(x) for x in row) for row in self.entries)


def rref(M: QMatrix) -> tuple[QMatrix, tuple[int, ...], int]:
    """Reduced row echelon form of M with first-nonzero pivoting.

    Returns (R, pivot columns, rank).  Pivots are scanned left to right, top
    to bottom, so the output is deterministic; the row space is preserved
    exactly.
    """
    grid = [list(row) for row in M.entries]
    pivots: list[int] = []
    r = 0
    for c in range(M.cols):
        pivot_row = next((i for i in range(r, M.rows) if grid[i][c] != 0), None)
        if pivot_row is None:
            continue
        grid[r], grid[pivot_row] = grid[pivot_row], grid[r]
        inv = Q(1) / grid[r][c]
        grid[r] = [inv * x for x in grid[r]]
        for i in range(M.rows):
            if i != r and grid[i][c] != 0:
                f = grid[i][c]
                grid[i] = [x - f * y for x, y in zip(grid[i], grid[r])]
        pivots.append(c)
        r += 1
        if r == M.rows:
            break
    R = QMatrix(M.rows, M.cols, tuple(tuple(row) for row in grid))
    return R, tuple(pivots), len(pivots)


def span_membership(basis: Sequence[QVector], target: QVector) -> list[Fraction] | None:
    """Exact coefficients with sum(coeff_i * basis_i) == target, or None.

    Free coordinates of an underdetermined solve are pinned to 0, so for a
    fixed basis order the returned combination is canonical.  The empty basis
    spans only the zero vector.
    """
    if any(b.dim != target.dim for b in basis):
        raise ValueError("span_membership: dimension mismatch")
    if not basis:
        return [] if target.is_zero() else None
    n = len(basis)
    aug = QMatrix(
        target.dim, n + 1,
        tuple(
            tuple([b.entries[i] for b in basis] + [target.entries[i]])
            for i in range(target.dim)
        ),
    )
    R, pivots, _ = rref(aug)
    if n in pivots:
        return None
    coeffs = [Q(0)] * n
    for row_idx, p in enumerate(pivots):
        coeffs[p] = R.entries[row_idx][n]
    return coeffs


def nullspace_basis(M: QMatrix) -> list[QVector]:
    """Rational basis of the kernel {x : Mx = 0}, one vector per free column.

    Each basis vector carries a 1 at its free column and 0 at the other free
    columns, so the free coordinates of any kernel vector are literally its
    entries at those columns.
    """
    R, pivots, _ = rref(M)
    pivot_set = set(pivots)
    basis: list[QVector] = []
    for f in range(M.cols):
        if f in pivot_set:
            continue
        entries = [Q(0)] * M.cols
        entries[f] = Q(1)
        for row_idx, p in enumerate(pivots):
            entries[p] = -R.entries[row_idx][f]
        basis.append(QVector(tuple(entries)))
    return basis


def residual_functionals(vectors: Sequence[QVector], dim: int | None = None) -> QMatrix:
    """Basis, in RREF form, of the functionals annihilating span(vectors).

    The returned matrix R satisfies: R @ w == 0 exactly iff w lies in the
    span.  It has dim - rank rows; a full span yields a zero-row matrix.  For
    an empty vector set `dim` must be given.
    """
    if vectors:
        u = vectors[0].dim
        if any(v.dim != u for v in vectors):
            raise ValueError("residual_functionals: dimension mismatch")
        if dim is not None and dim != u:
            raise ValueError("residual_functionals: dim disagrees with vectors")
    elif dim is None:
        raise ValueError("residual_functionals: dim required for an empty set")
    else:
        u = dim
    if not vectors:
        return QMatrix.identity(u)
    stacked = QMatrix(len(vectors), u, tuple(v.entries for v in vectors))
    annihilator = nullspace_basis(stacked)
    if not annihilator:
        return QMatrix.empty(u)
    R, _, _ = rref(QMatrix(len(annihilator), u, tuple(a.entries for a in annihilator)))
    return R
