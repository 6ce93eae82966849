"""Exact scalar arithmetic and integer-matrix normal forms.

Everything in this module is pure and exact: scalars are arbitrary-precision
rationals (``fractions.Fraction``) or residues with an explicit modulus, and
the normal-form routines (column Hermite form, Smith form) work over the
integers with unimodular transforms, so every result can be checked by
multiplying back.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence, Union

from .errors import (
    DimensionMismatchError,
    RankDeficientError,
    SingularMatrixError,
)

#: The exact rational scalar used throughout the package.  ``Fraction``
#: already maintains the invariants we need (positive denominator, lowest
#: terms after every operation).
ExactRational = Fraction

Scalar = Union[int, Fraction, str]


@dataclass(frozen=True)
class ResidueInt:
    """An integer modulo ``modulus``; mixed-modulus arithmetic is rejected."""

    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError("modulus must be at least 2")
        object.__setattr__(self, "value", self.value % self.modulus)

    def _check(self, other: "ResidueInt") -> None:
        if not isinstance(other, ResidueInt):
            raise TypeError("expected a ResidueInt")
        if other.modulus != self.modulus:
            raise ValueError(
                f"modulus mismatch: {self.modulus} vs {other.modulus}")

    def __add__(self, other: "ResidueInt") -> "ResidueInt":
        self._check(other)
        return ResidueInt(self.value + other.value, self.modulus)

    def __sub__(self, other: "ResidueInt") -> "ResidueInt":
        self._check(other)
        return ResidueInt(self.value - other.value, self.modulus)

    def __mul__(self, other: "ResidueInt") -> "ResidueInt":
        self._check(other)
        return ResidueInt(self.value * other.value, self.modulus)

    def __neg__(self) -> "ResidueInt":
        return ResidueInt(-self.value, self.modulus)

    def inverse(self) -> "ResidueInt":
        if gcd(self.value, self.modulus) != 1:
            raise ValueError(f"{self.value} is not invertible mod {self.modulus}")
        return ResidueInt(pow(self.value, -1, self.modulus), self.modulus)

    def __int__(self) -> int:
        return self.value


class Matrix:
    """Immutable matrix with exact rational entries.

    Entries may be given as ints, ``Fraction`` objects, or strings such as
    ``"2/3"``.  All operations return new matrices; nothing is mutated.
    """

    __slots__ = ("_rows",)

    def __init__(self, rows: Iterable[Iterable[Scalar]]):
        converted = tuple(tuple(Fraction(e) for e in row) for row in rows)
        if not converted or not converted[0]:
            raise ValueError("matrix dimensions must be positive")
        width = len(converted[0])
        if any(len(r) != width for r in converted):
            raise ValueError("rows have inconsistent lengths")
        self._rows = converted

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, entries: Sequence[Scalar]) -> "Matrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)]
                    for i in range(n)])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Scalar]]) -> "Matrix":
        return cls(list(zip(*columns)))

    @property
    def nrows(self) -> int:
        return len(self._rows)

    @property
    def ncols(self) -> int:
        return len(self._rows[0])

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __getitem__(self, key) -> Fraction:
        i, j = key
        return self._rows[i][j]

    def rows(self) -> tuple:
        return self._rows

    def row(self, i: int) -> tuple:
        return self._rows[i]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self._rows)

    def columns(self) -> tuple:
        return tuple(self.column(j) for j in range(self.ncols))

    def transpose(self) -> "Matrix":
        return Matrix(zip(*self._rows))

    def __eq__(self, other) -> bool:
        return isinstance(other, Matrix) and self._rows == other._rows

    def __hash__(self) -> int:
        return hash(self._rows)

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(e) for e in row) for row in self._rows)
        return f"Matrix[{body}]"

    def __neg__(self) -> "Matrix":
        return Matrix([[-e for e in row] for row in self._rows])

    def __add__(self, other: "Matrix") -> "Matrix":
        self._require_same_shape(other)
        return Matrix([[a + b for a, b in zip(r, s)]
                       for r, s in zip(self._rows, other._rows)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._require_same_shape(other)
        return Matrix([[a - b for a, b in zip(r, s)]
                       for r, s in zip(self._rows, other._rows)])

    def _require_same_shape(self, other: "Matrix") -> None:
        if self.nrows != other.nrows or self.ncols != other.ncols:
            raise DimensionMismatchError(
                f"shapes {self.nrows}x{self.ncols} and "
                f"{other.nrows}x{other.ncols} differ")

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise DimensionMismatchError(
                    f"cannot multiply {self.nrows}x{self.ncols} by "
                    f"{other.nrows}x{other.ncols}")
            cols = other.columns()
            return Matrix([[sum(a * b for a, b in zip(row, col))
                            for col in cols] for row in self._rows])
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, scalar: Scalar) -> "Matrix":
        s = Fraction(scalar)
        return Matrix([[s * e for e in row] for row in self._rows])

    @property
    def is_integral(self) -> bool:
        return all(e.denominator == 1 for row in self._rows for e in row)

    @property
    def denominator(self) -> int:
        """Least positive integer d such that d times the matrix is integral."""
        d = 1
        for row in self._rows:
            for e in row:
                d = lcm(d, e.denominator)
        return d

    def int_rows(self) -> list:
        if not self.is_integral:
            raise ValueError("matrix is not integral")
        return [[int(e) for e in row] for row in self._rows]

    def det(self) -> Fraction:
        """Determinant by exact fraction-based Gaussian elimination."""
        if not self.is_square:
            raise DimensionMismatchError("determinant needs a square matrix")
        n = self.nrows
        work = [list(row) for row in self._rows]
        result = Fraction(1)
        for c in range(n):
            pivot = next((r for r in range(c, n) if work[r][c] != 0), None)
            if pivot is None:
                return Fraction(0)
            if pivot != c:
                work[c], work[pivot] = work[pivot], work[c]
                result = -result
            result *= work[c][c]
            inv = 1 / work[c][c]
            for r in range(c + 1, n):
                if work[r][c] != 0:
                    factor = work[r][c] * inv
                    work[r] = [a - factor * b for a, b in zip(work[r], work[c])]
        return result

    def inverse(self) -> "Matrix":
        return rat_inverse(self)


def rat_inverse(m: Matrix) -> Matrix:
    """Exact inverse of a square nonsingular rational matrix."""
    if not m.is_square:
        raise DimensionMismatchError("inverse needs a square matrix")
    n = m.nrows
    work = [list(row) + [Fraction(int(i == j)) for j in range(n)]
            for i, row in enumerate(m.rows())]
    for c in range(n):
        pivot = next((r for r in range(c, n) if work[r][c] != 0), None)
        if pivot is None:
            raise SingularMatrixError("matrix is singular")
        if pivot != c:
            work[c], work[pivot] = work[pivot], work[c]
        inv = 1 / work[c][c]
        work[c] = [e * inv for e in work[c]]
        for r in range(n):
            if r != c and work[r][c] != 0:
                factor = work[r][c]
                work[r] = [a - factor * b for a, b in zip(work[r], work[c])]
    return Matrix([row[n:] for row in work])


def _swap_columns(rows: list, a: int, b: int) -> None:
    for row in rows:
        row[a], row[b] = row[b], row[a]


def _negate_column(rows: list, j: int) -> None:
    for row in rows:
        row[j] = -row[j]


def _add_column_multiple(rows: list, target: int, source: int, q: int) -> None:
    # column[target] += q * column[source]
    for row in rows:
        row[target] += q * row[source]


def hnf_columns(m: Matrix) -> tuple:
    """Column Hermite normal form of an integral matrix of full row rank.

    Returns ``(H, proof)`` where ``H`` is square lower-triangular with
    strictly positive diagonal, the entries left of the diagonal in each row
    lie in ``{0, ..., H[i][i]-1}``, the columns of ``H`` span the same
    lattice as the columns of ``m``, and ``m * proof == H`` records the
    column operations.

    Raises ``RankDeficientError`` when the columns span a lattice of rank
    below the row count.
    """
    if not m.is_integral:
        raise ValueError("Hermite form requires integer entries")
    n, k = m.nrows, m.ncols
    work = [[int(e) for e in row] for row in m.rows()]
    trans = [[int(i == j) for j in range(k)] for i in range(k)]

    for i in range(n):
        while True:
            candidates = [j for j in range(i, k) if work[i][j] != 0]
            if not candidates:
                raise RankDeficientError(
                    f"columns span a lattice of rank below {n}")
            best = min(candidates, key=lambda j: abs(work[i][j]))
            if best != i:
                _swap_columns(work, i, best)
                _swap_columns(trans, i, best)
            if work[i][i] < 0:
                _negate_column(work, i)
                _negate_column(trans, i)
            done = True
            for j in range(i + 1, k):
                if work[i][j] != 0:
                    q = work[i][j] // work[i][i]
                    _add_column_multiple(work, j, i, -q)
                    _add_column_multiple(trans, j, i, -q)
                    if work[i][j] != 0:
                        done = False
            if done:
                break

    # Reduce entries left of each diagonal into [0, pivot).
    for i in range(1, n):
        for j in range(i):
            q = work[i][j] // work[i][i]
            if q != 0:
                _add_column_multiple(work, j, i, -q)
                _add_column_multiple(trans, j, i, -q)

    h = Matrix([row[:n] for row in work])
    proof = Matrix([row[:n] for row in trans])
    return h, proof


def snf(m: Matrix) -> tuple:
    """Smith normal form of a square nonsingular integral matrix.

    Returns ``(D, U, V)`` with ``U * m * V == D`` where ``D`` is diagonal
    with positive entries forming a divisibility chain and ``U``, ``V`` are
    unimodular.
    """
    if not m.is_square:
        raise DimensionMismatchError("Smith form needs a square matrix")
    if not m.is_integral:
        raise ValueError("Smith form requires integer entries")
    n = m.nrows
    work = [[int(e) for e in row] for row in m.rows()]
    left = [[int(i == j) for j in range(n)] for i in range(n)]
    right = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(a, b):
        work[a], work[b] = work[b], work[a]
        left[a], left[b] = left[b], left[a]

    def add_row_multiple(target, source, q):
        work[target] = [x + q * y for x, y in zip(work[target], work[source])]
        left[target] = [x + q * y for x, y in zip(left[target], left[source])]

    def negate_row(a):
        work[a] = [-x for x in work[a]]
        left[a] = [-x for x in left[a]]

    for t in range(n):
        while True:
            entries = [(abs(work[r][c]), r, c)
                       for r in range(t, n) for c in range(t, n)
                       if work[r][c] != 0]
            if not entries:
                raise SingularMatrixError("matrix is singular")
            _, r, c = min(entries)
            if r != t:
                swap_rows(t, r)
            if c != t:
                _swap_columns(work, t, c)
                _swap_columns(right, t, c)
            pivot = work[t][t]
            clean = True
            for r in range(t + 1, n):
                if work[r][t] != 0:
                    add_row_multiple(r, t, -(work[r][t] // pivot))
                    if work[r][t] != 0:
                        clean = False
            for c in range(t + 1, n):
                if work[t][c] != 0:
                    q = work[t][c] // pivot
                    _add_column_multiple(work, c, t, -q)
                    _add_column_multiple(right, c, t, -q)
                    if work[t][c] != 0:
                        clean = False
            if not clean:
                continue
            # Pivot divides every remaining entry, or we merge the offending
            # row into row t and start over.
            offender = None
            for r in range(t + 1, n):
                for c in range(t + 1, n):
                    if work[r][c] % pivot != 0:
                        offender = r
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row_multiple(t, offender, 1)
        if work[t][t] < 0:
            negate_row(t)

    d = Matrix(work)
    return d, Matrix(left), Matrix(right)


def invariant_factors(m: Matrix) -> tuple:
    """Diagonal of the Smith form of ``m`` as a tuple of positive integers."""
    d, _, _ = snf(m)
    return tuple(int(d[i, i]) for i in range(m.nrows))
