"""Sublattices of a fixed rational vector space, indexed by finite kernels.

A full-rank sublattice commensurable with the standard lattice Z^n is
represented by the invertible rational matrix whose columns are a basis,
written in the standard coordinates.  Finite kernel data (a modulus m and
generators in (Z/mZ)^n) maps to such a lattice by adjoining the generators
divided by m; the correspondence is inclusion-preserving and the index of
the standard lattice in the result equals the subgroup order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

from .errors import DimensionMismatchError, NotOverBaseError, SingularMatrixError
from .linalg import Matrix, hnf_columns, rat_inverse, snf


@dataclass(frozen=True)
class KernelData:
    """A finite subgroup of (Z/mZ)^n given by a list of generator vectors."""

    n: int
    modulus: int
    generators: tuple

    def __init__(self, n: int, modulus: int, generators: Sequence[Sequence[int]]):
        if n < 1:
            raise ValueError("dimension must be positive")
        if modulus < 1:
            raise ValueError("modulus must be at least 1")
        gens = tuple(tuple(int(x) % modulus for x in g) for g in generators)
        if any(len(g) != n for g in gens):
            raise ValueError("generator length differs from dimension")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "generators", gens)


class LatticeMatrix:
    """A sublattice of Q^n: columns of ``matrix`` are a basis in standard
    coordinates.  The matrix must be square and nonsingular."""

    def __init__(self, matrix: Matrix):
        if not matrix.is_square:
            raise DimensionMismatchError("lattice basis matrix must be square")
        if matrix.det() == 0:
            raise SingularMatrixError("lattice basis matrix must be nonsingular")
        self.matrix = matrix

    @classmethod
    def from_rows(cls, rows) -> "LatticeMatrix":
        return cls(Matrix(rows))

    @classmethod
    def identity(cls, n: int) -> "LatticeMatrix":
        return cls(Matrix.identity(n))

    @property
    def n(self) -> int:
        return self.matrix.nrows

    @cached_property
    def denominator_bound(self) -> int:
        """Minimal positive integer m with m * matrix integral."""
        return self.matrix.denominator

    @cached_property
    def inverse_matrix(self) -> Matrix:
        return rat_inverse(self.matrix)

    def __eq__(self, other) -> bool:
        return isinstance(other, LatticeMatrix) and self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash(self.matrix)

    def __repr__(self) -> str:
        return f"LatticeMatrix({self.matrix!r})"


@dataclass(frozen=True)
class AbelianGroupInvariants:
    """Structure of a finite abelian group: invariant factors (ascending
    divisibility chain, factors of 1 trimmed) and generator vectors mod
    ``modulus`` that map onto a generating set."""

    factors: tuple
    modulus: int
    generators: tuple

    @property
    def order(self) -> int:
        result = 1
        for f in self.factors:
            result *= f
        return result

    @property
    def is_cyclic(self) -> bool:
        return len(self.factors) <= 1


def lattice_from_kernel(kernel: KernelData) -> LatticeMatrix:
    """Canonical lattice spanned by Z^n together with generator/m vectors.

    The standard lattice has index equal to the order of the subgroup the
    generators generate; empty generator lists (or modulus 1) give the
    identity lattice.
    """
    n, m = kernel.n, kernel.modulus
    columns = [[m if i == j else 0 for i in range(n)] for j in range(n)]
    columns.extend(list(g) for g in kernel.generators)
    h, _ = hnf_columns(Matrix.from_columns(columns))
    return LatticeMatrix(h.scale(Fraction(1, m)))


def canonicalize(lattice: LatticeMatrix) -> LatticeMatrix:
    """Unique representative of the lattice's basis class.

    Scales to an integral matrix, takes the column Hermite form (lower
    triangular, positive diagonal, entries left of the diagonal reduced mod
    the diagonal), and divides the scale back out.  Idempotent; two
    ``LatticeMatrix`` values describe the same lattice exactly when their
    canonical forms have equal entries.
    """
    m = lattice.denominator_bound
    h, _ = hnf_columns(lattice.matrix.scale(m))
    return LatticeMatrix(h.scale(Fraction(1, m)))


def same_lattice(a: LatticeMatrix, b: LatticeMatrix) -> bool:
    return canonicalize(a) == canonicalize(b)


def contains(outer: LatticeMatrix, inner: LatticeMatrix) -> bool:
    """True when every vector of ``inner`` lies in ``outer``."""
    if outer.n != inner.n:
        raise DimensionMismatchError(
            f"dimensions {outer.n} and {inner.n} differ")
    return (outer.inverse_matrix * inner.matrix).is_integral


def index_over_base(lattice: LatticeMatrix) -> Fraction:
    """Generalized index [L : Z^n] = 1/|det M|; an integer when L contains Z^n."""
    return 1 / abs(lattice.matrix.det())


def kernel_structure(lattice: LatticeMatrix) -> AbelianGroupInvariants:
    """Invariant factors and generators of L/Z^n for a lattice L over the base.

    The quotient is isomorphic to Z^n modulo the columns of the inverse
    basis matrix, so its invariant factors are read off the Smith form of
    that inverse.  Generators are the basis columns scaled by the
    denominator bound m and reduced mod m (zero vectors dropped).
    """
    if not contains(lattice, LatticeMatrix.identity(lattice.n)):
        raise NotOverBaseError("lattice does not contain the base lattice")
    d, _, _ = snf(lattice.inverse_matrix)
    factors = tuple(int(d[i, i]) for i in range(lattice.n) if d[i, i] > 1)
    m = lattice.denominator_bound
    generators = []
    for j in range(lattice.n):
        vec = tuple(int(e * m) % m for e in lattice.matrix.column(j))
        if any(vec):
            generators.append(vec)
    return AbelianGroupInvariants(factors, m, tuple(generators))


def compose(first: LatticeMatrix, second: LatticeMatrix) -> LatticeMatrix:
    """Lattice of a composite: ``second`` is expressed in ``first``'s basis,
    and the result is the matrix product relative to the standard basis."""
    if first.n != second.n:
        raise DimensionMismatchError(
            f"dimensions {first.n} and {second.n} differ")
    return LatticeMatrix(first.matrix * second.matrix)


def morphism_between(source: LatticeMatrix,
                     target: LatticeMatrix) -> Optional[Matrix]:
    """The unique lattice map source -> target, or None when none exists.

    When ``target`` contains ``source`` the map is target^-1 * source, an
    integral matrix; otherwise there is no morphism and None is returned.
    """
    if source.n != target.n:
        raise DimensionMismatchError(
            f"dimensions {source.n} and {target.n} differ")
    candidate = target.inverse_matrix * source.matrix
    return candidate if candidate.is_integral else None
